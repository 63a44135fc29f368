import copy
import itertools
import math
from fractions import Fraction as F

import pytest

from landmms.errors import InstanceFormatError
from landmms.geometry import Shape, fatness, is_s_separated, overlaps, pairwise_s_separated, rect
from landmms.instances import (UNIT_SQUARE, Instance, gen_crossing_fixture, gen_planted_bands, gen_planted_grid,
                               gen_planted_guillotine, gen_polygon_fixture, gen_random, gen_uniform, load, save,
                               selections_all_close)
from landmms.partition import Partition, certify_guillotine


def test_uniform_instance():
    inst = gen_uniform(UNIT_SQUARE, 3, F(1, 10))
    assert inst.names == ["A", "B", "C"]
    assert inst.valuation("B").total == 1


def test_random_instance_is_seeded_and_normalized():
    a = gen_random(7, UNIT_SQUARE, 2, 0)
    b = gen_random(7, UNIT_SQUARE, 2, 0)
    assert a == b
    assert all(v.total == 1 for _, v in a.agents)
    assert len(a.agents[0][1].x_coords) == 7
    assert gen_random(8, UNIT_SQUARE, 2, 0) != a


def test_file_round_trip(tmp_path):
    inst = gen_random(1, UNIT_SQUARE, 2, F(3, 10), shape=Shape("fat", 2))
    path = tmp_path / "inst.json"
    save(inst, path)
    assert load(path) == inst


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d.pop("s"), "s"),
    (lambda d: d["agents"][0].update(cells=[["x"]]), "agents[0].cells"),
    (lambda d: d.update(shape="hex"), "shape"),
    (lambda d: d.update(land={"x": ["1", "0"], "y": ["0", "1"]}), "land"),
])
def test_malformed_instances_name_the_field(mutate, where):
    data = gen_uniform(UNIT_SQUARE, 2, F(1, 10)).to_json()
    mutate(data)
    with pytest.raises(InstanceFormatError) as info:
        Instance.from_json(data)
    assert info.value.path == where


def test_duplicate_names_rejected():
    data = gen_uniform(UNIT_SQUARE, 2, 0).to_json()
    data["agents"][1]["name"] = "A"
    with pytest.raises(InstanceFormatError):
        Instance.from_json(data)


def test_load_rejects_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InstanceFormatError):
        load(path)


@pytest.mark.parametrize("r", [1, 2, 3, F(5, 2)])
def test_crossing_fixture_sets(r):
    # the overhang must keep the long side within r times the unit width
    eps = (F(r) - math.ceil(r) + 1) / 2
    vertical, horizontal = gen_crossing_fixture(r, eps)
    for qs in (vertical, horizontal):
        assert all(fatness(q) <= r for q in qs)
        assert not any(overlaps(a, b) for a, b in itertools.combinations(qs, 2))
    assert all(overlaps(a, b) for a in vertical for b in horizontal)


def test_crossing_fixture_rejects_too_long_overhang():
    with pytest.raises(ValueError):
        gen_crossing_fixture(1, F(1, 4))


@pytest.mark.parametrize("n", [2, 3])
def test_polygon_fixture_invariants(n):
    s = F(1, 10)
    fx = gen_polygon_fixture(n, s)
    eps = fx.pool_eps
    assert fx.within_set_distance() > s + 2 * eps
    assert fx.best_selection_distance() < s - 4 * eps
    pools = [fx.pools(i) for i in range(n)]
    assert all(pairwise_s_separated(p, s) for p in pools)
    assert selections_all_close(pools, s)
    for (name, v), p in zip(fx.instance.agents, pools):
        assert [v.value_of(q) for q in p] == [1] * n


def test_planted_guillotine_parts():
    v, parts = gen_planted_guillotine(3, 6, F(1, 20))
    assert len(parts) == 6
    assert pairwise_s_separated(parts, F(1, 20))
    assert certify_guillotine(Partition(tuple(parts), UNIT_SQUARE), F(1, 20)) is not None
    assert all(v.value_of(q) == F(1, 6) for q in parts)
    assert v.total == 1


def test_planted_grid_and_bands():
    v, parts = gen_planted_grid(1, 2, 3, F(1, 10))
    assert len(parts) == 6 and pairwise_s_separated(parts, F(1, 10))
    assert v.total == 1
    bands = gen_planted_bands(2, 5, F(1, 10))
    assert len(bands) == 5
    assert all(is_s_separated(a, b, F(1, 10)) for a, b in zip(bands, bands[1:]))
    assert all(q.width == 1 for q in bands)
    with pytest.raises(ValueError):
        gen_planted_bands(0, 20, F(1, 10))
