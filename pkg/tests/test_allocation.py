from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from landmms.allocation import (Allocation, NormalizedAgent, allocate_fat, allocate_four, allocate_pipeline,
                                allocate_recursive, allocate_three, allocate_two, allocation_problems, nfat_parts,
                                parts_for, select_disjoint_representatives, v_req)
from landmms.errors import AllocationInvariantError, NoFeasiblePartition, NoSelection
from landmms.geometry import Shape, is_square, pairwise_s_separated, rect
from landmms.instances import UNIT_SQUARE, Instance, gen_crossing_fixture, gen_random, gen_uniform
from landmms.valuation import GridValuation
from layouts import (agent, bottom_heavy_four, five_stack, four_others_hold, mixed_agents, three_all_hold,
                     two_parts_stack, two_value_stack)


def values_at_least_one(alloc, agents):
    return all(a.v.value_of(alloc.assignments[a.name]) >= 1 for a in agents)


def test_v_req_table():
    assert [v_req(n) for n in range(1, 7)] == [1, 7, 17, 34, 68, 136]
    with pytest.raises(ValueError):
        v_req(0)


def test_nfat_parts():
    assert nfat_parts(1, 2) == 3
    assert nfat_parts(1, 3) == 7
    assert nfat_parts(2, 2) == 4
    assert nfat_parts(F(5, 2), 2) == 5
    assert nfat_parts(3, 1) == 1


def test_parts_for():
    assert [parts_for(n) for n in range(1, 6)] == [1, 3, 14, 24, 128]


def test_allocation_rejects_close_pieces():
    with pytest.raises(AllocationInvariantError):
        Allocation({"A": rect(0, F(1, 2), 0, 1), "B": rect(F(1, 2), 1, 0, 1)}, UNIT_SQUARE, F(1, 10))
    problems = allocation_problems({"A": rect(0, 2, 0, 1)}, UNIT_SQUARE, 0, Shape("square"))
    assert len(problems) == 2


def test_allocation_json_round_trip():
    alloc = Allocation({"A": rect(0, F(1, 3), 0, 1), "B": rect(F(2, 3), 1, 0, 1)}, UNIT_SQUARE, F(1, 3),
                       trace=["x"])
    assert Allocation.from_json(alloc.to_json()) == alloc


def test_select_representatives_crossing_fails():
    vertical, horizontal = gen_crossing_fixture(2, F(1, 2))
    with pytest.raises(NoSelection):
        select_disjoint_representatives([vertical, horizontal], 2)


def test_select_representatives_rejects_thin_rects():
    with pytest.raises(ValueError):
        select_disjoint_representatives([[rect(0, 3, 0, 1)], [rect(5, 6, 0, 1)]], 2)


@settings(max_examples=300)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_greedy_selection_with_enough_squares(n, seed):
    import random
    rng = random.Random(seed)
    size = nfat_parts(1, n)
    sets = []
    for _ in range(n):
        chosen = []
        while len(chosen) < size:
            side = F(rng.randint(1, 4), 8)
            x, y = F(rng.randint(0, 40), 8), F(rng.randint(0, 40), 8)
            q = rect(x, x + side, y, y + side)
            if all(q.x_hi <= p.x_lo or p.x_hi <= q.x_lo or q.y_hi <= p.y_lo or p.y_hi <= q.y_lo for p in chosen):
                chosen.append(q)
        sets.append(chosen)
    picked = select_disjoint_representatives(sets, 1)
    assert all(q in s for q, s in zip(picked, sets))
    assert pairwise_s_separated(picked, 0)


def test_allocate_fat_squares():
    inst = gen_uniform(UNIT_SQUARE, 2, F(1, 10), Shape("square"))
    third = [rect(0, F(3, 10), 0, F(3, 10)), rect(F(7, 10), 1, 0, F(3, 10)), rect(0, F(3, 10), F(7, 10), 1)]
    alloc = allocate_fat(inst, 1, {"A": third, "B": third})
    assert all(is_square(q) for q in alloc.assignments.values())
    assert pairwise_s_separated(alloc.assignments.values(), F(1, 10))
    assert alloc.shape == Shape("square")


def test_allocate_fat_rejects_non_separated_partition():
    inst = gen_uniform(UNIT_SQUARE, 2, F(1, 10), Shape("square"))
    close = [rect(0, F(1, 2), 0, F(1, 2)), rect(F(1, 2), 1, 0, F(1, 2))]
    with pytest.raises(ValueError):
        allocate_fat(inst, 1, {"A": close, "B": close})


@pytest.mark.parametrize("high", [False, True])
def test_two_agents_parts_stack(high):
    agents, s = two_parts_stack(high)
    alloc = allocate_two(agents, UNIT_SQUARE, s)
    assert alloc.trace == ["two[parts]:stack:" + ("high" if high else "low")]
    assert values_at_least_one(alloc, agents)


@pytest.mark.parametrize("high", [False, True])
def test_two_agents_value_stack(high):
    agents, s = two_value_stack(high)
    alloc = allocate_two(agents, UNIT_SQUARE, s, "subset_V7")
    assert alloc.trace == ["two[value]:stack:" + ("high" if high else "low")]
    assert values_at_least_one(alloc, agents)


def test_two_agents_mode_preconditions():
    agents, s = two_parts_stack(False)
    with pytest.raises(ValueError):
        allocate_two(agents, UNIT_SQUARE, s, "subset_V7")
    with pytest.raises(ValueError):
        allocate_two(agents, UNIT_SQUARE, s, "whatever")


@pytest.mark.parametrize("seed,label", [(9, "cut"), (0, "stack:H=0"), (49, "stack:H=1"), (147, "stack:H=2")])
def test_three_agents_parts_branches(seed, label):
    agents, s = mixed_agents(seed, 3, 14)
    alloc = allocate_three(agents, UNIT_SQUARE, s)
    assert alloc.trace[0] == f"three[parts]:{label}"
    assert values_at_least_one(alloc, agents)


def test_three_agents_everyone_holds():
    agents, s = three_all_hold()
    alloc = allocate_three(agents, UNIT_SQUARE, s, "subset17")
    assert alloc.trace[0] == "three[value]:stack:H=3"
    assert values_at_least_one(alloc, agents)


@pytest.mark.parametrize("seed,label", [(16, "four:cut"), (0, "four:stack:owner-alone"), (7, "four:stack:one-holds"),
                                        (35, "four:stack:two-hold"), (22, "four:stack:pair-completion")])
def test_four_agents_branches(seed, label):
    agents, s = mixed_agents(seed, 4, 24)
    alloc = allocate_four(agents, UNIT_SQUARE, s)
    assert alloc.trace[0] == label
    assert values_at_least_one(alloc, agents)


def test_four_agents_three_hold_seventeen():
    agents, s = bottom_heavy_four(46)
    alloc = allocate_four(agents, UNIT_SQUARE, s)
    assert alloc.trace[0] == "four:stack:three-hold"
    assert values_at_least_one(alloc, agents)


def test_four_agents_all_hold_seventeen():
    agents, s = four_others_hold()
    alloc = allocate_four(agents, UNIT_SQUARE, s)
    assert alloc.trace[0] == "four:stack:others-hold"
    assert values_at_least_one(alloc, agents)


@pytest.mark.parametrize("case", ["none", "some", "all"])
def test_recursive_five_agents(case):
    agents, s = five_stack(case)
    alloc = allocate_recursive(agents, UNIT_SQUARE, s)
    assert alloc.trace[0] == f"recursive[n=5]:stack:{case}"
    assert values_at_least_one(alloc, agents)


def test_recursive_routes_to_dedicated_procedures():
    agents, s = mixed_agents(9, 3, 14)
    alloc = allocate_recursive(agents, UNIT_SQUARE, s)
    assert alloc.trace[0].startswith("three[parts]")


def test_recursive_requires_enough_value():
    agents = [agent(name, [rect(0, 1, 0, 1)]) for name in "AB"]
    with pytest.raises(ValueError):
        allocate_recursive(agents, UNIT_SQUARE, 0)


@pytest.mark.parametrize("seed", range(3))
def test_pipeline_two_agents(seed):
    inst = gen_random(seed, UNIT_SQUARE, 2, F(1, 10))
    alloc, report = allocate_pipeline(inst, F(1, 10))
    assert report["k_hat"] == 3 and report["v_req"] == "7"
    for name, v in inst.agents:
        entry = report["agents"][name]
        assert entry["meets_bound"]
        assert F(entry["achieved"]) == v.value_of(alloc.assignments[name])
        assert entry["queries"]["cut"] > 0
    assert pairwise_s_separated(alloc.assignments.values(), F(1, 10))


def test_pipeline_single_agent_gets_everything():
    inst = gen_random(0, UNIT_SQUARE, 1, 0)
    alloc, _ = allocate_pipeline(inst, F(1, 10))
    assert alloc.assignments == {"A": UNIT_SQUARE}


def test_pipeline_three_uniform_agents():
    inst = gen_uniform(UNIT_SQUARE, 3, F(1, 100))
    alloc, report = allocate_pipeline(inst, F(1, 4))
    assert report["general_mms_k"] == 4 * 14 * 14
    assert all(e["meets_bound"] for e in report["agents"].values())


def test_pipeline_rejects_worthless_agent():
    dead = GridValuation((F(0), F(1)), (F(0), F(1)), ((F(0),),))
    inst = Instance(UNIT_SQUARE, 0, (("A", dead),))
    with pytest.raises(NoFeasiblePartition):
        allocate_pipeline(inst, F(1, 10))


def test_pipeline_rejects_square_regime():
    with pytest.raises(ValueError):
        allocate_pipeline(gen_uniform(UNIT_SQUARE, 2, 0, Shape("square")), F(1, 10))


@settings(max_examples=300)
@given(st.integers(0, 10**6), st.sampled_from([F(0), F(1, 50), F(1, 10)]), st.booleans())
def test_two_agent_allocations_are_always_separated(seed, s, value_mode):
    from landmms.instances import gen_planted_guillotine
    import random
    rng = random.Random(seed)
    k = 7 if value_mode else 3
    agents = [agent(name, gen_planted_guillotine(rng.randrange(10**6), k, s, unit=F(1, 100))[1]) for name in "AB"]
    alloc = allocate_two(agents, UNIT_SQUARE, s, "subset_V7" if value_mode else "whole_land_k3")
    assert not allocation_problems(alloc.assignments, UNIT_SQUARE, s)
    assert values_at_least_one(alloc, agents)
