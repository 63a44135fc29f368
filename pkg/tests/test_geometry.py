from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from landmms.geometry import (Rect, Shape, fatness, format_rational, is_r_fat, is_s_separated, is_square,
                              linf_distance, overlaps, pairwise_s_separated, parse_rational, rect, unwrap, wrap)
from strategies import proper_rects, rects, seps


def test_parse_and_format_round_trip():
    assert parse_rational("3/10") == F(3, 10)
    assert parse_rational("-2") == F(-2)
    assert format_rational(F(6, 4)) == "3/2"
    assert format_rational(F(2)) == "2"
    for bad in ("one half", "0.25", "1/0", ""):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_floats_are_rejected_as_coordinates():
    with pytest.raises(TypeError):
        Rect(0.1, 1, 0, 1)


def test_rect_rejects_inverted_sides():
    with pytest.raises(ValueError):
        rect(1, 0, 0, 1)


def test_distance_examples():
    a = rect(0, 1, 0, 1)
    assert linf_distance(a, rect(2, 3, 0, 1)) == 1
    assert linf_distance(a, rect(2, 3, 5, 6)) == 4
    assert linf_distance(a, rect(1, 2, 0, 1)) == 0
    assert linf_distance(a, rect(F(1, 2), 2, F(1, 2), 2)) == 0


def test_touching_rects_are_disjoint_but_not_separated():
    a, b = rect(0, 1, 0, 1), rect(1, 2, 0, 1)
    assert not overlaps(a, b)
    assert is_s_separated(a, b, 0)
    assert not is_s_separated(a, b, F(1, 10))


def test_separation_is_inclusive():
    assert is_s_separated(rect(0, 1, 0, 1), rect(F(3, 2), 2, 0, 1), F(1, 2))


def test_wrap_and_unwrap():
    q = rect(0, 1, 0, 2)
    w = wrap(q, F(1, 2))
    assert w == rect(F(-1, 4), F(5, 4), F(-1, 4), F(9, 4))
    assert unwrap(w, F(1, 2)) == q


def test_fatness():
    assert fatness(rect(0, 2, 0, 1)) == 2
    assert is_r_fat(rect(0, 3, 0, 1), 3)
    assert not is_r_fat(rect(0, 3, 0, 1), F(5, 2))
    assert is_square(rect(0, 1, 1, 2))
    with pytest.raises(ValueError):
        fatness(rect(0, 0, 0, 1))


def test_pairwise_helpers():
    qs = [rect(0, 1, 0, 1), rect(2, 3, 0, 1), rect(0, 1, 2, 3)]
    assert pairwise_s_separated(qs, 1)
    assert not pairwise_s_separated(qs, F(3, 2))


def test_shape_parsing_and_admission():
    assert Shape.parse("rect") == Shape("rectangle")
    assert Shape.parse("fat:2").r == 2
    assert Shape.parse("square").admits(rect(0, 1, 0, 1))
    assert not Shape.parse("square").admits(rect(0, 2, 0, 1))
    assert Shape.parse("fat:2").admits(rect(0, 2, 0, 1))
    assert not Shape().admits(rect(0, 0, 0, 1))
    for text in ("square", "rect", "fat:3/2"):
        sh = Shape.parse(text)
        assert Shape.from_json(sh.to_json()) == sh
    with pytest.raises(ValueError):
        Shape.parse("circle")
    with pytest.raises(ValueError):
        Shape("fat", F(1, 2))


@settings(max_examples=1500)
@given(proper_rects(), proper_rects(), seps)
def test_wrap_equivalence(a, b, s):
    # separated exactly when the inflated copies share no interior
    assert is_s_separated(a, b, s) == (not overlaps(wrap(a, s), wrap(b, s)))


@settings(max_examples=500)
@given(rects(), rects())
def test_distance_is_symmetric_and_nonnegative(a, b):
    d = linf_distance(a, b)
    assert d >= 0
    assert d == linf_distance(b, a)
    assert linf_distance(a, a) == 0


@settings(max_examples=500)
@given(proper_rects(), seps)
def test_unwrap_inverts_wrap(q, s):
    assert unwrap(wrap(q, s), s) == q


@settings(max_examples=300)
@given(proper_rects(), st.fractions(min_value=1, max_value=5, max_denominator=4))
def test_fatness_matches_admission(q, r):
    assert is_r_fat(q, r) == Shape("fat", r).admits(q)
