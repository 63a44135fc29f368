"""Hypothesis strategies shared by the property tests."""
from fractions import Fraction as F

from hypothesis import strategies as st

from landmms.geometry import Rect
from landmms.valuation import GridValuation

small = st.fractions(min_value=-4, max_value=4, max_denominator=12)
seps = st.fractions(min_value=0, max_value=1, max_denominator=12)


@st.composite
def rects(draw, lo=-4, hi=4, den=12):
    coord = st.fractions(min_value=lo, max_value=hi, max_denominator=den)
    x0, x1 = sorted((draw(coord), draw(coord)))
    y0, y1 = sorted((draw(coord), draw(coord)))
    return Rect(x0, x1, y0, y1)


@st.composite
def proper_rects(draw, lo=-4, hi=4, den=12):
    q = draw(rects(lo, hi, den))
    if q.width == 0:
        q = Rect(q.x_lo, q.x_lo + F(1, den), q.y_lo, q.y_hi)
    if q.height == 0:
        q = Rect(q.x_lo, q.x_hi, q.y_lo, q.y_lo + F(1, den))
    return q


@st.composite
def valuations(draw, max_cols=5, max_rows=5):
    """Random piecewise-uniform valuations on a random grid over the unit square."""
    cols = draw(st.integers(1, max_cols))
    rows = draw(st.integers(1, max_rows))
    inner = st.fractions(min_value=F(1, 50), max_value=F(49, 50), max_denominator=50)
    xs = sorted(set(draw(st.lists(inner, max_size=cols - 1))) | {F(0), F(1)})
    ys = sorted(set(draw(st.lists(inner, max_size=rows - 1))) | {F(0), F(1)})
    cells = tuple(tuple(F(draw(st.integers(0, 9))) for _ in range(len(ys) - 1)) for _ in range(len(xs) - 1))
    return GridValuation(tuple(xs), tuple(ys), cells)
