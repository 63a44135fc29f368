"""Moving-knife search for cuts and stacks.

A knife is a strip of width ``s``. A *vertical* knife is a vertical strip that
sweeps left to right; when it cannot deliver the requested cut it exposes a
stack of rectangles ordered bottom to top, each pair at vertical distance at
least ``s``. Horizontal knives are handled by transposing the plane.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Sequence, Union

from .errors import AllocationInvariantError
from .geometry import Number, Rect, as_fraction, is_s_separated
from .valuation import HORIZONTAL, VERTICAL, GridValuation, QueryLog, cut_query, direction, eval_query


@dataclass(frozen=True)
class Cut:
    """Knife strip ``[lo, hi]`` across the region, with what lies on each side."""

    axis: str
    lo: Fraction
    hi: Fraction
    low_amount: Fraction
    high_amount: Fraction

    def low_piece(self, region: Rect) -> Rect:
        if self.axis == VERTICAL:
            return Rect(region.x_lo, self.lo, region.y_lo, region.y_hi)
        return Rect(region.x_lo, region.x_hi, region.y_lo, self.lo)

    def high_piece(self, region: Rect) -> Rect:
        if self.axis == VERTICAL:
            return Rect(self.hi, region.x_hi, region.y_lo, region.y_hi)
        return Rect(region.x_lo, region.x_hi, self.hi, region.y_hi)

    def strip(self, region: Rect) -> Rect:
        if self.axis == VERTICAL:
            return Rect(self.lo, self.hi, region.y_lo, region.y_hi)
        return Rect(region.x_lo, region.x_hi, self.lo, self.hi)


@dataclass(frozen=True)
class Stack:
    """Rectangles met by the knife, ordered along the knife's own direction."""

    axis: str
    rects: tuple[Rect, ...]

    def __len__(self) -> int:
        return len(self.rects)

    @property
    def bottoms(self) -> list[Fraction]:
        if self.axis == VERTICAL:
            return [r.y_lo for r in self.rects]
        return [r.x_lo for r in self.rects]

    @property
    def tops(self) -> list[Fraction]:
        if self.axis == VERTICAL:
            return [r.y_hi for r in self.rects]
        return [r.x_hi for r in self.rects]


CutOrStack = Union[Cut, Stack]


def _transpose_result(res: Cut | Stack) -> Cut | Stack:
    if isinstance(res, Cut):
        return Cut(HORIZONTAL, res.lo, res.hi, res.low_amount, res.high_amount)
    return Stack(HORIZONTAL, tuple(r.transposed() for r in res.rects))


def _check_stack(rects: Sequence[Rect], s: Fraction) -> None:
    for lower, upper in zip(rects, rects[1:]):
        if lower.y_hi + s > upper.y_lo:
            raise AllocationInvariantError(f"stack members {lower} and {upper} are closer than {s}")


def find_rectangle_cut_or_stack(parts: Sequence[Rect], region: Rect, axis: str,
                                p: int, q: int, s: Number) -> Cut | Stack:
    """Either a p:q-rectangle cut or a (k-p-q+2)-rectangle stack, k = len(parts).

    The knife stops at the first position with ``p`` whole parts on its low
    side, possibly beyond the region. If fewer than ``q`` whole parts remain
    on the high side, the parts met by the knife nudged slightly back form
    the stack.
    """
    s = as_fraction(s)
    parts = list(parts)
    k = len(parts)
    if not (1 <= p <= k and 1 <= q <= k and p + q <= k + 1):
        raise ValueError(f"need 1 <= p, q <= k and p + q <= k + 1 (p={p}, q={q}, k={k})")
    for i in range(k):
        for j in range(i + 1, k):
            if not is_s_separated(parts[i], parts[j], s):
                raise ValueError(f"parts {parts[i]} and {parts[j]} are not {s}-separated")
    if direction(axis) == HORIZONTAL:
        res = find_rectangle_cut_or_stack([r.transposed() for r in parts], region.transposed(),
                                          VERTICAL, p, q, s)
        return _transpose_result(res)

    a = sorted(r.x_hi for r in parts)[p - 1]
    left = sum(1 for r in parts if r.x_hi <= a)
    right = sum(1 for r in parts if r.x_lo >= a + s)
    if right >= q:
        return Cut(VERTICAL, a, a + s, Fraction(left), Fraction(right))

    # nudge the knife left by less than any gap between its edges and a part edge
    gaps = [abs(e - knife_edge) for r in parts for e in (r.x_lo, r.x_hi) for knife_edge in (a, a + s)]
    gaps = [g for g in gaps if g > 0]
    eta = min(gaps) / 2 if gaps else Fraction(1)
    a_nudged = a - eta
    members = sorted((r for r in parts if r.x_hi > a_nudged and r.x_lo < a_nudged + s),
                     key=lambda r: (r.y_lo, r.y_hi, r.x_lo))
    if len(members) < k - p - q + 2:
        raise AllocationInvariantError(
            f"knife met {len(members)} parts, expected at least {k - p - q + 2}")
    _check_stack(members, s)
    return Stack(VERTICAL, tuple(members))


def stack_bound(value: Fraction, p: int, q: int) -> int:
    return max(0, ceil(Fraction(floor(value) - p - q, 2)))


def find_value_cut_or_stack(v: GridValuation, mms_parts: Sequence[Rect], region: Rect, axis: str,
                            p: int, q: int, s: Number, *,
                            log: QueryLog | None = None, agent: str | None = None) -> Cut | Stack:
    """Either a p:q-value cut or a stack of value-1 rectangles.

    ``v`` must be normalized so that every MMS-rectangle in ``mms_parts`` is
    worth 1 and the land outside them is worth nothing. The stack has at
    least ``ceil((floor(V) - p - q) / 2)`` members, V being the value of the
    region.
    """
    s = as_fraction(s)
    if direction(axis) == HORIZONTAL:
        res = find_value_cut_or_stack(v.transposed(), [r.transposed() for r in mms_parts],
                                      region.transposed(), VERTICAL, p, q, s, log=log, agent=agent)
        return _transpose_result(res)
    if p < 1 or q < 1:
        raise ValueError("p and q must be at least 1")
    total = eval_query(v, VERTICAL, region, region.x_hi, log, agent)
    if p + q > total:
        raise ValueError(f"p + q = {p + q} exceeds the region's value {total}")

    a = cut_query(v, VERTICAL, region, p, log, agent)
    far = min(a + s, region.x_hi)
    v_right = total - eval_query(v, VERTICAL, region, far, log, agent)
    if v_right >= q:
        return Cut(VERTICAL, a, a + s, Fraction(p), v_right)
    if s == 0:
        raise AllocationInvariantError("a zero-width knife always yields a value cut for atomless valuations")

    strip = Rect(a, far, region.y_lo, region.y_hi)
    chunks = []
    for part in mms_parts:
        piece = part.intersection(strip)
        if piece is None or piece.is_degenerate():
            continue
        worth = v.value_of(piece)
        if worth > 0:
            chunks.append((piece, worth))
    chunks.sort(key=lambda c: c[0].y_lo)
    _check_stack([c[0] for c in chunks], s)

    groups: list[Rect] = []
    start, acc = None, Fraction(0)
    for piece, worth in chunks:
        if start is None:
            start = piece.y_lo
        acc += worth
        if acc >= 1:
            groups.append(Rect(a, far, start, piece.y_hi))
            start, acc = None, Fraction(0)

    need = stack_bound(total, p, q)
    if need == 0 and not groups:
        raise ValueError(f"p + q = {p + q} leaves no room for a stack in a region worth {total}")
    if len(groups) < need:
        raise AllocationInvariantError(
            f"value stack has {len(groups)} members, the knife argument promises {need}")
    return Stack(VERTICAL, tuple(groups))
