"""Piecewise-constant valuations and the two-dimensional Eval/Cut query oracle."""
from __future__ import annotations

import threading
from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import Number, Rect, as_fraction, format_rational, parse_rational

VERTICAL = "vertical"
HORIZONTAL = "horizontal"
_DIRECTIONS = {"vertical": VERTICAL, "|": VERTICAL, "horizontal": HORIZONTAL, "-": HORIZONTAL}

_ZERO = Fraction(0)


def direction(name: str) -> str:
    try:
        return _DIRECTIONS[name]
    except KeyError:
        raise ValueError(f"unknown knife direction {name!r}") from None


@dataclass(frozen=True, eq=False)
class GridValuation:
    """Mass spread uniformly over the cells of a rectilinear grid.

    ``cells[i][j]`` is the total mass of ``[x_coords[i], x_coords[i+1]] x
    [y_coords[j], y_coords[j+1]]``.
    """

    x_coords: tuple[Fraction, ...]
    y_coords: tuple[Fraction, ...]
    cells: tuple[tuple[Fraction, ...], ...]
    _prefix: tuple[tuple[Fraction, ...], ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        xs = tuple(as_fraction(x) for x in self.x_coords)
        ys = tuple(as_fraction(y) for y in self.y_coords)
        cells = tuple(tuple(as_fraction(c) for c in col) for col in self.cells)
        if len(xs) < 2 or len(ys) < 2:
            raise ValueError("a grid needs at least two coordinates per axis")
        if any(a >= b for a, b in zip(xs, xs[1:])) or any(a >= b for a, b in zip(ys, ys[1:])):
            raise ValueError("grid coordinates must be strictly increasing")
        if len(cells) != len(xs) - 1 or any(len(col) != len(ys) - 1 for col in cells):
            raise ValueError(f"cell matrix must be {len(xs) - 1}x{len(ys) - 1}")
        if any(c < 0 for col in cells for c in col):
            raise ValueError("cell masses must be nonnegative")
        object.__setattr__(self, "x_coords", xs)
        object.__setattr__(self, "y_coords", ys)
        object.__setattr__(self, "cells", cells)

        m, n = len(cells), len(ys) - 1
        prefix = [[_ZERO] * (n + 1) for _ in range(m + 1)]
        for i in range(m):
            row_sum = _ZERO
            for j in range(n):
                row_sum += cells[i][j]
                prefix[i + 1][j + 1] = prefix[i][j + 1] + row_sum
        object.__setattr__(self, "_prefix", tuple(tuple(r) for r in prefix))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridValuation):
            return NotImplemented
        return (self.x_coords, self.y_coords, self.cells) == (other.x_coords, other.y_coords, other.cells)

    def __hash__(self) -> int:
        return hash((self.x_coords, self.y_coords, self.cells))

    # -- construction helpers -------------------------------------------------

    @classmethod
    def uniform(cls, domain: Rect, total: Number = 1) -> GridValuation:
        return cls((domain.x_lo, domain.x_hi), (domain.y_lo, domain.y_hi), ((as_fraction(total),),))

    @classmethod
    def from_boxes(cls, domain: Rect, boxes: Iterable[tuple[Rect, Number]]) -> GridValuation:
        """Valuation whose density is uniform inside each ``(box, mass)`` pair.

        Boxes are clipped to the domain; overlapping boxes add up.
        """
        boxes = [(b, as_fraction(mass)) for b, mass in boxes]
        xs = {domain.x_lo, domain.x_hi}
        ys = {domain.y_lo, domain.y_hi}
        for b, _ in boxes:
            if b.is_degenerate():
                raise ValueError(f"box {b} has zero area")
            if not domain.contains(b):
                raise ValueError(f"box {b} leaves the domain {domain}")
            xs.update((b.x_lo, b.x_hi))
            ys.update((b.y_lo, b.y_hi))
        xs, ys = sorted(xs), sorted(ys)
        cells = [[_ZERO] * (len(ys) - 1) for _ in range(len(xs) - 1)]
        for b, mass in boxes:
            density = mass / b.area
            i0, i1 = xs.index(b.x_lo), xs.index(b.x_hi)
            j0, j1 = ys.index(b.y_lo), ys.index(b.y_hi)
            for i in range(i0, i1):
                w = xs[i + 1] - xs[i]
                for j in range(j0, j1):
                    cells[i][j] += density * w * (ys[j + 1] - ys[j])
        return cls(tuple(xs), tuple(ys), tuple(tuple(c) for c in cells))

    @property
    def domain(self) -> Rect:
        return Rect(self.x_coords[0], self.x_coords[-1], self.y_coords[0], self.y_coords[-1])

    @property
    def total(self) -> Fraction:
        return self._prefix[-1][-1]

    def scaled(self, factor: Number) -> GridValuation:
        factor = as_fraction(factor)
        if factor < 0:
            raise ValueError("scale factor must be nonnegative")
        return GridValuation(self.x_coords, self.y_coords,
                             tuple(tuple(c * factor for c in col) for col in self.cells))

    def transposed(self) -> GridValuation:
        cells = tuple(tuple(self.cells[i][j] for i in range(len(self.cells)))
                      for j in range(len(self.y_coords) - 1))
        return GridValuation(self.y_coords, self.x_coords, cells)

    # -- values ---------------------------------------------------------------

    def cumulative(self, x: Fraction, y: Fraction) -> Fraction:
        """Value of ``[x_0, x] x [y_0, y]`` where ``(x_0, y_0)`` is the domain corner."""
        xs, ys, pre = self.x_coords, self.y_coords, self._prefix
        if x <= xs[0] or y <= ys[0]:
            return _ZERO
        x, y = min(x, xs[-1]), min(y, ys[-1])
        a = min(bisect_right(xs, x) - 1, len(xs) - 2)
        b = min(bisect_right(ys, y) - 1, len(ys) - 2)
        alpha = (x - xs[a]) / (xs[a + 1] - xs[a])
        beta = (y - ys[b]) / (ys[b + 1] - ys[b])
        base = pre[a][b]
        value = base
        if alpha:
            value += alpha * (pre[a + 1][b] - base)
        if beta:
            value += beta * (pre[a][b + 1] - base)
            if alpha:
                value += alpha * beta * self.cells[a][b]
        return value

    def value_of(self, region: Rect) -> Fraction:
        clipped = region.intersection(self.domain)
        if clipped is None or clipped.is_degenerate():
            return _ZERO
        c = self.cumulative
        return (c(clipped.x_hi, clipped.y_hi) - c(clipped.x_lo, clipped.y_hi)
                - c(clipped.x_hi, clipped.y_lo) + c(clipped.x_lo, clipped.y_lo))

    def breakpoints(self, axis_coords: Sequence[Fraction], lo: Fraction, hi: Fraction) -> list[Fraction]:
        inner = axis_coords[bisect_right(axis_coords, lo):bisect_left(axis_coords, hi)]
        return [lo, *inner, hi] if hi > lo else [lo]

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        f = format_rational
        return {"x_coords": [f(x) for x in self.x_coords],
                "y_coords": [f(y) for y in self.y_coords],
                "cells": [[f(c) for c in col] for col in self.cells]}

    @classmethod
    def from_json(cls, data: dict) -> GridValuation:
        return cls(tuple(parse_rational(x) for x in data["x_coords"]),
                   tuple(parse_rational(y) for y in data["y_coords"]),
                   tuple(tuple(parse_rational(c) for c in col) for col in data["cells"]))


class QueryLog:
    """Per-agent counts of Eval and Cut queries."""

    def __init__(self) -> None:
        self._counts: dict[str, Counter] = {}
        self._lock = threading.Lock()

    def record(self, agent: str | None, kind: str) -> None:
        if agent is None:
            agent = "?"
        with self._lock:
            self._counts.setdefault(agent, Counter())[kind] += 1

    def count(self, agent: str, kind: str) -> int:
        with self._lock:
            return self._counts.get(agent, Counter())[kind]

    def as_dict(self) -> dict[str, dict[str, int]]:
        with self._lock:
            return {a: {"eval": c["eval"], "cut": c["cut"]} for a, c in sorted(self._counts.items())}


def _axis_view(v: GridValuation, knife: str, region: Rect):
    """Return (coords along the knife's travel axis, lo, hi, prefix-value function)."""
    if direction(knife) == VERTICAL:
        def prefix(c: Fraction) -> Fraction:
            return v.value_of(Rect(region.x_lo, c, region.y_lo, region.y_hi))
        return v.x_coords, region.x_lo, region.x_hi, prefix

    def prefix(c: Fraction) -> Fraction:
        return v.value_of(Rect(region.x_lo, region.x_hi, region.y_lo, c))
    return v.y_coords, region.y_lo, region.y_hi, prefix


def eval_query(v: GridValuation, knife: str, region: Rect, c: Number,
               log: QueryLog | None = None, agent: str | None = None) -> Fraction:
    """Value of the part of ``region`` between its low edge and coordinate ``c``.

    A vertical knife sweeps along x, a horizontal knife along y.
    """
    c = as_fraction(c)
    _, lo, hi, prefix = _axis_view(v, knife, region)
    if not lo <= c <= hi:
        raise ValueError(f"coordinate {c} outside region span [{lo}, {hi}]")
    if log is not None:
        log.record(agent, "eval")
    return prefix(c)


def cut_query(v: GridValuation, knife: str, region: Rect, delta: Number,
              log: QueryLog | None = None, agent: str | None = None) -> Fraction:
    """Smallest coordinate ``c`` with ``eval_query(..., c) == delta``.

    Saturates at the region's far edge when the whole region is worth less
    than ``delta``.
    """
    delta = as_fraction(delta)
    if delta < 0:
        raise ValueError("cut target must be nonnegative")
    coords, lo, hi, prefix = _axis_view(v, knife, region)
    if log is not None:
        log.record(agent, "cut")
    if delta == 0:
        return lo
    points = v.breakpoints(coords, lo, hi)
    if prefix(points[-1]) < delta:
        return hi
    # first breakpoint whose prefix value reaches delta
    left, right = 0, len(points) - 1
    while left < right:
        mid = (left + right) // 2
        if prefix(points[mid]) >= delta:
            right = mid
        else:
            left = mid + 1
    k = left
    if k == 0:
        return points[0]
    a, b = points[k - 1], points[k]
    va, vb = prefix(a), prefix(b)
    # prefix is linear on [a, b] and va < delta <= vb
    return a + (delta - va) * (b - a) / (vb - va)


def normalize_to_partition(v: GridValuation, parts: Sequence[Rect]) -> GridValuation:
    """Rescale ``v`` so each part is worth exactly 1 and everything else 0."""
    parts = list(parts)
    if not parts:
        raise ValueError("need at least one part")
    domain = v.domain
    clipped = []
    for p in parts:
        q = p.intersection(domain)
        value = v.value_of(p)
        if q is None or value == 0:
            raise ValueError(f"part {p} has zero value and cannot be normalized")
        clipped.append((q, value))
    for i in range(len(clipped)):
        for j in range(i + 1, len(clipped)):
            a, b = clipped[i][0], clipped[j][0]
            if min(a.x_hi, b.x_hi) > max(a.x_lo, b.x_lo) and min(a.y_hi, b.y_hi) > max(a.y_lo, b.y_lo):
                raise ValueError(f"parts {a} and {b} overlap")

    xs = sorted(set(v.x_coords).union(*[(q.x_lo, q.x_hi) for q, _ in clipped]))
    ys = sorted(set(v.y_coords).union(*[(q.y_lo, q.y_hi) for q, _ in clipped]))
    cells = [[_ZERO] * (len(ys) - 1) for _ in range(len(xs) - 1)]
    for q, value in clipped:
        scale = 1 / value
        for i in range(xs.index(q.x_lo), xs.index(q.x_hi)):
            for j in range(ys.index(q.y_lo), ys.index(q.y_hi)):
                cells[i][j] = v.value_of(Rect(xs[i], xs[i + 1], ys[j], ys[j + 1])) * scale
    return GridValuation(tuple(xs), tuple(ys), tuple(tuple(c) for c in cells))
