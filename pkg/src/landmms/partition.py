"""Partitions, guillotine certificates and maximin-share solvers.

Two solvers compute an agent's best worst piece over k pieces:

* :func:`guillotine_mms_dp` discretizes the region into strips of value at
  most eps/4 and searches over guillotine partitions on that grid;
* :func:`brute_force_mms` enumerates grid-aligned candidate rectangles and
  finds the best k pairwise s-separated ones (optionally guillotine only).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import AllocationInvariantError, BudgetExceeded, NoFeasiblePartition
from .geometry import (Number, Rect, Shape, as_fraction, format_rational, is_s_separated,
                       overlaps, pairwise_s_separated, parse_rational)
from .knife import Cut, find_rectangle_cut_or_stack
from .valuation import HORIZONTAL, VERTICAL, GridValuation, QueryLog, cut_query, eval_query

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class Partition:
    """Pairwise non-overlapping parts inside ``region``."""

    parts: tuple[Rect, ...]
    region: Rect

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple(self.parts))
        for q in self.parts:
            if not self.region.contains(q):
                raise ValueError(f"part {q} is not inside region {self.region}")
        for i, a in enumerate(self.parts):
            for b in self.parts[i + 1:]:
                if overlaps(a, b):
                    raise ValueError(f"parts {a} and {b} overlap")

    def __len__(self) -> int:
        return len(self.parts)

    def to_json(self) -> dict:
        return {"region": self.region.to_json(), "parts": [q.to_json() for q in self.parts]}

    @classmethod
    def from_json(cls, data: dict) -> Partition:
        return cls(tuple(Rect.from_json(q) for q in data["parts"]), Rect.from_json(data["region"]))


@dataclass(frozen=True)
class Leaf:
    part: Rect

    @property
    def region(self) -> Rect:
        return self.part


@dataclass(frozen=True)
class Split:
    """A strip ``[lo, hi]`` across ``region`` with a subtree on each side.

    The strip is at least ``s`` wide; the low child lives left of (below)
    ``lo``, the high child right of (above) ``hi``.
    """

    axis: str
    lo: Fraction
    hi: Fraction
    region: Rect
    low: GuillotineTree
    high: GuillotineTree


GuillotineTree = Union[Leaf, Split]


def tree_leaves(tree: GuillotineTree) -> list[Rect]:
    if isinstance(tree, Leaf):
        return [tree.part]
    return tree_leaves(tree.low) + tree_leaves(tree.high)


def tree_to_json(tree: GuillotineTree) -> dict:
    if isinstance(tree, Leaf):
        return {"leaf": tree.part.to_json()}
    return {"split": {"axis": tree.axis, "lo": format_rational(tree.lo), "hi": format_rational(tree.hi),
                      "region": tree.region.to_json(),
                      "low": tree_to_json(tree.low), "high": tree_to_json(tree.high)}}


def tree_from_json(data: dict) -> GuillotineTree:
    if "leaf" in data:
        return Leaf(Rect.from_json(data["leaf"]))
    d = data["split"]
    return Split(d["axis"], parse_rational(d["lo"]), parse_rational(d["hi"]), Rect.from_json(d["region"]),
                 tree_from_json(d["low"]), tree_from_json(d["high"]))


def check_tree(tree: GuillotineTree, s: Number) -> bool:
    """True when every split is a valid strip cut of its region and the children fit their sides."""
    s = as_fraction(s)
    if isinstance(tree, Leaf):
        return True
    r = tree.region
    if tree.hi - tree.lo < s:
        return False
    if tree.axis == VERTICAL:
        if not (r.x_lo < tree.lo and tree.hi < r.x_hi):
            return False
        low_side = Rect(r.x_lo, tree.lo, r.y_lo, r.y_hi)
        high_side = Rect(tree.hi, r.x_hi, r.y_lo, r.y_hi)
    else:
        if not (r.y_lo < tree.lo and tree.hi < r.y_hi):
            return False
        low_side = Rect(r.x_lo, r.x_hi, r.y_lo, tree.lo)
        high_side = Rect(r.x_lo, r.x_hi, tree.hi, r.y_hi)
    return (low_side.contains(tree.low.region) and high_side.contains(tree.high.region)
            and check_tree(tree.low, s) and check_tree(tree.high, s))


@dataclass(frozen=True)
class MmsResult:
    value: Fraction
    partition: Partition
    tree: GuillotineTree | None
    method: str
    k: int
    s: Fraction
    eps: Fraction | None = None

    def to_json(self) -> dict:
        out = {"value": format_rational(self.value), "method": self.method, "k": self.k,
               "s": format_rational(self.s),
               "eps": None if self.eps is None else format_rational(self.eps),
               **self.partition.to_json()}
        if self.tree is not None:
            out["tree"] = tree_to_json(self.tree)
        return out

    @classmethod
    def from_json(cls, data: dict) -> MmsResult:
        return cls(parse_rational(data["value"]), Partition.from_json(data),
                   tree_from_json(data["tree"]) if "tree" in data else None,
                   data["method"], int(data["k"]), parse_rational(data["s"]),
                   None if data.get("eps") is None else parse_rational(data["eps"]))


def check_s_separated(p: Partition, s: Number) -> bool:
    return pairwise_s_separated(p.parts, s)


# -- guillotine certification -------------------------------------------------

def _certify(region: Rect, parts: list[Rect], s: Fraction) -> GuillotineTree | None:
    if len(parts) == 1:
        return Leaf(parts[0]) if region.contains(parts[0]) else None
    for axis in (VERTICAL, HORIZONTAL):
        if axis == VERTICAL:
            lo_edge, hi_edge = region.x_lo, region.x_hi
            hi_of, lo_of = (lambda q: q.x_hi), (lambda q: q.x_lo)
        else:
            lo_edge, hi_edge = region.y_lo, region.y_hi
            hi_of, lo_of = (lambda q: q.y_hi), (lambda q: q.y_lo)
        for a in sorted({hi_of(q) for q in parts}):
            if not lo_edge < a < hi_edge - s:
                continue
            low = [q for q in parts if hi_of(q) <= a]
            high = [q for q in parts if lo_of(q) >= a + s]
            if not low or not high or len(low) + len(high) != len(parts):
                continue
            if axis == VERTICAL:
                low_region = Rect(region.x_lo, a, region.y_lo, region.y_hi)
                high_region = Rect(a + s, region.x_hi, region.y_lo, region.y_hi)
            else:
                low_region = Rect(region.x_lo, region.x_hi, region.y_lo, a)
                high_region = Rect(region.x_lo, region.x_hi, a + s, region.y_hi)
            # any valid strip works: sub-collections of a guillotine collection stay guillotine
            left = _certify(low_region, low, s)
            right = _certify(high_region, high, s) if left is not None else None
            if left is None or right is None:
                return None
            return Split(axis, a, a + s, region, left, right)
    return None


def certify_guillotine(p: Partition, s: Number) -> GuillotineTree | None:
    """A guillotine tree for ``p`` with strips of width ``s``, or None."""
    s = as_fraction(s)
    if not p.parts:
        return None
    return _certify(p.region, list(p.parts), s)


# -- the guillotine dynamic program ------------------------------------------

def _flat_end(v: GridValuation, knife: str, region: Rect, c: Fraction,
              log_: QueryLog | None, agent: str | None) -> Fraction:
    """Largest coordinate whose prefix value equals the prefix value at ``c``."""
    coords = v.x_coords if knife == VERTICAL else v.y_coords
    hi = region.x_hi if knife == VERTICAL else region.y_hi
    points = v.breakpoints(coords, c, hi)
    base = eval_query(v, knife, region, c, log_, agent)
    # the prefix is linear between breakpoints, so it stays flat up to the
    # breakpoint before the first one where it has grown
    left, right = 0, len(points)
    while left < right:
        mid = (left + right) // 2
        if eval_query(v, knife, region, points[mid], log_, agent) > base:
            right = mid
        else:
            left = mid + 1
    return points[left - 1]


def dp_grid(v: GridValuation, region: Rect, eps: Number, *, log_: QueryLog | None = None,
            agent: str | None = None) -> tuple[list[Fraction], list[Fraction]]:
    """Strip boundaries along both axes, each strip worth at most eps/4.

    Boundaries sit where the prefix value reaches a multiple of eps/4. Where
    the prefix stays flat over a stretch of worthless land, both ends of the
    stretch become boundaries, so pieces may start right after a gap.
    """
    delta = as_fraction(eps) / 4
    total = v.value_of(region)
    axes = []
    for knife, lo, hi in ((VERTICAL, region.x_lo, region.x_hi), (HORIZONTAL, region.y_lo, region.y_hi)):
        coords = [lo]
        j = 0
        while coords[-1] < hi:
            j += 1
            if j * delta >= total:
                c = hi
            else:
                c = cut_query(v, knife, region, j * delta, log_, agent)
            if c > coords[-1]:
                coords.append(c)
            if c < hi:
                end = _flat_end(v, knife, region, c, log_, agent)
                if end > coords[-1]:
                    coords.append(end)
        axes.append(coords)
    return axes[0], axes[1]


def _float_cumulative(v: GridValuation, xs: Sequence[Fraction], ys: Sequence[Fraction]) -> np.ndarray:
    """Float approximation of ``v.cumulative`` on the product grid ``xs x ys``."""
    gx = np.array([float(x) for x in v.x_coords])
    gy = np.array([float(y) for y in v.y_coords])
    pre = np.array([[float(c) for c in row] for row in v._prefix])
    cells = np.array([[float(c) for c in col] for col in v.cells])

    def locate(grid: np.ndarray, pts: Sequence[Fraction]):
        p = np.clip(np.array([float(t) for t in pts]), grid[0], grid[-1])
        idx = np.clip(np.searchsorted(grid, p, side="right") - 1, 0, len(grid) - 2)
        frac = (p - grid[idx]) / (grid[idx + 1] - grid[idx])
        return idx, frac

    a, al = locate(gx, xs)
    b, be = locate(gy, ys)
    A, B = a[:, None], b[None, :]
    AL, BE = al[:, None], be[None, :]
    base = pre[A, B]
    return (base + AL * (pre[A + 1, B] - base) + BE * (pre[A, B + 1] - base)
            + AL * BE * cells[A, B])


class _GridSearch:
    """Threshold search over guillotine partitions whose cuts lie on a fixed grid.

    ``feasible(z)`` decides whether some guillotine partition of the whole
    grid into ``k`` parts, with strips of width at least ``s`` between
    siblings, gives every part at least ``z`` (strictly more than ``z`` when
    ``strict``). Part values come from a float table; comparisons too close
    to call are redone exactly.
    """

    def __init__(self, v: GridValuation, xs: Sequence[Fraction], ys: Sequence[Fraction], s: Fraction):
        self.v = v
        self.xs, self.ys = list(xs), list(ys)
        self.s = s
        self.nx, self.ny = len(xs) - 1, len(ys) - 1
        self.fp = _float_cumulative(v, xs, ys).tolist()
        self.tol = 1e-9 * max(1.0, float(v.total))
        self.true_at: dict = {}
        self.false_at: dict = {}
        self.gap_x = self._gaps(self.xs)
        self.gap_y = self._gaps(self.ys)
        self.exact_checks = 0

    def _gaps(self, coords: list[Fraction]) -> list[int | None]:
        # smallest index r2 >= r with coords[r2] - coords[r] >= s
        out: list[int | None] = []
        r2 = 0
        for r, c in enumerate(coords):
            r2 = max(r2, r)
            while r2 < len(coords) and coords[r2] - c < self.s:
                r2 += 1
            out.append(r2 if r2 < len(coords) else None)
        return out

    def value(self, i: int, i2: int, j: int, j2: int) -> Fraction:
        return self.v.value_of(Rect(self.xs[i], self.xs[i2], self.ys[j], self.ys[j2]))

    def _fvalue(self, i, i2, j, j2) -> float:
        f = self.fp
        return f[i2][j2] - f[i][j2] - f[i2][j] + f[i][j]

    def at_least(self, i, i2, j, j2, target: Fraction, strict: bool, times: int = 1) -> bool:
        """Whether the sub-rectangle is worth at least ``times * target`` (more, if strict)."""
        diff = self._fvalue(i, i2, j, j2) - times * float(target)
        if diff > self.tol:
            return True
        if diff < -self.tol:
            return False
        self.exact_checks += 1
        val, target = self.value(i, i2, j, j2), times * target
        return val > target if strict else val >= target

    def feasible(self, z: Fraction, k: int, strict: bool = False):
        """Witness tree (nested tuples) meeting the threshold, or None.

        Answers are cached across calls: a witness found at a requirement
        level serves every weaker level, and a failure every stronger one.
        Levels are ``(z, strict)`` pairs ordered lexicographically.
        """
        # the float leads so most comparisons never touch the Fraction
        level = (float(z), z, strict)
        true_at, false_at = self.true_at, self.false_at
        reach: dict = {}

        def f(i, i2, j, j2, t):
            key = (i, i2, j, j2, t)
            known = true_at.get(key)
            if known is not None and level <= known[0]:
                return known[1]
            bad = false_at.get(key)
            if bad is not None and level >= bad:
                return None
            w = solve(i, i2, j, j2, t)
            if w is None:
                if bad is None or level < bad:
                    false_at[key] = level
            elif known is None or level > known[0]:
                true_at[key] = (level, w)
            return w

        def solve(i, i2, j, j2, t):
            if not self.at_least(i, i2, j, j2, z, strict, t):
                return None
            if t == 1:
                return ("leaf", i, i2, j, j2)
            for t1 in range(1, t):
                hit = low_reach(VERTICAL, i, j, j2, t1)
                if hit is not None and hit[0] < i2:
                    r, wl = hit
                    r2 = self.gap_x[r]
                    if r2 is not None and r2 < i2:
                        wr = f(r2, i2, j, j2, t - t1)
                        if wr is not None:
                            return ("v", r, r2, wl, wr)
            for t1 in range(1, t):
                hit = low_reach(HORIZONTAL, j, i, i2, t1)
                if hit is not None and hit[0] < j2:
                    r, wl = hit
                    r2 = self.gap_y[r]
                    if r2 is not None and r2 < j2:
                        wr = f(i, i2, r2, j2, t - t1)
                        if wr is not None:
                            return ("h", r, r2, wl, wr)
            return None

        def low_reach(axis, start, a, a2, t1):
            # smallest cut index r such that the low side up to r holds t1 parts;
            # monotone in r because growing a side only grows its last part
            key = (axis, start, a, a2, t1)
            if key in reach:
                return reach[key]
            if axis == VERTICAL:
                probe = lambda r: f(start, r, a, a2, t1)
                top = self.nx - 1
            else:
                probe = lambda r: f(a, a2, start, r, t1)
                top = self.ny - 1
            lo, hi = start + 1, top
            if lo > hi or probe(hi) is None:
                reach[key] = None
                return None
            while lo < hi:
                mid = (lo + hi) // 2
                if probe(mid) is not None:
                    hi = mid
                else:
                    lo = mid + 1
            reach[key] = (lo, probe(lo))
            return reach[key]

        return f(0, self.nx, 0, self.ny, k)

    def parts_of(self, w) -> list[tuple[int, int, int, int]]:
        if w[0] == "leaf":
            return [w[1:]]
        return self.parts_of(w[3]) + self.parts_of(w[4])

    def min_value(self, w) -> Fraction:
        return min(self.value(*p) for p in self.parts_of(w))

    def tree_of(self, w, i=0, i2=None, j=0, j2=None) -> GuillotineTree:
        i2 = self.nx if i2 is None else i2
        j2 = self.ny if j2 is None else j2
        xs, ys = self.xs, self.ys
        if w[0] == "leaf":
            _, a, a2, b, b2 = w
            return Leaf(Rect(xs[a], xs[a2], ys[b], ys[b2]))
        kind, r, r2, wl, wr = w
        region = Rect(xs[i], xs[i2], ys[j], ys[j2])
        if kind == "v":
            return Split(VERTICAL, xs[r], xs[r2], region,
                         self.tree_of(wl, i, r, j, j2), self.tree_of(wr, r2, i2, j, j2))
        return Split(HORIZONTAL, ys[r], ys[r2], region,
                     self.tree_of(wl, i, i2, j, r), self.tree_of(wr, i, i2, r2, j2))


def guillotine_maxmin_on_grid(v: GridValuation, xs: Sequence[Fraction], ys: Sequence[Fraction],
                              s: Number, k: int) -> tuple[Fraction, GuillotineTree]:
    """Best worst-part value over guillotine partitions cut along the grid lines."""
    s = as_fraction(s)
    if k < 1:
        raise ValueError("k must be at least 1")
    search = _GridSearch(v, xs, ys, s)
    total = search.value(0, search.nx, 0, search.ny)
    w = search.feasible(Fraction(0), k)
    if w is None:
        raise NoFeasiblePartition(f"no guillotine partition into {k} parts with separation {s} on this grid")
    best, hi = search.min_value(w), total / k
    top = search.feasible(hi, k)
    if top is not None:
        best = search.min_value(top)
    else:
        while True:
            better = search.feasible(best, k, strict=True)
            if better is None:
                break
            best = search.min_value(better)
            if best >= hi:
                break
            # bisect towards the ceiling to skip runs of tiny improvements
            mid = Fraction((best + hi) / 2).limit_denominator(10**12)
            if not best < mid < hi:
                mid = (best + hi) / 2
            probe = search.feasible(mid, k)
            if probe is None:
                hi = mid
            else:
                best = search.min_value(probe)
    # canonical witness for the optimum
    w = search.feasible(best, k)
    if w is None or search.min_value(w) != best:
        raise AllocationInvariantError("grid search lost its own optimum")
    log.debug("grid search: %d exact comparisons", search.exact_checks)
    return best, search.tree_of(w)


def guillotine_maxmin_table(v: GridValuation, xs: Sequence[Fraction], ys: Sequence[Fraction],
                            s: Number, k: int) -> tuple[Fraction, GuillotineTree | None]:
    """Plain table recurrence over every sub-rectangle, cut and split count.

    Quartic in the grid size; kept as a reference for small grids.
    """
    s = as_fraction(s)
    search = _GridSearch(v, xs, ys, s)
    memo: dict = {}

    def best(i, i2, j, j2, t):
        key = (i, i2, j, j2, t)
        if key in memo:
            return memo[key]
        if t == 1:
            memo[key] = (search.value(i, i2, j, j2), ("leaf", i, i2, j, j2))
            return memo[key]
        out = (Fraction(-1), None)
        for r in range(i + 1, i2):
            r2 = search.gap_x[r]
            if r2 is None or r2 >= i2:
                continue
            for t1 in range(1, t):
                (a, wa), (b, wb) = best(i, r, j, j2, t1), best(r2, i2, j, j2, t - t1)
                if wa is not None and wb is not None and min(a, b) > out[0]:
                    out = (min(a, b), ("v", r, r2, wa, wb))
        for r in range(j + 1, j2):
            r2 = search.gap_y[r]
            if r2 is None or r2 >= j2:
                continue
            for t1 in range(1, t):
                (a, wa), (b, wb) = best(i, i2, j, r, t1), best(i, i2, r2, j2, t - t1)
                if wa is not None and wb is not None and min(a, b) > out[0]:
                    out = (min(a, b), ("h", r, r2, wa, wb))
        memo[key] = out
        return out

    value, w = best(0, search.nx, 0, search.ny, k)
    if w is None:
        return Fraction(0), None
    return value, search.tree_of(w)


def guillotine_mms_dp(v: GridValuation, region: Rect, s: Number, k: int, eps: Number, *,
                      log_: QueryLog | None = None, agent: str | None = None) -> MmsResult:
    """Guillotine partition of ``region`` into ``k`` parts, each worth at least V - eps.

    V is the best worst-part value over s-separated guillotine partitions.
    The region's value should be normalized to 1 so eps is relative.
    """
    s, eps = as_fraction(s), as_fraction(eps)
    if k < 1:
        raise ValueError("k must be at least 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    xs, ys = dp_grid(v, region, eps, log_=log_, agent=agent)
    value, tree = guillotine_maxmin_on_grid(v, xs, ys, s, k)
    parts = tree_leaves(tree)
    return MmsResult(value, Partition(tuple(parts), region), tree, "dp", k, s, eps)


# -- brute-force oracle --------------------------------------------------------

def grid_candidates(xs: Sequence[Fraction], ys: Sequence[Fraction], shape: Shape) -> list[Rect]:
    return [q for i, x0 in enumerate(xs) for x1 in xs[i + 1:]
            for j, y0 in enumerate(ys) for y1 in ys[j + 1:]
            if shape.admits(q := Rect(x0, x1, y0, y1))]


def brute_force_mms(v: GridValuation, grid: tuple[Sequence[Number], Sequence[Number]], s: Number, k: int,
                    shape: Shape | None = None, guillotine_only: bool = False,
                    budget: int = DEFAULT_BUDGET) -> MmsResult:
    """Exact best worst-part value over k grid-aligned, pairwise s-separated rectangles.

    Candidates are tried in decreasing value; the first candidate that
    completes to k compatible rectangles among more valuable ones fixes the
    optimum. ``budget`` caps compatibility checks plus search nodes.
    """
    s = as_fraction(s)
    shape = shape or Shape()
    xs = sorted({as_fraction(x) for x in grid[0]})
    ys = sorted({as_fraction(y) for y in grid[1]})
    if k < 1:
        raise ValueError("k must be at least 1")
    region = Rect(xs[0], xs[-1], ys[0], ys[-1])
    cands = grid_candidates(xs, ys, shape)
    values = {q: v.value_of(q) for q in cands}
    cands.sort(key=lambda q: (-values[q], q.sort_key()))
    n = len(cands)
    estimate = math.comb(n, k)
    # building the compatibility table is part of the work the budget caps
    pairs = n * (n - 1) // 2
    if pairs > budget:
        raise BudgetExceeded(f"brute force needs {pairs} compatibility checks, over the budget of {budget} "
                             f"({n} candidates, {estimate} {k}-subsets)", estimate)

    compat = [0] * n
    for a in range(n):
        qa = cands[a]
        bits = 0
        for b in range(a):
            if is_s_separated(qa, cands[b], s):
                bits |= 1 << b
        compat[a] = bits
    for a in range(n):
        bits = compat[a]
        while bits:
            low = bits & -bits
            compat[low.bit_length() - 1] |= 1 << a
            bits ^= low

    nodes = pairs

    def extend(chosen: list[int], pool: int, need: int) -> list[int] | None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"brute force exceeded {budget} search nodes "
                                 f"({n} candidates, {estimate} {k}-subsets)", estimate)
        if need == 0:
            if guillotine_only:
                parts = Partition(tuple(cands[c] for c in chosen), region)
                if certify_guillotine(parts, s) is None:
                    return None
            return chosen
        while pool:
            if pool.bit_count() < need:
                return None
            low = pool & -pool
            e = low.bit_length() - 1
            pool ^= low
            found = extend(chosen + [e], pool & compat[e], need - 1)
            if found is not None:
                return found
        return None

    for idx in range(n):
        pool = compat[idx] & ((1 << idx) - 1)
        found = extend([idx], pool, k - 1)
        if found is not None:
            parts = tuple(sorted((cands[c] for c in found), key=Rect.sort_key))
            partition = Partition(parts, region)
            tree = certify_guillotine(partition, s) if guillotine_only else None
            return MmsResult(values[cands[idx]], partition, tree, "brute_force", k, s)
    raise NoFeasiblePartition(f"no feasible partition into {k} pieces of shape {shape.kind} "
                              f"with separation {s} on this grid")


# -- guillotine refinement ----------------------------------------------------

def guillotine_refine(mms_parts: Sequence[Rect], region: Rect, s: Number) -> tuple[list[Rect], GuillotineTree]:
    """Cut ``region`` into 2^l guillotine regions each holding a whole part.

    ``mms_parts`` must be 4^l pairwise s-separated rectangles inside
    ``region``. Each round splits with a balanced cut (vertical if possible,
    otherwise horizontal), halving the per-region part quota twice.
    """
    s = as_fraction(s)
    parts = list(mms_parts)
    count = len(parts)
    level = 0
    while 4**level < count:
        level += 1
    if count == 0 or 4**level != count:
        raise ValueError(f"need 4^l parts, got {count}")
    if not all(region.contains(q) for q in parts):
        raise ValueError("every part must lie inside the region")
    if not pairwise_s_separated(parts, s):
        raise ValueError(f"parts are not pairwise {s}-separated")

    def split(sub: Rect, inside: list[Rect], quota: int) -> GuillotineTree:
        if quota == 1:
            return Leaf(sub)
        p = quota // 4
        res = find_rectangle_cut_or_stack(inside, sub, VERTICAL, p, p, s)
        if not isinstance(res, Cut):
            res = find_rectangle_cut_or_stack(inside, sub, HORIZONTAL, p, p, s)
        if not isinstance(res, Cut):
            raise AllocationInvariantError("neither a vertical nor a horizontal balanced cut exists")
        low, high = res.low_piece(sub), res.high_piece(sub)
        low_parts = [q for q in inside if low.contains(q)]
        high_parts = [q for q in inside if high.contains(q)]
        if len(low_parts) < p or len(high_parts) < p:
            raise AllocationInvariantError("balanced cut left a side short of parts")
        return Split(res.axis, res.lo, res.hi, sub, split(low, low_parts, p), split(high, high_parts, p))

    tree = split(region, parts, count)
    return tree_leaves(tree), tree
