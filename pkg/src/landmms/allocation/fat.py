"""Allocating fat rectangles by picking disjoint representatives from maximin partitions."""
from __future__ import annotations

import itertools
import math
from typing import Mapping, Sequence

from ..errors import NoSelection
from ..geometry import Number, Rect, Shape, as_fraction, fatness, overlaps, pairwise_s_separated, unwrap, wrap
from ..instances import Instance
from .core import Allocation


def nfat_parts(r: Number, n: int) -> int:
    """Parts per agent that guarantee disjoint representatives for n agents."""
    m = math.ceil(as_fraction(r))
    if n == 1:
        return 1
    return (2 * m + 2) * n - (3 * m + 2)


def _pairwise_disjoint(rects: Sequence[Rect]) -> bool:
    return not any(overlaps(a, b) for a, b in itertools.combinations(rects, 2))


def _exhaustive(sets: Sequence[Sequence[Rect]]) -> list[Rect] | None:
    # depth-first over sets, pruning on the first overlap
    chosen: list[Rect] = []

    def go(i: int) -> bool:
        if i == len(sets):
            return True
        for q in sets[i]:
            if all(not overlaps(q, c) for c in chosen):
                chosen.append(q)
                if go(i + 1):
                    return True
                chosen.pop()
        return False

    return list(chosen) if go(0) else None


def _greedy(sets: list[list[Rect]]) -> list[Rect] | None:
    n = len(sets)
    if n == 0:
        return []
    if any(not s for s in sets):
        return None
    if n <= 2:
        return _exhaustive(sets)
    # a narrowest rectangle overlaps few pairwise disjoint ones
    owner, q_min = min(((i, q) for i, s in enumerate(sets) for q in s),
                       key=lambda iq: (iq[1].short_side, iq[1].sort_key(), iq[0]))
    rest = [[q for q in s if not overlaps(q, q_min)] for i, s in enumerate(sets) if i != owner]
    picked = _greedy(rest)
    if picked is None:
        return None
    picked.insert(owner, q_min)
    return picked


def select_disjoint_representatives(sets: Sequence[Sequence[Rect]], r: Number) -> list[Rect]:
    """One rectangle from each set, pairwise disjoint.

    Each set must hold pairwise disjoint r-fat rectangles. The greedy pass
    always succeeds once every set has ``nfat_parts(r, n)`` members; smaller
    sets fall back to exhaustive search.
    """
    r = as_fraction(r)
    sets = [list(s) for s in sets]
    for i, s in enumerate(sets):
        if not s:
            raise NoSelection(f"set {i} is empty")
        if not _pairwise_disjoint(s):
            raise ValueError(f"set {i} has overlapping rectangles")
        for q in s:
            if q.is_degenerate() or fatness(q) > r:
                raise ValueError(f"{q} in set {i} is not {r}-fat")
    if len(sets) == 1:
        return [sets[0][0]]
    picked = _greedy(sets)
    if picked is None:
        picked = _exhaustive(sets)
    if picked is None:
        raise NoSelection(f"no pairwise disjoint representatives exist for these {len(sets)} sets")
    assert _pairwise_disjoint(picked)
    return picked


def allocate_fat(instance: Instance, r: Number, partitions: Mapping[str, Sequence[Rect]]) -> Allocation:
    """Give every agent one of her own s-separated r-fat maximin parts."""
    r = as_fraction(r)
    s = instance.s
    names = instance.names
    missing = [name for name in names if name not in partitions]
    if missing:
        raise ValueError(f"no partition supplied for {missing}")
    for name in names:
        parts = list(partitions[name])
        if not pairwise_s_separated(parts, s):
            raise ValueError(f"{name}'s parts are not {s}-separated")
        if not all(instance.land.contains(q) for q in parts):
            raise ValueError(f"{name}'s parts leave the land")
        if any(q.is_degenerate() or fatness(q) > r for q in parts):
            raise ValueError(f"{name}'s parts are not all {r}-fat")
    wrapped = [[wrap(q, s) for q in partitions[name]] for name in names]
    chosen = select_disjoint_representatives(wrapped, r)
    assignments = {name: unwrap(q, s) for name, q in zip(names, chosen)}
    shape = Shape("square") if r == 1 else Shape("fat", r)
    return Allocation(assignments, instance.land, s, shape, ["fat:representatives"])
