"""Allocating arbitrary axis-aligned rectangles by recursive knife cuts.

Agents are given as :class:`NormalizedAgent` records: every part of the
agent's maximin partition is worth exactly 1 and nothing else is worth
anything. Each allocator gives every agent a rectangle she values at least 1.

Two flavours of knife are used. The *parts* knife counts whole maximin parts
on each side of the strip and needs the region to hold the agent's parts;
the *value* knife measures value and works on any land-subset.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..errors import AllocationInvariantError
from ..geometry import Number, Rect, as_fraction
from ..knife import Cut, Stack, find_rectangle_cut_or_stack, find_value_cut_or_stack
from ..valuation import VERTICAL, QueryLog
from .core import Allocation, NormalizedAgent, band, merge, require_values, v_req, worth

PARTS, VALUE = "parts", "value"


def _knife(agent: NormalizedAgent, region: Rect, s: Fraction, p: int, q: int, kind: str,
           log: QueryLog | None) -> Cut | Stack:
    if kind == PARTS:
        return find_rectangle_cut_or_stack(agent.parts_inside(region), region, VERTICAL, p, q, s)
    return find_value_cut_or_stack(agent.v, agent.parts, region, VERTICAL, p, q, s, log=log, agent=agent.name)


def _demand(agents: Sequence[NormalizedAgent], region: Rect, need: Fraction, log, what: str) -> None:
    for a in agents:
        got = worth(a, region, log)
        if got < need:
            raise AllocationInvariantError(f"{what}: {a.name} values {region} at {got} < {need}")


def _demand_parts(agents: Sequence[NormalizedAgent], region: Rect, need: int, what: str) -> None:
    for a in agents:
        got = len(a.parts_inside(region))
        if got < need:
            raise AllocationInvariantError(f"{what}: {a.name} has {got} < {need} whole parts in {region}")


def _leftmost(results: Sequence[Cut]) -> int:
    return min(range(len(results)), key=lambda i: (results[i].lo, i))


def _holders(agents: Sequence[NormalizedAgent], region: Rect, tops: Sequence[Fraction], threshold: Fraction,
             log) -> list[frozenset[int]]:
    """H(j): indices of agents valuing the band below the j-th stack top at least ``threshold``."""
    return [frozenset(i for i, a in enumerate(agents) if worth(a, band(region, region.y_lo, t), log) >= threshold)
            for t in tops]


# -- two agents ----------------------------------------------------------------

def _two(agents: Sequence[NormalizedAgent], region: Rect, s: Fraction, kind: str, log, trace) -> dict[str, Rect]:
    results = [_knife(a, region, s, 1, 1, kind, log) for a in agents]
    if all(isinstance(r, Cut) for r in results):
        i = _leftmost(results)
        cut = results[i]
        trace.append(f"two[{kind}]:cut")
        return {agents[i].name: cut.low_piece(region), agents[1 - i].name: cut.high_piece(region)}
    i = next(i for i, r in enumerate(results) if isinstance(r, Stack))
    alice, bob = agents[i], agents[1 - i]
    stack = results[i]
    if len(stack) < 3:
        raise AllocationInvariantError(f"{alice.name}'s stack has {len(stack)} < 3 members")
    (t1, t2), (b2, b3) = stack.tops[:2], stack.bottoms[1:3]
    low = band(region, region.y_lo, t2)
    if worth(bob, low, log) >= 1:
        trace.append(f"two[{kind}]:stack:low")
        return {bob.name: low, alice.name: band(region, b3, region.y_hi)}
    trace.append(f"two[{kind}]:stack:high")
    return {bob.name: band(region, b2, region.y_hi), alice.name: band(region, region.y_lo, t1)}


# -- three agents ----------------------------------------------------------------

def _three(agents: Sequence[NormalizedAgent], region: Rect, s: Fraction, kind: str, log, trace) -> dict[str, Rect]:
    """Three agents with 14 whole parts each (parts knife) or value at least 17 (value knife)."""
    u = v_req(2)
    q = 3 if kind == PARTS else int(u)
    results = [_knife(a, region, s, 1, q, kind, log) for a in agents]
    if all(isinstance(r, Cut) for r in results):
        i = _leftmost(results)
        cut = results[i]
        rest = [a for j, a in enumerate(agents) if j != i]
        right = cut.high_piece(region)
        trace.append(f"three[{kind}]:cut")
        if kind == PARTS:
            _demand_parts(rest, right, 3, "three-agent cut")
        else:
            _demand(rest, right, u, log, "three-agent cut")
        return merge({agents[i].name: cut.low_piece(region)}, _two(rest, right, s, kind, log, trace))

    ai = next(i for i, r in enumerate(results) if isinstance(r, Stack))
    stack = results[ai]
    if len(stack) < 5:
        raise AllocationInvariantError(f"{agents[ai].name}'s stack has {len(stack)} < 5 members")
    tops, bottoms = stack.tops, stack.bottoms
    held = _holders(agents, region, tops, u, log)
    k = next(j for j in range(len(held) - 1) if len(held[j]) == len(held[j + 1]))
    lower = band(region, region.y_lo, tops[k])
    upper = band(region, bottoms[k + 1], region.y_hi)
    h = held[k]
    trace.append(f"three[{kind}]:stack:H={len(h)}")
    if len(h) == 0:
        low_group, high_group = [ai], [j for j in range(3) if j != ai]
    elif len(h) == 3:
        low_group, high_group = [j for j in range(3) if j != ai], [ai]
    else:
        low_group, high_group = sorted(h), [j for j in range(3) if j not in h]
    return merge(_serve([agents[j] for j in low_group], lower, s, log, trace),
                 _serve([agents[j] for j in high_group], upper, s, log, trace))


def _serve(group: Sequence[NormalizedAgent], region: Rect, s: Fraction, log, trace) -> dict[str, Rect]:
    """Divide a land-subset among a group that values it at least the group's requirement."""
    _demand(group, region, v_req(len(group)) if group else Fraction(0), log, f"{len(group)}-agent subdivision")
    return _generic(group, region, s, log, trace)


# -- four agents -------------------------------------------------------------------

def _four(agents: Sequence[NormalizedAgent], region: Rect, s: Fraction, log, trace) -> dict[str, Rect]:
    """Four agents with 24 whole parts each."""
    results = [_knife(a, region, s, 3, 3, PARTS, log) for a in agents]
    if all(isinstance(r, Cut) for r in results):
        order = sorted(range(4), key=lambda i: (results[i].lo, i))
        median = results[order[1]]
        left = Rect(region.x_lo, median.lo, region.y_lo, region.y_hi)
        right = Rect(median.lo + s, region.x_hi, region.y_lo, region.y_hi)
        lefts, rights = [agents[i] for i in order[:2]], [agents[i] for i in order[2:]]
        trace.append("four:cut")
        _demand_parts(lefts, left, 3, "four-agent median cut")
        _demand_parts(rights, right, 3, "four-agent median cut")
        return merge(_two(lefts, left, s, PARTS, log, trace), _two(rights, right, s, PARTS, log, trace))

    ai = next(i for i, r in enumerate(results) if isinstance(r, Stack))
    stack = results[ai]
    d = len(stack)
    if d < 16:
        raise AllocationInvariantError(f"{agents[ai].name}'s stack has {d} < 16 members")
    tops, bottoms = stack.tops, stack.bottoms
    h2 = _holders(agents, region, tops, v_req(2), log)
    h3 = _holders(agents, region, tops, v_req(3), log)
    everyone = set(range(4))

    def split(j: int, low: Sequence[int], label: str) -> dict[str, Rect]:
        # j is 0-based: the lower piece ends at top j, the upper starts at bottom j + 1
        trace.append(label)
        high = sorted(everyone - set(low))
        lower = band(region, region.y_lo, tops[j])
        upper = band(region, bottoms[j + 1], region.y_hi)
        return merge(_serve([agents[i] for i in sorted(low)], lower, s, log, trace),
                     _serve([agents[i] for i in high], upper, s, log, trace))

    # four equal holder sets in a row exist since there are only five sizes
    j2 = next(j for j in range(d - 3) if len({len(h2[j + t]) for t in range(4)}) == 1)
    z = len(h2[j2])
    if z == 0:
        return split(j2, [ai], "four:stack:owner-alone")
    if z == 1:
        return split(j2, h2[j2], "four:stack:one-holds")
    if z == 2:
        return split(j2, h2[j2], "four:stack:two-hold")
    m = len(h3[j2 + 1])
    if m <= 2:
        pair = sorted(h3[j2 + 1]) + [i for i in sorted(h2[j2]) if i not in h3[j2 + 1]]
        return split(j2, pair[:2], "four:stack:pair-completion")
    for j in (j2 + 1, j2 + 2):
        if len(h3[j]) == len(h3[j + 1]):
            if len(h3[j]) == 3:
                return split(j, h3[j], "four:stack:three-hold")
            return split(j, sorted(everyone - {ai}), "four:stack:others-hold")
    raise AllocationInvariantError("no repeated holder count among three values in {3, 4}")


# -- any number of agents ----------------------------------------------------------

def _generic(agents: Sequence[NormalizedAgent], region: Rect, s: Fraction, log, trace) -> dict[str, Rect]:
    n = len(agents)
    if n == 0:
        return {}
    if n == 1:
        return {agents[0].name: region}
    if n == 2:
        return _two(agents, region, s, VALUE, log, trace)
    if n == 3:
        return _three(agents, region, s, VALUE, log, trace)
    u = v_req(n - 1)
    results = [_knife(a, region, s, 1, int(u), VALUE, log) for a in agents]
    if all(isinstance(r, Cut) for r in results):
        i = _leftmost(results)
        cut = results[i]
        rest = [a for j, a in enumerate(agents) if j != i]
        right = cut.high_piece(region)
        trace.append(f"recursive[n={n}]:cut")
        _demand(rest, right, u, log, "recursive cut")
        return merge({agents[i].name: cut.low_piece(region)}, _generic(rest, right, s, log, trace))

    ai = next(i for i, r in enumerate(results) if isinstance(r, Stack))
    stack = results[ai]
    if len(stack) < n + 2:
        raise AllocationInvariantError(f"{agents[ai].name}'s stack has {len(stack)} < {n + 2} members")
    tops, bottoms = stack.tops, stack.bottoms
    held = _holders(agents, region, tops, u, log)
    k = next(j for j in range(len(held) - 1) if len(held[j]) == len(held[j + 1]))
    lower = band(region, region.y_lo, tops[k])
    upper = band(region, bottoms[k + 1], region.y_hi)
    h = held[k]
    if len(h) == 0:
        low_group, high_group, label = [ai], [j for j in range(n) if j != ai], "none"
    elif len(h) == n:
        low_group, high_group, label = [j for j in range(n) if j != ai], [ai], "all"
    else:
        low_group, high_group, label = sorted(h), [j for j in range(n) if j not in h], "some"
    trace.append(f"recursive[n={n}]:stack:{label}")
    low_agents = [agents[j] for j in low_group]
    high_agents = [agents[j] for j in high_group]
    # every group but a lone stack owner must value its side at least U
    for group, side in ((low_agents, lower), (high_agents, upper)):
        if group != [agents[ai]]:
            _demand(group, side, u, log, "recursive stack split")
    return merge(_generic(low_agents, lower, s, log, trace), _generic(high_agents, upper, s, log, trace))


# -- public entry points ------------------------------------------------------------

def _finish(agents: Sequence[NormalizedAgent], assignments: dict[str, Rect], region: Rect, s: Fraction,
            log, trace: list[str]) -> Allocation:
    require_values(agents, assignments, log)
    return Allocation(assignments, region, s, trace=trace)


def _check_agents(agents: Sequence[NormalizedAgent], n: int | None = None) -> None:
    if n is not None and len(agents) != n:
        raise ValueError(f"expected {n} agents, got {len(agents)}")
    names = [a.name for a in agents]
    if len(set(names)) != len(names):
        raise ValueError("agent names must be distinct")


def allocate_two(agents: Sequence[NormalizedAgent], region: Rect, s: Number, mode: str = "whole_land_k3", *,
                 log: QueryLog | None = None, trace: list[str] | None = None) -> Allocation:
    """Two agents each get a rectangle worth at least 1.

    ``whole_land_k3``: each agent has 3 whole maximin parts in the region.
    ``subset_V7``: each agent values the region at least 7.
    """
    s, trace = as_fraction(s), [] if trace is None else trace
    _check_agents(agents, 2)
    if mode == "whole_land_k3":
        kind = PARTS
        for a in agents:
            if len(a.parts_inside(region)) < 3:
                raise ValueError(f"{a.name} needs 3 whole parts inside the region")
    elif mode == "subset_V7":
        kind = VALUE
        for a in agents:
            if worth(a, region, log) < 7:
                raise ValueError(f"{a.name} values the region below 7")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _finish(agents, _two(agents, region, s, kind, log, trace), region, s, log, trace)


def allocate_three(agents: Sequence[NormalizedAgent], region: Rect, s: Number, mode: str = "parts14", *,
                   log: QueryLog | None = None, trace: list[str] | None = None) -> Allocation:
    """Three agents, each with 14 whole parts (``parts14``) or a region worth 17 (``subset17``)."""
    s, trace = as_fraction(s), [] if trace is None else trace
    _check_agents(agents, 3)
    if mode == "parts14":
        kind = PARTS
        for a in agents:
            if len(a.parts_inside(region)) < 14:
                raise ValueError(f"{a.name} needs 14 whole parts inside the region")
    elif mode == "subset17":
        kind = VALUE
        for a in agents:
            if worth(a, region, log) < 17:
                raise ValueError(f"{a.name} values the region below 17")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _finish(agents, _three(agents, region, s, kind, log, trace), region, s, log, trace)


def allocate_four(agents: Sequence[NormalizedAgent], region: Rect, s: Number, *,
                  log: QueryLog | None = None, trace: list[str] | None = None) -> Allocation:
    """Four agents, each with 24 whole parts inside the region."""
    s, trace = as_fraction(s), [] if trace is None else trace
    _check_agents(agents, 4)
    for a in agents:
        if len(a.parts_inside(region)) < 24:
            raise ValueError(f"{a.name} needs 24 whole parts inside the region")
    return _finish(agents, _four(agents, region, s, log, trace), region, s, log, trace)


def allocate_recursive(agents: Sequence[NormalizedAgent], region: Rect, s: Number, *,
                       log: QueryLog | None = None, trace: list[str] | None = None) -> Allocation:
    """Any number of agents, each valuing the region at least ``v_req(n)``.

    Three or four agents holding 14 or 24 whole parts inside the region are
    routed to the dedicated procedures, which need less.
    """
    s, trace = as_fraction(s), [] if trace is None else trace
    _check_agents(agents)
    n = len(agents)
    if n == 0:
        raise ValueError("need at least one agent")
    if n == 3 and all(len(a.parts_inside(region)) >= 14 for a in agents):
        return allocate_three(agents, region, s, "parts14", log=log, trace=trace)
    if n == 4 and all(len(a.parts_inside(region)) >= 24 for a in agents):
        return allocate_four(agents, region, s, log=log, trace=trace)
    need = v_req(n)
    for a in agents:
        if worth(a, region, log) < need:
            raise ValueError(f"{a.name} values the region below {need}")
    return _finish(agents, _generic(agents, region, s, log, trace), region, s, log, trace)
