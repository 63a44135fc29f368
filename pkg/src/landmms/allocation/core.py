"""Allocation records and the helpers shared by all allocators."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from ..errors import AllocationInvariantError
from ..geometry import Number, Rect, Shape, as_fraction, is_s_separated
from ..valuation import VERTICAL, GridValuation, QueryLog, eval_query, normalize_to_partition


@dataclass(frozen=True)
class NormalizedAgent:
    """An agent whose maximin parts are each worth 1, with nothing outside them."""

    name: str
    v: GridValuation
    parts: tuple[Rect, ...]

    @classmethod
    def from_partition(cls, name: str, v: GridValuation, parts: Sequence[Rect]) -> NormalizedAgent:
        return cls(name, normalize_to_partition(v, parts), tuple(parts))

    def parts_inside(self, region: Rect) -> list[Rect]:
        return [q for q in self.parts if region.contains(q)]


@dataclass
class Allocation:
    """One rectangle per agent; checked on construction."""

    assignments: dict[str, Rect]
    region: Rect
    s: Fraction
    shape: Shape = field(default_factory=Shape)
    trace: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.s = as_fraction(self.s)
        problems = allocation_problems(self.assignments, self.region, self.s, self.shape)
        if problems:
            raise AllocationInvariantError("; ".join(problems))

    def to_json(self) -> dict:
        from ..geometry import format_rational
        return {"region": self.region.to_json(), "s": format_rational(self.s), "shape": self.shape.to_json(),
                "assignments": {name: q.to_json() for name, q in sorted(self.assignments.items())},
                "trace": list(self.trace)}

    @classmethod
    def from_json(cls, data: dict) -> Allocation:
        from ..geometry import parse_rational
        return cls({name: Rect.from_json(q) for name, q in data["assignments"].items()},
                   Rect.from_json(data["region"]), parse_rational(data["s"]),
                   Shape.from_json(data.get("shape", "rectangle")), list(data.get("trace", [])))


def allocation_problems(assignments: Mapping[str, Rect], region: Rect, s: Number,
                        shape: Shape | None = None) -> list[str]:
    """Everything wrong with an assignment: separation, containment and shape."""
    s = as_fraction(s)
    shape = shape or Shape()
    problems = []
    items = sorted(assignments.items())
    for name, q in items:
        if not region.contains(q):
            problems.append(f"{name}'s piece {q} leaves the region {region}")
        if not shape.admits(q):
            problems.append(f"{name}'s piece {q} is not an admissible {shape.kind} piece")
    for i, (a, qa) in enumerate(items):
        for b, qb in items[i + 1:]:
            if not is_s_separated(qa, qb, s):
                problems.append(f"pieces of {a} and {b} are not {s}-separated")
    return problems


@lru_cache(maxsize=None)
def v_req(n: int) -> Fraction:
    """Value of a land-subset that lets each of n agents get a value-1 rectangle."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1:
        return Fraction(1)
    if n == 2:
        return Fraction(7)
    if n == 3:
        return Fraction(17)
    u = v_req(n - 1)
    return max(2 * u, u + 2 * n + 4)


def worth(agent: NormalizedAgent, q: Rect, log: QueryLog | None = None) -> Fraction:
    if q.is_degenerate():
        return Fraction(0)
    return eval_query(agent.v, VERTICAL, q, q.x_hi, log, agent.name)


def band(region: Rect, y_lo: Fraction, y_hi: Fraction) -> Rect:
    """The full-width slice of ``region`` between two heights."""
    return Rect(region.x_lo, region.x_hi, max(y_lo, region.y_lo), min(y_hi, region.y_hi))


def merge(*pieces: Mapping[str, Rect]) -> dict[str, Rect]:
    out: dict[str, Rect] = {}
    for piece in pieces:
        clash = out.keys() & piece.keys()
        if clash:
            raise AllocationInvariantError(f"agents {sorted(clash)} were served twice")
        out.update(piece)
    return out


def require_values(agents: Sequence[NormalizedAgent], assignments: Mapping[str, Rect],
                   log: QueryLog | None = None) -> None:
    for a in agents:
        if a.name not in assignments:
            raise AllocationInvariantError(f"agent {a.name} got nothing")
        got = worth(a, assignments[a.name], log)
        if got < 1:
            raise AllocationInvariantError(f"agent {a.name} got value {got} < 1")
