"""Instances, their JSON file format, and instance generators."""
from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import InstanceFormatError
from .geometry import (Number, Rect, Shape, as_fraction, fatness, format_rational, linf_distance,
                       overlaps, parse_rational)
from .valuation import GridValuation

UNIT_SQUARE = Rect(0, 1, 0, 1)


@dataclass(frozen=True)
class Instance:
    land: Rect
    s: Fraction
    agents: tuple[tuple[str, GridValuation], ...]
    shape: Shape = Shape()

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", as_fraction(self.s))
        object.__setattr__(self, "agents", tuple((name, v) for name, v in self.agents))
        if self.s < 0:
            raise ValueError("separation must be nonnegative")
        names = [name for name, _ in self.agents]
        if len(set(names)) != len(names):
            raise ValueError("agent names must be distinct")
        for name, v in self.agents:
            if v.domain != self.land:
                raise ValueError(f"agent {name}'s valuation covers {v.domain}, not the land {self.land}")

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.agents]

    def valuation(self, name: str) -> GridValuation:
        for other, v in self.agents:
            if other == name:
                return v
        raise KeyError(f"no agent named {name!r}")

    def to_json(self) -> dict:
        return {"land": self.land.to_json(), "s": format_rational(self.s), "shape": self.shape.to_json(),
                "agents": [{"name": name, **v.to_json()} for name, v in self.agents]}

    @classmethod
    def from_json(cls, data) -> Instance:
        if not isinstance(data, dict):
            raise InstanceFormatError("", "instance must be an object")
        land = _field(data, "land", _parse_rect)
        s = _field(data, "s", _parse_rat)
        shape = _field(data, "shape", Shape.from_json) if "shape" in data else Shape()
        raw_agents = _field(data, "agents", lambda a: a if isinstance(a, list) else _bad("expected a list"))
        agents = []
        for idx, entry in enumerate(raw_agents):
            path = f"agents[{idx}]"
            if not isinstance(entry, dict):
                raise InstanceFormatError(path, "expected an object")
            name = _field(entry, "name", lambda x: x if isinstance(x, str) else _bad("expected a string"), path)
            xs = _field(entry, "x_coords", _parse_rat_list, path)
            ys = _field(entry, "y_coords", _parse_rat_list, path)
            cells = _field(entry, "cells", lambda c: [_parse_rat_list(col) for col in c], path)
            try:
                agents.append((name, GridValuation(tuple(xs), tuple(ys), tuple(tuple(c) for c in cells))))
            except ValueError as exc:
                raise InstanceFormatError(path, str(exc)) from None
        try:
            return cls(land, s, tuple(agents), shape)
        except ValueError as exc:
            raise InstanceFormatError("", str(exc)) from None


def _bad(message: str):
    raise ValueError(message)


def _parse_rat(x) -> Fraction:
    if not isinstance(x, (str, int)) or isinstance(x, bool):
        raise ValueError(f"expected a rational string, got {x!r}")
    return as_fraction(x)


def _parse_rat_list(xs) -> list[Fraction]:
    if not isinstance(xs, list):
        raise ValueError("expected a list")
    return [_parse_rat(x) for x in xs]


def _parse_rect(data) -> Rect:
    if not isinstance(data, dict) or set(data) != {"x", "y"}:
        raise ValueError('expected {"x": [lo, hi], "y": [lo, hi]}')
    (x_lo, x_hi), (y_lo, y_hi) = data["x"], data["y"]
    return Rect(_parse_rat(x_lo), _parse_rat(x_hi), _parse_rat(y_lo), _parse_rat(y_hi))


def _field(data: dict, key: str, parse, parent: str = ""):
    path = f"{parent}.{key}" if parent else key
    if key not in data:
        raise InstanceFormatError(path, "missing field")
    try:
        return parse(data[key])
    except InstanceFormatError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise InstanceFormatError(path, str(exc)) from None


def save(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance.to_json(), indent=1) + "\n")


def load(path: str | Path) -> Instance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError("", f"not valid JSON: {exc}") from None
    return Instance.from_json(data)


# -- generators ----------------------------------------------------------------

def agent_names(n: int) -> list[str]:
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return [letters[i] if n <= 26 else f"agent{i}" for i in range(n)]


def gen_uniform(land: Rect, n: int, s: Number, shape: Shape | None = None) -> Instance:
    if n < 1:
        raise ValueError("need at least one agent")
    v = GridValuation.uniform(land)
    return Instance(land, as_fraction(s), tuple((name, v) for name in agent_names(n)), shape or Shape())


def gen_random(seed: int, land: Rect, n: int, s: Number, grid_dims: tuple[int, int] = (6, 6),
               shape: Shape | None = None, max_mass: int = 9) -> Instance:
    """Agents with random integer cell masses on an evenly spaced grid, each normalized to total 1."""
    cols, rows = grid_dims
    if cols < 1 or rows < 1:
        raise ValueError("grid dimensions must be positive")
    rng = random.Random(seed)
    xs = tuple(land.x_lo + land.width * Fraction(i, cols) for i in range(cols + 1))
    ys = tuple(land.y_lo + land.height * Fraction(j, rows) for j in range(rows + 1))
    agents = []
    for name in agent_names(n):
        masses = [[rng.randint(0, max_mass) for _ in range(rows)] for _ in range(cols)]
        if not any(any(col) for col in masses):
            masses[0][0] = 1
        total = sum(map(sum, masses))
        cells = tuple(tuple(Fraction(m, total) for m in col) for col in masses)
        agents.append((name, GridValuation(xs, ys, cells)))
    return Instance(land, as_fraction(s), tuple(agents), shape or Shape())


def gen_crossing_fixture(r: Number, eps: Number) -> tuple[list[Rect], list[Rect]]:
    """Two sets of ceil(r)+1 disjoint r-fat rectangles in which every cross pair overlaps."""
    r, eps = as_fraction(r), as_fraction(eps)
    if r < 1:
        raise ValueError("fatness bound must be at least 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    m = math.ceil(r)
    vertical = [Rect(i, i + 1, 1 - eps, m + eps) for i in range(m + 1)]
    horizontal = [q.transposed() for q in vertical]
    worst = fatness(vertical[0])
    if worst > r:
        raise ValueError(f"eps={eps} gives fatness {worst} > {r}")
    return vertical, horizontal


@dataclass(frozen=True)
class PolygonFixture:
    """Point sets, pool size and scaling behind the separation impossibility instance."""

    point_sets: tuple[tuple[tuple[Fraction, Fraction], ...], ...]
    pool_eps: Fraction
    margin: Fraction
    scale: Fraction
    instance: Instance

    def pools(self, agent: int) -> list[Rect]:
        h = self.pool_eps / 2
        return [Rect(x - h, x + h, y - h, y + h) for x, y in self.point_sets[agent]]

    def within_set_distance(self) -> Fraction:
        return min(_point_dist(a, b) for pts in self.point_sets
                   for a, b in itertools.combinations(pts, 2))

    def best_selection_distance(self) -> Fraction:
        """Largest, over one point per set, of the smallest cross-set distance."""
        return _best_selection(self.point_sets)


def _point_dist(a, b) -> Fraction:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def _best_selection(point_sets) -> Fraction:
    best = None
    for choice in itertools.product(*point_sets):
        closest = min(_point_dist(a, b) for a, b in itertools.combinations(choice, 2))
        if best is None or closest > best:
            best = closest
    return best


def _polygon_sets(n: int, precision: int):
    # regular 2n-gon with unit sides, turned so that no side is axis-parallel
    radius = 1 / (2 * math.sin(math.pi / (2 * n)))
    turn = 0.0 if n == 2 else 0.3
    vertices = []
    for k in range(2 * n):
        angle = turn + k * math.pi / n
        vertices.append((Fraction(radius * math.cos(angle)).limit_denominator(precision),
                         Fraction(radius * math.sin(angle)).limit_denominator(precision)))
    odd = tuple(vertices[0::2])
    even = tuple(vertices[1::2])
    return tuple([odd] * (n - 1) + [even])


def gen_polygon_fixture(n: int, s: Number) -> PolygonFixture:
    """Instance where each agent's maximin share is 1 yet no s-separated allocation helps all.

    Agents 1..n-1 value unit pools around alternate vertices of a regular
    2n-gon, agent n the pools around the others. Vertex coordinates are
    rationalized and every inequality the construction needs is re-checked
    exactly; precision is raised until the checks pass.
    """
    s = as_fraction(s)
    if n < 2:
        raise ValueError("need at least two agents")
    if s <= 0:
        raise ValueError("separation must be positive")
    for precision in (10**4, 10**6, 10**9, 10**12):
        sets = _polygon_sets(n, precision)
        within = min(_point_dist(a, b) for pts in sets for a, b in itertools.combinations(pts, 2))
        across = _best_selection(sets)
        if not across < within:
            continue
        margin = (within / across - 1) / 2
        pool_eps = s * margin / (2 * (6 + 4 * margin))
        scale = (s - 4 * pool_eps) * (1 + margin) / within
        if not (s - 4 * pool_eps) * (1 + margin) > s + 2 * pool_eps:
            continue
        if not across * scale < s - 4 * pool_eps:
            continue
        scaled = tuple(tuple((x * scale, y * scale) for x, y in pts) for pts in sets)
        h = pool_eps / 2
        all_pts = [p for pts in scaled for p in pts]
        x0 = min(p[0] for p in all_pts) - h
        y0 = min(p[1] for p in all_pts) - h
        shifted = tuple(tuple((x - x0, y - y0) for x, y in pts) for pts in scaled)
        land = Rect(0, max(p[0] for pts in shifted for p in pts) + h,
                    0, max(p[1] for pts in shifted for p in pts) + h)
        agents = []
        for name, pts in zip(agent_names(n), shifted):
            boxes = [(Rect(x - h, x + h, y - h, y + h), 1) for x, y in pts]
            agents.append((name, GridValuation.from_boxes(land, boxes)))
        instance = Instance(land, s, tuple(agents), Shape("square"))
        return PolygonFixture(shifted, pool_eps, margin, scale, instance)
    raise ArithmeticError(f"could not certify a rational {2 * n}-gon fixture")


def gen_planted_guillotine(seed: int, k: int, s: Number, *, unit: Number = Fraction(1, 40),
                           land: Rect = UNIT_SQUARE) -> tuple[GridValuation, list[Rect]]:
    """A valuation built from a random k-part s-separated guillotine partition.

    Cuts land on multiples of ``unit``. Each part carries mass 1/k spread
    evenly and the strips between parts are worthless, so no k-part
    partition can beat 1/k.
    """
    s, unit = as_fraction(s), as_fraction(unit)
    rng = random.Random(seed)
    regions = [land]
    attempts = 0
    while len(regions) < k:
        attempts += 1
        if attempts > 1000 * k:
            raise ValueError(f"could not fit {k} parts with separation {s} at resolution {unit}")
        idx = rng.randrange(len(regions))
        q = regions[idx]
        axis = rng.choice("xy")
        lo, hi = (q.x_lo, q.x_hi) if axis == "x" else (q.y_lo, q.y_hi)
        first = math.floor(lo / unit) + 1
        last = math.ceil((hi - s) / unit) - 1
        choices = [c * unit for c in range(first, last + 1) if lo < c * unit and c * unit + s < hi]
        if not choices:
            continue
        a = rng.choice(choices)
        if axis == "x":
            pieces = [Rect(q.x_lo, a, q.y_lo, q.y_hi), Rect(a + s, q.x_hi, q.y_lo, q.y_hi)]
        else:
            pieces = [Rect(q.x_lo, q.x_hi, q.y_lo, a), Rect(q.x_lo, q.x_hi, a + s, q.y_hi)]
        regions[idx:idx + 1] = pieces
    parts = sorted(regions, key=Rect.sort_key)
    v = GridValuation.from_boxes(land, [(q, Fraction(1, k)) for q in parts])
    return v, parts


def gen_planted_grid(seed: int, cols: int, rows: int, s: Number, *, unit: Number = Fraction(1, 100),
                     land: Rect = UNIT_SQUARE) -> tuple[GridValuation, list[Rect]]:
    """A cols x rows product layout of parts, full-span gaps of width s between them.

    Widths and heights are random multiples of ``unit``. Each part carries
    mass 1/(cols*rows), so every column and every row is worth the same and
    value-based strip boundaries land on part edges.
    """
    s, unit = as_fraction(s), as_fraction(unit)
    rng = random.Random(seed)

    def sizes(span: Fraction, count: int) -> list[Fraction]:
        slots = int((span - (count - 1) * s) / unit)
        if slots < count:
            raise ValueError(f"{count} parts with separation {s} do not fit at resolution {unit}")
        cuts = sorted(rng.sample(range(1, slots), count - 1))
        return [(b - a) * unit for a, b in zip([0] + cuts, cuts + [slots])]

    def spans(lo: Fraction, widths: list[Fraction]) -> list[tuple[Fraction, Fraction]]:
        out, at = [], lo
        for w in widths:
            out.append((at, at + w))
            at += w + s
        return out

    xs = spans(land.x_lo, sizes(land.width, cols))
    ys = spans(land.y_lo, sizes(land.height, rows))
    parts = [Rect(x0, x1, y0, y1) for x0, x1 in xs for y0, y1 in ys]
    k = cols * rows
    v = GridValuation.from_boxes(land, [(q, Fraction(1, k)) for q in parts])
    return v, parts


def gen_planted_bands(seed: int, k: int, s: Number, *, unit: Number = Fraction(1, 400),
                      land: Rect = UNIT_SQUARE, axis: str = "y") -> list[Rect]:
    """k full-span bands of random thickness, consecutive bands exactly s apart.

    Thicknesses are random multiples of ``unit``; ``axis`` picks horizontal
    bands ("y") or vertical columns ("x").
    """
    s, unit = as_fraction(s), as_fraction(unit)
    rng = random.Random(seed)
    lo, hi = (land.y_lo, land.y_hi) if axis == "y" else (land.x_lo, land.x_hi)
    room = hi - lo - (k - 1) * s
    slots = int(room / unit)
    if slots < k:
        raise ValueError(f"{k} bands with separation {s} do not fit at resolution {unit}")
    cuts = sorted(rng.sample(range(1, slots), k - 1))
    sizes = [(b - a) * unit for a, b in zip([0] + cuts, cuts + [slots])]
    parts, at = [], lo
    for size in sizes:
        if axis == "y":
            parts.append(Rect(land.x_lo, land.x_hi, at, at + size))
        else:
            parts.append(Rect(at, at + size, land.y_lo, land.y_hi))
        at += size + s
    return parts


def selections_all_close(pool_sets: Sequence[Sequence[Rect]], s: Number) -> bool:
    """True when every one-pool-per-agent choice has two pools closer than ``s``."""
    s = as_fraction(s)
    for choice in itertools.product(*pool_sets):
        if all(linf_distance(a, b) >= s and not overlaps(a, b)
               for a, b in itertools.combinations(choice, 2)):
            return False
    return True
