"""Exact axis-aligned rectangle geometry.

Every coordinate is a :class:`fractions.Fraction`. Rectangles are closed sets;
two rectangles *overlap* when their intersection has positive area and are
*disjoint* otherwise, so edge-touching rectangles are disjoint.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Number = Union[int, str, Fraction]


def as_fraction(value: Number) -> Fraction:
    """Convert an int, a ``"p/q"`` string or a Fraction to a Fraction.

    Floats are refused: they would silently smuggle rounding error into
    comparisons that must be exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"expected int, str or Fraction, got {type(value).__name__}")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    num, sep, den = text.partition("/")
    try:
        if sep:
            return Fraction(int(num), int(den))
        return Fraction(int(num))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational of the form p or p/q: {text!r}") from exc


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Rect:
    """Closed rectangle ``[x_lo, x_hi] x [y_lo, y_hi]``."""

    x_lo: Fraction
    x_hi: Fraction
    y_lo: Fraction
    y_hi: Fraction

    def __post_init__(self) -> None:
        for name in ("x_lo", "x_hi", "y_lo", "y_hi"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.x_lo > self.x_hi or self.y_lo > self.y_hi:
            raise ValueError(f"inverted rectangle {self}")

    @property
    def width(self) -> Fraction:
        return self.x_hi - self.x_lo

    @property
    def height(self) -> Fraction:
        return self.y_hi - self.y_lo

    @property
    def area(self) -> Fraction:
        return self.width * self.height

    @property
    def long_side(self) -> Fraction:
        return max(self.width, self.height)

    @property
    def short_side(self) -> Fraction:
        return min(self.width, self.height)

    def is_degenerate(self) -> bool:
        return self.width == 0 or self.height == 0

    def contains(self, other: Rect) -> bool:
        return (self.x_lo <= other.x_lo and other.x_hi <= self.x_hi
                and self.y_lo <= other.y_lo and other.y_hi <= self.y_hi)

    def intersection(self, other: Rect) -> Rect | None:
        x_lo, x_hi = max(self.x_lo, other.x_lo), min(self.x_hi, other.x_hi)
        y_lo, y_hi = max(self.y_lo, other.y_lo), min(self.y_hi, other.y_hi)
        if x_lo > x_hi or y_lo > y_hi:
            return None
        return Rect(x_lo, x_hi, y_lo, y_hi)

    def transposed(self) -> Rect:
        return Rect(self.y_lo, self.y_hi, self.x_lo, self.x_hi)

    def sort_key(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.x_lo, self.y_lo, self.x_hi, self.y_hi)

    def to_json(self) -> dict:
        return {"x": [format_rational(self.x_lo), format_rational(self.x_hi)],
                "y": [format_rational(self.y_lo), format_rational(self.y_hi)]}

    @classmethod
    def from_json(cls, data: dict) -> Rect:
        (x_lo, x_hi), (y_lo, y_hi) = data["x"], data["y"]
        return cls(parse_rational(x_lo), parse_rational(x_hi),
                   parse_rational(y_lo), parse_rational(y_hi))

    def __repr__(self) -> str:
        f = format_rational
        return f"Rect([{f(self.x_lo)},{f(self.x_hi)}]x[{f(self.y_lo)},{f(self.y_hi)}])"


def rect(x_lo: Number, x_hi: Number, y_lo: Number, y_hi: Number) -> Rect:
    return Rect(as_fraction(x_lo), as_fraction(x_hi), as_fraction(y_lo), as_fraction(y_hi))


def _gap(a_lo: Fraction, a_hi: Fraction, b_lo: Fraction, b_hi: Fraction) -> Fraction:
    return max(Fraction(0), b_lo - a_hi, a_lo - b_hi)


def linf_distance(a: Rect, b: Rect) -> Fraction:
    """Infimum of the l-infinity distance over point pairs of ``a`` and ``b``."""
    return max(_gap(a.x_lo, a.x_hi, b.x_lo, b.x_hi),
               _gap(a.y_lo, a.y_hi, b.y_lo, b.y_hi))


def overlaps(a: Rect, b: Rect) -> bool:
    return (min(a.x_hi, b.x_hi) > max(a.x_lo, b.x_lo)
            and min(a.y_hi, b.y_hi) > max(a.y_lo, b.y_lo))


def is_s_separated(a: Rect, b: Rect, s: Number) -> bool:
    s = as_fraction(s)
    if s < 0:
        raise ValueError(f"separation must be nonnegative, got {s}")
    if s == 0:
        return not overlaps(a, b)
    return linf_distance(a, b) >= s


def pairwise_s_separated(rects: Iterable[Rect], s: Number) -> bool:
    rects = list(rects)
    return all(is_s_separated(rects[i], rects[j], s)
               for i in range(len(rects)) for j in range(i + 1, len(rects)))


def pairwise_disjoint(rects: Iterable[Rect]) -> bool:
    rects = list(rects)
    return not any(overlaps(rects[i], rects[j])
                   for i in range(len(rects)) for j in range(i + 1, len(rects)))


def wrap(q: Rect, s: Number) -> Rect:
    """Inflate ``q`` by ``s/2`` on all four sides.

    Two rectangles are s-separated exactly when their wraps do not overlap.
    """
    s = as_fraction(s)
    if s < 0:
        raise ValueError(f"separation must be nonnegative, got {s}")
    h = s / 2
    return Rect(q.x_lo - h, q.x_hi + h, q.y_lo - h, q.y_hi + h)


def unwrap(q: Rect, s: Number) -> Rect:
    h = as_fraction(s) / 2
    return Rect(q.x_lo + h, q.x_hi - h, q.y_lo + h, q.y_hi - h)


def fatness(q: Rect) -> Fraction:
    if q.is_degenerate():
        raise ValueError(f"fatness undefined for degenerate rectangle {q}")
    return q.long_side / q.short_side


def is_r_fat(q: Rect, r: Number) -> bool:
    return fatness(q) <= as_fraction(r)


def is_square(q: Rect) -> bool:
    return not q.is_degenerate() and q.width == q.height


@dataclass(frozen=True)
class Shape:
    """Usable-piece regime: ``square``, ``fat`` (with ratio bound ``r``) or ``rectangle``."""

    kind: str = "rectangle"
    r: Fraction | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("square", "fat", "rectangle"):
            raise ValueError(f"unknown shape regime {self.kind!r}")
        if self.kind == "fat":
            if self.r is None:
                raise ValueError("the fat regime needs a ratio bound r")
            object.__setattr__(self, "r", as_fraction(self.r))
            if self.r < 1:
                raise ValueError(f"fatness bound must be at least 1, got {self.r}")
        elif self.r is not None:
            raise ValueError(f"the {self.kind} regime takes no ratio bound")

    @classmethod
    def parse(cls, text: str) -> Shape:
        """Parse ``square``, ``rect``/``rectangle`` or ``fat:R``."""
        if text in ("rect", "rectangle"):
            return cls("rectangle")
        if text == "square":
            return cls("square")
        if text.startswith("fat:"):
            return cls("fat", parse_rational(text[4:]))
        raise ValueError(f"unknown shape {text!r}; expected square, rect or fat:R")

    @property
    def ratio(self) -> Fraction | None:
        if self.kind == "square":
            return Fraction(1)
        return self.r

    def admits(self, q: Rect) -> bool:
        if q.is_degenerate():
            return False
        if self.kind == "rectangle":
            return True
        if self.kind == "square":
            return q.width == q.height
        return fatness(q) <= self.r

    def to_json(self):
        if self.kind == "fat":
            return {"fat": format_rational(self.r)}
        return self.kind

    @classmethod
    def from_json(cls, data) -> Shape:
        if data == "square":
            return cls("square")
        if data == "rectangle":
            return cls("rectangle")
        if isinstance(data, dict) and set(data) == {"fat"}:
            return cls("fat", parse_rational(data["fat"]))
        raise ValueError(f"bad shape {data!r}")
