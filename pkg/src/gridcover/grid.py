"""Rational grids S1 x S2 containing the origin.

All coordinates are :class:`fractions.Fraction` values; nothing in this
package ever rounds.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence, Union

from .errors import DuplicateEntry, GenerationFailed, MissingOrigin, TooSmall

Rational = Fraction
RationalLike = Union[int, str, Fraction]

ORIGIN = "origin"
BOUNDARY = "boundary"
INTERIOR = "interior"

GENERIC_RETRIES = 64
_NUM_RANGE = 10**6
_DEN_RANGE = 10**3


def to_rational(value: RationalLike) -> Fraction:
    """Parse an int, a Fraction or a ``"p/q"`` / decimal-integer string.

    Floats are refused: they would smuggle rounding into the grid.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(q: Fraction) -> str:
    return str(q)


class GridPoint(NamedTuple):
    x: Fraction
    y: Fraction

    @property
    def kind(self) -> str:
        if self.x == 0 and self.y == 0:
            return ORIGIN
        if self.x == 0 or self.y == 0:
            return BOUNDARY
        return INTERIOR

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


@dataclass(frozen=True)
class Grid:
    """The grid S1 x S2 with both axes sorted; ``s1[i0] == s2[j0] == 0``."""

    s1: tuple[Fraction, ...]
    s2: tuple[Fraction, ...]
    i0: int
    j0: int

    @property
    def n(self) -> int:
        return len(self.s1)

    @property
    def m(self) -> int:
        return len(self.s2)

    @property
    def is_square(self) -> bool:
        return self.n == self.m

    @property
    def is_standard(self) -> bool:
        expected = tuple(Fraction(i) for i in range(self.n))
        return self.s1 == expected and self.s2 == expected

    @cached_property
    def nonzero_points(self) -> tuple[GridPoint, ...]:
        """Nonzero points in x-major order; indices into this tuple are
        the point indices used by line families and programs."""
        return tuple(
            GridPoint(x, y)
            for x in self.s1
            for y in self.s2
            if x != 0 or y != 0
        )

    @cached_property
    def point_index(self) -> dict[GridPoint, int]:
        return {p: i for i, p in enumerate(self.nonzero_points)}

    def boundary_points(self) -> list[GridPoint]:
        return [p for p in self.nonzero_points if p.kind == BOUNDARY]

    def interior_points(self) -> list[GridPoint]:
        return [p for p in self.nonzero_points if p.kind == INTERIOR]

    def classify(self, x: Fraction, y: Fraction) -> GridPoint:
        p = GridPoint(Fraction(x), Fraction(y))
        if p.x not in self._s1_set or p.y not in self._s2_set:
            raise ValueError(f"{p} is not a point of the grid")
        return p

    @cached_property
    def _s1_set(self) -> frozenset:
        return frozenset(self.s1)

    @cached_property
    def _s2_set(self) -> frozenset:
        return frozenset(self.s2)

    def contains(self, x: Fraction, y: Fraction) -> bool:
        return x in self._s1_set and y in self._s2_set

    def to_json(self) -> str:
        return json.dumps(
            {"s1": [str(v) for v in self.s1], "s2": [str(v) for v in self.s2]}
        )

    def describe(self) -> str:
        if self.is_standard:
            return f"standard n={self.n}"
        return f"{self.n}x{self.m} grid"


def _normalize_axis(values: Iterable[RationalLike], name: str) -> tuple[tuple[Fraction, ...], int]:
    axis = [to_rational(v) for v in values]
    if len(axis) < 2:
        raise TooSmall(f"{name} needs at least 2 entries, got {len(axis)}")
    if len(set(axis)) != len(axis):
        raise DuplicateEntry(f"{name} contains repeated entries")
    if 0 not in axis:
        raise MissingOrigin(f"{name} does not contain 0")
    axis.sort()
    return tuple(axis), axis.index(0)


def make_grid(s1: Sequence[RationalLike], s2: Sequence[RationalLike]) -> Grid:
    # Precedence: MissingOrigin is reported before size problems so that
    # ([1, 2], [0, 1]) fails on the origin.
    for name, axis in (("s1", s1), ("s2", s2)):
        if not any(to_rational(v) == 0 for v in axis):
            raise MissingOrigin(f"{name} does not contain 0")
    a1, i0 = _normalize_axis(s1, "s1")
    a2, j0 = _normalize_axis(s2, "s2")
    return Grid(a1, a2, i0, j0)


def grid_from_json(text: str) -> Grid:
    doc = json.loads(text)
    return make_grid(doc["s1"], doc["s2"])


def standard_grid(n: int) -> Grid:
    if n < 2:
        raise TooSmall(f"standard grid needs n >= 2, got {n}")
    axis = list(range(n))
    return make_grid(axis, axis)


def rectangular_grid(n: int, m: int) -> Grid:
    """{0..n-1} x {0..m-1}."""
    if n < 2 or m < 2:
        raise TooSmall(f"grid needs n, m >= 2, got {n}x{m}")
    return make_grid(range(n), range(m))


def named_grid(kind: str, n: int) -> Grid:
    if n < 2:
        raise TooSmall(f"{kind} grid needs n >= 2, got {n}")
    if kind == "exponential":
        axis = [0] + [2**i for i in range(n - 1)]
    elif kind == "quadratic":
        axis = [i * i for i in range(n)]
    else:
        raise ValueError(f"unknown grid kind {kind!r}")
    return make_grid(axis, axis)


def _sample_axis(rng: random.Random, size: int) -> list[Fraction]:
    values: set[Fraction] = set()
    while len(values) < size - 1:
        p = 0
        while p == 0:
            p = rng.randint(-_NUM_RANGE, _NUM_RANGE)
        q = rng.randint(1, _DEN_RANGE)
        values.add(Fraction(p, q))
    return [Fraction(0)] + sorted(values)


def generic_grid(n: int, m: int, seed: int) -> Grid:
    """A seeded n x m grid verified to be exactly generic (Delta = 0)."""
    if n < 2 or m < 2:
        raise TooSmall(f"grid needs n, m >= 2, got {n}x{m}")
    rng = random.Random(seed)
    for _ in range(GENERIC_RETRIES):
        g = make_grid(_sample_axis(rng, n), _sample_axis(rng, m))
        if delta_genericity(g) == 0:
            return g
    raise GenerationFailed(
        f"no generic {n}x{m} grid within {GENERIC_RETRIES} draws (seed={seed})"
    )


def delta_genericity(g: Grid) -> int:
    """Largest number of interior points on a line through two boundary points.

    Two boundary points on the same axis span that axis, which contains the
    origin, so only pairs (a, 0), (0, b) matter. Such a line is
    x/a + y/b = 1, and for each interior column x we solve for y.
    """
    xs = [x for x in g.s1 if x != 0]
    ys = [y for y in g.s2 if y != 0]
    ys_set = set(ys)
    worst = 0
    for a in xs:
        for b in ys:
            count = 0
            for x in xs:
                if x == a:
                    continue
                if b * (1 - x / a) in ys_set:
                    count += 1
            worst = max(worst, count)
    return worst
