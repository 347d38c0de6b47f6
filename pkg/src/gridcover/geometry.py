"""Origin-avoiding lines a*x + b*y = 1 and the admissible line family of a grid."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Optional

from .errors import NotSquare, NotStandardGrid, SamePoint
from .grid import Grid, GridPoint, to_rational

HORIZONTAL = "horizontal"
VERTICAL = "vertical"
MINUS_ONE = "minus_one"
RESTRICTED_SLOPES = frozenset({HORIZONTAL, VERTICAL, MINUS_ONE})


@dataclass(frozen=True, order=True)
class Line:
    """The line {(x, y) : a*x + b*y = 1}.

    Every line missing the origin has exactly one such form, so equality of
    (a, b) is equality of lines.
    """

    a: Fraction
    b: Fraction

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise ValueError("a and b cannot both be zero")

    def contains(self, p: tuple[Fraction, Fraction]) -> bool:
        return self.a * p[0] + self.b * p[1] == 1

    @property
    def slope(self) -> Optional[Fraction]:
        """dy/dx, or None for a vertical line."""
        if self.b == 0:
            return None
        return -self.a / self.b

    @property
    def slope_kind(self) -> str:
        if self.b == 0:
            return VERTICAL
        if self.a == 0:
            return HORIZONTAL
        if self.a == self.b:
            return MINUS_ONE
        return "other"

    def slope_label(self) -> str:
        s = self.slope
        return "inf" if s is None else str(s)

    def __str__(self) -> str:
        return f"{self.a};{self.b}"

    def describe(self) -> str:
        if self.b == 0:
            return f"x={1 / self.a}"
        if self.a == 0:
            return f"y={1 / self.b}"
        return _term(self.a, "x") + _signed(_term(self.b, "y")) + "=1"

    @classmethod
    def parse(cls, text: str) -> "Line":
        a, b = text.split(";")
        return cls(to_rational(a), to_rational(b))

    @classmethod
    def vertical(cls, x: Fraction) -> "Line":
        return cls(1 / Fraction(x), Fraction(0))

    @classmethod
    def horizontal(cls, y: Fraction) -> "Line":
        return cls(Fraction(0), 1 / Fraction(y))

    @classmethod
    def intercepts(cls, x: Fraction, y: Fraction) -> "Line":
        """The line through (x, 0) and (0, y)."""
        return cls(1 / Fraction(x), 1 / Fraction(y))


def _term(c: Fraction, var: str) -> str:
    if c == 1:
        return var
    if c == -1:
        return "-" + var
    return f"{c}{var}" if c.denominator == 1 else f"({c}){var}"


def _signed(text: str) -> str:
    return text if text.startswith("-") else "+" + text


def line_through(p: tuple[Fraction, Fraction], q: tuple[Fraction, Fraction]) -> Optional[Line]:
    """The line through two distinct nonzero points.

    Returns None when p, q and the origin are collinear: no origin-avoiding
    line contains both points then.
    """
    px, py = Fraction(p[0]), Fraction(p[1])
    qx, qy = Fraction(q[0]), Fraction(q[1])
    if (px, py) == (qx, qy):
        raise SamePoint(f"({px},{py}) given twice")
    det = px * qy - py * qx
    if det == 0:
        return None
    return Line((qy - py) / det, (px - qx) / det)


@dataclass(frozen=True)
class LineFamily:
    """Lines with their incidence lists (indices into ``points``)."""

    points: tuple[GridPoint, ...]
    lines: tuple[Line, ...]
    incidence: tuple[tuple[int, ...], ...]
    _index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {ln: i for i, ln in enumerate(self.lines)})

    def __len__(self) -> int:
        return len(self.lines)

    def __contains__(self, line: Line) -> bool:
        return line in self._index

    def index(self, line: Line) -> int:
        return self._index[line]

    def points_on(self, i: int) -> list[GridPoint]:
        return [self.points[j] for j in self.incidence[i]]

    def lines_through(self) -> list[list[int]]:
        """For each point index, the indices of family lines containing it."""
        through: list[list[int]] = [[] for _ in self.points]
        for li, inc in enumerate(self.incidence):
            for pi in inc:
                through[pi].append(li)
        return through

    def subfamily(self, keep: Iterable[int]) -> "LineFamily":
        keep = sorted(set(keep))
        return LineFamily(
            self.points,
            tuple(self.lines[i] for i in keep),
            tuple(self.incidence[i] for i in keep),
        )


def _scaled_coordinates(g: Grid) -> tuple[int, list[tuple[int, int]]]:
    """Common denominator D and integer points (x*D, y*D)."""
    d = 1
    for v in g.s1 + g.s2:
        d = lcm(d, v.denominator)
    pts = [(int(p.x * d), int(p.y * d)) for p in g.nonzero_points]
    return d, pts


def enumerate_lines(g: Grid) -> LineFamily:
    """All origin-avoiding lines through at least two nonzero grid points.

    Works on integer-scaled coordinates: a line through integer points is
    A*X + B*Y = C with (A, B, C) reduced and C > 0, which converts back to
    a = A*D/C, b = B*D/C. Incidence sets are filled during the pair sweep, so
    no separate incidence pass is needed.
    """
    d, pts = _scaled_coordinates(g)
    groups: dict[tuple[int, int, int], set[int]] = {}
    npts = len(pts)
    for i in range(npts):
        x1, y1 = pts[i]
        for j in range(i + 1, npts):
            x2, y2 = pts[j]
            c = x1 * y2 - y1 * x2
            if c == 0:
                continue
            a = y2 - y1
            b = x1 - x2
            h = gcd(gcd(a, b), c)
            if c < 0:
                h = -h
            key = (a // h, b // h, c // h)
            s = groups.get(key)
            if s is None:
                groups[key] = {i, j}
            else:
                s.add(i)
                s.add(j)
    entries = sorted(
        (Line(Fraction(a * d, c), Fraction(b * d, c)), tuple(sorted(s)))
        for (a, b, c), s in groups.items()
    )
    return LineFamily(
        g.nonzero_points,
        tuple(e[0] for e in entries),
        tuple(e[1] for e in entries),
    )


def restricted_lines(g: Grid, slopes: Iterable[str] = RESTRICTED_SLOPES) -> LineFamily:
    """Horizontal, vertical and/or slope -1 lines of a standard grid.

    Built directly (x = i, y = i, x + y = c) rather than filtered out of the
    full family, which keeps large n cheap; the result equals the filtered
    family line for line.
    """
    slopes = frozenset(slopes)
    if not slopes or not slopes <= RESTRICTED_SLOPES:
        raise ValueError(f"slopes must be a nonempty subset of {sorted(RESTRICTED_SLOPES)}")
    if not g.is_standard:
        raise NotStandardGrid("restricted families are defined on standard grids only")
    n = g.n
    idx = g.point_index
    entries = []
    for i in range(1, n):
        fi = Fraction(i)
        if VERTICAL in slopes:
            inc = sorted(idx[(fi, Fraction(y))] for y in range(n))
            entries.append((Line.vertical(fi), tuple(inc)))
        if HORIZONTAL in slopes:
            inc = sorted(idx[(Fraction(x), fi)] for x in range(n))
            entries.append((Line.horizontal(fi), tuple(inc)))
    if MINUS_ONE in slopes:
        for c in range(1, 2 * n - 2):
            inc = sorted(
                idx[(Fraction(x), Fraction(c - x))]
                for x in range(max(0, c - n + 1), min(c, n - 1) + 1)
            )
            if len(inc) >= 2:
                entries.append((Line(Fraction(1, c), Fraction(1, c)), tuple(inc)))
    entries.sort()
    return LineFamily(
        g.nonzero_points,
        tuple(e[0] for e in entries),
        tuple(e[1] for e in entries),
    )


@dataclass
class LineSizeReport:
    passed: bool
    checked: int
    witnesses: list[tuple[Line, int, int]]  # (line, points on it, allowed)


def linesize_bound_check(g: Grid, fam: LineFamily) -> LineSizeReport:
    """Check the point-count bound for sloped lines through y-axis points.

    With 1-based indices (x_{i0} = 0), a line of positive slope through
    (0, y_j) holds at most n - |j - i0| grid points. Reflecting in the x-axis
    sends y_j to position n + 1 - j, so a negative-slope line holds at most
    n - |n + 1 - j - i0| points.
    """
    if not g.is_square:
        raise NotSquare(f"grid is {g.n}x{g.m}")
    n = g.n
    i0 = g.i0 + 1
    ypos = {y: j + 1 for j, y in enumerate(g.s2)}
    witnesses = []
    checked = 0
    for line, inc in zip(fam.lines, fam.incidence):
        if line.a == 0 or line.b == 0:
            continue
        j = ypos.get(1 / line.b)
        if j is None:
            continue
        checked += 1
        if line.slope > 0:
            bound = n - abs(j - i0)
        else:
            bound = n - abs(n + 1 - j - i0)
        if len(inc) > bound:
            witnesses.append((line, len(inc), bound))
    return LineSizeReport(not witnesses, checked, witnesses)
