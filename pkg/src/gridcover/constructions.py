"""Explicit k-covers and an independent cover checker.

Every builder returns a :class:`Cover`; ``verify_cover`` evaluates
a*x + b*y == 1 directly and shares no code with the builders or the
optimizer.
"""
from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Mapping, Optional

from .errors import BadParameter, DivisibilityViolated, HypothesisViolated, NotSquare
from .geometry import Line
from .grid import Grid, GridPoint


@dataclass(frozen=True)
class Cover:
    """A multiset of lines claiming to be a k-cover."""

    entries: Mapping[Line, int]
    k: int

    @classmethod
    def from_lines(cls, lines: Iterable[Line], k: int) -> "Cover":
        return cls(dict(Counter(lines)), k)

    @classmethod
    def from_multiplicities(cls, pairs: Iterable[tuple[Line, int]], k: int) -> "Cover":
        entries: Counter = Counter()
        for line, mult in pairs:
            if mult < 0:
                raise ValueError(f"negative multiplicity for {line}")
            if mult:
                entries[line] += mult
        return cls(dict(entries), k)

    @property
    def size(self) -> int:
        return sum(self.entries.values())

    def __len__(self) -> int:
        return self.size

    def slope_kinds(self) -> set[str]:
        return {line.slope_kind for line in self.entries}

    def sorted_entries(self) -> list[tuple[Line, int]]:
        return sorted(self.entries.items())


@dataclass(frozen=True)
class CoverCheck:
    valid: bool
    min_coverage: int
    witness: Optional[GridPoint]


def verify_cover(g: Grid, c: Cover) -> CoverCheck:
    """Does every nonzero point of ``g`` lie on at least ``c.k`` lines?

    Lines of the form a*x + b*y = 1 never contain the origin, so only the
    coverage count needs checking.
    """
    lowest, witness = None, None
    for p in g.nonzero_points:
        hits = sum(mult for line, mult in c.entries.items() if line.a * p.x + line.b * p.y == 1)
        if lowest is None or hits < lowest:
            lowest, witness = hits, p
    return CoverCheck(lowest >= c.k, lowest, witness)


def grid_hash(g: Grid) -> str:
    return hashlib.sha256(g.to_json().encode()).hexdigest()[:16]


def format_cover(c: Cover, g: Optional[Grid] = None) -> str:
    header = f"# gridcover cover k={c.k}"
    if g is not None:
        header += f" grid={grid_hash(g)}"
    lines = [header, f"# size={c.size}"]
    lines += [f"{line} x {mult}" for line, mult in c.sorted_entries()]
    return "\n".join(lines) + "\n"


def parse_cover(text: str) -> tuple[Cover, Optional[str]]:
    """Parse the cover file format; returns the cover and the grid hash, if any."""
    k, ghash = None, None
    pairs = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if tok.startswith("k="):
                    k = int(tok[2:])
                elif tok.startswith("grid="):
                    ghash = tok[5:]
            continue
        lhs, mult = line.split(" x ")
        pairs.append((Line.parse(lhs), int(mult)))
    if k is None:
        raise ValueError("cover file has no k= header")
    return Cover.from_multiplicities(pairs, k), ghash


def write_cover(path, c: Cover, g: Optional[Grid] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_cover(c, g))


def read_cover(path) -> tuple[Cover, Optional[str]]:
    with open(path, encoding="utf-8") as fh:
        return parse_cover(fh.read())


def _nonzero(axis) -> list[Fraction]:
    return [v for v in axis if v != 0]


def construct_wide(g: Grid, k: int) -> Cover:
    """k(n-1) + (m-1) lines for grids with n >= (k-1)(m-1) + 1.

    One horizontal per nonzero y, k-1 verticals per nonzero x, and a line
    from (s, 0) to (0, t_i) for each s in block P_i of a round-robin
    partition of the nonzero x values into m-1 blocks.
    """
    n, m = g.n, g.m
    if k < 1:
        raise BadParameter("k must be positive")
    if n < (k - 1) * (m - 1) + 1:
        raise HypothesisViolated(f"need n >= (k-1)(m-1)+1 = {(k - 1) * (m - 1) + 1}, got n={n}")
    xs, ys = _nonzero(g.s1), _nonzero(g.s2)
    lines: list[Line] = [Line.horizontal(t) for t in ys]
    for s in xs:
        lines += [Line.vertical(s)] * (k - 1)
    for idx, s in enumerate(xs):
        lines.append(Line.intercepts(s, ys[idx % (m - 1)]))
    return Cover.from_lines(lines, k)


def construct_biregular(g: Grid, k: int) -> Cover:
    n, m = g.n, g.m
    h = gcd(n - 1, m - 1)
    a, b = (n - 1) // h, (m - 1) // h
    if k < 1 or k % (a + b):
        raise DivisibilityViolated(f"k={k} is not a positive multiple of {a + b}")
    d1 = b * k // (a + b)  # degree of each nonzero x value
    d2 = a * k // (a + b)  # degree of each nonzero y value
    xs, ys = _nonzero(g.s1), _nonzero(g.s2)
    lines: list[Line] = []
    for s in xs:
        lines += [Line.vertical(s)] * d2
    for t in ys:
        lines += [Line.horizontal(t)] * d1
    # half-edges listed in sorted order on both sides, matched by position
    left = [s for s in xs for _ in range(d1)]
    right = [t for t in ys for _ in range(d2)]
    assert len(left) == len(right)
    lines += [Line.intercepts(s, t) for s, t in zip(left, right)]
    return Cover.from_lines(lines, k)


def construct_square_threehalves(g: Grid, k: int) -> Cover:
    if not g.is_square:
        raise NotSquare(f"grid is {g.n}x{g.m}")
    if k < 1:
        raise BadParameter("k must be positive")
    up, down = (k + 1) // 2, k // 2
    lines: list[Line] = []
    for x, y in zip(_nonzero(g.s1), _nonzero(g.s2)):
        lines += [Line.vertical(x)] * up
        lines += [Line.horizontal(y)] * up
        lines += [Line.intercepts(x, y)] * down
    return Cover.from_lines(lines, k)


def default_standard_t(n: int) -> int:
    """ceil(sqrt(2n(n-1)) - (n-1)), computed with integer square roots."""
    r = isqrt(2 * n * (n - 1))
    if r * r < 2 * n * (n - 1):
        r += 1
    return r - (n - 1)


def _ceil_div(p: int, q: int) -> int:
    return -(-p // q)


def construct_standard(n: int, k: int, t: Optional[int] = None) -> Cover:
    """Axis-parallel and slope -1 k-cover of the standard grid.

    ceil(ik/(n+t-1)) copies of x = i and of y = i, plus
    k - ceil(ik/(n+t-1)) copies of x + y = i for 1 <= i < n+t-1.
    """
    if n < 2:
        raise BadParameter("n must be at least 2")
    if k < 1:
        raise BadParameter("k must be positive")
    if t is None:
        t = default_standard_t(n)
    if not 1 <= t <= n - 1:
        raise BadParameter(f"t must lie in [1, {n - 1}], got {t}")
    span = n + t - 1
    pairs = []
    for i in range(1, n):
        c = _ceil_div(i * k, span)
        pairs.append((Line.vertical(Fraction(i)), c))
        pairs.append((Line.horizontal(Fraction(i)), c))
    for i in range(1, span):
        pairs.append((Line(Fraction(1, i), Fraction(1, i)), k - _ceil_div(i * k, span)))
    return Cover.from_multiplicities(pairs, k)


def standard_size_bound(n: int, k: int, t: int) -> Fraction:
    """k[n(n-1)/(n+t-1) + (n+t-2)/2] + 2n."""
    return k * (Fraction(n * (n - 1), n + t - 1) + Fraction(n + t - 2, 2)) + 2 * n


CONSTRUCTIONS = {
    "wide": construct_wide,
    "biregular": construct_biregular,
    "threehalves": construct_square_threehalves,
}


def construct(kind: str, g: Grid, k: int, t: Optional[int] = None) -> Cover:
    if kind == "standard":
        if not g.is_standard:
            raise BadParameter("the standard construction needs a standard grid")
        return construct_standard(g.n, k, t)
    try:
        builder = CONSTRUCTIONS[kind]
    except KeyError:
        raise BadParameter(f"unknown construction {kind!r}") from None
    return builder(g, k)
