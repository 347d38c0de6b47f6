"""Dual weightings: explicit feasible points of the weighting program.

A weighting assigns a rational to every nonzero grid point. It is feasible
for a line family when every line in the family carries total weight at most
1 and no weight is negative; its total is then a lower bound on Phi over that
family.
"""
from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Mapping, Optional

from .errors import BadParameter, DeltaTooSmall, NotGeneric, NotSquare
from .geometry import Line, LineFamily, enumerate_lines
from .grid import Grid, GridPoint, delta_genericity, standard_grid, to_rational

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Weighting:
    """Dense map from nonzero grid points to weights.

    Negative weights are representable so that degenerate parameter choices
    can still be built and then rejected by :func:`verify_weighting`.
    """

    weights: Mapping[GridPoint, Fraction]
    total: Fraction = field(init=False)

    def __post_init__(self):
        # Summing grouped values is far cheaper than a running Fraction sum
        # when the grid has hundreds of thousands of points.
        counts = Counter(self.weights.values())
        object.__setattr__(self, "total", sum((v * c for v, c in counts.items()), Fraction(0)))

    @classmethod
    def on_grid(cls, g: Grid, rule) -> "Weighting":
        return cls({p: Fraction(rule(p)) for p in g.nonzero_points})

    def __getitem__(self, p) -> Fraction:
        return self.weights.get(GridPoint(Fraction(p[0]), Fraction(p[1])), Fraction(0))

    @property
    def nonnegative(self) -> bool:
        return all(v >= 0 for v in self.weights.values())


@dataclass(frozen=True)
class WeightingCheck:
    feasible: bool
    max_line_weight: Fraction
    violations: list[tuple[Line, Fraction]]
    negative_points: list[GridPoint]


def verify_weighting(g: Grid, fam: LineFamily, w: Weighting) -> WeightingCheck:
    """Line sums over ``fam``; absent points count as weight 0."""
    vals = [w.weights.get(p, Fraction(0)) for p in g.nonzero_points]
    if fam.points != g.nonzero_points:
        index = g.point_index
        remap = [index[p] for p in fam.points]
        vals = [vals[i] for i in remap]
    worst = Fraction(0)
    violations = []
    for line, inc in zip(fam.lines, fam.incidence):
        s = sum((vals[i] for i in inc), Fraction(0))
        if s > worst:
            worst = s
        if s > 1:
            violations.append((line, s))
    negative = [p for p, v in w.weights.items() if v < 0]
    return WeightingCheck(not violations and not negative, worst, violations, negative)


@dataclass(frozen=True)
class AuditReport:
    check: WeightingCheck
    by_slope: dict[str, list[tuple[Line, Fraction]]]

    @property
    def violating_slopes(self) -> list[str]:
        return sorted(self.by_slope, key=_slope_sort_key)


def _slope_sort_key(label: str):
    return (1, Fraction(0)) if label == "inf" else (0, Fraction(label))


def audit_weighting(g: Grid, w: Weighting, fam: Optional[LineFamily] = None) -> AuditReport:
    """Check ``w`` against the full line family and group violators by slope."""
    if fam is None:
        fam = enumerate_lines(g)
    check = verify_weighting(g, fam, w)
    groups: dict[str, list] = defaultdict(list)
    for line, weight in check.violations:
        groups[line.slope_label()].append((line, weight))
    return AuditReport(check, dict(groups))


# -- builders ---------------------------------------------------------------


def weight_generic(g: Grid) -> Weighting:
    """(n-1)/N on the x-axis, (m-1)/N on the y-axis, 1/N inside, N = n+m-2."""
    delta = delta_genericity(g)
    if delta:
        raise NotGeneric(f"grid has a line through two boundary points and {delta} interior points")
    n, m = g.n, g.m
    den = n + m - 2

    def rule(p: GridPoint):
        if p.y == 0:
            return Fraction(n - 1, den)
        if p.x == 0:
            return Fraction(m - 1, den)
        return Fraction(1, den)

    return Weighting.on_grid(g, rule)


def _ceil_sqrt(v: int) -> int:
    r = isqrt(v)
    return r if r * r == v else r + 1


def default_square_claim_t(n: int) -> int:
    """ceil(sqrt((5n+1)(n-1))/2 - n), i.e. the least t with 2(t+n) >= sqrt(...)."""
    r = _ceil_sqrt((5 * n + 1) * (n - 1))
    return -(-r // 2) - n


def weight_square_claim(g: Grid, t: Optional[int] = None) -> Weighting:
    """alpha = 1/(n+t) inside, beta = (t+1)/(n+t) on the x-axis and on the
    y-axis points far from both reflected positions of the origin index.

    The reflection index uses n+1-j (1-based), which is what the line-size
    bound actually supports; see ``linesize_bound_check``.
    """
    if not g.is_square:
        raise NotSquare(f"grid is {g.n}x{g.m}")
    n = g.n
    if t is None:
        t = default_square_claim_t(n)
    if not 0 <= t <= n - 1:
        raise BadParameter(f"t must lie in [0, {n - 1}], got {t}")
    alpha = Fraction(1, n + t)
    beta = Fraction(t + 1, n + t)
    i0 = g.i0 + 1
    ypos = {y: j + 1 for j, y in enumerate(g.s2)}

    def rule(p: GridPoint):
        if p.x != 0 and p.y != 0:
            return alpha
        if p.y == 0:
            return beta
        j = ypos[p.y]
        return beta if min(abs(j - i0), abs(n + 1 - j - i0)) >= t else 0

    return Weighting.on_grid(g, rule)


def weight_delta_generic(g: Grid, delta: int) -> Weighting:
    if not g.is_square:
        raise NotSquare(f"grid is {g.n}x{g.m}")
    n = g.n
    den = 2 * (n - 1) - delta
    if delta < 0 or den <= 0:
        raise BadParameter(f"delta must lie in [0, {2 * (n - 1) - 1}], got {delta}")
    actual = delta_genericity(g)
    if actual > delta:
        raise DeltaTooSmall(f"grid is only {actual}-generic, not {delta}-generic")
    alpha = Fraction(1, den)
    beta = 1 - Fraction(n - 1, den)
    return Weighting.on_grid(g, lambda p: alpha if p.x and p.y else beta)


def standard_t(n: int) -> int:
    """Largest t with sum_{i=1}^{t} 1/(n-i) <= 1/2, using exact partial sums."""
    s, t = Fraction(0), 0
    while t + 1 <= n - 1:
        nxt = s + Fraction(1, n - t - 1)
        if nxt > HALF:
            break
        s, t = nxt, t + 1
    return t


def weight_standard(n: int, g: Optional[Grid] = None) -> Weighting:
    """1/2 on the axes and 1/(n-i) along x+y = n-1+i for i <= t."""
    if n < 2:
        raise BadParameter("n must be at least 2")
    g = g or standard_grid(n)
    t = standard_t(n)

    def rule(p: GridPoint):
        if p.x == 0 or p.y == 0:
            return HALF
        i = int(p.x + p.y) - (n - 1)
        return Fraction(1, n - i) if 1 <= i <= t else 0

    return Weighting.on_grid(g, rule)


@dataclass(frozen=True)
class RestrictedCertificate:
    weighting: Weighting
    t: int
    z: Fraction
    alpha: tuple[Fraction, ...]  # alpha_1 .. alpha_{n-1}


def restricted_t_window(n: int) -> tuple[int, int]:
    """Integers t with sqrt(D) - 2n - 1 <= 2t <= sqrt(D) - 2n + 1, D = 8n^2-8n+1."""
    d = 8 * n * n - 8 * n + 1
    r = _ceil_sqrt(d)
    lo = -(-(r - 2 * n - 1) // 2)
    hi = (isqrt(d) - 2 * n + 1) // 2
    return lo, hi


def restricted_z(n: int, t: int) -> Fraction:
    nn = (n - 1) * n
    return nn * (HALF - Fraction(t * (2 * n + t - 1), 2 * nn)) / (nn - t * (t + 1))


def restricted_alphas(n: int, t: int, z: Fraction) -> tuple[Fraction, ...]:
    out = [Fraction(0)]  # alpha_1
    partial = Fraction(0)  # sum_{j <= min(t, i)} j(j-1)/(n-j)
    for i in range(2, n):
        if i <= t:
            partial += Fraction(i * (i - 1), n - i)
        a = partial / (i * (i + 1))
        if i >= t + 1:
            a += Fraction(t * (t + 1), i * (i + 1)) * z
        out.append(a)
    return tuple(out)


def weight_restricted(n: int, t: Optional[int] = None, g: Optional[Grid] = None) -> RestrictedCertificate:
    """Symmetric weighting feasible for horizontal, vertical and slope -1 lines.

    Diagonals x+y = c carry weight exactly 1 for c < n+t, the diagonal n+t
    carries z per point, and everything beyond is 0. The axis weights
    1/2 - alpha_c and the interior weights below the anti-diagonal are fixed
    by requiring every vertical line to weigh exactly 1.
    """
    if n < 3:
        raise BadParameter("n must be at least 3")
    if t is None:
        # the window can start at 0 (n = 3); t counts diagonals, so at least 1
        t = max(1, restricted_t_window(n)[0])
    if not 1 <= t <= n - 2:
        raise BadParameter(f"t must lie in [1, {n - 2}], got {t}")
    z = restricted_z(n, t)
    if not 0 <= z <= Fraction(1, n - t - 1):
        raise BadParameter(f"t={t} gives z={z} outside [0, 1/{n - t - 1}]")
    alpha = restricted_alphas(n, t, z)
    for i, a in enumerate(alpha, start=1):
        if not 0 <= a <= HALF:
            raise BadParameter(f"t={t} gives alpha_{i}={a} outside [0, 1/2]")
        if i <= t + 1 and n - i - 1 > 0 and a > Fraction(i - 1, 2 * (n - i - 1)):
            raise BadParameter(f"t={t} gives alpha_{i}={a} above its induction bound")
    g = g or standard_grid(n)

    def rule(p: GridPoint):
        c = int(p.x + p.y)
        if p.x == 0 or p.y == 0:
            return HALF - alpha[c - 1]
        if c <= n - 1:
            return 2 * alpha[c - 1] / (c - 1)
        if c <= n + t - 1:
            return Fraction(1, 2 * n - 1 - c)
        if c == n + t:
            return z
        return 0

    return RestrictedCertificate(Weighting.on_grid(g, rule), t, z, alpha)


# -- serialization ----------------------------------------------------------


def weighting_to_json(w: Weighting) -> str:
    pts = [
        {"x": str(p.x), "y": str(p.y), "w": str(v)}
        for p, v in sorted(w.weights.items())
    ]
    return json.dumps({"points": pts, "total": str(w.total)})


def weighting_from_json(text: str) -> Weighting:
    doc = json.loads(text)
    weights = {
        GridPoint(to_rational(e["x"]), to_rational(e["y"])): to_rational(e["w"])
        for e in doc["points"]
    }
    w = Weighting(weights)
    if "total" in doc and to_rational(doc["total"]) != w.total:
        raise ValueError(f"stated total {doc['total']} differs from the sum {w.total}")
    return w
