"""Covering programs over a line family: the LP relaxation, its dual, and the
integer program solved by branch-and-bound."""
from __future__ import annotations

import logging
import math
import os
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .constructions import Cover, verify_cover
from .errors import BadParameter, GridCoverError
from .geometry import LineFamily, enumerate_lines, restricted_lines
from .grid import Grid
from .lp import INFEASIBLE, LinearProgram, LPSolution, solve_lp, verify_solution

log = logging.getLogger(__name__)

DEFAULT_NODE_LIMIT = 10**6
DEFAULT_TIME_LIMIT = 60.0
BUDGET_ENV = "GRIDCOVER_BUDGET_SECS"


class SolverError(GridCoverError):
    pass


@dataclass(frozen=True)
class CoverInstance:
    grid: Grid
    family: LineFamily
    k: int = 1

    @classmethod
    def full(cls, g: Grid, k: int = 1) -> "CoverInstance":
        return cls(g, enumerate_lines(g), k)

    @classmethod
    def restricted(cls, g: Grid, k: int = 1) -> "CoverInstance":
        return cls(g, restricted_lines(g), k)

    def with_k(self, k: int) -> "CoverInstance":
        return CoverInstance(self.grid, self.family, k)


def _incidence_rows(fam: LineFamily) -> list[tuple[int, ...]]:
    rows = [[0] * len(fam) for _ in fam.points]
    for li, inc in enumerate(fam.incidence):
        for pi in inc:
            rows[pi][li] = 1
    return [tuple(r) for r in rows]


def build_primal(inst: CoverInstance, rhs: int = 1) -> LinearProgram:
    """min sum u(l)  s.t.  sum_{l ∋ p} u(l) >= rhs for each nonzero p."""
    rows = _incidence_rows(inst.family)
    return LinearProgram.build([1] * len(inst.family), rows, [rhs] * len(rows))


def build_dual(inst: CoverInstance) -> LinearProgram:
    """max sum w(p) s.t. every line weighs at most 1, written as a
    minimisation of -sum w with rows -sum_{p ∈ l} w(p) >= -1."""
    fam = inst.family
    npts = len(fam.points)
    rows = []
    for inc in fam.incidence:
        row = [0] * npts
        for pi in inc:
            row[pi] = -1
        rows.append(row)
    return LinearProgram.build([-1] * npts, rows, [-1] * len(rows))


def _checked_solve(lp: LinearProgram) -> LPSolution:
    sol = solve_lp(lp)
    if sol.optimal and not verify_solution(lp, sol):
        raise SolverError("simplex returned a solution that fails the duality check")
    return sol


def solve_primal(inst: CoverInstance) -> LPSolution:
    sol = _checked_solve(build_primal(inst))
    if not sol.optimal:
        raise SolverError(f"covering LP is {sol.status}")
    return sol


def solve_dual(inst: CoverInstance) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Optimal value of the weighting program and an optimal weighting."""
    sol = _checked_solve(build_dual(inst))
    if not sol.optimal:
        raise SolverError(f"weighting LP is {sol.status}")
    return -sol.value, sol.primal


def phi(inst: CoverInstance) -> Fraction:
    return solve_primal(inst).value


def round_lp_to_cover(inst: CoverInstance, lp: LPSolution, k: int) -> Cover:
    """z(l) = ceil(k u*(l)).

    The size is at most k*phi + |support(u*)|, and exactly k*phi when k is a
    multiple of every denominator of u*.
    """
    pairs = [
        (line, math.ceil(k * u))
        for line, u in zip(inst.family.lines, lp.primal)
        if u
    ]
    return Cover.from_multiplicities(pairs, k)


def lcm_of_denominators(values) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


@dataclass(frozen=True)
class ReferenceBounds:
    trivial_lower: int
    trivial_upper: int
    ball_serra: int


def reference_bounds(g: Grid, k: int) -> ReferenceBounds:
    base = (g.n - 1) + (g.m - 1)
    return ReferenceBounds(
        trivial_lower=base + k - 1,
        trivial_upper=k * base,
        ball_serra=base + (k - 1) * max(g.n - 1, g.m - 1),
    )


@dataclass(frozen=True)
class IlpResult:
    optimum: int
    cover: Cover
    nodes_explored: int
    lp_root: Fraction
    optimal: bool = True
    lower_bound: Optional[int] = None

    @property
    def status(self) -> str:
        return "optimal" if self.optimal else "timeout"


def default_time_limit() -> float:
    env = os.environ.get(BUDGET_ENV)
    if env:
        return float(env)
    return DEFAULT_TIME_LIMIT


def _cover_from_vector(inst: CoverInstance, x, k: int) -> Cover:
    return Cover.from_multiplicities(
        ((line, int(v)) for line, v in zip(inst.family.lines, x) if v), k
    )


def _check_warm_start(inst: CoverInstance, c: Cover) -> None:
    if c.k < inst.k:
        raise BadParameter(f"warm start is a {c.k}-cover, need k={inst.k}")
    missing = [line for line in c.entries if line not in inst.family]
    if missing:
        raise BadParameter(f"warm start uses {len(missing)} lines outside the family, e.g. {missing[0]}")
    check = verify_cover(inst.grid, c)
    if not check.valid:
        raise BadParameter(f"warm start is not a {inst.k}-cover; {check.witness} covered {check.min_coverage} times")


def solve_ilp(
    inst: CoverInstance,
    warm_start: Optional[Cover] = None,
    node_limit: int = DEFAULT_NODE_LIMIT,
    time_limit: Optional[float] = None,
) -> IlpResult:
    """Minimum k-cover over the instance family by depth-first branch-and-bound.

    Each node solves the LP relaxation with rhs k and the node's variable
    bounds. A node is pruned once ceil(LP value) reaches the incumbent, since
    cover sizes are integers. Branching picks the variable whose fractional
    part is closest to 1/2 (lowest index on ties) and explores the rounded-up
    child first.

    Multiplicities are capped at k; the cap is left implicit because an LP
    optimum never exceeds it (lowering such a variable to k keeps every row
    satisfied and strictly lowers the cost).

    When the node or time budget runs out the result is flagged
    ``optimal=False`` and carries the best cover and the root lower bound.
    """
    k = inst.k
    if time_limit is None:
        time_limit = default_time_limit()
    deadline = time.monotonic() + time_limit

    root = solve_primal(inst)
    lp_root = root.value
    if warm_start is not None:
        _check_warm_start(inst, warm_start)
        incumbent = Cover(dict(warm_start.entries), k)
    else:
        incumbent = round_lp_to_cover(inst, root, k)
    best = incumbent.size
    root_bound = math.ceil(k * lp_root)

    through = inst.family.lines_through()
    nv = len(inst.family)

    def node_solve(lower: dict, upper: dict) -> LPSolution:
        """LP at a node, with bounds substituted out rather than added as rows.

        Fixed variables leave the program, lower bounds shift the right-hand
        sides, and rows already met by the lower bounds are dropped. The
        reduced program is solved and verified, then mapped back.
        """
        free = [j for j in range(nv) if upper.get(j, k) > lower.get(j, 0)]
        col = {j: c for c, j in enumerate(free)}
        base = sum(lower.values())
        rows, rhs = [], []
        for lines in through:
            need = k - sum(lower.get(j, 0) for j in lines)
            if need <= 0:
                continue
            r = [0] * len(free)
            for j in lines:
                c = col.get(j)
                if c is not None:
                    r[c] = 1
            if not any(r):
                return LPSolution(INFEASIBLE)
            rows.append(r)
            rhs.append(need)
        ub = None
        if any(j in upper for j in free):
            ub = [upper[j] - lower.get(j, 0) if j in upper else None for j in free]
        sol = _checked_solve(LinearProgram.build([1] * len(free), rows, rhs, ub))
        if not sol.optimal:
            return sol
        x = [Fraction(lower.get(j, 0)) for j in range(nv)]
        for c, j in enumerate(free):
            x[j] += sol.primal[c]
        return LPSolution(sol.status, sol.value + base, tuple(x), sol.dual, sol.pivots)

    nodes = 0
    # stack entries: (lower bounds, upper bounds, precomputed LP solution or None)
    root_scaled = LPSolution(root.status, k * root.value, tuple(k * v for v in root.primal), ())
    stack: list[tuple[dict, dict, Optional[LPSolution]]] = [({}, {}, root_scaled)]
    exhausted = True
    while stack:
        if nodes >= node_limit or time.monotonic() > deadline:
            exhausted = False
            break
        lower, upper, sol = stack.pop()
        nodes += 1
        if best <= root_bound:
            break
        if sol is None:
            sol = node_solve(lower, upper)
        if sol.status == INFEASIBLE or not sol.optimal:
            continue
        if math.ceil(sol.value) >= best:
            continue
        pick, dist = -1, None
        for j, v in enumerate(sol.primal):
            if v.denominator == 1:
                continue
            d = abs(v - v.__floor__() - Fraction(1, 2))
            if dist is None or d < dist:
                pick, dist = j, d
        if pick < 0:
            incumbent = _cover_from_vector(inst, sol.primal, k)
            best = incumbent.size
            log.debug("incumbent %d after %d nodes", best, nodes)
            continue
        v = sol.primal[pick]
        down = dict(upper)
        down[pick] = math.floor(v)
        up = dict(lower)
        up[pick] = math.ceil(v)
        stack.append((lower, down, None))
        stack.append((up, upper, None))

    optimal = exhausted or best <= root_bound
    return IlpResult(
        optimum=best,
        cover=incumbent,
        nodes_explored=nodes,
        lp_root=lp_root,
        optimal=optimal,
        lower_bound=best if optimal else root_bound,
    )
