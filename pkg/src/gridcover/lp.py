"""Exact two-phase primal simplex over the rationals.

Programs have the shape

    minimize c.x  subject to  A x >= b,  0 <= x (<= u where given)

Finite upper bounds are turned into rows -x_j >= -u_j, so the dual vector
of a solution has one entry per original row followed by one entry per
bounded variable (in variable order).

The solver is a revised simplex keeping an explicit basis inverse in
``gmpy2.mpq``; inputs and outputs are ``fractions.Fraction``. Pricing is
Dantzig's most-negative reduced cost; after a run of degenerate pivots it
switches to Bland's smallest-index rule until the objective moves again,
so it cannot cycle.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from gmpy2 import mpq

from .errors import DimensionMismatch

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

# consecutive degenerate pivots tolerated before switching to Bland's rule
DEGENERATE_STREAK = 1000

_ZERO = mpq(0)
_ONE = mpq(1)


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple[Fraction, ...]
    rows: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    upper: Optional[tuple[Optional[int], ...]] = None

    @classmethod
    def build(cls, objective, rows, rhs, upper=None) -> "LinearProgram":
        lp = cls(
            tuple(Fraction(v) for v in objective),
            tuple(tuple(Fraction(v) for v in r) for r in rows),
            tuple(Fraction(v) for v in rhs),
            None if upper is None else tuple(upper),
        )
        lp.check()
        return lp

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def check(self) -> None:
        nv = self.num_vars
        if len(self.rhs) != len(self.rows):
            raise DimensionMismatch(f"{len(self.rows)} rows but {len(self.rhs)} right-hand sides")
        for i, r in enumerate(self.rows):
            if len(r) != nv:
                raise DimensionMismatch(f"row {i} has {len(r)} entries, expected {nv}")
        if self.upper is not None and len(self.upper) != nv:
            raise DimensionMismatch(f"{len(self.upper)} upper bounds for {nv} variables")

    def expanded_rows(self) -> tuple[list[tuple[Fraction, ...]], list[Fraction]]:
        """Rows and right-hand sides with upper bounds appended as >= rows."""
        rows = list(self.rows)
        rhs = list(self.rhs)
        if self.upper is not None:
            nv = self.num_vars
            for j, u in enumerate(self.upper):
                if u is None:
                    continue
                row = [Fraction(0)] * nv
                row[j] = Fraction(-1)
                rows.append(tuple(row))
                rhs.append(Fraction(-u))
        return rows, rhs


@dataclass(frozen=True)
class LPSolution:
    status: str
    value: Optional[Fraction] = None
    primal: tuple[Fraction, ...] = ()
    dual: tuple[Fraction, ...] = ()
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class _Revised:
    """Revised simplex state for  [A | -I | art] z = b,  z >= 0.

    Rows with b_i <= 0 are multiplied by -1 so that their surplus column is
    +e_i and can start in the basis; the remaining rows get artificials.
    Column indices: structural 0..nv-1, surplus nv..nv+m-1, artificial after.
    """

    def __init__(self, rows, rhs, nv):
        m = len(rows)
        self.m, self.nv = m, nv
        sign = [(-1 if b <= 0 else 1) for b in rhs]
        self.sign = sign
        cols: list[list[tuple[int, object]]] = [[] for _ in range(nv)]
        for i, r in enumerate(rows):
            s = sign[i]
            for j, v in enumerate(r):
                if v:
                    cols[j].append((i, mpq(v) * s))
        for i in range(m):
            cols.append([(i, mpq(-sign[i]))])
        self.first_art = nv + m
        basis = []
        for i in range(m):
            if sign[i] < 0:
                basis.append(nv + i)
            else:
                basis.append(len(cols))
                cols.append([(i, _ONE)])
        self.cols = cols
        self.ncols = len(cols)
        self.basis = basis
        self.binv = [[_ONE if i == k else _ZERO for k in range(m)] for i in range(m)]
        self.xb = [mpq(b) * s for b, s in zip(rhs, sign)]
        self.pivots = 0

    def duals(self, cost) -> list:
        m = self.m
        y = [_ZERO] * m
        for i, bv in enumerate(self.basis):
            cb = cost[bv]
            if cb:
                row = self.binv[i]
                for k in range(m):
                    if row[k]:
                        y[k] += cb * row[k]
        return y

    def reduced_cost(self, j, cost, y):
        d = cost[j]
        for i, v in self.cols[j]:
            if y[i]:
                d -= y[i] * v
        return d

    def column(self, j) -> list:
        alpha = [_ZERO] * self.m
        binv = self.binv
        for k, v in self.cols[j]:
            for i in range(self.m):
                b = binv[i][k]
                if b:
                    alpha[i] += b * v
        return alpha

    def pivot(self, r, j, alpha) -> None:
        binv = self.binv
        a = alpha[r]
        prow = [v / a for v in binv[r]]
        binv[r] = prow
        nz = [k for k, v in enumerate(prow) if v]
        theta = self.xb[r] / a
        for i in range(self.m):
            f = alpha[i]
            if i == r or not f:
                continue
            row = binv[i]
            for k in nz:
                row[k] -= f * prow[k]
            self.xb[i] -= f * theta
        self.xb[r] = theta
        self.basis[r] = j
        self.pivots += 1

    def run(self, cost, allowed: int) -> str:
        m = self.m
        streak = 0
        while True:
            y = self.duals(cost)
            basic = set(self.basis)
            enter = -1
            if streak < DEGENERATE_STREAK:
                best = _ZERO
                for j in range(allowed):
                    if j in basic:
                        continue
                    d = self.reduced_cost(j, cost, y)
                    if d < best:
                        best, enter = d, j
            else:
                for j in range(allowed):
                    if j not in basic and self.reduced_cost(j, cost, y) < 0:
                        enter = j
                        break
            if enter < 0:
                return OPTIMAL
            alpha = self.column(enter)
            leave, ratio = -1, None
            for i in range(m):
                a = alpha[i]
                if a > 0:
                    t = self.xb[i] / a
                    if ratio is None or t < ratio or (t == ratio and self.basis[i] < self.basis[leave]):
                        leave, ratio = i, t
            if leave < 0:
                return UNBOUNDED
            streak = streak + 1 if ratio == 0 else 0
            self.pivot(leave, enter, alpha)

    def objective(self, cost):
        return sum((cost[bv] * x for bv, x in zip(self.basis, self.xb)), _ZERO)


def solve_lp(p: LinearProgram) -> LPSolution:
    p.check()
    rows, rhs = p.expanded_rows()
    nv = p.num_vars
    if not rows:
        if any(c < 0 for c in p.objective):
            return LPSolution(UNBOUNDED)
        return LPSolution(OPTIMAL, Fraction(0), tuple(Fraction(0) for _ in range(nv)), ())

    st = _Revised(rows, rhs, nv)
    m = st.m

    if st.ncols > st.first_art:
        cost1 = [_ZERO] * st.first_art + [_ONE] * (st.ncols - st.first_art)
        st.run(cost1, st.ncols)
        if st.objective(cost1) != 0:
            return LPSolution(INFEASIBLE, pivots=st.pivots)
        # Drive zero-valued artificials out of the basis. [A | -I] has full
        # row rank, so each such row has a nonzero non-artificial entry.
        for r in range(m):
            if st.basis[r] >= st.first_art:
                basic = set(st.basis)
                for j in range(st.first_art):
                    if j in basic:
                        continue
                    alpha = st.column(j)
                    if alpha[r] != 0:
                        st.pivot(r, j, alpha)
                        break

    cost2 = [mpq(c) for c in p.objective] + [_ZERO] * (st.ncols - nv)
    status = st.run(cost2, st.first_art)
    if status == UNBOUNDED:
        return LPSolution(UNBOUNDED, pivots=st.pivots)

    x = [_ZERO] * nv
    for bv, v in zip(st.basis, st.xb):
        if bv < nv:
            x[bv] = v
    pi = st.duals(cost2)
    # multipliers of the sign-adjusted rows back to the original rows
    y = [pi[i] * st.sign[i] for i in range(m)]
    value = st.objective(cost2)
    log.debug("simplex: %d rows, %d vars, %d pivots", m, nv, st.pivots)
    return LPSolution(
        OPTIMAL,
        _frac(value),
        tuple(_frac(v) for v in x),
        tuple(_frac(v) for v in y),
        st.pivots,
    )


def verify_solution(p: LinearProgram, s: LPSolution) -> bool:
    """Independent exact check of primal/dual feasibility and equal objectives."""
    if s.status != OPTIMAL or s.value is None:
        return False
    rows, rhs = p.expanded_rows()
    nv = p.num_vars
    x, y = s.primal, s.dual
    if len(x) != nv or len(y) != len(rows):
        return False
    if any(v < 0 for v in x) or any(v < 0 for v in y):
        return False
    for r, b in zip(rows, rhs):
        if sum(a * v for a, v in zip(r, x) if a) < b:
            return False
    for j in range(nv):
        if sum(r[j] * yi for r, yi in zip(rows, y) if yi) > p.objective[j]:
            return False
    primal_value = sum(c * v for c, v in zip(p.objective, x))
    dual_value = sum(b * v for b, v in zip(rhs, y))
    return primal_value == dual_value == s.value


def vertex_optimum(p: LinearProgram) -> Optional[Fraction]:
    """Brute-force optimum over all basic feasible points.

    Enumerates every choice of ``nv`` tight constraints among the rows and
    the nonnegativity bounds, solves the square system by Gaussian
    elimination, and keeps feasible solutions. Exponential; only for tiny
    programs. Returns None when no vertex is feasible.
    """
    rows, rhs = p.expanded_rows()
    nv = p.num_vars
    cons = [(list(r), b) for r, b in zip(rows, rhs)]
    for j in range(nv):
        e = [Fraction(0)] * nv
        e[j] = Fraction(1)
        cons.append((e, Fraction(0)))
    best = None
    for chosen in combinations(range(len(cons)), nv):
        sol = _solve_square([cons[i][0] for i in chosen], [cons[i][1] for i in chosen])
        if sol is None:
            continue
        if any(v < 0 for v in sol):
            continue
        if any(sum(a * v for a, v in zip(r, sol)) < b for r, b in zip(rows, rhs)):
            continue
        val = sum(c * v for c, v in zip(p.objective, sol))
        if best is None or val < best:
            best = val
    return best


def _solve_square(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]):
    n = len(A)
    M = [list(r) + [bi] for r, bi in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [v / pv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]
