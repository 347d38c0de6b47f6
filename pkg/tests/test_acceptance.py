"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""
import random
import sys
import time
from fractions import Fraction
from math import gcd
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import ACCEPTANCE_LINES  # noqa: E402
from test_lp import random_program  # noqa: E402

from gridcover.certificates import (  # noqa: E402
    audit_weighting, verify_weighting, weight_delta_generic, weight_generic, weight_restricted,
    weight_square_claim, weight_standard,
)
from gridcover.constructions import construct_biregular, construct_square_threehalves, construct_standard  # noqa: E402
from gridcover.geometry import enumerate_lines, linesize_bound_check, restricted_lines  # noqa: E402
from gridcover.grid import delta_genericity, generic_grid, make_grid, named_grid, rectangular_grid, standard_grid  # noqa: E402
from gridcover.harness import _best_warm_start, oracle_exhaustive_cov  # noqa: E402
from gridcover.lp import solve_lp, verify_solution, vertex_optimum  # noqa: E402
from gridcover.optimize import CoverInstance, phi, solve_ilp  # noqa: E402


def record(num: int, ok: bool, detail: str, started: float) -> None:
    ACCEPTANCE_LINES[num] = f"CRITERION {num}: {'PASS' if ok else 'FAIL'} {detail} ({time.monotonic() - started:.1f}s)"
    assert ok, ACCEPTANCE_LINES[num]


def _ilp(inst):
    res = solve_ilp(inst, warm_start=_best_warm_start(inst.grid, inst.family, inst.k))
    return res.optimum if res.optimal else None


def test_criterion_1_wide_grids():
    t0 = time.monotonic()
    bad, count = [], 0
    for m in range(2, 5):
        for k in range(1, 5):
            base = (k - 1) * (m - 1) + 1
            for n in (base, base + 1):
                if n < 2:
                    continue
                count += 1
                got = _ilp(CoverInstance.full(rectangular_grid(n, m), k))
                if got != k * (n - 1) + (m - 1):
                    bad.append(f"n={n} m={m} k={k} got {got}")
    record(1, not bad, f"{count} grids, cov = k(n-1)+(m-1) exact; mismatches {bad}", t0)


def test_criterion_2_generic_tightness():
    t0 = time.monotonic()
    bad, count = [], 0
    for n in range(2, 7):
        for m in range(2, 7):
            k = (n + m - 2) // gcd(n - 1, m - 1)
            g = generic_grid(n, m, 1000 * n + m)
            value = phi(CoverInstance.full(g))
            count += 1
            want = (max(n, m) - 1) + Fraction((min(n, m) - 1) ** 2, n + m - 2)
            got = _ilp(CoverInstance.full(g, k))
            size = construct_biregular(g, k).size
            if not (value == want and got == k * value and size == got):
                bad.append(f"{n}x{m} k={k}: phi {value}, ilp {got}, biregular {size}")
    record(2, not bad, f"{count} grids, phi/ilp/biregular all exact; mismatches {bad}", t0)


def test_criterion_3_square_even_k():
    t0 = time.monotonic()
    bad = []
    for n in range(2, 6):
        for k in (2, 4):
            g = generic_grid(n, n, 100 * n + k)
            res = solve_ilp(CoverInstance.full(g, k), warm_start=construct_square_threehalves(g, k))
            if not res.optimal or res.optimum != 3 * k // 2 * (n - 1):
                bad.append(f"n={n} k={k} got {res.optimum}")
    record(3, not bad, f"generic n<=5, k in {{2,4}}: cov = (3k/2)(n-1); mismatches {bad}", t0)


def test_criterion_4_standard_small_values():
    t0 = time.monotonic()
    got = {}
    for n, k in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2)]:
        g = standard_grid(n)
        inst = CoverInstance.full(g, k)
        got[(n, k)] = (solve_ilp(inst).optimum, oracle_exhaustive_cov(g, inst.family, k, 12))
    want = {(2, 1): 2, (2, 2): 3, (2, 3): 5, (2, 4): 6, (3, 2): 6}
    ok = all(got[key] == (v, v) for key, v in want.items())
    record(4, ok, f"(ilp, oracle) by (n,k): {got}", t0)


def test_criterion_5_restricted_family_suffices():
    t0 = time.monotonic()
    bad = []
    for n in range(2, 7):
        g = standard_grid(n)
        for k in range(1, 5):
            full = _ilp(CoverInstance.full(g, k))
            restricted = _ilp(CoverInstance.restricted(g, k))
            if full is None or full != restricted:
                bad.append(f"n={n} k={k}: full {full}, restricted {restricted}")
    record(5, not bad, f"n<=6, k<=4 full == restricted optimum; mismatches {bad}", t0)


def _square_grids(n):
    half = n // 2
    yield standard_grid(n)
    yield named_grid("exponential", n)
    yield named_grid("quadratic", n)
    yield generic_grid(n, n, 77 + n)
    yield make_grid(range(-half, n - half), range(-(n - 1 - half), half + 1))


def test_criterion_6_certificates_feasible():
    t0 = time.monotonic()
    bad, checks = [], 0

    def check(name, g, fam, w):
        nonlocal checks
        checks += 1
        if not verify_weighting(g, fam, w).feasible:
            bad.append(f"{name} {g.n}x{g.m}")

    for n in range(2, 11):
        for m in range(2, 11):
            g = generic_grid(n, m, 31 * n + m)
            check("generic", g, enumerate_lines(g), weight_generic(g))
        for g in _square_grids(n):
            fam = enumerate_lines(g)
            check("square-claim", g, fam, weight_square_claim(g))
            delta = delta_genericity(g)
            if delta <= n - 1:  # beyond this the boundary weight would be negative
                check("delta", g, fam, weight_delta_generic(g, delta))
        g = standard_grid(n)
        check("standard", g, enumerate_lines(g), weight_standard(n, g))
    for n in range(3, 61):
        g = standard_grid(n)
        check("restricted", g, restricted_lines(g), weight_restricted(n, g=g).weighting)
    record(6, not bad, f"{checks} weightings verified; infeasible {bad}", t0)


def test_criterion_7_asymptotic_constants():
    t0 = time.monotonic()
    n = 500
    g = standard_grid(n)
    ratios = {
        "standard": float(weight_standard(n, g).total / (n - 1)),
        "construct": float(construct_standard(n, 1000).size / Fraction(1000 * (n - 1))),
        "restricted": float(weight_restricted(n, g=g).weighting.total / (n - 1)),
        "square-claim": float(weight_square_claim(g).total / (n - 1)),
    }
    verdict = {
        "standard": 1.36 <= ratios["standard"] <= 1.40,
        "construct": 1.41 <= ratios["construct"] <= 1.46,
        "restricted": 1.37 <= ratios["restricted"] <= 1.4143,
        "square-claim": ratios["square-claim"] >= 1.05,
    }
    shown = ", ".join(f"{k}={v:.5f}{'' if verdict[k] else ' (out of band)'}" for k, v in ratios.items())
    record(7, all(verdict.values()), f"n=500 ratios: {shown}", t0)


def test_criterion_8_linesize_bound():
    t0 = time.monotonic()
    grids = [standard_grid(n) for n in range(2, 11)]
    for i in range(20):
        n = 3 + i % 8
        if i % 2:
            grids.append(generic_grid(n, n, 500 + i))
        else:
            shift = i % n
            grids.append(make_grid(range(-shift, n - shift), range(-(n - 1 - shift), shift + 1)))
    bad = [f"{g.s1}" for g in grids if not linesize_bound_check(g, enumerate_lines(g)).passed]
    record(8, not bad, f"{len(grids)} square grids; failures {bad}", t0)


def test_criterion_9_slope_one_audit():
    t0 = time.monotonic()
    found = {}
    for n in (20, 30, 40):
        report = audit_weighting(standard_grid(n), weight_restricted(n).weighting)
        hit = any(ln.a == -1 and ln.b == 1 for ln, _ in report.check.violations)
        found[n] = (len(report.check.violations), hit)
    ok = all(v > 0 and hit for v, hit in found.values())
    record(9, ok, f"(violations, y=x+1 violates) by n: {found}", t0)


def test_criterion_10_lp_kernel():
    t0 = time.monotonic()
    bad = 0
    for seed in range(200):
        lp = random_program(random.Random(10_000 + seed), max_vars=6, max_rows=8)
        s = solve_lp(lp)
        if not (s.optimal and verify_solution(lp, s) and s.value == vertex_optimum(lp)):
            bad += 1
    record(10, bad == 0, f"200 random programs, {bad} disagreements", t0)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    for num in sorted(ACCEPTANCE_LINES):
        print(ACCEPTANCE_LINES[num])
    sys.exit(1 if failed else 0)
