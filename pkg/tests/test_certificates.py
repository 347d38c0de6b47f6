from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from gridcover.certificates import (
    Weighting, audit_weighting, default_square_claim_t, restricted_alphas, restricted_t_window,
    restricted_z, standard_t, verify_weighting, weight_delta_generic, weight_generic,
    weight_restricted, weight_square_claim, weight_standard, weighting_from_json, weighting_to_json,
)
from gridcover.errors import BadParameter, DeltaTooSmall, NotGeneric, NotSquare
from gridcover.geometry import Line, enumerate_lines, restricted_lines
from gridcover.grid import delta_genericity, generic_grid, make_grid, named_grid, rectangular_grid, standard_grid
from gridcover.optimize import CoverInstance, phi

F = Fraction


def _square_grids(n):
    half = n // 2
    yield standard_grid(n)
    yield named_grid("exponential", n)
    yield named_grid("quadratic", n)
    yield generic_grid(n, n, n)
    yield make_grid(range(-half, n - half), range(-half, n - half))


def test_verify_weighting_examples():
    g = standard_grid(2)
    fam = enumerate_lines(g)
    half = Weighting.on_grid(g, lambda p: F(1, 2))
    r = verify_weighting(g, fam, half)
    assert r.feasible and r.max_line_weight == 1
    heavy = Weighting.on_grid(g, lambda p: F(2, 3))
    r = verify_weighting(g, fam, heavy)
    assert not r.feasible and {w for _, w in r.violations} == {F(4, 3)} and len(r.violations) == 3


def test_negative_weight_is_infeasible():
    g = standard_grid(2)
    w = Weighting.on_grid(g, lambda p: F(-1) if p.x else F(0))
    r = verify_weighting(g, enumerate_lines(g), w)
    assert not r.feasible and r.negative_points


def test_generic_examples():
    assert weight_generic(generic_grid(4, 3, 1)).total == F(19, 5)
    for n in (3, 5):
        assert weight_generic(generic_grid(n, n, 2)).total == F(3 * (n - 1), 2)
    w = weight_generic(generic_grid(2, 2, 0))
    assert set(w.weights.values()) == {F(1, 2)} and w.total == F(3, 2)
    with pytest.raises(NotGeneric):
        weight_generic(standard_grid(3))


@pytest.mark.parametrize("n,m", [(4, 3), (5, 5), (6, 2), (3, 5)])
def test_generic_total_matches_phi(n, m):
    g = generic_grid(n, m, 11)
    w = weight_generic(g)
    assert verify_weighting(g, enumerate_lines(g), w).feasible
    assert w.total == phi(CoverInstance.full(g)) == (n - 1) + F((m - 1) ** 2, n + m - 2)


def test_square_claim_identities_and_examples():
    for n in range(2, 30):
        t = default_square_claim_t(n)
        # defining inequality of the ceiling, checked with integers only
        assert 4 * (t + n) ** 2 >= (5 * n + 1) * (n - 1) > 4 * (t + n - 1) ** 2 or t + n - 1 < 0
        a, b = F(1, n + t), F(t + 1, n + t)
        assert 2 * b + (n - t - 2) * a == 1 and b + (n - 1) * a == 1
    w = weight_square_claim(standard_grid(3), t=1)
    assert w.total >= 2 * 1 * F(1, 2) + 4 * F(1, 4) == 2
    with pytest.raises(NotSquare):
        weight_square_claim(rectangular_grid(3, 2))
    with pytest.raises(BadParameter):
        weight_square_claim(standard_grid(4), t=9)


def test_square_claim_corrected_index_matters():
    """With the unreflected index n-j the diagonal x+y=n-1 of the standard
    grid gets two weighted endpoints and n-2 interior points; that is
    infeasible, which is why the builder uses n+1-j."""
    n, t = 6, 1
    g = standard_grid(n)
    a, b = F(1, n + t), F(t + 1, n + t)
    assert 2 * b + (n - 2) * a > 1
    w = weight_square_claim(g, t)
    assert w[(0, n - 1)] == 0


def test_delta_examples():
    g = generic_grid(5, 5, 1)
    w = weight_delta_generic(g, 0)
    assert set(w.weights.values()) == {F(1, 2), F(1, 8)} and w.total == 6
    assert weight_delta_generic(named_grid("exponential", 5), 1).total == F(40, 7)
    with pytest.raises(DeltaTooSmall):
        weight_delta_generic(standard_grid(5), 2)
    degenerate = weight_delta_generic(standard_grid(4), 5)
    assert not verify_weighting(standard_grid(4), enumerate_lines(standard_grid(4)), degenerate).feasible
    with pytest.raises(NotSquare):
        weight_delta_generic(rectangular_grid(3, 2), 0)


def test_standard_examples():
    assert standard_t(3) == 1 and weight_standard(3).total == 3
    assert standard_t(5) == 1 and weight_standard(5).total == 5
    g = standard_grid(3)
    assert verify_weighting(g, enumerate_lines(g), weight_standard(3)).feasible


@pytest.mark.parametrize("n", range(2, 12))
def test_standard_diagonal_profile(n):
    t = standard_t(n)
    assert sum(F(1, n - i) for i in range(1, t + 1)) <= F(1, 2)
    if t + 1 <= n - 1:
        assert sum(F(1, n - i) for i in range(1, t + 2)) > F(1, 2)
    w = weight_standard(n)
    sums = [sum(w[(x, c - x)] for x in range(max(0, c - n + 1), min(c, n - 1) + 1)) for c in range(1, 2 * n - 1)]
    assert sums == [1] * (n - 1 + t) + [0] * (2 * n - 2 - (n - 1 + t))


def test_restricted_n5():
    cert = weight_restricted(5)
    assert (cert.t, cert.z) == (1, F(5, 18))
    assert cert.alpha == (0, F(5, 54), F(5, 108), F(1, 36))
    assert cert.weighting.total == F(35, 6)


def _z_by_sum(n, t):
    s = sum(F(1, n - j) * (1 - F(j * (j - 1), (n - 1) * n)) for j in range(1, t + 1))
    return (F(1, 2) - s) * F(n * (n - 1), n * (n - 1) - t * (t + 1))


def _alphas_by_recurrence(n, t, z):
    """Run the recurrence upward from alpha_1 = 0."""
    alpha = {1: F(0)}
    for i in range(2, n):
        extra = z if i == t + 1 else (F(1, n - i) if i <= t else 0)
        alpha[i] = F(i - 1, i + 1) * (alpha[i - 1] + extra)
    return tuple(alpha[i] for i in range(1, n))


@pytest.mark.parametrize("n", [3, 4, 5, 8, 13, 20, 41])
def test_restricted_closed_forms(n):
    cert = weight_restricted(n)
    t, z = cert.t, cert.z
    assert z == _z_by_sum(n, t)
    assert cert.alpha == _alphas_by_recurrence(n, t, z)
    # balance along x = n-1
    assert cert.alpha[-1] == sum(F(1, 2 * n - 1 - i) for i in range(n, n + t)) + z - F(1, 2)


@pytest.mark.parametrize("n", [4, 6, 9, 15, 22])
def test_restricted_line_weights(n):
    g = standard_grid(n)
    cert = weight_restricted(n)
    fam = restricted_lines(g)
    assert verify_weighting(g, fam, cert.weighting).feasible
    for line, inc in zip(fam.lines, fam.incidence):
        weight = sum(cert.weighting.weights[fam.points[i]] for i in inc)
        if line.slope_kind in ("vertical", "horizontal"):
            assert weight == 1
        elif 1 / line.a <= n + cert.t - 1:
            assert weight == 1


def test_restricted_window_and_errors():
    for n in range(3, 200):
        lo, hi = restricted_t_window(n)
        assert lo <= hi
    with pytest.raises(BadParameter):
        weight_restricted(2)
    with pytest.raises(BadParameter):
        weight_restricted(10, t=8)


def test_audit_groups_by_slope():
    g = standard_grid(13)
    report = audit_weighting(g, weight_restricted(13).weighting)
    assert report.violating_slopes == ["1"]
    assert any(ln == Line(F(-1), F(1)) for ln, _ in report.by_slope["1"])
    assert not audit_weighting(g, weight_standard(13)).check.violations
    gg = generic_grid(5, 5, 3)
    assert not audit_weighting(gg, weight_generic(gg)).check.violations


def test_weak_duality_small_lattice():
    for n in range(2, 6):
        g = standard_grid(n)
        value = phi(CoverInstance.full(g))
        for w in (weight_standard(n), weight_square_claim(g), weight_delta_generic(g, delta_genericity(g))):
            if verify_weighting(g, enumerate_lines(g), w).feasible:
                assert w.total <= value
        if n >= 3:
            assert weight_restricted(n).weighting.total <= phi(CoverInstance.restricted(g))


def test_json_round_trip():
    w = weight_restricted(6).weighting
    back = weighting_from_json(weighting_to_json(w))
    assert back.weights == w.weights and back.total == w.total


@given(st.integers(2, 7), st.integers(2, 7), st.integers(0, 500))
def test_generic_weighting_property(n, m, seed):
    g = generic_grid(n, m, seed)
    w = weight_generic(g)
    assert verify_weighting(g, enumerate_lines(g), w).feasible
    assert w.total == (n - 1) + F((m - 1) ** 2, n + m - 2)
