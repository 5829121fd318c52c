import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catalog import FIXTURES
from robinqg.bounds import (
    RangeRegion, TestFunction, count_negative_eigenvalues, first_eigenvalue_bounds, first_eigenvalue_upper_bound,
    imag_part_bound, imag_part_limit, negative_eigenvalues, random_test_function, rayleigh_quotient,
    real_part_lower_bound, region_membership, segment_norms, star_secular_solve, trace_inequality_check,
)
from robinqg.graph import graph_metrics, interval, path_graph, star_graph
from robinqg.secular import find_roots


# -- Rayleigh quotient -----------------------------------------------------------

def test_rq_constant(any_fixture):
    name, g = any_fixture
    k = len(g.robin)
    q = rayleigh_quotient(g, -2 + 3j, TestFunction.constant(g))
    assert q == pytest.approx(k * (-2 + 3j) / g.total_length, rel=1e-14)


def test_rq_vanishing_at_robin_vertices():
    g = FIXTURES["path"]()
    f = TestFunction.from_callable(g, lambda p, x: math.sin(math.pi * x / g.edges[p].length) + 0.3 * x * (g.edges[p].length - x))
    q = rayleigh_quotient(g, 5 - 7j, f)
    assert abs(q.imag) < 1e-14 and q.real >= 0


def test_rq_hat():
    g = interval(1.0, 1.0, None)
    f = TestFunction(g, (np.array([1.0, 0.0]),))
    assert rayleigh_quotient(g, 1.0, f) == pytest.approx(6.0, rel=1e-14)


def test_rq_zero_norm():
    g = interval(1.0, 1.0, None)
    with pytest.raises(ValueError):
        rayleigh_quotient(g, 1.0, TestFunction.constant(g, 0.0))


def test_test_function_continuity_enforced():
    g = FIXTURES["k4"]()
    f = random_test_function(g, np.random.default_rng(0))
    assert isinstance(f, TestFunction)
    with pytest.raises(ValueError, match="discontinuous"):
        TestFunction(g, tuple(np.arange(3.0) + p for p in range(len(g.edges))))


def test_segment_norms_partial_cells():
    vals = np.array([0.0, 1.0, 4.0])  # nodes of x -> x^2-ish on [0, 2]
    # linear pieces: f = x on [0,1], f = 1 + 3(x-1) on [1,2]
    n2, d2 = segment_norms(vals, 2.0, 0.5, 1.5)
    ref2 = (1 - 0.125) / 3 + ((2.5**3 - 1) / 9)
    assert n2 == pytest.approx(ref2, rel=1e-14)
    assert d2 == pytest.approx(0.5 + 4.5, rel=1e-14)


# -- numerical range region ------------------------------------------------------

def test_membership_positive_axis():
    reg = RangeRegion(1 + 1j, 1.0, 1.0)
    assert region_membership(5.0, reg)


def test_membership_boundary_point():
    reg = RangeRegion(1 + 1j, 1.0, 1.0)
    assert region_membership(9 + 5j, reg)
    assert not region_membership(9 + 5.01j, reg)


def test_membership_right_half_plane():
    assert not region_membership(-0.1, RangeRegion(2 + 1j, 1.0, 1.0))
    assert not region_membership(-0.1, RangeRegion(2.0, 1.0, 1.0))


def test_membership_real_negative_alpha():
    # real alpha: region is [-a^2/D^2 + a/(D ell), inf) on the real axis
    reg = RangeRegion(-6.0, 3.0, 1.0)
    assert region_membership(-6.0, reg)
    assert not region_membership(-6.001, reg)
    assert not region_membership(-1 + 0.01j, reg)


def test_variable_region_reduces_to_constant():
    rng = np.random.default_rng(2)
    for _ in range(40):
        a = complex(*rng.uniform(-5, 5, 2))
        z = complex(rng.uniform(-20, 40), rng.uniform(-30, 30))
        c = region_membership(z, RangeRegion(a, 1.0, 1.0))
        v = region_membership(z, RangeRegion((a,), 1.0, 1.0))
        if abs(c.margin) > 1e-6:
            # the per-vertex form allows 2/(D ell) instead of 1/(D ell), so it can only be larger
            assert (not c.member) or v.member


def test_variable_region_witness():
    m = region_membership(3 + 2j, RangeRegion((1 + 1j, 2 - 1j), 2.0, 1.0))
    assert m.member
    s = np.array(m.s)
    assert m.t == pytest.approx((3 + 2j - np.dot([1 + 1j, 2 - 1j], s)).real, abs=1e-8)


def test_region_needs_robin():
    with pytest.raises(ValueError, match="empty Robin set"):
        RangeRegion.for_graph(interval(1.0))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(sorted(FIXTURES)), st.sampled_from([1 + 1j, -2 + 5j, -10.0, 3 - 2j]))
def test_sampled_quotients_inside_region(seed, name, alpha):
    g = FIXTURES[name]().with_alpha(alpha)
    reg = RangeRegion.for_graph(g)
    f = random_test_function(g, np.random.default_rng(seed), complex_valued=bool(seed % 2))
    assert region_membership(rayleigh_quotient(g, None, f), reg)


def test_eigenvalues_inside_region(any_fixture):
    name, g = any_fixture
    for alpha in (1 + 1j, -3 + 2j, -4.0):
        ga = g.with_alpha(alpha)
        reg = RangeRegion.for_graph(ga)
        for r in find_roots(ga, None, (-60, 60, -20, 20)):
            assert region_membership(r.lam, reg), (alpha, r.lam)


# -- scalar bounds ------------------------------------------------------------------

def test_real_part_lower_bound():
    assert real_part_lower_bound(-6, 3, 1) == -6
    assert real_part_lower_bound(-1 + 5j, 1, 1) == -2
    assert real_part_lower_bound(1j, 1, 1) == 0


def test_upper_bounds():
    g = star_graph([1, 1, 1], center=-6.0)
    assert first_eigenvalue_upper_bound(-6.0, g) == pytest.approx(-2)
    assert first_eigenvalue_upper_bound(-30.0, g) == pytest.approx(-81)
    g2 = path_graph([2.0, 2.0], [-0.1, None, -0.1])
    assert first_eigenvalue_upper_bound(-0.1, g2) == pytest.approx(-0.05)
    with pytest.raises(ValueError):
        first_eigenvalue_upper_bound(1.0, g)


def test_two_sided_bound_star():
    g = star_graph([1, 1, 1], center=-10.0)
    lo, up = first_eigenvalue_bounds(-10.0, g)
    lam1 = negative_eigenvalues(g, -10.0)[0].lam.real
    assert lo <= lam1 < up


def test_lower_bound_fails_for_adjacent_robin_vertices():
    # interval with both ends Robin alpha = -1: the ground state sits below -alpha^2/D^2 + alpha/(D ell)
    g = interval(1.0, -1.0, -1.0)
    lo, up = first_eigenvalue_bounds(-1.0, g)
    lam1 = find_roots(g, None, (-10, -1e-9, -1e-6, 1e-6))[0].lam.real
    # oracle: even ground state sqrt(mu) tanh(sqrt(mu)/2) = 1
    from scipy.optimize import brentq
    k = brentq(lambda k: k * math.tanh(k / 2) - 1, 0.1, 10)
    assert lam1 == pytest.approx(-k * k, abs=1e-10)
    assert lam1 < lo == -2.0


def test_imag_part_limit():
    g = interval(1.0, -3j, 3j)
    assert imag_part_limit(9.0, g) == pytest.approx(21.0)
    assert imag_part_bound(9.0, g)
    with pytest.raises(ValueError, match="inapplicable"):
        imag_part_limit(1.0, g.with_alpha([-1.0, 1.0]))


def test_imag_bound_interval_post_hoc():
    g = interval(1.0, 10j, 0.0)
    for r in find_roots(g, None, (0, 100, 0, 100)):
        assert imag_part_bound(r.lam, g)


def test_imag_bound_star_counterexample():
    # degree-3 Robin center: the computed ground state beats the bound with 1/(D ell)
    g = star_graph([1, 1, 1], center=0.1j)
    lam = find_roots(g, None, (-0.5, 0.5, -0.5, 0.5))[0].lam
    assert lam.imag == pytest.approx(0.1 / 3, rel=0.01)  # ~ k alpha / |G|
    assert abs(lam.imag) > imag_part_limit(lam, g)
    # the version with 1/ell in place of 1/(D ell) holds
    w = 0.1 / 3
    assert abs(lam.imag) <= w * (2 * math.sqrt(lam.real) + 1 / g.min_length)


# -- trace inequality ---------------------------------------------------------------

def test_trace_zero_function():
    g = FIXTURES["k4"]()
    f = TestFunction.constant(g, 0.0)
    assert trace_inequality_check(g, f, vertex="v1") == 0
    assert trace_inequality_check(g, f, vertex_set=["v1", "v2"]) == 0


def test_trace_flat_star_equality():
    g = star_graph([1.3, 1.3, 1.3], center=1.0)
    slack = trace_inequality_check(g, TestFunction.constant(g), vertex="c")
    assert abs(slack) <= 1e-12


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(sorted(FIXTURES)), st.sampled_from([1.0, 0.5]))
def test_trace_local_random(seed, name, xi):
    g = FIXTURES[name]()
    rng = np.random.default_rng(seed)
    f = random_test_function(g, rng, complex_valued=True)
    for v in g.vertex_ids:
        assert trace_inequality_check(g, f, vertex=v, xi=xi) >= -1e-12


def test_trace_local_cutoffs():
    g = FIXTURES["cycle_pendant"]()
    for v in g.vertex_ids:
        for xi in (1.0, 0.5, 0.25):
            f = TestFunction.cutoff(g, v, xi)
            assert trace_inequality_check(g, f, vertex=v, xi=xi) >= -1e-12


def test_trace_global_non_adjacent():
    g = FIXTURES["path"]()
    rng = np.random.default_rng(4)
    for _ in range(200):
        f = random_test_function(g, rng)
        assert trace_inequality_check(g, f, vertex_set=g.robin) >= -1e-12


def test_trace_global_fails_for_adjacent_vertices():
    # the two spanning stars share the edge, so the flat function counts it once on the right
    g = interval(1.0, 1.0, 1.0)
    slack = trace_inequality_check(g, TestFunction.constant(g), vertex_set=["a", "b"])
    assert slack == pytest.approx(-1.0, abs=1e-14)


# -- star model and negative spectrum -------------------------------------------------

def test_star_secular_solve():
    lam = star_secular_solve(-30.0, 1.0, 3)
    assert -100 < lam < -99.99
    assert lam <= -81
    assert star_secular_solve(-2.0, 1.0, 3) is None
    assert star_secular_solve(-3.0, 50.0, 1) == pytest.approx(-9.0, rel=1e-12)


def test_star_secular_solve_matches_solver():
    for alpha in (-4.0, -12.0, -30.0):
        g = star_graph([1, 1, 1], center=alpha, leaves="dirichlet")
        r = find_roots(g, None, (-(alpha / 3) ** 2 - 5, -1e-9, -1e-6, 1e-6), tol=1e-13)
        assert len(r) == 1
        assert r[0].lam.real == pytest.approx(star_secular_solve(alpha, 1.0, 3), abs=1e-9)


def test_negative_count_star():
    nc = count_negative_eigenvalues(star_graph([1, 1, 1], center=-10.0), -10.0)
    assert nc.asserted and nc.count == 1 and nc.ok


def test_negative_count_path():
    nc = count_negative_eigenvalues(path_graph([1, 1], [-10.0, None, -10.0]), -10.0)
    assert nc.asserted and nc.count == 2


def test_negative_count_weak_coupling_not_asserted():
    nc = count_negative_eigenvalues(star_graph([1, 1, 1], center=-0.5), -0.5)
    assert not nc.asserted and nc.ok
    assert nc.count == 1


def test_negative_window_encloses_spectrum(any_fixture):
    name, g = any_fixture
    met = graph_metrics(g)
    for alpha in (-5.0, -30.0):
        r = negative_eigenvalues(g, alpha)
        deep = find_roots(g.with_alpha(alpha), None, (-4 * alpha**2, -1e-9, -1e-6, 1e-6))
        assert sum(x.multiplicity for x in r) == sum(x.multiplicity for x in deep)
        assert met.min_robin_degree >= 1
