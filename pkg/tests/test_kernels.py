import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robinqg.kernels import (
    EdgePoleError, SpectralParameterError, edge_dtn, edge_entries, eval_kernel,
)

mp.mp.dps = 40


def mp_kernel(lam, x):
    k = mp.sqrt(mp.mpc(lam))
    if k == 0:
        return mp.mpf(1), mp.mpf(x)
    return mp.cos(k * x), mp.sin(k * x) / k


def test_kernel_at_zero():
    ker = eval_kernel(0.0, 1.0)
    assert ker.c == 1 and ker.s == 1
    assert ker.dc_dlambda == pytest.approx(-0.5)
    assert ker.ds_dlambda == pytest.approx(-1 / 6)


def test_kernel_quarter_wave():
    ker = eval_kernel(math.pi**2 / 4, 1.0)
    assert abs(ker.c) < 1e-15
    assert ker.s == pytest.approx(2 / math.pi, rel=1e-15)


def test_kernel_negative_lambda():
    ker = eval_kernel(-1.0, 1.0)
    c, s = mp_kernel(-1, 1)
    assert abs(ker.c - complex(c)) < 1e-14
    assert abs(ker.s - complex(s)) < 1e-14
    assert ker.c.real == pytest.approx(1.5430806348, abs=1e-10)
    assert ker.s.real == pytest.approx(1.1752011936, abs=1e-10)


def test_kernel_rejects_nonfinite():
    with pytest.raises(SpectralParameterError, match="non-finite spectral parameter"):
        eval_kernel(complex(np.nan, 0), 1.0)
    with pytest.raises(SpectralParameterError):
        edge_dtn(np.inf, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(-60, 60), st.floats(-60, 60), st.floats(0.1, 2.0))
def test_kernel_matches_mpmath(re, im, x):
    lam = complex(re, im)
    ker = eval_kernel(lam, x)
    c, s = mp_kernel(lam, x)
    scale = 1 + abs(complex(c)) + abs(complex(s))
    assert abs(ker.c - complex(c)) < 1e-12 * scale
    assert abs(ker.s - complex(s)) < 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(st.floats(-40, 40), st.floats(-40, 40), st.floats(0.1, 2.0))
def test_kernel_derivatives_match_mpmath(re, im, x):
    lam = complex(re, im)
    ker = eval_kernel(lam, x)
    dc = mp.diff(lambda z: mp_kernel(z, x)[0], mp.mpc(lam))
    ds = mp.diff(lambda z: mp_kernel(z, x)[1], mp.mpc(lam))
    scale = 1 + abs(complex(dc)) + abs(complex(ds))
    assert abs(ker.dc_dlambda - complex(dc)) < 1e-10 * scale
    assert abs(ker.ds_dlambda - complex(ds)) < 1e-10 * scale


def test_series_and_closed_forms_agree_at_crossover():
    x = 1.0
    for r in (0.999e-2, 1.001e-2):
        for ang in np.linspace(0, 2 * np.pi, 7):
            lam = (r * np.exp(1j * ang)) ** 2
            ker = eval_kernel(lam, x)
            c, s = mp_kernel(lam, x)
            assert abs(ker.c - complex(c)) < 1e-15
            assert abs(ker.s - complex(s)) < 1e-15


def test_kernel_vectorized():
    lam = np.array([-1.0, 0.0, 3 + 2j])
    ker = eval_kernel(lam, 1.3)
    for i, z in enumerate(lam):
        one = eval_kernel(z, 1.3)
        assert ker.c[i] == pytest.approx(one.c)
        assert ker.s[i] == pytest.approx(one.s)


def test_edge_dtn_zero():
    assert np.allclose(edge_dtn(0.0, 1.0), [[-1, 1], [1, -1]], atol=1e-15)


def test_edge_dtn_quarter_wave():
    assert np.allclose(edge_dtn(math.pi**2 / 4, 1.0), [[0, math.pi / 2], [math.pi / 2, 0]], atol=1e-14)


def test_edge_dtn_negative():
    a = -mp.coth(1)
    b = 1 / mp.sinh(1)
    assert np.allclose(edge_dtn(-1.0, 1.0), [[float(a), float(b)], [float(b), float(a)]], atol=1e-14)
    assert float(a) == pytest.approx(-1.3130352855, abs=1e-10)
    assert float(b) == pytest.approx(0.8509181282, abs=1e-10)


def test_edge_pole_carries_nearest_pole():
    with pytest.raises(EdgePoleError, match="edge Dirichlet pole") as err:
        edge_dtn(4 * math.pi**2, 1.0)
    assert err.value.nearest_pole == pytest.approx(4 * math.pi**2)


def test_edge_dtn_symmetric():
    rng = np.random.default_rng(0)
    for _ in range(50):
        lam = complex(*rng.uniform(-50, 50, 2))
        M = edge_dtn(lam, rng.uniform(0.2, 2))
        assert np.allclose(M, M.T, rtol=0, atol=0)


def test_branch_invariance():
    # both entries must be even in sqrt(lam): use the other root explicitly
    rng = np.random.default_rng(1)
    for _ in range(100):
        lam = complex(*rng.uniform(-50, 50, 2))
        ell = 1.0
        k = -np.sqrt(lam)
        ref = np.array([[-k / np.tan(k * ell), k / np.sin(k * ell)]])
        a, b = edge_entries(lam, ell)
        assert abs(a - ref[0, 0]) <= 1e-12 * abs(ref[0, 0]) + 1e-12
        assert abs(b - ref[0, 1]) <= 1e-12 * abs(ref[0, 1]) + 1e-12


def test_edge_entries_large_imaginary_no_overflow():
    for tau in (50.0, 400.0, 900.0):
        for sgn in (1, -1):
            k = 3.0 + sgn * 1j * tau
            a, b = edge_entries(k * k, 1.0)
            assert np.isfinite(a) and np.isfinite(b)
            # A -> i k sgn(Im k) and B -> 0
            assert abs(a - 1j * k * sgn) < 1e-8 * abs(k)
            assert abs(b) <= 3 * abs(k) * math.exp(-tau)


def test_edge_asymptotic_decay_rates():
    ell = 0.7
    taus = np.array([10.0, 20.0, 40.0])
    eb = []
    for tau in taus:
        k = 2.0 + 1j * tau
        a, b = edge_entries(k * k, ell)
        assert abs(a - 1j * k) <= 3 * abs(k) * math.exp(-2 * ell * tau) + 1e-14 * abs(k)
        assert abs(b) <= 3 * abs(k) * math.exp(-ell * tau)
        eb.append(math.log(abs(b) / abs(k)))
    assert -np.polyfit(taus, eb, 1)[0] == pytest.approx(ell, rel=0.02)
    # A - i k is a cancellation; its decay is visible only above rounding level
    small = np.array([4.0, 6.0, 8.0])
    ea = []
    for tau in small:
        k = 2.0 + 1j * tau
        a, _ = edge_entries(k * k, ell)
        ea.append(math.log(abs(a - 1j * k) / abs(k)))
    assert -np.polyfit(small, ea, 1)[0] == pytest.approx(2 * ell, rel=0.02)
