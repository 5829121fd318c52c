"""Entire basis functions C(x; lam) = cos(sqrt(lam) x), S(x; lam) = sin(sqrt(lam) x)/sqrt(lam).

Both are even in sqrt(lam), hence entire in lam; everything here is
branch-independent.  Functions accept scalars or numpy arrays of ``lam``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SERIES_CUTOFF = 1e-2
SERIES_TERMS = 8
POLE_RTOL = 1e-10
# Im(sqrt(lam) * ell) beyond which ratios are taken from exponentially factored forms.
FACTORED_SWITCH = 20.0


class SpectralParameterError(ValueError):
    pass


class EdgePoleError(ArithmeticError):
    """``lam`` is (numerically) a Dirichlet eigenvalue of an edge."""

    def __init__(self, lam, length, edge=None):
        n = max(1, round(math.sqrt(max(complex(lam).real, 0.0)) * length / math.pi))
        self.nearest_pole = (n * math.pi / length) ** 2
        self.edge = edge
        where = f" on edge {edge}" if edge is not None else ""
        super().__init__(
            f"edge Dirichlet pole{where}: lambda={complex(lam)} near {self.nearest_pole}"
        )


@dataclass(frozen=True)
class SpectralPoint:
    lam: complex

    def __post_init__(self):
        lam = complex(self.lam)
        if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
            raise SpectralParameterError("non-finite spectral parameter")
        object.__setattr__(self, "lam", lam)

    @property
    def sqrt_lambda(self) -> complex:
        return complex(np.sqrt(self.lam))

    @property
    def im_sqrt(self) -> float:
        return self.sqrt_lambda.imag


@dataclass(frozen=True)
class EdgeKernel:
    c: np.ndarray | complex
    s: np.ndarray | complex
    dc_dlambda: np.ndarray | complex
    ds_dlambda: np.ndarray | complex


def _as_lambda(lam):
    arr = np.asarray(lam, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise SpectralParameterError("non-finite spectral parameter")
    return arr


def _series(w, x):
    """Taylor sums in w = lam x^2 for C, S/x, and the lam-derivatives."""
    c = np.zeros_like(w)
    s = np.zeros_like(w)
    dc = np.zeros_like(w)
    ds = np.zeros_like(w)
    term = np.ones_like(w)  # w^n
    wprev = np.ones_like(w)  # w^(n-1)
    for n in range(SERIES_TERMS):
        sign = -1.0 if n % 2 else 1.0
        c += sign * term / math.factorial(2 * n)
        s += sign * term / math.factorial(2 * n + 1)
        if n >= 1:
            dc += sign * n * wprev / math.factorial(2 * n)
            ds += sign * n * wprev / math.factorial(2 * n + 1)
            wprev = wprev * w
        term = term * w
    # d/dlam w^n = n w^(n-1) x^2
    return c, s * x, dc * x**2, ds * x**3


def eval_kernel(lam, x: float) -> EdgeKernel:
    """C, S and their lam-derivatives at length ``x`` (overflows for Im sqrt(lam) x > ~700)."""
    if not x > 0:
        raise ValueError("x must be positive")
    lam = _as_lambda(lam)
    scalar = lam.ndim == 0
    lam = np.atleast_1d(lam)
    k = np.sqrt(lam)
    z = k * x
    small = np.abs(z) < SERIES_CUTOFF
    with np.errstate(all="ignore"):
        c = np.cos(z)
        s = np.where(small, 0, np.sin(z) / np.where(small, 1, k))
        dc = -0.5 * x * s
        ds = np.where(small, 0, (x * c - s) / np.where(small, 1, 2 * lam))
    if np.any(small):
        cs, ss, dcs, dss = _series(lam[small] * x * x, x)
        c[small], s[small], ds[small] = cs, ss, dss
        dc[small] = dcs
    if scalar:
        return EdgeKernel(complex(c[0]), complex(s[0]), complex(dc[0]), complex(ds[0]))
    return EdgeKernel(c, s, dc, ds)


def edge_entries(lam, ell: float, edge=None):
    """Diagonal ``A`` = -sqrt(lam) cot(sqrt(lam) ell) and off-diagonal ``B`` = sqrt(lam) csc(...)."""
    lam = _as_lambda(lam)
    scalar = lam.ndim == 0
    lam = np.atleast_1d(lam)
    k = np.sqrt(lam)
    z = k * ell
    a = np.empty_like(lam)
    b = np.empty_like(lam)
    big = np.abs(z.imag) > FACTORED_SWITCH
    if np.any(~big):
        ker = eval_kernel(lam[~big], ell)
        c, s = np.atleast_1d(ker.c), np.atleast_1d(ker.s)
        pole = np.abs(s) < POLE_RTOL * np.maximum(1.0, np.abs(c))
        if np.any(pole):
            raise EdgePoleError(lam[~big][pole][0], ell, edge)
        a[~big] = -c / s
        b[~big] = 1.0 / s
    if np.any(big):
        # both entries are even in k; take the root with Im z > 0 so q = exp(2iz) is tiny
        flip = np.where(z[big].imag < 0, -1.0, 1.0)
        kb, zb = k[big] * flip, z[big] * flip
        eiz = np.exp(1j * zb)
        q = eiz * eiz
        cot = -1j * (1 + q) / (1 - q)
        csc = -2j * eiz / (1 - q)
        a[big] = -kb * cot
        b[big] = kb * csc
    if scalar:
        return complex(a[0]), complex(b[0])
    return a, b


def edge_dtn(lam, ell: float) -> np.ndarray:
    """2x2 edge DtN matrix [[A, B], [B, A]] mapping end values to minus the summed inward flux."""
    a, b = edge_entries(complex(SpectralPoint(lam).lam), ell)
    return np.array([[a, b], [b, a]], dtype=complex)
