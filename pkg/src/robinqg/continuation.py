"""Tracking eigenvalue branches along straight paths in the Robin couplings.

A path moves each coupling as alpha_j(t) = alpha_j0 + t d_j exp(i theta_j).
Branches are followed by a tangent predictor (implicit differentiation of the
secular determinant through its null vectors) and a Newton corrector in lam.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph import MetricGraph
from .secular import ContourError, Region, SecularFunction, newton, winding_number

DIVERGENT = "divergent"
CONVERGENT = "dirichlet_convergent"
UNDECIDED = "undecided"

SECTOR_EPS = 0.05


class InconclusiveError(RuntimeError):
    pass


class AsymptoticRegimeError(ValueError):
    pass


@dataclass(frozen=True)
class ParameterPath:
    """alpha_j(t) = base_j + t * modulus_j * exp(i angle_j) for t in [0, T]."""

    base: tuple[complex, ...]
    modulus: tuple[float, ...]
    angle: tuple[float, ...]
    T: float

    def __post_init__(self):
        n = len(self.base)
        if not (len(self.modulus) == n and len(self.angle) == n):
            raise ValueError("path components must have one entry per Robin vertex")
        if any(d < 0 for d in self.modulus):
            raise ValueError("direction moduli must be nonnegative")
        if not self.T > 0:
            raise ValueError("T must be positive")
        object.__setattr__(self, "base", tuple(complex(b) for b in self.base))
        object.__setattr__(self, "modulus", tuple(float(d) for d in self.modulus))
        object.__setattr__(self, "angle", tuple(float(a) for a in self.angle))

    @classmethod
    def linear(cls, base, direction, T: float) -> "ParameterPath":
        """Path from complex ``direction`` vectors: alpha(t) = base + t * direction."""
        direction = [complex(d) for d in direction]
        return cls(tuple(base), tuple(abs(d) for d in direction),
                   tuple(float(np.angle(d)) for d in direction), T)

    @property
    def velocity(self) -> np.ndarray:
        return np.array([d * np.exp(1j * a) for d, a in zip(self.modulus, self.angle)])

    def alpha(self, t: float) -> np.ndarray:
        return np.array(self.base) + t * self.velocity

    def tags(self) -> list[int]:
        """Case per vertex: 1 if the direction lies in a closed left-half-plane subsector, else 2."""
        out = []
        for d, a in zip(self.modulus, self.angle):
            dev = abs(np.angle(np.exp(1j * (a - math.pi))))
            out.append(1 if d > 0 and math.cos(a) < 0 and dev < math.pi / 2 - SECTOR_EPS else 2)
        return out

    @property
    def m(self) -> int:
        return sum(1 for c in self.tags() if c == 1)


@dataclass
class ContinuationConfig:
    tol: float = 1e-10
    div_threshold: float = 1e3
    conv_tol: float = 1e-6
    max_steps: int = 20000
    t_eval: tuple[float, ...] = ()


@dataclass
class Branch:
    samples: list[tuple[float, complex]]
    status: str = UNDECIDED
    origin: complex = 0j
    limit: complex | None = None
    crossing: tuple[float, complex] | None = None
    residuals: list[float] = field(default_factory=list)
    frozen: bool = False  # the path does not move the couplings

    @property
    def t(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def lam(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])

    @property
    def end(self) -> complex:
        return self.samples[-1][1]


def _tangent(func: SecularFunction, lam: complex, velocity: np.ndarray):
    """dlam/dt at a simple root; None at a (near) crossing."""
    A, dA, dalpha, _ = func.jacobians(lam)
    U, sv, Vh = np.linalg.svd(A)
    w = U[:, -1]
    u = Vh[-1].conj()
    scale = np.linalg.norm(dA, 2) + 1e-300
    den = w.conj() @ dA @ u
    if abs(den) < 1e-12 * scale or (sv.size > 1 and sv[-2] < 1e-10 * sv[0]):
        return None
    num = sum(v * (w.conj() @ D @ u) for v, D in zip(velocity, dalpha))
    return -num / den


def trace_branch(graph: MetricGraph, path: ParameterPath, start, config: ContinuationConfig | None = None
                 ) -> Branch:
    """Follow the root ``start`` (a complex value or RootResult) from t=0 to t=T."""
    config = config or ContinuationConfig()
    lam = complex(getattr(start, "lam", start))
    base = SecularFunction(graph)
    vel = path.velocity
    T = path.T
    mult = int(getattr(start, "multiplicity", 1))
    func = base.with_alpha(path.alpha(0.0))
    lam, ok = newton(func, lam, tol=config.tol, multiplicity=mult)
    branch = Branch([(0.0, lam)], origin=lam, residuals=[func.residual(lam)])
    stops = sorted(t for t in set(config.t_eval) | {T} if 0 < t <= T)
    frozen = not np.any(vel)
    if frozen or (mult > 1 and _persistent(base, path, lam, mult, config.tol)):
        # nothing moves: either the couplings are fixed, or every eigenfunction
        # of this multiple root vanishes at the moving vertices
        branch.frozen = frozen
        for t in stops:
            branch.samples.append((t, lam))
            branch.residuals.append(base.with_alpha(path.alpha(t)).residual(lam))
        return branch
    dt = T / 100
    floor = T * 1e-8
    t = 0.0
    good = 0
    steps = 0
    while stops and steps < config.max_steps:
        steps += 1
        target = stops[0]
        h = min(dt, target - t)
        slope = _tangent(func, lam, vel)
        if slope is None:
            branch.crossing = (t, lam)
            branch.status = UNDECIDED
            return branch
        pred = lam + h * slope
        fnew = base.with_alpha(path.alpha(t + h))
        new, ok = newton(fnew, pred, tol=config.tol, maxiter=12)
        # reject corrector runs that jump far from the prediction (branch switching)
        if ok and abs(new - pred) <= 0.25 * abs(h * slope) + 1e-6 * (1 + abs(lam)):
            t += h
            lam, func = new, fnew
            good += 1
            if abs(t - target) <= 1e-14 * T:
                t = target
                stops.pop(0)
                branch.samples.append((t, lam))
                branch.residuals.append(func.residual(lam))
            elif not config.t_eval:
                branch.samples.append((t, lam))
                branch.residuals.append(func.residual(lam))
            if good >= 3:
                dt = min(2 * dt, T / 10)
                good = 0
        else:
            good = 0
            dt = h / 2
            if dt < floor:
                branch.crossing = (t, lam)
                branch.status = UNDECIDED
                return branch
    return branch


def _persistent(base: SecularFunction, path: ParameterPath, lam: complex, mult: int, tol: float) -> bool:
    """True if ``lam`` stays a zero of multiplicity ``mult`` at several points of the path."""
    r = max(1e3 * tol, 1e-8) * (1 + abs(lam))
    box = Region(lam.real - r, lam.real + r, lam.imag - r, lam.imag + r)
    for frac in (0.37, 1.0):
        f = base.with_alpha(path.alpha(frac * path.T))
        try:
            if winding_number(f, box) != mult:
                return False
        except ContourError:
            return False
    return True


def _dist_to_halfline(z: complex) -> float:
    return abs(z.imag) if z.real >= 0 else abs(z)


def classify_limit(branch: Branch, dirichlet_spectrum, config: ContinuationConfig | None = None) -> str:
    config = config or ContinuationConfig()
    if branch.crossing is not None or branch.frozen or len(branch.samples) < 2:
        branch.status = UNDECIDED
        return UNDECIDED
    lam = branch.lam
    tail = lam[-10:]
    d = np.array([_dist_to_halfline(z) for z in tail])
    if d[-1] > config.div_threshold and np.all(np.diff(d) > 0):
        branch.status = DIVERGENT
        return DIVERGENT
    mus = np.array([complex(getattr(m, "lam", m)) for m in dirichlet_spectrum])
    if mus.size:
        j = int(np.argmin(np.abs(mus - lam[-1])))
        dd = np.abs(tail - mus[j])
        if dd[-1] < config.conv_tol and np.all(np.diff(dd) <= 1e-12 * (1 + abs(mus[j]))):
            branch.status = CONVERGENT
            branch.limit = complex(mus[j])
            return CONVERGENT
    branch.status = UNDECIDED
    return UNDECIDED


def fit_divergence_law(branch: Branch, path: ParameterPath, j: int, ell_g: float):
    """Fit lam ~ -alpha_j^2 / c^2 and the exponential rate of the remainder.

    Returns (c, rate): c from least squares of lam + u alpha_j^2 over the
    samples with Re alpha_j < -5/ell_g, rate as the slope of
    log|lam + alpha_j^2/c0^2| - 2 log|alpha_j| against Re alpha_j, with c0 the
    nearest integer to c.  Remainders at rounding level are left out of the
    rate fit.
    """
    t = branch.t
    lam = branch.lam
    alpha = np.array([path.alpha(s)[j] for s in t])
    keep = alpha.real < -5.0 / ell_g
    if keep.sum() < 3:
        raise AsymptoticRegimeError("asymptotic regime not reached")
    a = alpha[keep]
    z = lam[keep]
    a2 = a**2
    u = -float(np.real(np.vdot(a2, z)) / np.real(np.vdot(a2, a2)))
    if not u > 0:
        raise AsymptoticRegimeError("branch does not follow -alpha^2 / c^2")
    c = 1.0 / math.sqrt(u)
    c0 = max(1, round(c))
    err = np.abs(z + a2 / c0**2)
    ok = err > 1e3 * np.finfo(float).eps * np.abs(z)
    if ok.sum() < 2:
        return c, math.nan
    y = np.log(err[ok]) - 2 * np.log(np.abs(a[ok]))
    rate = float(np.polyfit(a[ok].real, y, 1)[0])
    return c, rate


def count_divergent(graph: MetricGraph, path: ParameterPath, starts, dirichlet_spectrum,
                    config: ContinuationConfig | None = None, workers: int = 1):
    """Trace every start root; return (number of divergent branches, branches).

    Raises InconclusiveError if any branch ends undecided.
    """
    config = config or ContinuationConfig()
    starts = list(starts)
    mult = [getattr(s, "multiplicity", 1) for s in starts]

    def run(s):
        b = trace_branch(graph, path, s, config)
        classify_limit(b, dirichlet_spectrum, config)
        return b

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            branches = list(pool.map(run, starts))
    else:
        branches = [run(s) for s in starts]
    bad = [b for b in branches if b.status == UNDECIDED]
    if bad:
        raise InconclusiveError(
            f"inconclusive at horizon T={path.T}: {len(bad)} undecided branch(es), e.g. ending at {bad[0].end}"
        )
    n = sum(k for k, b in zip(mult, branches) if b.status == DIVERGENT)
    return n, branches
