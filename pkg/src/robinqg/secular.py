"""Entire secular determinant of the Robin Laplacian and complex root finding.

Each edge carries a solution ``a C(x; lam) + b S(x; lam)``; every vertex
contributes ``deg v - 1`` continuity rows and one condition row, giving a
square 2m x 2m system whose determinant is entire in ``lam`` and vanishes
exactly on the spectrum.

For large ``Im sqrt(lam)`` the same system is assembled in the bounded basis
``p exp(i k x) + q exp(i k (l - x))`` and the (known, nowhere vanishing)
change-of-basis determinant is removed in log space, so values stay finite
and phases stay those of the entire function.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph import DIRICHLET, ROBIN, MetricGraph, subdivide_special_edges
from .kernels import eval_kernel

log = logging.getLogger(__name__)

EXP_SWITCH = 5.0  # use the exponential basis once Im(sqrt(lam)) * max edge length exceeds this
MIN_PARAM_STEP = 1e-11  # in units of one rectangle side
PHASE_STEP = math.pi / 2
CONTOUR_BUDGET = 200_000
INITIAL_SIDE_SAMPLES = 24
NEWTON_MAXITER = 50
CUT_OFFSETS = (0.0371, -0.0613, 0.1129, -0.1447, 0.1913)


class ContourError(RuntimeError):
    pass


class RootOnContour(ContourError):
    def __init__(self, lam):
        self.lam = lam
        super().__init__(f"root on contour near {lam}")


@dataclass(frozen=True)
class Region:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise ValueError("degenerate region")

    @classmethod
    def coerce(cls, r) -> "Region":
        return r if isinstance(r, Region) else cls(*map(float, r))

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def diameter(self) -> float:
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, z, margin: float = 0.0) -> bool:
        return (self.re_min - margin <= z.real <= self.re_max + margin
                and self.im_min - margin <= z.imag <= self.im_max + margin)

    def expanded(self, d: float) -> "Region":
        return Region(self.re_min - d, self.re_max + d, self.im_min - d, self.im_max + d)

    def split(self, frac: float = 0.5) -> tuple["Region", "Region"]:
        w = self.re_max - self.re_min
        h = self.im_max - self.im_min
        if w >= h:
            x = self.re_min + frac * w
            return (Region(self.re_min, x, self.im_min, self.im_max),
                    Region(x, self.re_max, self.im_min, self.im_max))
        y = self.im_min + frac * h
        return (Region(self.re_min, self.re_max, self.im_min, y),
                Region(self.re_min, self.re_max, y, self.im_max))


@dataclass(frozen=True)
class LogDet:
    log_magnitude: float
    phase: float
    normalized: float = 0.0  # log(|det| / prod of row norms) of the assembled matrix

    @property
    def is_zero(self) -> bool:
        return self.log_magnitude == -math.inf

    @property
    def value(self) -> complex:
        if self.is_zero:
            return 0j
        return complex(math.exp(self.log_magnitude) * np.exp(1j * self.phase))


@dataclass(frozen=True)
class SecularSystem:
    """Secular matrix at one ``lam``.

    ``log_factor`` is added to log det(matrix) to obtain the entire
    determinant; it is zero in the polynomial basis.
    """

    matrix: np.ndarray
    lam: complex
    basis: str
    log_factor: complex = 0j
    row_kinds: tuple[str, ...] = ()


@dataclass(frozen=True)
class RootResult:
    lam: complex
    multiplicity: int = 1
    residual: float = 0.0
    near_dirichlet: bool = False


@dataclass
class _Plan:
    """Row catalog: which basis quantity enters which row."""

    lengths: np.ndarray
    size: int
    trace_terms: list = field(default_factory=list)  # (row, p, end, coef)
    flux_terms: list = field(default_factory=list)  # (row, p, end)
    alpha_terms: list = field(default_factory=list)  # (row, p, end, robin index)
    alpha: np.ndarray = None
    row_kinds: list = field(default_factory=list)


def _build_plan(graph: MetricGraph, robin_as_dirichlet: bool = False) -> _Plan:
    graph.check()
    m = len(graph.edges)
    plan = _Plan(np.array([e.length for e in graph.edges]), 2 * m)
    robin_index = {v: j for j, v in enumerate(graph.robin)}
    plan.alpha = np.array(graph.alpha, dtype=complex)
    row = 0
    for vid, cond in graph.vertices:
        ends = graph.incidence[vid]
        p0, e0 = ends[0]
        for p, e in ends[1:]:
            plan.trace_terms.append((row, p, e, 1.0))
            plan.trace_terms.append((row, p0, e0, -1.0))
            plan.row_kinds.append(f"continuity:{vid}")
            row += 1
        kind = cond.kind
        if robin_as_dirichlet and kind == ROBIN:
            kind = DIRICHLET
        if kind == DIRICHLET:
            plan.trace_terms.append((row, p0, e0, 1.0))
        else:
            for p, e in ends:
                plan.flux_terms.append((row, p, e))
            if kind == ROBIN:
                plan.alpha_terms.append((row, p0, e0, robin_index[vid]))
        plan.row_kinds.append(f"{kind}:{vid}")
        row += 1
    assert row == plan.size, "row count must equal twice the edge count"
    return plan


def _edge_values(lam, lengths, basis):
    """Per-edge basis quantities.

    Returns dict with arrays of shape (N, m) for keys
    ('t', end, col), ('f', end, col) and their lam-derivatives ('dt', ...), ('df', ...).
    """
    N = lam.shape[0]
    m = lengths.shape[0]
    L = lengths[None, :]
    lamc = lam[:, None]
    out = {}
    zeros = np.zeros((N, m), dtype=complex)
    ones = np.ones((N, m), dtype=complex)
    if basis == "entire":
        C = np.empty((N, m), dtype=complex)
        S = np.empty_like(C)
        dC = np.empty_like(C)
        dS = np.empty_like(C)
        for p, ell in enumerate(lengths):
            ker = eval_kernel(lam, float(ell))
            C[:, p], S[:, p], dC[:, p], dS[:, p] = ker.c, ker.s, ker.dc_dlambda, ker.ds_dlambda
        out[("t", 0, 0)], out[("t", 0, 1)] = ones, zeros
        out[("t", 1, 0)], out[("t", 1, 1)] = C, S
        out[("f", 0, 0)], out[("f", 0, 1)] = zeros, -ones
        out[("f", 1, 0)], out[("f", 1, 1)] = -lamc * S, C
        out[("dt", 0, 0)], out[("dt", 0, 1)] = zeros, zeros
        out[("dt", 1, 0)], out[("dt", 1, 1)] = dC, dS
        out[("df", 0, 0)], out[("df", 0, 1)] = zeros, zeros
        out[("df", 1, 0)], out[("df", 1, 1)] = -(S + lamc * dS), dC
        logf = np.zeros(N, dtype=complex)
    else:
        # root with Im k >= 0 so that |E| <= 1; everything below is even in k
        k = _upper_sqrt(lam)[:, None]
        E = np.exp(1j * k * L)
        ik = 1j * k
        out[("t", 0, 0)], out[("t", 0, 1)] = ones, E
        out[("t", 1, 0)], out[("t", 1, 1)] = E, ones
        out[("f", 0, 0)], out[("f", 0, 1)] = -ik * ones, ik * E
        out[("f", 1, 0)], out[("f", 1, 1)] = ik * E, -ik * ones
        dk = 0.5 / k  # dk/dlam
        dE = 1j * L * E * dk
        g = (1j * E - k * L * E) * dk
        out[("dt", 0, 0)], out[("dt", 0, 1)] = zeros, dE
        out[("dt", 1, 0)], out[("dt", 1, 1)] = dE, zeros
        out[("df", 0, 0)], out[("df", 0, 1)] = -1j * dk * ones, g
        out[("df", 1, 0)], out[("df", 1, 1)] = g, -1j * dk * ones
        # det(entire) = det(exp basis) / prod_p(-2 i k E_p)
        logf = -np.sum(np.log(-2j * k) + 1j * k * L, axis=1)
    return out, logf


def _upper_sqrt(lam):
    k = np.sqrt(lam)
    return np.where(k.imag < 0, -k, k)


def _choose_basis(lam, lengths):
    k = np.sqrt(lam)
    return np.abs(k.imag) * lengths.max() > EXP_SWITCH


class SecularFunction:
    """Batched evaluation of the secular determinant for a fixed graph and couplings.

    ``mode`` selects the operator: ``"robin"`` (as given), ``"dirichlet"``
    (Dirichlet conditions on the Robin set), or ``"decoupled"`` (Dirichlet at
    every vertex).
    """

    def __init__(self, graph: MetricGraph, alpha=None, mode: str = "robin"):
        if alpha is not None:
            graph = graph.with_alpha(alpha)
        if mode == "decoupled":
            graph = graph.all_dirichlet()
        elif mode not in ("robin", "dirichlet"):
            raise ValueError(f"unknown mode {mode!r}")
        self.graph = subdivide_special_edges(graph.check())
        self.mode = mode
        self.plan = _build_plan(self.graph, robin_as_dirichlet=(mode == "dirichlet"))
        self.n_evals = 0

    @property
    def alpha(self) -> np.ndarray:
        return self.plan.alpha

    def with_alpha(self, alpha) -> "SecularFunction":
        new = object.__new__(SecularFunction)
        new.graph = self.graph
        new.mode = self.mode
        new.plan = _Plan(self.plan.lengths, self.plan.size, self.plan.trace_terms,
                         self.plan.flux_terms, self.plan.alpha_terms,
                         np.asarray(alpha, dtype=complex).reshape(self.plan.alpha.shape),
                         self.plan.row_kinds)
        new.n_evals = 0
        return new

    # -- assembly ---------------------------------------------------------

    def _assemble(self, lam, basis, deriv=False):
        plan = self.plan
        vals, logf = _edge_values(lam, plan.lengths, basis)
        N = lam.shape[0]
        n = plan.size
        A = np.zeros((N, n, n), dtype=complex)
        dA = np.zeros((N, n, n), dtype=complex) if deriv else None
        for row, p, end, coef in plan.trace_terms:
            A[:, row, 2 * p] += coef * vals[("t", end, 0)][:, p]
            A[:, row, 2 * p + 1] += coef * vals[("t", end, 1)][:, p]
            if deriv:
                dA[:, row, 2 * p] += coef * vals[("dt", end, 0)][:, p]
                dA[:, row, 2 * p + 1] += coef * vals[("dt", end, 1)][:, p]
        for row, p, end in plan.flux_terms:
            A[:, row, 2 * p] += vals[("f", end, 0)][:, p]
            A[:, row, 2 * p + 1] += vals[("f", end, 1)][:, p]
            if deriv:
                dA[:, row, 2 * p] += vals[("df", end, 0)][:, p]
                dA[:, row, 2 * p + 1] += vals[("df", end, 1)][:, p]
        if self.mode == "robin":
            for row, p, end, j in plan.alpha_terms:
                a = plan.alpha[j]
                A[:, row, 2 * p] += a * vals[("t", end, 0)][:, p]
                A[:, row, 2 * p + 1] += a * vals[("t", end, 1)][:, p]
                if deriv:
                    dA[:, row, 2 * p] += a * vals[("dt", end, 0)][:, p]
                    dA[:, row, 2 * p + 1] += a * vals[("dt", end, 1)][:, p]
        return A, dA, logf, vals

    def system(self, lam, basis: str = "auto") -> SecularSystem:
        lam = complex(lam)
        arr = np.array([lam])
        if basis == "auto":
            basis = "exp" if _choose_basis(arr, self.plan.lengths)[0] else "entire"
        A, _, logf, _ = self._assemble(arr, basis)
        return SecularSystem(A[0], lam, basis, complex(logf[0]), tuple(self.plan.row_kinds))

    def jacobians(self, lam):
        """(A, dA/dlam, [dA/dalpha_j]) in the basis chosen for ``lam``.

        The basis change is independent of alpha and nonsingular, so ratios of
        these derivatives at a root equal those of the entire determinant.
        """
        arr = np.array([complex(lam)])
        basis = "exp" if _choose_basis(arr, self.plan.lengths)[0] else "entire"
        A, dA, _, vals = self._assemble(arr, basis, deriv=True)
        n = self.plan.size
        dalpha = [np.zeros((n, n), dtype=complex) for _ in range(len(self.plan.alpha))]
        if self.mode == "robin":
            for row, p, end, j in self.plan.alpha_terms:
                dalpha[j][row, 2 * p] += vals[("t", end, 0)][0, p]
                dalpha[j][row, 2 * p + 1] += vals[("t", end, 1)][0, p]
        return A[0], dA[0], dalpha, basis

    # -- evaluation -------------------------------------------------------

    def logdet(self, lam, with_derivative: bool = False):
        """Vectorized (log|det|, phase, normalized log) of the entire determinant.

        With ``with_derivative`` a fourth array holds d/dlam log det
        (``inf`` where the matrix is singular).
        """
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        self.n_evals += lam.size
        logabs = np.empty(lam.shape, dtype=float)
        phase = np.empty(lam.shape, dtype=float)
        nlog = np.empty(lam.shape, dtype=float)
        dlog = np.empty(lam.shape, dtype=complex)
        use_exp = _choose_basis(lam, self.plan.lengths)
        for basis, mask in (("entire", ~use_exp), ("exp", use_exp)):
            if not np.any(mask):
                continue
            A, dA, logf, _ = self._assemble(lam[mask], basis, deriv=with_derivative)
            sign, la_ = np.linalg.slogdet(A)
            rn = np.linalg.norm(A, axis=2)
            with np.errstate(divide="ignore", invalid="ignore"):
                nl = la_ - np.sum(np.log(rn), axis=1)
            zero = (sign == 0) | np.any(rn == 0, axis=1)
            total = la_ + logf.real
            ph = np.angle(sign) + logf.imag
            total[zero] = -np.inf
            nl[zero] = -np.inf
            logabs[mask] = total
            phase[mask] = np.angle(np.exp(1j * ph))
            nlog[mask] = nl
            if with_derivative:
                dlog[mask] = self._trace_solve(A, dA, zero, lam[mask], basis)
        if with_derivative:
            return logabs, phase, nlog, dlog
        return logabs, phase, nlog

    def _trace_solve(self, A, dA, zero, lam, basis):
        out = np.full(lam.shape, complex(math.inf))
        ok = ~zero
        if np.any(ok):
            try:
                X = np.linalg.solve(A[ok], dA[ok])
                out[ok] = np.trace(X, axis1=1, axis2=2)
            except np.linalg.LinAlgError:
                idx = np.nonzero(ok)[0]
                for i in idx:
                    try:
                        out[i] = np.trace(np.linalg.solve(A[i], dA[i]))
                    except np.linalg.LinAlgError:
                        pass
        if basis == "exp":
            k = _upper_sqrt(lam)
            out = out - np.sum(0.5 / lam[:, None] + 0.5j * self.plan.lengths[None, :] / k[:, None], axis=1)
        return out

    def evaluate(self, lam) -> LogDet:
        la_, ph, nl = self.logdet([lam])
        return LogDet(float(la_[0]), float(ph[0]), float(nl[0]))

    def log_derivative(self, lam) -> complex:
        """d/dlam log det; ``inf`` if the matrix is exactly singular."""
        lam = complex(lam)
        arr = np.array([lam])
        basis = "exp" if _choose_basis(arr, self.plan.lengths)[0] else "entire"
        A, dA, _, _ = self._assemble(arr, basis, deriv=True)
        self.n_evals += 1
        try:
            X = np.linalg.solve(A[0], dA[0])
        except np.linalg.LinAlgError:
            return complex(math.inf)
        val = complex(np.trace(X))
        if basis == "exp":
            k = _upper_sqrt(np.array([lam]))[0]
            val -= complex(np.sum(0.5 / lam + 0.5j * self.plan.lengths / k))
        return val

    def residual(self, lam) -> float:
        return float(math.exp(self.evaluate(lam).normalized))


def assemble_secular(graph: MetricGraph, alpha, lam, basis: str = "auto") -> SecularSystem:
    return SecularFunction(graph, alpha).system(lam, basis)


def secular_logdet(system: SecularSystem) -> LogDet:
    sign, la_ = np.linalg.slogdet(system.matrix)
    if sign == 0:
        return LogDet(-math.inf, 0.0, -math.inf)
    rn = np.linalg.norm(system.matrix, axis=1)
    phase = float(np.angle(sign * np.exp(1j * system.log_factor.imag)))
    return LogDet(float(la_ + system.log_factor.real), phase,
                  float(la_ - np.sum(np.log(rn))))


# -- argument principle ----------------------------------------------------

def _perimeter_point(region: Region, s):
    s = np.asarray(s, dtype=float)
    x0, x1, y0, y1 = region.re_min, region.re_max, region.im_min, region.im_max
    side = np.floor(s).astype(int) % 4
    u = s - np.floor(s)
    re = np.select([side == 0, side == 1, side == 2], [x0 + u * (x1 - x0), x1, x1 - u * (x1 - x0)], x0)
    im = np.select([side == 0, side == 1, side == 2], [y0, y0 + u * (y1 - y0), y1], y1 - u * (y1 - y0))
    return re + 1j * im


def winding_number(func: SecularFunction, region: Region, budget: int = CONTOUR_BUDGET) -> int:
    """Zeros inside ``region`` by the argument principle with adaptive boundary sampling."""
    region = Region.coerce(region)
    n0 = INITIAL_SIDE_SAMPLES
    s = np.concatenate([np.linspace(i, i + 1, n0, endpoint=False) for i in range(4)] + [[4.0]])
    z = _perimeter_point(region, s)
    _, ph, nl, g = func.logdet(z[:-1], with_derivative=True)
    ph = np.append(ph, ph[0])
    nl = np.append(nl, nl[0])
    g = np.append(g, g[0])
    used = s.size
    # segments that already passed the midpoint test
    ver = np.zeros(s.size - 1, dtype=bool)

    def insert(idx, smid, zmid, phm, nlm, gm):
        nonlocal s, z, ph, nl, g, ver
        ver[idx] = False
        s = np.insert(s, idx + 1, smid)
        z = np.insert(z, idx + 1, zmid)
        ph = np.insert(ph, idx + 1, phm)
        nl = np.insert(nl, idx + 1, nlm)
        g = np.insert(g, idx + 1, gm)
        ver = np.insert(ver, idx + 1, False)

    while True:
        if np.isneginf(np.min(nl)):
            raise RootOnContour(complex(z[int(np.argmin(nl))]))
        d = np.angle(np.exp(1j * np.diff(ph)))
        # phase steps must be small, and so must the steps predicted by |dlog det| |dz|,
        # which catches pairs of nearby zeros that a coarse sample would alias away
        gmax = np.maximum(np.abs(g[:-1]), np.abs(g[1:]))
        with np.errstate(invalid="ignore"):
            pred = gmax * np.abs(np.diff(z))
        bad = np.nonzero((np.abs(d) >= PHASE_STEP) | ~(pred < PHASE_STEP))[0]
        check = False
        if bad.size == 0:
            # endpoint data can hide zeros when distant contributions to dlog det cancel;
            # accept a segment only if its two halves tell the same story
            bad = np.nonzero(~ver)[0]
            if bad.size == 0:
                break
            check = True
        # a phase jump that survives refinement down to this width marks a zero on the path
        stuck = bad[s[bad + 1] - s[bad] < MIN_PARAM_STEP]
        if stuck.size and not check:
            raise RootOnContour(complex(z[stuck[0]]))
        if used + bad.size > budget:
            raise ContourError("ill-conditioned contour: refinement budget exceeded")
        smid = 0.5 * (s[bad] + s[bad + 1])
        zmid = _perimeter_point(region, smid)
        _, phm, nlm, gm = func.logdet(zmid, with_derivative=True)
        used += bad.size
        if check:
            d1 = np.angle(np.exp(1j * (phm - ph[bad])))
            d2 = np.angle(np.exp(1j * (ph[bad + 1] - phm)))
            ok = (np.abs(d1) < PHASE_STEP) & (np.abs(d2) < PHASE_STEP) & np.isfinite(nlm)
            ok &= np.abs(d1 + d2 - d[bad]) < 1e-6
            ver[bad[ok]] = True
            keep = ~ok
            bad, smid, zmid, phm, nlm, gm = bad[keep], smid[keep], zmid[keep], phm[keep], nlm[keep], gm[keep]
            if bad.size == 0:
                continue
        insert(bad, smid, zmid, phm, nlm, gm)
    total = float(np.sum(d)) / (2 * math.pi)
    w = round(total)
    if abs(total - w) > 1e-6:
        raise ContourError(f"non-integer winding {total}")
    return int(w)


def _count_with_nudge(func, region, attempts: int = 4):
    region = Region.coerce(region)
    for _ in range(attempts):
        try:
            return winding_number(func, region), region
        except RootOnContour as exc:
            d = 1e-6 * region.diameter
            log.warning("root on contour near %s; expanding region by %.3g", exc.lam, d)
            region = region.expanded(d)
    raise ContourError("could not move contour away from roots")


def count_roots(graph: MetricGraph, alpha, region, mode: str = "robin") -> int:
    func = graph if isinstance(graph, SecularFunction) else SecularFunction(graph, alpha, mode)
    return _count_with_nudge(func, region)[0]


# -- root finding -----------------------------------------------------------

def newton(func: SecularFunction, lam0, tol: float = 1e-12, multiplicity: int = 1,
           maxiter: int = NEWTON_MAXITER):
    """Newton on the entire determinant; returns (lam, converged)."""
    lam = complex(lam0)
    for _ in range(maxiter):
        g = func.log_derivative(lam)
        if not np.isfinite(g):
            return lam, True
        if g == 0:
            return lam, False
        step = multiplicity / g
        lam = lam - step
        if not np.isfinite(lam):
            return lam0, False
        if abs(step) < tol * (1 + abs(lam)):
            return lam, True
    return lam, False


def _split_counted(func, box, count):
    """Split with an off-center cut so that child counts add up."""
    for off in CUT_OFFSETS:
        a, b = box.split(0.5 + off)
        try:
            ca = winding_number(func, a)
            cb = winding_number(func, b)
        except RootOnContour:
            continue
        if ca + cb == count:
            return [(a, ca), (b, cb)]
    raise ContourError(f"could not split box {box} consistently")


def find_roots(graph, alpha=None, region=None, tol: float = 1e-10, mode: str = "robin",
               workers: int = 1) -> list[RootResult]:
    """All zeros in ``region``, refined to ``tol`` relative, sorted by (Re, Im).

    The region is bisected (off-center, alternating with the longer side) until
    each box holds a single zero, which is polished by Newton.  Boxes shrinking
    below ``tol`` with winding > 1 are reported as one root with that
    multiplicity.  Results do not depend on ``workers``.
    """
    func = graph if isinstance(graph, SecularFunction) else SecularFunction(graph, alpha, mode)
    total, region = _count_with_nudge(func, region)
    pending = [(region, total)]
    found: list[RootResult] = []
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while pending:
            mapper = pool.map if pool else map
            results = list(mapper(lambda bc: _process_box(func, bc[0], bc[1], tol), pending))
            pending = []
            for roots, children in results:
                found.extend(roots)
                pending.extend(children)
    finally:
        if pool:
            pool.shutdown()
    found.sort(key=lambda r: (round(r.lam.real, 12), round(r.lam.imag, 12)))
    return found


def _process_box(func, box, count, tol):
    if count == 0:
        return [], []
    size = box.diameter
    c = box.center
    if count == 1:
        lam, ok = newton(func, c, tol=min(tol, 1e-12))
        if ok and box.contains(lam, margin=1e-3 * size):
            return [RootResult(lam, 1, func.residual(lam))], []
    elif size < 1e-3 * (1 + abs(c)):
        lam, ok = newton(func, c, tol=min(tol, 1e-12), multiplicity=count)
        if ok and box.contains(lam):
            r = max(100 * tol * (1 + abs(lam)), 1e-13 * (1 + abs(lam)))
            small = Region(lam.real - r, lam.real + r, lam.imag - r, lam.imag + r)
            try:
                if winding_number(func, small) == count:
                    return [RootResult(lam, count, func.residual(lam))], []
            except ContourError:
                pass
    if size < tol * (1 + abs(c)):
        return [RootResult(c, count, func.residual(c))], []
    return [], _split_counted(func, box, count)


def dirichlet_spectrum(graph: MetricGraph, region, tol: float = 1e-10, full: bool = False,
                       workers: int = 1) -> list[RootResult]:
    """Spectrum with Dirichlet conditions on the Robin set (or at every vertex with ``full``)."""
    mode = "decoupled" if full else "dirichlet"
    return find_roots(graph, None, region, tol=tol, mode=mode, workers=workers)


def flag_near_dirichlet(roots, dirichlet_roots, dist: float = 1e-6) -> list[RootResult]:
    pts = np.array([r.lam for r in dirichlet_roots], dtype=complex)
    out = []
    for r in roots:
        near = bool(pts.size and np.min(np.abs(pts - r.lam)) < dist)
        out.append(RootResult(r.lam, r.multiplicity, r.residual, near))
    return out
