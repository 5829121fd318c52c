"""Enclosures for the spectrum and numerical range of the Robin Laplacian.

All integrals over piecewise-linear test functions are exact, including over
partial cells cut by scaled stars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect, minimize

from .graph import MetricGraph, graph_metrics
from .secular import Region, count_roots, find_roots

REL_TOL = 1e-12


@dataclass(frozen=True)
class TestFunction:
    """Piecewise-linear function: ``values[p]`` holds the nodes of edge p from its tail to its head."""

    __test__ = False  # not a pytest class

    graph: MetricGraph
    values: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.values) != len(self.graph.edges):
            raise ValueError("one node array per edge required")
        vals = tuple(np.asarray(v, dtype=complex) for v in self.values)
        if any(v.ndim != 1 or v.size < 2 for v in vals):
            raise ValueError("each edge needs at least two nodes")
        object.__setattr__(self, "values", vals)
        for vid, ends in self.graph.incidence.items():
            tr = [vals[p][0] if e == 0 else vals[p][-1] for p, e in ends]
            if tr and not np.allclose(tr, tr[0], rtol=0, atol=1e-14):
                raise ValueError(f"test function discontinuous at vertex {vid!r}")

    def vertex_value(self, vid: str) -> complex:
        p, e = self.graph.incidence[vid][0]
        v = self.values[p]
        return complex(v[0] if e == 0 else v[-1])

    @classmethod
    def from_callable(cls, graph: MetricGraph, fn, nodes: int = 16) -> "TestFunction":
        """Nodes from ``fn(edge_index, x)`` on a uniform grid; vertex traces are averaged."""
        vals = [np.array([fn(p, x) for x in np.linspace(0, e.length, nodes)], dtype=complex)
                for p, e in enumerate(graph.edges)]
        return cls(graph, tuple(_enforce_continuity(graph, vals)))

    @classmethod
    def constant(cls, graph: MetricGraph, c: complex = 1.0, nodes: int = 2) -> "TestFunction":
        return cls(graph, tuple(np.full(nodes, c, dtype=complex) for _ in graph.edges))

    @classmethod
    def cutoff(cls, graph: MetricGraph, vid: str, xi=1.0, nodes: int = 16) -> "TestFunction":
        """Cut-off equal to 1 at ``vid``, decaying linearly to 0 over the fraction ``xi`` of each incident edge."""

        def fn(p, x):
            e = graph.edges[p]
            ell = e.length
            vals = []
            if e.u == vid:
                vals.append(max(0.0, 1 - x / (xi * ell)))
            if e.v == vid:
                vals.append(max(0.0, 1 - (ell - x) / (xi * ell)))
            return max(vals, default=0.0)

        n = nodes
        if xi < 1:
            q = round(1 / xi)
            if abs(q * xi - 1) > 1e-12:
                raise ValueError("xi must be 1/q for an integer q to place a node at the cut")
            n = max((nodes - 1) // q, 1) * q + 1
        vals = [np.array([fn(p, x) for x in np.linspace(0, e.length, n)], dtype=complex)
                for p, e in enumerate(graph.edges)]
        return cls(graph, tuple(vals))


def _enforce_continuity(graph: MetricGraph, vals):
    vals = [np.array(v, dtype=complex) for v in vals]
    for vid, ends in graph.incidence.items():
        if not ends:
            continue
        mean = np.mean([vals[p][0] if e == 0 else vals[p][-1] for p, e in ends])
        for p, e in ends:
            vals[p][0 if e == 0 else -1] = mean
    return vals


def random_test_function(graph: MetricGraph, rng: np.random.Generator, nodes: int = 16,
                         complex_valued: bool = False) -> TestFunction:
    """Node values i.i.d. uniform on [-1, 1] (real and imaginary parts), vertices averaged."""
    vals = []
    for _ in graph.edges:
        v = rng.uniform(-1, 1, nodes).astype(complex)
        if complex_valued:
            v += 1j * rng.uniform(-1, 1, nodes)
        vals.append(v)
    return TestFunction(graph, tuple(_enforce_continuity(graph, vals)))


def _piece_integrals(fa, fb, L):
    """Exact (int |f|^2, int |f'|^2) for a linear piece of length L."""
    l2 = L / 3 * (np.abs(fa) ** 2 + np.real(fa * np.conj(fb)) + np.abs(fb) ** 2)
    h1 = np.abs(fb - fa) ** 2 / L
    return float(np.sum(l2)), float(np.sum(h1))


def segment_norms(values: np.ndarray, ell: float, a: float = 0.0, b: float | None = None):
    """(||f||^2, ||f'||^2) of the piecewise-linear nodes ``values`` restricted to [a, b] within [0, ell]."""
    b = ell if b is None else b
    n = values.size
    x = np.linspace(0, ell, n)
    if a <= 0 and b >= ell:
        return _piece_integrals(values[:-1], values[1:], ell / (n - 1))
    inner = x[(x > a) & (x < b)]
    pts = np.concatenate([[a], inner, [b]])
    f = np.interp(pts, x, values.real) + 1j * np.interp(pts, x, values.imag)
    L = np.diff(pts)
    keep = L > 0
    return _piece_integrals(f[:-1][keep], f[1:][keep], L[keep])


def rayleigh_quotient(graph: MetricGraph, alpha, f: TestFunction) -> complex:
    """(||f'||^2 + sum_j alpha_j |f(v_j)|^2) / ||f||^2."""
    if alpha is not None:
        graph = graph.with_alpha(alpha)
    l2 = h1 = 0.0
    for p, e in enumerate(graph.edges):
        a, b = segment_norms(f.values[p], e.length)
        l2 += a
        h1 += b
    if not l2 > 0:
        raise ValueError("test function has zero norm")
    boundary = sum(a * abs(f.vertex_value(v)) ** 2 for v, a in zip(graph.robin, graph.alpha))
    return complex((h1 + boundary) / l2)


# -- numerical range enclosure ---------------------------------------------

@dataclass(frozen=True)
class RangeRegion:
    """Enclosure of the numerical range.

    ``alpha`` is a scalar for the constant-coupling variant, or a vector in
    Robin order for the per-vertex variant.  ``D`` is the smallest Robin
    degree and ``ell`` the shortest edge length.
    """

    alpha: complex | tuple[complex, ...]
    D: float
    ell: float

    @property
    def constant(self) -> bool:
        return not isinstance(self.alpha, tuple)

    @classmethod
    def for_graph(cls, graph: MetricGraph, alpha=None, constant: bool | None = None) -> "RangeRegion":
        if alpha is not None:
            graph = graph.with_alpha(alpha)
        if not graph.robin:
            raise ValueError("empty Robin set")
        met = graph_metrics(graph)
        al = tuple(graph.alpha)
        if constant is None:
            constant = len(set(al)) == 1
        if constant:
            if len(set(al)) != 1:
                raise ValueError("couplings differ; use the per-vertex region")
            return cls(al[0], float(met.min_robin_degree), met.min_length)
        return cls(al, float(met.min_robin_degree), met.min_length)


@dataclass(frozen=True)
class Membership:
    member: bool
    t: float
    s: tuple[float, ...]
    margin: float  # >= 0 for members; how far the best witness is from feasibility otherwise

    def __bool__(self):
        return self.member


def region_membership(z: complex, region: RangeRegion) -> Membership:
    z = complex(z)
    tol = REL_TOL * (1 + abs(z))
    if region.constant:
        return _member_constant(z, complex(region.alpha), region.D, region.ell, tol)
    return _member_variable(z, np.array(region.alpha, dtype=complex), region.D, region.ell, tol)


def _member_constant(z, alpha, D, ell, tol):
    b = 1.0 / (D * ell)
    if alpha.imag != 0:
        s = z.imag / alpha.imag
        t = z.real - s * alpha.real
        smax = 2 * math.sqrt(max(t, 0.0)) / D + b
        margin = min(t, s, smax - s)
        return Membership(margin >= -tol, t, (s,), margin)
    if abs(z.imag) > tol:
        return Membership(False, z.real, (0.0,), -abs(z.imag))
    x = z.real
    a = alpha.real
    if a >= 0:
        return Membership(x >= -tol, max(x, 0.0), (0.0,), x)
    # union over t >= 0 of [t + a(2 sqrt(t)/D + b), t] is [-a^2/D^2 + a b, inf)
    hmin = -(a * a) / (D * D) + a * b
    if x >= 0:
        return Membership(True, x, (0.0,), x)
    t = (a / D) ** 2
    smax = 2 * math.sqrt(t) / D + b
    s = min(smax, (x - t) / a) if x < t else 0.0
    return Membership(x >= hmin - tol, t, (s,), x - hmin)


def _member_variable(z, alpha, D, ell, tol):
    """Exact convex reformulation.

    With tau_j at its smallest admissible value, z is a member iff some s >= 0
    satisfies sum Im(alpha_j) s_j = Im z and
    Re z - sum Re(alpha_j) s_j >= sum ((D/2)(s_j - 2/(D ell))_+)^2.
    """
    k = alpha.size
    c = 2.0 / (D * ell)
    ar, ai = alpha.real, alpha.imag

    def slack(s):
        need = np.sum((0.5 * D * np.maximum(s - c, 0.0)) ** 2)
        return z.real - ar @ s - need

    cons = [{"type": "ineq", "fun": slack}]
    if np.any(ai != 0):
        cons.append({"type": "eq", "fun": lambda s: ai @ s - z.imag})
    elif abs(z.imag) > tol:
        return Membership(False, z.real, tuple([0.0] * k), -abs(z.imag))
    best = None
    starts = [np.zeros(k)]
    if np.any(ai != 0):
        j = int(np.argmax(np.abs(ai)))
        s0 = np.zeros(k)
        s0[j] = max(z.imag / ai[j], 0.0)
        starts.append(s0)
        starts.append(np.full(k, max(z.imag / ai.sum(), 0.0) if ai.sum() != 0 else 0.0))
    for s0 in starts:
        res = minimize(lambda s: -slack(s), s0, method="SLSQP", bounds=[(0, None)] * k,
                       constraints=cons, options={"ftol": 1e-14, "maxiter": 500})
        s = np.maximum(res.x, 0.0)
        eq = abs(ai @ s - z.imag)
        m = slack(s) if eq <= 1e-9 * (1 + abs(z)) else -eq
        if best is None or m > best[0]:
            best = (m, s)
    m, s = best
    t = float(z.real - ar @ s)
    return Membership(bool(m >= -1e-9 * (1 + abs(z))), t, tuple(map(float, s)), float(m))


# -- scalar bounds -----------------------------------------------------------

def real_part_lower_bound(alpha: complex, D: float, ell: float) -> float:
    a = complex(alpha).real
    if a >= 0:
        return 0.0
    return -(a * a) / (D * D) + a / (D * ell)


def first_eigenvalue_upper_bound(alpha: float, graph: MetricGraph) -> float:
    """min{-(alpha/D + 1/ell)^2 (only if alpha < -D/ell), k alpha / |G|} for equal real alpha < 0."""
    if isinstance(alpha, complex):
        if alpha.imag != 0:
            raise ValueError("upper bound needs real alpha")
        alpha = alpha.real
    if not alpha < 0:
        raise ValueError("upper bound needs alpha < 0")
    met = graph_metrics(graph)
    D, ell = met.min_robin_degree, met.min_length
    k = len(graph.robin)
    test = k * alpha / met.total_length
    if alpha < -D / ell:
        return min(-((alpha / D + 1 / ell) ** 2), test)
    return test


def first_eigenvalue_bounds(alpha: float, graph: MetricGraph) -> tuple[float, float]:
    met = graph_metrics(graph)
    return (real_part_lower_bound(alpha, met.min_robin_degree, met.min_length),
            first_eigenvalue_upper_bound(alpha, graph))


def imag_part_limit(lam: complex, graph: MetricGraph, alpha=None) -> float:
    """max_j |Im alpha_j| / deg v_j * (2 sqrt(Re lam) + 1/(D ell))."""
    if alpha is not None:
        graph = graph.with_alpha(alpha)
    al = graph.alpha
    if any(a.real < 0 for a in al):
        raise ValueError("inapplicable: some Re alpha_j < 0")
    lam = complex(lam)
    if lam.real < -REL_TOL * (1 + abs(lam)):
        raise ValueError("inapplicable: Re lambda < 0")
    met = graph_metrics(graph)
    deg = graph.degree
    w = max(abs(a.imag) / deg[v] for v, a in zip(graph.robin, al))
    return w * (2 * math.sqrt(max(lam.real, 0.0)) + 1 / (met.min_robin_degree * met.min_length))


def imag_part_bound(lam: complex, graph: MetricGraph, alpha=None) -> bool:
    lam = complex(lam)
    return abs(lam.imag) <= imag_part_limit(lam, graph, alpha) + REL_TOL * (1 + abs(lam))


# -- trace inequality ----------------------------------------------------------

def trace_inequality_check(graph: MetricGraph, f: TestFunction, vertex: str | None = None, xi=1.0,
                           vertex_set=None) -> float:
    """RHS - LHS of the vertex trace inequality.

    Local mode (``vertex`` given): the scaled star keeps the fraction ``xi``
    (scalar or per-edge mapping) of each incident edge next to ``vertex``.
    Global mode (``vertex_set`` given): the union of the full spanning stars.
    """
    deg = graph.degree
    if vertex is not None:
        ends = graph.incidence[vertex]
        l2 = h1 = 0.0
        lens = []
        for p, e in ends:
            x = xi[p] if isinstance(xi, dict) else xi
            if not 0 < x <= 1:
                raise ValueError("scaling factors must lie in (0, 1]")
            ell = graph.edges[p].length
            L = x * ell
            a, b = (0.0, L) if e == 0 else (ell - L, ell)
            n2, d2 = segment_norms(f.values[p], ell, a, b)
            l2 += n2
            h1 += d2
            lens.append(L)
        lhs = deg[vertex] * abs(f.vertex_value(vertex)) ** 2
        rhs = 2 * math.sqrt(l2 * h1) + l2 / min(lens)
        return rhs - lhs
    if vertex_set is None:
        raise ValueError("give a vertex (local mode) or a vertex set (global mode)")
    vset = set(vertex_set)
    edges = sorted({p for v in vset for p, _ in graph.incidence[v]})
    l2 = h1 = 0.0
    for p in edges:
        n2, d2 = segment_norms(f.values[p], graph.edges[p].length)
        l2 += n2
        h1 += d2
    lhs = sum(deg[v] * abs(f.vertex_value(v)) ** 2 for v in vset)
    ell0 = min(graph.edges[p].length for p in edges)
    rhs = 2 * math.sqrt(l2 * h1) + l2 / ell0
    return rhs - lhs


# -- star model and negative spectrum -------------------------------------------

def star_secular_solve(alpha: float, ell: float, D: int) -> float | None:
    """Lowest eigenvalue of the equilateral D-star with Robin center and Dirichlet leaves.

    Solves sqrt(mu) coth(sqrt(mu) ell) = -alpha/D by bisection; ``None`` when
    alpha >= -D/ell.
    """
    alpha = float(alpha)
    if not alpha < -D / ell:
        return None
    g = lambda mu: math.sqrt(mu) / math.tanh(math.sqrt(mu) * ell) + alpha / D
    hi = (alpha / D) ** 2
    lo = hi * 1e-300 if g(hi * 1e-12) > 0 else hi * 1e-12
    mu = bisect(g, lo, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps, maxiter=400)
    lam = -mu
    assert lam <= -((alpha / D + 1 / ell) ** 2) * (1 - 1e-12)
    return lam


@dataclass(frozen=True)
class NegativeCount:
    count: int
    k: int
    window: Region
    asserted: bool  # coupling beyond the threshold where the count must equal k

    @property
    def ok(self) -> bool:
        return (not self.asserted) or self.count == self.k


def negative_window(graph: MetricGraph, alpha: float, delta: float = 1e-6) -> Region:
    met = graph_metrics(graph)
    a = float(np.real(alpha))
    D, ell = met.min_robin_degree, met.min_length
    R = a * a / (D * D) - a / (D * ell) + 1
    return Region(-R, -1e-9, -delta, delta)


def count_negative_eigenvalues(graph: MetricGraph, alpha: float) -> NegativeCount:
    g = graph.with_alpha(alpha)
    win = negative_window(g, alpha)
    n = count_roots(g, None, win)
    deg = g.degree
    thr = -2 * max(deg[v] / min(g.edges[p].length for p, _ in g.incidence[v]) for v in g.robin)
    return NegativeCount(n, len(g.robin), win, float(alpha) < thr)


def negative_eigenvalues(graph: MetricGraph, alpha: float, tol: float = 1e-12):
    g = graph.with_alpha(alpha)
    return find_roots(g, None, negative_window(g, alpha), tol=tol)
