"""Finite-element discretization of the Robin Laplacian, used as an independent oracle.

Continuous piecewise-linear elements on every edge, vertex couplings added to
the vertex node diagonals, Dirichlet vertices eliminated.  The mass matrix is
a convex blend of the lumped and consistent ones; any blend weight other than
1/2 keeps the scheme second order, and weights near 1/2 shrink the
lam^2 h^2 error constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .graph import DIRICHLET, MetricGraph
from .secular import Region

MAX_DENSE = 3000
MASS_BLEND = 0.45


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class DiscreteOperator:
    stiffness: sp.csr_matrix  # includes the Robin terms; complex symmetric
    mass: sp.csr_matrix  # real symmetric positive definite
    h: tuple[float, ...]  # mesh width per edge
    cells: tuple[int, ...]
    n_vertex_nodes: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.stiffness.shape

    @property
    def h_max(self) -> float:
        return max(self.h)

    @property
    def is_real(self) -> bool:
        return not np.any(self.stiffness.data.imag)


def discretize(graph: MetricGraph, alpha=None, N: float = 64, mass_blend: float = MASS_BLEND,
               cells=None) -> DiscreteOperator:
    """Assemble with ``ceil(N * length)`` cells per edge (or explicit per-edge ``cells``)."""
    if alpha is not None:
        graph = graph.with_alpha(alpha)
    graph.check()
    if cells is None:
        if N * graph.min_length < 8 - 1e-12:
            raise ValueError("need N >= 8 / (shortest edge length)")
        cells = [max(2, math.ceil(N * e.length - 1e-9)) for e in graph.edges]
    cells = [int(c) for c in cells]
    if len(cells) != len(graph.edges) or min(cells) < 2:
        raise ValueError("need at least two cells on every edge")
    free = [v for v, c in graph.vertices if c.kind != DIRICHLET]
    vindex = {v: i for i, v in enumerate(free)}
    n = len(free) + sum(c - 1 for c in cells)
    rows, cols, kv, mv = [], [], [], []
    w = float(mass_blend)
    offset = len(free)
    hs = []
    for p, (e, nc) in enumerate(zip(graph.edges, cells)):
        h = e.length / nc
        hs.append(h)
        # global node ids along the edge; -1 marks an eliminated Dirichlet end
        ids = np.empty(nc + 1, dtype=int)
        ids[0] = vindex.get(e.u, -1)
        ids[-1] = vindex.get(e.v, -1)
        ids[1:-1] = offset + np.arange(nc - 1)
        offset += nc - 1
        a, b = ids[:-1], ids[1:]
        k_loc = np.array([[1, -1], [-1, 1]]) / h
        m_loc = h * ((1 - w) * np.eye(2) / 2 + w * np.array([[2, 1], [1, 2]]) / 6)
        for i, ii in enumerate((a, b)):
            for j, jj in enumerate((a, b)):
                keep = (ii >= 0) & (jj >= 0)
                rows.append(ii[keep])
                cols.append(jj[keep])
                kv.append(np.full(keep.sum(), k_loc[i, j]))
                mv.append(np.full(keep.sum(), m_loc[i, j]))
    for v, a in zip(graph.robin, graph.alpha):
        rows.append(np.array([vindex[v]]))
        cols.append(np.array([vindex[v]]))
        kv.append(np.array([a]))
        mv.append(np.array([0.0]))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    K = sp.csr_matrix((np.concatenate(kv).astype(complex), (rows, cols)), shape=(n, n))
    M = sp.csr_matrix((np.concatenate(mv), (rows, cols)), shape=(n, n))
    return DiscreteOperator(K, M, tuple(hs), tuple(cells), len(free))


def eigenvalues(op: DiscreteOperator) -> np.ndarray:
    n = op.shape[0]
    if n > MAX_DENSE:
        raise DimensionError(f"matrix dimension {n} exceeds dense cap {MAX_DENSE}")
    K = op.stiffness.toarray()
    M = op.mass.toarray()
    if op.is_real:
        return la.eigh(K.real, M, eigvals_only=True).astype(complex)
    L = la.cholesky(M, lower=True)
    X = la.solve_triangular(L, K, lower=True)
    S = la.solve_triangular(L, X.T, lower=True).T
    return la.eigvals(S)


def eigs_window(op: DiscreteOperator, window) -> list[complex]:
    """Eigenvalues inside the rectangle (re_min, re_max, im_min, im_max), sorted by (Re, Im)."""
    w = Region.coerce(window)
    ev = eigenvalues(op)
    sel = ev[(ev.real >= w.re_min) & (ev.real <= w.re_max) & (ev.imag >= w.im_min) & (ev.imag <= w.im_max)]
    return sorted((complex(z) for z in sel), key=lambda z: (z.real, z.imag))


def match_spectra(exact, approx, tol_fn):
    """Greedy nearest matching; returns (pairs, unmatched exact, unmatched approx).

    ``tol_fn(lam)`` gives the admissible distance for an exact value ``lam``.
    """
    exact = list(exact)
    approx = list(approx)
    used = set()
    pairs = []
    cand = sorted(
        ((abs(a - e), i, j) for i, e in enumerate(exact) for j, a in enumerate(approx)),
        key=lambda x: x[0],
    )
    done = set()
    for dist, i, j in cand:
        if i in done or j in used:
            continue
        if dist <= tol_fn(exact[i]):
            pairs.append((exact[i], approx[j]))
            done.add(i)
            used.add(j)
    miss = [e for i, e in enumerate(exact) if i not in done]
    extra = [a for j, a in enumerate(approx) if j not in used]
    pairs.sort(key=lambda p: (p[0].real, p[0].imag))
    return pairs, miss, extra
