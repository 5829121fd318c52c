"""Global Dirichlet-to-Neumann matrices and their reduction to the Robin vertices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .graph import DIRICHLET, MetricGraph
from .kernels import SpectralPoint, edge_entries

K_RCOND_MIN = 1e-13


class DirichletSpectrumError(ArithmeticError):
    """The Kirchhoff block is singular: lam lies in the spectrum with Dirichlet conditions on the Robin set."""


@dataclass(frozen=True)
class FullDtn:
    matrix: np.ndarray
    order: tuple[str, ...]
    k: int
    lam: complex


@dataclass(frozen=True)
class ReducedDtn:
    matrix: np.ndarray
    R: np.ndarray
    C: np.ndarray
    K: np.ndarray
    k_rcond: float
    order: tuple[str, ...]
    lam: complex


def dtn_order(graph: MetricGraph) -> list[str]:
    """Robin vertices first (input order), then standard vertices; Dirichlet ones never appear."""
    return list(graph.robin) + list(graph.standard)


def assemble_full_dtn(graph: MetricGraph, lam) -> FullDtn:
    """Sum of edge DtN matrices over all non-Dirichlet vertices.

    Parallel edges and loops are summed like any other edge, so subdivision is
    optional here; a loop at v contributes 2(A + B) to the diagonal entry.
    """
    lam = SpectralPoint(lam).lam
    order = dtn_order(graph)
    index = {v: i for i, v in enumerate(order)}
    n = len(order)
    M = np.zeros((n, n), dtype=complex)
    for p, e in enumerate(graph.edges):
        a, b = edge_entries(lam, e.length, edge=p)
        i = index.get(e.u)
        j = index.get(e.v)
        if i is not None:
            M[i, i] += a
        if j is not None:
            M[j, j] += a
        if i is not None and j is not None:
            M[i, j] += b
            M[j, i] += b
    return FullDtn(M, tuple(order), len(graph.robin), lam)


def reduce_dtn(full: FullDtn) -> ReducedDtn:
    """Schur complement M = R - C^T K^{-1} C onto the Robin block."""
    k = full.k
    if k < 1:
        raise ValueError("reduction needs at least one Robin vertex")
    Mv = full.matrix
    R = Mv[:k, :k]
    C = Mv[k:, :k]
    K = Mv[k:, k:]
    if K.shape[0] == 0:
        return ReducedDtn(R.copy(), R, C, K, 1.0, full.order, full.lam)
    lu, piv = la.lu_factor(K, check_finite=False)
    anorm = np.linalg.norm(K, 1)
    rcond = la.lapack.zgecon(lu, anorm, norm="1")[0] if anorm > 0 else 0.0
    # measure against the whole matrix: a uniformly tiny K is singular too
    rcond *= anorm / max(anorm, np.linalg.norm(Mv, 1))
    if not rcond > K_RCOND_MIN:
        raise DirichletSpectrumError(
            f"lambda near Dirichlet spectrum of the Robin set (rcond={rcond:.3g}) at lambda={full.lam}"
        )
    M = R - C.T @ la.lu_solve((lu, piv), C)
    return ReducedDtn(M, R, C, K, float(rcond), full.order, full.lam)


def reduced_dtn(graph: MetricGraph, lam) -> np.ndarray:
    return reduce_dtn(assemble_full_dtn(graph, lam)).matrix


def degree_matrices(graph: MetricGraph) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal degree matrices of the Robin block and of the standard block."""
    deg = graph.degree
    return (
        np.diag([float(deg[v]) for v in graph.robin]),
        np.diag([float(deg[v]) for v in graph.standard]),
    )


def dtn_eigenvalues(M: np.ndarray) -> np.ndarray:
    return np.linalg.eigvals(M)


def reduced_secular_value(graph: MetricGraph, lam, normalized: bool = False) -> complex:
    """det(M(lam) - diag(alpha)).

    With ``normalized`` the value is divided by prod_i (||M_i||_2 + |alpha_i|)
    over rows i, so it measures cancellation between the DtN matrix and the
    couplings and is 1 at most in modulus.
    """
    M = reduced_dtn(graph, lam)
    al = np.asarray(graph.alpha, dtype=complex)
    A = M - np.diag(al)
    sign, logabs = np.linalg.slogdet(A)
    if not normalized:
        return complex(sign * np.exp(logabs))
    scale = np.linalg.norm(M, axis=1) + np.abs(al)
    if sign == 0:
        return 0j
    return complex(sign * np.exp(logabs - np.sum(np.log(scale))))


def asymptotic_dtn_error(graph: MetricGraph, lam) -> float:
    """|| M(lam) - (+/- i sqrt(lam) D) ||_2 / |sqrt(lam)|, sign from Im sqrt(lam)."""
    k = np.sqrt(complex(lam))
    sgn = 1.0 if k.imag >= 0 else -1.0
    D, _ = degree_matrices(graph)
    M = reduced_dtn(graph, lam)
    return float(np.linalg.norm(M - sgn * 1j * k * D, 2) / abs(k))
