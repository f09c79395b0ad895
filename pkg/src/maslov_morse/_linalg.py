"""Shared rank, null-space and subspace helpers.

Every rank decision in the package goes through :func:`numerical_rank` so a
single relative tolerance governs degeneracy.
"""
from __future__ import annotations

import numpy as np

TOL_RANK = 1e-9
TOL_EIG = 1e-8


def numerical_rank(s: np.ndarray, tol: float = TOL_RANK, scale: float | None = None) -> int:
    """Count singular values above ``tol`` times the largest (or ``scale``)."""
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        return 0
    ref = s.max() if scale is None else scale
    if ref <= 0.0:
        return 0
    return int(np.count_nonzero(s > tol * ref))


def orth(a: np.ndarray, tol: float = TOL_RANK, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis of the column span of ``a``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    r = numerical_rank(s, tol, scale)
    return u[:, :r]


def null_space(a: np.ndarray, tol: float = TOL_RANK, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis of ``ker a`` (columns)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    m, n = a.shape
    if n == 0:
        return np.zeros((0, 0))
    if m == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    r = numerical_rank(s, tol, scale)
    return vt[r:].T.copy()


def rank(a: np.ndarray, tol: float = TOL_RANK, scale: float | None = None) -> int:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if 0 in a.shape:
        return 0
    return numerical_rank(np.linalg.svd(a, compute_uv=False), tol, scale)


def orth_complement(basis: np.ndarray, dim: int, tol: float = TOL_RANK) -> np.ndarray:
    """Euclidean orthogonal complement of span(basis) in R^dim."""
    basis = np.asarray(basis, dtype=float).reshape(dim, -1)
    if basis.shape[1] == 0:
        return np.eye(dim)
    return null_space(basis.T, tol)


def intersect(a: np.ndarray, b: np.ndarray, tol: float = TOL_RANK) -> np.ndarray:
    """Orthonormal basis of span(a) ∩ span(b).

    Uses the null space of ``[A | -B]`` on orthonormalized inputs.
    """
    qa, qb = orth(a, tol), orth(b, tol)
    if qa.shape[1] == 0 or qb.shape[1] == 0:
        return np.zeros((qa.shape[0], 0))
    ker = null_space(np.hstack([qa, -qb]), tol, scale=1.0)
    if ker.shape[1] == 0:
        return np.zeros((qa.shape[0], 0))
    return orth(qa @ ker[: qa.shape[1]], tol, scale=1.0)


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Principal angles (ascending) between column spans, Björck–Golub style."""
    qa, qb = orth(a), orth(b)
    if qa.shape[1] == 0 or qb.shape[1] == 0:
        return np.zeros(0)
    if qa.shape[1] < qb.shape[1]:
        qa, qb = qb, qa
    # sine-based formula keeps small angles accurate
    m = qb - qa @ (qa.T @ qb)
    sines = np.linalg.svd(m, compute_uv=False)
    return np.sort(np.arcsin(np.clip(sines, 0.0, 1.0)))


def subspace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Largest principal angle; pi/2 when dimensions differ."""
    qa, qb = orth(a), orth(b)
    if qa.shape[1] != qb.shape[1]:
        return float(np.pi / 2)
    ang = principal_angles(qa, qb)
    return float(ang.max()) if ang.size else 0.0


def inertia(m: np.ndarray, tol: float = TOL_EIG, scale: float | None = None) -> tuple[int, int, int]:
    """(positives, negatives, zeros) of a symmetric matrix.

    Eigenvalues within ``tol * scale`` of zero count as zeros; ``scale``
    defaults to the largest eigenvalue modulus.
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        return 0, 0, 0
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    ref = np.abs(w).max() if scale is None else scale
    cut = tol * ref if ref > 0 else 0.0
    pos = int(np.count_nonzero(w > cut))
    neg = int(np.count_nonzero(w < -cut))
    return pos, neg, w.size - pos - neg
