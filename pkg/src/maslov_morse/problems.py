"""Builders of Jacobi data for quadratic control and variational problems.

Conventions: the Hamiltonian is ``H = p.f + l`` (the cost is minimized), the
control Hessian is ``b = R`` and control directions are pulled back to time
zero by the flow of the Hamiltonian with the control frozen at zero, so that
``X_t = Phi_t^{-1} dH/du-field``.  With these choices the oracle form ``F``
equals the second variation of the cost.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .jacobi import JacobiProblem


@dataclass(frozen=True, eq=False)
class CvProblem:
    """Lagrangian ``l(q, v) = 1/2 v.R v + v.C q + 1/2 q.W q`` on ``[0, t1]``."""

    R: np.ndarray
    W: np.ndarray
    t1: float
    C: np.ndarray | None = None

    def __post_init__(self):
        r = np.atleast_2d(np.asarray(self.R, dtype=float))
        w = np.atleast_2d(np.asarray(self.W, dtype=float))
        n = r.shape[0]
        c = np.zeros((n, n)) if self.C is None else np.atleast_2d(np.asarray(self.C, dtype=float))
        if r.shape != (n, n) or w.shape != (n, n) or c.shape != (n, n):
            raise ValueError("R, W and C must be square of the same size")
        if np.abs(r - r.T).max() > 1e-12 or np.abs(w - w.T).max() > 1e-12:
            raise ValueError("R and W must be symmetric")
        if np.linalg.eigvalsh(r).min() <= 0:
            raise ValueError("R must be positive definite (Legendre condition)")
        object.__setattr__(self, "R", r)
        object.__setattr__(self, "W", w)
        object.__setattr__(self, "C", c)


def hamiltonian_matrix(A, W) -> np.ndarray:
    """Linear field of ``p.Ax + 1/2 x.Wx`` on ``(p, x)``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    W = np.atleast_2d(np.asarray(W, dtype=float))
    n = A.shape[0]
    return np.block([[-A.T, -W], [np.zeros((n, n)), A]])


def build_lq(A, B, R, W, t1: float, N_cross=None, subcells: int = 1) -> JacobiProblem:
    """Data for ``x' = Ax + Bu`` with cost ``1/2 ∫ u.Ru + 2 u.N x + x.Wx``.

    The reference flow is ``expm(t H)`` with ``H`` from
    :func:`hamiltonian_matrix`; control directions ``(-N^T, B)`` are pulled
    back through its inverse.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float).reshape(A.shape[0], -1)
    R = np.atleast_2d(np.asarray(R, dtype=float))
    W = np.atleast_2d(np.asarray(W, dtype=float))
    n, k = B.shape
    if A.shape != (n, n) or R.shape != (k, k) or W.shape != (n, n):
        raise ValueError("inconsistent LQ shapes")
    Nc = np.zeros((k, n)) if N_cross is None else np.asarray(N_cross, dtype=float).reshape(k, n)
    hm = hamiltonian_matrix(A, W)
    direction = np.vstack([-Nc.T, B])

    def X(t):
        return expm(-t * hm) @ direction

    Rs = 0.5 * (R + R.T)
    return JacobiProblem(n, k, float(t1), X, lambda t: Rs, subcells=subcells)


def build_cv_jacobi(cv: CvProblem, subcells: int = 1) -> JacobiProblem:
    """Second variation of ``∫ l(q, q') dt`` with fixed endpoints (velocity as control)."""
    n = cv.R.shape[0]
    return build_lq(np.zeros((n, n)), np.eye(n), cv.R, cv.W, cv.t1, N_cross=cv.C, subcells=subcells)


def oscillator(t1: float, omega: float = 1.0, subcells: int = 1) -> JacobiProblem:
    """``l = 1/2 (v^2 - omega^2 q^2)``; conjugate points at multiples of ``pi/omega``."""
    return build_cv_jacobi(CvProblem([[1.0]], [[-omega**2]], t1), subcells=subcells)


def oscillator_extremal_velocity(t: float, omega: float = 1.0, amplitude: float = 1.0) -> np.ndarray:
    """Pulled-back velocity of the extremal ``q = a sin(omega t)`` of :func:`oscillator`.

    Momentum is ``p = -q'`` and the frozen-control flow is a shear
    ``(p, q) -> (p + omega^2 t q, q)``.
    """
    a, w = amplitude, omega
    pdot = a * w * w * np.sin(w * t)
    qdot = a * w * np.cos(w * t)
    return np.array([pdot - w * w * t * qdot, qdot])


def oscillator_control_rate(t: float, omega: float = 1.0, amplitude: float = 1.0) -> np.ndarray:
    return np.array([-amplitude * omega * omega * np.sin(omega * t)])


def free_particle(t1: float, n: int = 1) -> JacobiProblem:
    return build_cv_jacobi(CvProblem(np.eye(n), np.zeros((n, n)), t1))
