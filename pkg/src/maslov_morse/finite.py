"""Finite-dimensional constrained critical points and their Lagrangian linearization.

A problem minimizes ``phi(u)`` subject to ``Phi(u) = q`` with ``u`` in R^m and
``q`` in R^n.  Multipliers are row covectors ``p`` with ``dphi = p DPhi``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._linalg import TOL_EIG, TOL_RANK, inertia, intersect, null_space, orth
from .grassmannian import LagrangianFrame, intersection_dim, vertical
from .symplectic import standard_form

Vec = np.ndarray


class DerivativeMismatch(ValueError):
    pass


def _fd_check(f, df, u, h, tol, label):
    u = np.asarray(u, dtype=float)
    step = h * max(1.0, np.abs(u).max())
    cols = []
    for i in range(u.size):
        e = np.zeros_like(u)
        e[i] = step
        cols.append((np.asarray(f(u + e)) - np.asarray(f(u - e))) / (2 * step))
    fd = np.stack(cols, axis=-1)
    an = np.asarray(df(u), dtype=float)
    if an.shape != fd.shape:
        raise DerivativeMismatch(f"{label}: shape {an.shape}, expected {fd.shape}")
    err = np.abs(an - fd).max(initial=0.0)
    if err > tol * max(1.0, np.abs(fd).max(initial=0.0)):
        raise DerivativeMismatch(f"{label} disagrees with central differences (err {err:.2e})")


@dataclass(frozen=True, eq=False)
class ConstrainedProblem:
    """Cost ``phi: R^m -> R`` and constraint map ``Phi: R^m -> R^n`` with derivatives.

    ``hess_Phi(u)`` returns an ``(n, m, m)`` stack.  When ``check_at`` is given
    the analytic derivatives are compared with central differences there.
    """

    m: int
    n: int
    phi: Callable[[Vec], float]
    grad_phi: Callable[[Vec], Vec]
    hess_phi: Callable[[Vec], np.ndarray]
    Phi: Callable[[Vec], Vec]
    jac_Phi: Callable[[Vec], np.ndarray]
    hess_Phi: Callable[[Vec], np.ndarray]
    check_at: Vec | None = None

    def __post_init__(self):
        if self.check_at is not None:
            self.validate(self.check_at)

    def validate(self, u, h: float = 1e-5, tol: float = 1e-4) -> None:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.m,):
            raise ValueError(f"point must have shape ({self.m},)")
        hp = np.asarray(self.hess_phi(u))
        hq = np.asarray(self.hess_Phi(u))
        if hp.shape != (self.m, self.m) or hq.shape != (self.n, self.m, self.m):
            raise DerivativeMismatch("second-derivative shapes inconsistent with (m, n)")
        if np.abs(hp - hp.T).max(initial=0) > 1e-10 or np.abs(hq - hq.transpose(0, 2, 1)).max(initial=0) > 1e-10:
            raise DerivativeMismatch("second derivatives are not symmetric")
        _fd_check(self.phi, self.grad_phi, u, h, tol, "grad_phi")
        _fd_check(self.grad_phi, self.hess_phi, u, h, tol, "hess_phi")
        _fd_check(self.Phi, self.jac_Phi, u, h, tol, "jac_Phi")
        _fd_check(self.jac_Phi, self.hess_Phi, u, h, tol, "hess_Phi")


@dataclass(frozen=True)
class CriticalPoint:
    u: np.ndarray
    p: np.ndarray
    q: np.ndarray


def lagrange_residual(problem: ConstrainedProblem, u, p) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    p = np.asarray(p, dtype=float)
    return np.asarray(problem.grad_phi(u)) - p @ np.asarray(problem.jac_Phi(u))


def hessian_data(problem: ConstrainedProblem, u, p) -> tuple[np.ndarray, np.ndarray]:
    """Hessian of the Lagrangian ``Q`` and a basis ``K`` of ``ker DPhi``."""
    u = np.asarray(u, dtype=float)
    p = np.asarray(p, dtype=float)
    q = np.asarray(problem.hess_phi(u)) - np.tensordot(p, np.asarray(problem.hess_Phi(u)), axes=1)
    q = 0.5 * (q + q.T)
    return q, null_space(np.asarray(problem.jac_Phi(u)))


def is_morse_pair(problem: ConstrainedProblem, u, p, tol: float = TOL_RANK) -> bool:
    q, _ = hessian_data(problem, u, p)
    stacked = np.vstack([q, np.asarray(problem.jac_Phi(np.asarray(u, dtype=float)))])
    return null_space(stacked, tol).shape[1] == 0


def l_space_from_data(q: np.ndarray, dphi: np.ndarray) -> LagrangianFrame:
    """Frame of ``{(dp, DPhi du) : Q du = DPhi^T dp}`` in ``(p, q)`` order."""
    n, m = dphi.shape
    ker = null_space(np.hstack([q, -dphi.T]))
    du, dp = ker[:m], ker[m:]
    img = np.vstack([dp, dphi @ du])
    return LagrangianFrame(standard_form(n), orth(img))


def l_space(problem: ConstrainedProblem, u, p) -> LagrangianFrame:
    q, _ = hessian_data(problem, u, p)
    return l_space_from_data(q, np.asarray(problem.jac_Phi(np.asarray(u, dtype=float))))


def hessian_index_nullity(problem: ConstrainedProblem, u, p, tol: float = TOL_EIG) -> tuple[int, int]:
    q, k = hessian_data(problem, u, p)
    _, neg, zer = inertia(k.T @ q @ k, tol=tol, scale=max(np.abs(q).max(initial=0.0), 1e-300))
    return neg, zer


def index_additivity_check(q: np.ndarray, v: np.ndarray, tol: float = TOL_EIG) -> int:
    """``ind Q`` minus the four-term splitting along ``V`` and its ``Q``-orthogonal."""
    q = np.asarray(q, dtype=float)
    q = 0.5 * (q + q.T)
    scale = max(np.abs(q).max(initial=0.0), 1e-300)
    v = orth(v)
    w = null_space(v.T @ q, scale=scale) if v.shape[1] else np.eye(q.shape[0])
    lhs = inertia(q, tol, scale)[1]
    on_v = inertia(v.T @ q @ v, tol, scale)[1] if v.shape[1] else 0
    on_w = inertia(w.T @ q @ w, tol, scale)[1] if w.shape[1] else 0
    v_cap_w = intersect(v, w).shape[1]
    ker_q = null_space(q, scale=scale)
    v_cap_ker = intersect(v, ker_q).shape[1]
    return lhs - (on_v + on_w + v_cap_w - v_cap_ker)


def find_critical_point(problem: ConstrainedProblem, u0, p0, q_target, tol: float = 1e-12, max_iter: int = 50) -> CriticalPoint:
    """Newton iteration on ``(grad phi - p DPhi, Phi(u) - q) = 0``."""
    u = np.asarray(u0, dtype=float).copy()
    p = np.asarray(p0, dtype=float).copy()
    qt = np.asarray(q_target, dtype=float)
    m, n = problem.m, problem.n
    for _ in range(max_iter):
        r = np.concatenate([lagrange_residual(problem, u, p), np.asarray(problem.Phi(u)) - qt])
        if np.linalg.norm(r) < tol:
            break
        hq, _ = hessian_data(problem, u, p)
        d = np.asarray(problem.jac_Phi(u))
        jac = np.block([[hq, -d.T], [d, np.zeros((n, n))]])
        step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        u += step[:m]
        p += step[m:]
    else:
        raise RuntimeError("Newton iteration did not converge")
    return CriticalPoint(u, p, np.asarray(problem.Phi(u), dtype=float))


@dataclass(frozen=True)
class Polynomial:
    """Sum of ``coef * prod(u**powers)`` terms in ``m`` variables."""

    coefs: np.ndarray
    powers: np.ndarray

    @classmethod
    def from_terms(cls, m: int, terms) -> "Polynomial":
        coefs = np.array([float(t["coef"]) for t in terms])
        powers = np.array([list(t["powers"]) for t in terms], dtype=int).reshape(len(terms), m)
        if np.any(powers < 0):
            raise ValueError("polynomial powers must be nonnegative")
        return cls(coefs, powers)

    def _eval(self, u, coefs, powers):
        if coefs.size == 0:
            return 0.0
        return float(np.sum(coefs * np.prod(u[None, :] ** powers, axis=1)))

    def __call__(self, u):
        return self._eval(np.asarray(u, dtype=float), self.coefs, self.powers)

    def grad(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.size)
        for i in range(u.size):
            c, pw = self._diff(self.coefs, self.powers, i)
            out[i] = self._eval(u, c, pw)
        return out

    def hess(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros((u.size, u.size))
        for i in range(u.size):
            ci, pi = self._diff(self.coefs, self.powers, i)
            for j in range(u.size):
                c, pw = self._diff(ci, pi, j)
                out[i, j] = self._eval(u, c, pw)
        return out

    @staticmethod
    def _diff(coefs, powers, i):
        c = coefs * powers[:, i] if coefs.size else coefs
        pw = powers.copy()
        pw[:, i] = np.maximum(pw[:, i] - 1, 0)
        return c, pw


def polynomial_problem(m: int, phi_terms, Phi_terms, check_at=None) -> ConstrainedProblem:
    """Problem from coefficient tables; ``Phi_terms`` holds one term list per component."""
    f = Polynomial.from_terms(m, phi_terms)
    comps = [Polynomial.from_terms(m, t) for t in Phi_terms]
    n = len(comps)
    return ConstrainedProblem(
        m=m,
        n=n,
        phi=f,
        grad_phi=f.grad,
        hess_phi=f.hess,
        Phi=lambda u: np.array([c(u) for c in comps]),
        jac_Phi=lambda u: np.array([c.grad(u) for c in comps]).reshape(n, m),
        hess_Phi=lambda u: np.array([c.hess(u) for c in comps]).reshape(n, m, m),
        check_at=check_at,
    )


def quadratic_problem(h: np.ndarray, g: np.ndarray, a: np.ndarray, c: np.ndarray | None = None) -> ConstrainedProblem:
    """``phi = 1/2 u^T H u + g^T u`` and ``Phi_i = a_i^T u + 1/2 u^T C_i u``."""
    h = 0.5 * (np.asarray(h, float) + np.asarray(h, float).T)
    g = np.asarray(g, float)
    a = np.atleast_2d(np.asarray(a, float))
    n, m = a.shape
    c = np.zeros((n, m, m)) if c is None else 0.5 * (np.asarray(c, float) + np.asarray(c, float).transpose(0, 2, 1))
    return ConstrainedProblem(
        m=m,
        n=n,
        phi=lambda u: 0.5 * u @ h @ u + g @ u,
        grad_phi=lambda u: h @ u + g,
        hess_phi=lambda u: h,
        Phi=lambda u: a @ u + 0.5 * np.einsum("kij,i,j->k", c, u, u),
        jac_Phi=lambda u: a + np.einsum("kij,j->ki", c, u),
        hess_Phi=lambda u: c,
    )


def vertical_intersection(frame: LagrangianFrame) -> int:
    return intersection_dim(frame, vertical(frame.space))
