"""Lagrangian frames, Darboux charts and a principal-angle metric."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import TOL_RANK, intersect, orth, rank, subspace_distance
from .symplectic import SymplecticSpace, is_symplectic_map

ISOTROPY_TOL = 1e-8


class NotLagrangianError(ValueError):
    pass


class ChartDomainError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LagrangianFrame:
    """An orthonormal 2n x n basis of a Lagrangian subspace.

    Frames are gauge-dependent, so compare them with
    :func:`grassmannian_distance` rather than by entries.
    """

    space: SymplecticSpace
    basis: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.basis, dtype=float)
        n = self.space.n
        if raw.ndim != 2 or raw.shape[0] != 2 * n:
            raise NotLagrangianError(f"frame must have {2 * n} rows, got shape {raw.shape}")
        q = orth(raw)
        if q.shape[1] != n:
            raise NotLagrangianError(f"frame spans dimension {q.shape[1]}, expected {n}")
        defect = np.abs(q.T @ self.space.omega @ q).max()
        if defect > ISOTROPY_TOL * max(np.abs(self.space.omega).max(), 1.0):
            raise NotLagrangianError(f"isotropy defect {defect:.3e}")
        q.setflags(write=False)
        object.__setattr__(self, "basis", q)

    @property
    def n(self) -> int:
        return self.space.n

    def transform(self, f: np.ndarray) -> "LagrangianFrame":
        """Image under a symplectic map of the same space."""
        return LagrangianFrame(self.space, np.asarray(f) @ self.basis)


@dataclass(frozen=True, eq=False)
class ChartCoordinates:
    """Symmetric matrix ``S`` of the graph ``{(p, S p)}`` in the chart ``(L0, L2)``."""

    S: np.ndarray
    chart: tuple[LagrangianFrame, LagrangianFrame]

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.S, dtype=float))
        if np.abs(s - s.T).max(initial=0.0) > 1e-8 * max(1.0, np.abs(s).max(initial=0.0)):
            raise ValueError("chart matrix is not symmetric")
        s = 0.5 * (s + s.T)
        s.setflags(write=False)
        object.__setattr__(self, "S", s)


def vertical(space: SymplecticSpace) -> LagrangianFrame:
    """The p-block ``{(dp, 0)}``."""
    n = space.n
    return LagrangianFrame(space, np.vstack([np.eye(n), np.zeros((n, n))]))


def horizontal(space: SymplecticSpace) -> LagrangianFrame:
    """The q-block ``{(0, dq)}``."""
    n = space.n
    return LagrangianFrame(space, np.vstack([np.zeros((n, n)), np.eye(n)]))


def _same_space(*frames: LagrangianFrame) -> SymplecticSpace:
    sp = frames[0].space
    for f in frames[1:]:
        if f.space is not sp and not (
            f.space.n == sp.n and np.array_equal(f.space.omega, sp.omega)
        ):
            raise ValueError("frames live in different symplectic spaces")
    return sp


def intersection_dim(l1: LagrangianFrame, l2: LagrangianFrame, tol: float = TOL_RANK) -> int:
    sp = _same_space(l1, l2)
    return 2 * sp.n - rank(np.hstack([l1.basis, l2.basis]), tol)


def intersection_basis(l1: LagrangianFrame, l2: LagrangianFrame, tol: float = TOL_RANK) -> np.ndarray:
    _same_space(l1, l2)
    return intersect(l1.basis, l2.basis, tol)


def darboux_adapted_basis(l2: LagrangianFrame, l0: LagrangianFrame, tol: float = TOL_RANK) -> np.ndarray:
    """Symplectic ``T`` sending ``l0`` to the p-block and ``l2`` to the q-block.

    Columns of ``T^{-1}`` are a basis ``e_i`` of ``l0`` followed by the dual
    basis ``f_j`` of ``l2`` normalized by ``sigma(e_i, f_j) = delta_ij``.
    """
    sp = _same_space(l0, l2)
    if intersection_dim(l0, l2, tol) != 0:
        raise ChartDomainError("chart frames are not transversal")
    e = l0.basis
    pairing = e.T @ sp.omega @ l2.basis
    f = l2.basis @ np.linalg.inv(pairing)
    m = np.hstack([e, f])
    return np.linalg.inv(m)


def to_chart(l1: LagrangianFrame, chart: tuple[LagrangianFrame, LagrangianFrame], tol: float = TOL_RANK) -> ChartCoordinates:
    l0, l2 = chart
    n = _same_space(l1, l0, l2).n
    if intersection_dim(l1, l2, tol) != 0:
        raise ChartDomainError("frame is not in the chart domain (meets the chart's second frame)")
    t = darboux_adapted_basis(l2, l0, tol)
    img = t @ l1.basis
    s = np.linalg.solve(img[:n].T, img[n:].T).T
    defect = np.abs(s - s.T).max()
    if defect > 1e-8 * max(1.0, np.abs(s).max()):
        raise NotLagrangianError(f"chart matrix symmetry defect {defect:.3e}")
    return ChartCoordinates(s, (l0, l2))


def from_chart(coords: ChartCoordinates) -> LagrangianFrame:
    l0, l2 = coords.chart
    n = l0.n
    t = darboux_adapted_basis(l2, l0)
    graph = np.vstack([np.eye(n), coords.S])
    return LagrangianFrame(l0.space, np.linalg.solve(t, graph))


def standard_chart(space: SymplecticSpace) -> tuple[LagrangianFrame, LagrangianFrame]:
    """Chart whose coordinates read ``(p, S p)`` directly."""
    return vertical(space), horizontal(space)


def frame_from_graph(space: SymplecticSpace, s: np.ndarray) -> LagrangianFrame:
    """Frame of ``{(p, S p)}`` in the standard chart."""
    return from_chart(ChartCoordinates(s, standard_chart(space)))


def tangent_form(frame: LagrangianFrame, frame_dot: np.ndarray) -> np.ndarray:
    """Matrix of ``lambda -> sigma(lambda, lambda_dot)`` in the frame's basis."""
    fd = np.asarray(frame_dot, dtype=float)
    if fd.shape != frame.basis.shape:
        raise ValueError(f"derivative must have shape {frame.basis.shape}")
    m = frame.basis.T @ frame.space.omega @ fd
    return 0.5 * (m + m.T)


def grassmannian_distance(l1: LagrangianFrame, l2: LagrangianFrame) -> float:
    _same_space(l1, l2)
    return subspace_distance(l1.basis, l2.basis)


def random_lagrangian(space: SymplecticSpace, rng: np.random.Generator) -> LagrangianFrame:
    """Random Lagrangian: a random symmetric graph pushed through a random rotation."""
    n = space.n
    a = rng.standard_normal((n, n))
    s = a + a.T
    # complex unitary U = A + iB acts as the orthosymplectic map [[A, -B], [B, A]]
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    u, _ = np.linalg.qr(z)
    rot = np.block([[u.real, -u.imag], [u.imag, u.real]])
    basis = rot @ np.vstack([np.eye(n), s])
    if not space.is_standard:
        from .symplectic import darboux_matrix

        basis = darboux_matrix(space) @ basis
    return LagrangianFrame(space, basis)


__all__ = [
    "LagrangianFrame",
    "ChartCoordinates",
    "NotLagrangianError",
    "ChartDomainError",
    "vertical",
    "horizontal",
    "intersection_dim",
    "intersection_basis",
    "darboux_adapted_basis",
    "to_chart",
    "from_chart",
    "standard_chart",
    "frame_from_graph",
    "tangent_form",
    "grassmannian_distance",
    "random_lagrangian",
    "is_symplectic_map",
]
