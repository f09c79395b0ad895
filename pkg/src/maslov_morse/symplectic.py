"""Linear symplectic algebra on R^{2n}.

Vectors are written in Darboux order ``(p, q)`` so the standard form is
``sigma(a, b) = a.T @ J @ b`` with ``J = [[0, I], [-I, 0]]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._linalg import TOL_RANK, null_space, orth, principal_angles, rank


def _j(n: int) -> np.ndarray:
    z = np.zeros((n, n))
    i = np.eye(n)
    return np.block([[z, i], [-i, z]])


@dataclass(frozen=True, eq=False)
class SymplecticSpace:
    """R^{2n} with a skew-symmetric nondegenerate form ``omega``."""

    n: int
    omega: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValueError(f"half-dimension must be >= 1, got {self.n}")
        omega = _j(self.n) if self.omega is None else np.array(self.omega, dtype=float)
        if omega.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"omega must be {2 * self.n}x{2 * self.n}, got {omega.shape}")
        scale = np.abs(omega).max()
        if np.abs(omega + omega.T).max() > 1e-12 * max(scale, 1.0):
            raise ValueError("omega is not skew-symmetric")
        if rank(omega) < 2 * self.n:
            raise ValueError("omega is degenerate")
        omega.setflags(write=False)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "omega", omega)

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def is_standard(self) -> bool:
        return bool(np.array_equal(self.omega, _j(self.n)))


def standard_form(n: int) -> SymplecticSpace:
    """The Darboux space of half-dimension ``n``."""
    return SymplecticSpace(n)


def symplectic_product(space: SymplecticSpace, a, b):
    """``a.T @ omega @ b``; works column-wise on matrices as well."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[0] != space.dim or b.shape[0] != space.dim:
        raise ValueError(f"vectors must have length {space.dim}")
    out = a.T @ space.omega @ b
    return float(out) if np.ndim(out) == 0 else out


def is_symplectic_map(space: SymplecticSpace, f, tol: float = 1e-10) -> bool:
    f = np.asarray(f, dtype=float)
    if f.shape != (space.dim, space.dim):
        raise ValueError(f"map must be {space.dim}x{space.dim}")
    om = space.omega
    return bool(np.linalg.norm(f.T @ om @ f - om, 2) <= tol * np.linalg.norm(om, 2))


def darboux_matrix(space: SymplecticSpace) -> np.ndarray:
    """Matrix ``M`` with ``M.T @ omega @ M = J`` (symplectic Gram-Schmidt)."""
    n, om = space.n, space.omega
    if space.is_standard:
        return np.eye(2 * n)
    pool = list(np.eye(2 * n).T)
    es, fs = [], []
    for _ in range(n):
        # pick the pair with the largest pairing to stay well conditioned
        best = None
        for i in range(len(pool)):
            for j in range(len(pool)):
                if i != j:
                    val = pool[i] @ om @ pool[j]
                    if best is None or abs(val) > abs(best[2]):
                        best = (i, j, val)
        i, j, val = best
        e, f = pool[i], pool[j] / val
        es.append(e)
        fs.append(f)
        rest = [v for idx, v in enumerate(pool) if idx not in (i, j)]
        # project out the new hyperbolic plane: v -> v - s(v,f) e + s(v,e) f
        pool = [v - (v @ om @ f) * e + (v @ om @ e) * f for v in rest]
    return np.column_stack(es + fs)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of R^{2n}, stored with an orthonormal basis."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim == 1:
            b = b[:, None]
        q = orth(b)
        if q.shape[1] != b.shape[1]:
            raise ValueError("basis columns are linearly dependent")
        q.setflags(write=False)
        object.__setattr__(self, "basis", q)

    @classmethod
    def from_span(cls, vectors) -> "Subspace":
        """Subspace spanned by (possibly dependent) columns."""
        return cls(orth(np.atleast_2d(np.asarray(vectors, dtype=float))))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def skew_orthogonal_complement(space: SymplecticSpace, gamma: Subspace) -> Subspace:
    if gamma.ambient_dim != space.dim:
        raise ValueError("subspace lives in a different ambient space")
    if gamma.dim == 0:
        return Subspace(np.eye(space.dim))
    ker = null_space((space.omega @ gamma.basis).T)
    return Subspace(ker if ker.size else np.zeros((space.dim, 0)))


class SubspaceKind(str, Enum):
    ISOTROPIC = "isotropic"
    COISOTROPIC = "coisotropic"
    LAGRANGIAN = "lagrangian"
    GENERIC = "symplectic-generic"


def _contained(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    """span(a) ⊆ span(b) via principal angles."""
    if a.shape[1] == 0:
        return True
    if b.shape[1] < a.shape[1]:
        return False
    resid = a - b @ (b.T @ a)
    return bool(np.linalg.norm(resid, 2) <= tol)


def classify_subspace(space: SymplecticSpace, gamma: Subspace, tol: float = 1e-8) -> SubspaceKind:
    comp = skew_orthogonal_complement(space, gamma).basis
    iso = _contained(gamma.basis, comp, tol)
    coiso = _contained(comp, gamma.basis, tol)
    if iso and coiso:
        return SubspaceKind.LAGRANGIAN
    if iso:
        return SubspaceKind.ISOTROPIC
    if coiso:
        return SubspaceKind.COISOTROPIC
    return SubspaceKind.GENERIC


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """Random element of Sp(2n): product of a shear, its transpose and a block map."""
    a = rng.standard_normal((n, n)) * scale
    s1 = (a + a.T) / 2
    b = rng.standard_normal((n, n)) * scale
    s2 = (b + b.T) / 2
    g = np.eye(n) + rng.standard_normal((n, n)) * scale * 0.5
    while abs(np.linalg.det(g)) < 0.1:
        g = np.eye(n) + rng.standard_normal((n, n)) * scale * 0.5
    z, i = np.zeros((n, n)), np.eye(n)
    up = np.block([[i, s1], [z, i]])
    low = np.block([[i, z], [s2, i]])
    blk = np.block([[g, z], [z, np.linalg.inv(g).T]])
    return up @ low @ blk


__all__ = [
    "SymplecticSpace",
    "Subspace",
    "SubspaceKind",
    "standard_form",
    "symplectic_product",
    "is_symplectic_map",
    "skew_orthogonal_complement",
    "classify_subspace",
    "darboux_matrix",
    "random_symplectic",
    "principal_angles",
    "TOL_RANK",
]
