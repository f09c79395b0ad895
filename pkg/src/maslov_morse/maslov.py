"""Index computations on the Lagrangian Grassmannian.

The anchor for every sign in this module is the line picture in
``R^2``: a line ``span(1, s)`` with ``s`` increasing moves in the positive
direction, and crossing the p-axis that way counts ``+1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._linalg import TOL_EIG, TOL_RANK, intersect, inertia
from .grassmannian import (
    ChartDomainError,
    LagrangianFrame,
    _same_space,
    intersection_dim,
)

# Zero threshold for pair forms, relative to the size of the decomposition
# vectors rather than to the form itself: near-tangent steps produce forms
# whose genuine eigenvalues are tiny compared with their largest one.
PAIR_TOL = 1e-11


@dataclass(frozen=True)
class SignatureResult:
    positives: int
    negatives: int
    zeros: int

    @property
    def signature(self) -> int:
        return self.positives - self.negatives

    @property
    def negative_index(self) -> int:
        return self.negatives

    @property
    def dim(self) -> int:
        return self.positives + self.negatives + self.zeros


@dataclass(frozen=True, eq=False)
class DiscreteLagrangianCurve:
    times: np.ndarray
    frames: tuple[LagrangianFrame, ...] = field(default_factory=tuple)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        frames = tuple(self.frames)
        if t.ndim != 1 or len(t) != len(frames) or len(frames) == 0:
            raise ValueError("need one frame per time and at least one sample")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        _same_space(*frames)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)


def _decompose(lam: np.ndarray, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split columns of ``lam`` as ``a @ x + b @ y`` by minimum-norm least squares."""
    coef = np.linalg.lstsq(np.hstack([a, b]), lam, rcond=None)[0]
    ka = a.shape[1]
    return a @ coef[:ka], b @ coef[ka:]


def triple_index(l0: LagrangianFrame, l1: LagrangianFrame, l2: LagrangianFrame, tol: float = TOL_EIG) -> SignatureResult:
    """Signature of ``sigma(lambda0, lambda2)`` on ``l1`` where ``lambda = lambda0 + lambda2``."""
    sp = _same_space(l0, l1, l2)
    if intersection_dim(l0, l2) != 0:
        raise ChartDomainError("outer frames of a triple index must be transversal")
    x0, x2 = _decompose(l1.basis, l0.basis, l2.basis)
    q = x0.T @ sp.omega @ x2
    pos, neg, zer = inertia(0.5 * (q + q.T), tol=tol)
    return SignatureResult(pos, neg, zer)


def chain_rule_defect(l0, l1, l2, l3, tol: float = TOL_EIG) -> int:
    """Alternating coboundary of the triple index on four frames.

    ``mu(1,2,3) - mu(0,2,3) + mu(0,1,3) - mu(0,1,2)`` vanishes whenever the
    four triples are defined (needs ``l0 ⋔ l2``, ``l0 ⋔ l3`` and ``l1 ⋔ l3``).
    """
    return (
        triple_index(l1, l2, l3, tol).signature
        - triple_index(l0, l2, l3, tol).signature
        + triple_index(l0, l1, l3, tol).signature
        - triple_index(l0, l1, l2, tol).signature
    )


def pair_index(pi: LagrangianFrame, l0: LagrangianFrame, l1: LagrangianFrame, tol: float = PAIR_TOL) -> SignatureResult:
    """Inertia of ``sigma(lambda1, lambda0)`` on ``(l0 + l1) ∩ pi``.

    Each ``lambda`` in the domain is split as ``lambda0 + lambda1`` by minimum-norm
    least squares; directions inside ``l0 ∩ l1`` land among the zeros.
    """
    sp = _same_space(pi, l0, l1)
    dom = intersect(np.hstack([l0.basis, l1.basis]), pi.basis)
    if dom.shape[1] == 0:
        return SignatureResult(0, 0, 0)
    x0, x1 = _decompose(dom, l0.basis, l1.basis)
    q = x1.T @ sp.omega @ x0
    scale = max(np.linalg.norm(x0, axis=0).max(), np.linalg.norm(x1, axis=0).max())
    pos, neg, zer = inertia(0.5 * (q + q.T), tol=tol, scale=scale)
    return SignatureResult(pos, neg, zer)


def maslov_increment(pi: LagrangianFrame, l0: LagrangianFrame, l1: LagrangianFrame, tol: float = PAIR_TOL) -> int:
    """Crossing count of the step ``l0 -> l1`` against ``pi``.

    This is the negative index of :func:`pair_index` plus
    ``dim(l0 ∩ pi) - dim(l0 ∩ l1 ∩ pi)``: a step leaving ``pi`` releases the
    directions it shared with ``pi`` and each of them is counted once.  For
    mutually transversal triples the correction vanishes.
    """
    neg = pair_index(pi, l0, l1, tol).negatives
    on_pi = intersect(l0.basis, pi.basis)
    if on_pi.shape[1] == 0:
        return neg
    kept = intersect(on_pi, l1.basis)
    return neg + on_pi.shape[1] - kept.shape[1]


def curve_index_sum(curve: DiscreteLagrangianCurve, pi: LagrangianFrame, tol: float = PAIR_TOL) -> int:
    """Sum of pair-index negatives over consecutive samples."""
    f = curve.frames
    return sum(pair_index(pi, f[i], f[i + 1], tol).negatives for i in range(len(f) - 1))


def curve_maslov_count(curve: DiscreteLagrangianCurve, pi: LagrangianFrame, tol: float = PAIR_TOL) -> int:
    """Sum of :func:`maslov_increment` over consecutive samples."""
    f = curve.frames
    return sum(maslov_increment(pi, f[i], f[i + 1], tol) for i in range(len(f) - 1))


def simple_curve_maslov(g0: LagrangianFrame, g1: LagrangianFrame, lam: LagrangianFrame, delta: LagrangianFrame) -> float:
    """Intersection number with the train of ``lam`` of a simple curve in the chart of ``delta``."""
    for g in (g0, g1):
        if intersection_dim(g, delta) != 0:
            raise ChartDomainError("curve endpoints must be transversal to the chart frame")
    return 0.5 * (triple_index(lam, g1, delta).signature - triple_index(lam, g0, delta).signature)


def _local_reference(frame: LagrangianFrame) -> LagrangianFrame:
    """A Lagrangian transversal to ``frame``: its image under the complex structure."""
    sp = frame.space
    if sp.is_standard:
        return LagrangianFrame(sp, sp.omega @ frame.basis)
    from .symplectic import darboux_matrix, standard_form

    m = darboux_matrix(sp)
    j = standard_form(sp.n).omega
    return LagrangianFrame(sp, m @ j @ np.linalg.solve(m, frame.basis))


def is_monotone_increasing(curve: DiscreteLagrangianCurve, pi: LagrangianFrame | None = None, tol: float = PAIR_TOL) -> bool:
    """True when every step moves in the positive direction.

    Each step ``Λ_i -> Λ_{i+1}`` is read against a reference transversal to
    ``Λ_i``; in a chart centred there the step is ``S_{i+1} - S_i`` and the
    pair form has no negatives exactly when this difference is positive
    semidefinite.  ``pi`` is accepted for symmetry with the other curve
    functions; a single global reference would misread steps that straddle
    its train.
    """
    f = curve.frames
    for i in range(len(f) - 1):
        if intersection_dim(f[i], f[i + 1]) == f[i].n:
            continue
        ref = _local_reference(f[i])
        if maslov_increment(ref, f[i], f[i + 1], tol) != 0:
            return False
    return True


__all__ = [
    "SignatureResult",
    "DiscreteLagrangianCurve",
    "PAIR_TOL",
    "triple_index",
    "chain_rule_defect",
    "pair_index",
    "maslov_increment",
    "curve_index_sum",
    "curve_maslov_count",
    "simple_curve_maslov",
    "is_monotone_increasing",
]
