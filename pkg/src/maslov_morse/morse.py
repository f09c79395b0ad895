"""Morse indices from Jacobi curves, with a brute-force Hessian oracle."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ._linalg import TOL_EIG, TOL_RANK, inertia, intersect, null_space
from .grassmannian import LagrangianFrame, grassmannian_distance, intersection_dim
from .jacobi import (
    JacobiProblem,
    LCurve,
    _check_partition,
    _reflect,
    freeze,
    run_recursion,
    vertical_frame,
)
from .maslov import maslov_increment, pair_index

ORACLE_MAX_UNKNOWNS = 2000


class OracleSizeError(ValueError):
    pass


@dataclass
class IndexReport:
    piecewise_index: int
    nullity_term: int
    pair_terms: list[int]
    partition: list[float]
    n: int
    local_terms: list[int] = field(default_factory=list)
    oracle_index: int | None = None
    oracle_nullity: int | None = None
    converged: bool = True
    diagnostics: dict = field(default_factory=dict)

    @property
    def matches_oracle(self) -> bool | None:
        if self.oracle_index is None:
            return None
        return self.oracle_index == self.piecewise_index

    @property
    def crossing_index(self) -> int:
        """The crossing sum alone, without the local terms."""
        return sum(self.pair_terms) + self.nullity_term - self.n

    def to_dict(self) -> dict:
        out = asdict(self)
        out["crossing_index"] = self.crossing_index
        return out


def frames_intersection(frames) -> np.ndarray:
    """Basis of the common intersection, built pairwise."""
    acc = frames[0].basis
    for f in frames[1:]:
        if acc.shape[1] == 0:
            break
        acc = intersect(acc, f.basis)
    return acc


def index_from_curve(curve: LCurve, n: int) -> tuple[int, list[int], int]:
    """Crossing sum of the closed-up curve ``Π, Λ_1, ..., Λ_N, Π``."""
    pi = vertical_frame(n)
    seq = list(curve.frames) + [pi]
    terms = [maslov_increment(pi, seq[i], seq[i + 1]) for i in range(len(seq) - 1)]
    common = frames_intersection(curve.frames).shape[1]
    return sum(terms) + common - n, terms, common


def local_index_terms(problem: JacobiProblem, curve: LCurve, tol: float = TOL_EIG) -> list[int]:
    """Negative index of each interval's local form on the controls that do not move the frame.

    On interval ``i`` these are the controls ``v`` with ``sigma(eta, X v) = 0``
    for all ``eta`` in the incoming frame.  The step leaves the frame where it
    was along them, so the crossing count cannot see negative directions of
    the local form there.  The terms vanish when no such controls exist
    (the generic case for ``k <= n``) and when ``b`` is positive definite on
    piecewise-constant data.
    """
    part = curve.partition
    out = []
    for i in range(len(part) - 1):
        _, xbar, qloc = problem.interval_data(part[i], part[i + 1])
        frame = curve.frames[i]
        y = _reflect(xbar)
        a_mat = frame.basis.T @ frame.space.omega @ y
        e = null_space(a_mat, scale=np.linalg.norm(y, 2))
        if e.shape[1] == 0:
            out.append(0)
            continue
        m = e.T @ (0.5 * (qloc + qloc.T)) @ e
        out.append(int(inertia(m, tol=tol, scale=max(np.abs(qloc).max(initial=0.0), 1e-300))[1]))
    return out


def index_report(problem: JacobiProblem, curve: LCurve) -> IndexReport:
    """Index of the curve: crossing sum, common intersection and local terms."""
    idx, terms, common = index_from_curve(curve, problem.n)
    local = local_index_terms(problem, curve)
    rep = IndexReport(
        piecewise_index=int(idx + sum(local)),
        nullity_term=int(common),
        pair_terms=[int(t) for t in terms],
        partition=[float(s) for s in curve.partition],
        n=problem.n,
        local_terms=local,
    )
    rep.diagnostics["final_vertical_intersection"] = intersection_dim(curve.final, vertical_frame(problem.n))
    return rep


def oracle_form(problem: JacobiProblem, partition) -> tuple[np.ndarray, np.ndarray]:
    """Matrix of ``F`` on piecewise-constant controls and the endpoint constraint.

    Returns ``(F, C)``: the variation ``v`` (stacked interval values) is
    admissible when ``C v = 0``, i.e. its total displacement is vertical.
    """
    part = _check_partition(partition, 0.0, problem.t1)
    n, k = problem.n, problem.k
    data = [problem.interval_data(part[i], part[i + 1]) for i in range(len(part) - 1)]
    N = len(data)
    if N * k > ORACLE_MAX_UNKNOWNS:
        raise OracleSizeError(f"{N * k} unknowns exceed the oracle limit {ORACLE_MAX_UNKNOWNS}")
    j = problem.space.omega
    f = np.zeros((N * k, N * k))
    for jj, (ej, xj, qj) in enumerate(data):
        f[jj * k:(jj + 1) * k, jj * k:(jj + 1) * k] = ej * qj
        for ii in range(jj):
            ei, xi, _ = data[ii]
            f[ii * k:(ii + 1) * k, jj * k:(jj + 1) * k] = ei * ej * (xi.T @ j @ xj)
    c = np.hstack([e * x[n:] for e, x, _ in data])
    return f, c


def symmetric_form(problem: JacobiProblem, partition) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric form on all piecewise-constant controls agreeing with ``F`` on admissible ones.

    ``F(v, w) - <p-part of ∫Xv, q-part of ∫Xw>``.  Together with the
    displacement constraint it is a finite-dimensional constrained problem
    whose Lagrangian space is the final frame of the recursion.
    """
    f, c = oracle_form(problem, partition)
    part = _check_partition(partition, 0.0, problem.t1)
    n = problem.n
    lam = np.hstack([e * x for e, x, _ in (problem.interval_data(part[i], part[i + 1]) for i in range(len(part) - 1))])
    q = f - lam[:n].T @ lam[n:]
    return 0.5 * (q + q.T), c


def hessian_oracle_index(problem: JacobiProblem, partition, tol: float = TOL_EIG) -> tuple[int, int]:
    """Negative index and nullity of ``F`` on admissible piecewise-constant controls."""
    f, c = oracle_form(problem, partition)
    ker = null_space(c)
    if ker.shape[1] == 0:
        return 0, 0
    m = ker.T @ f @ ker
    _, neg, zer = inertia(0.5 * (m + m.T), tol=tol)
    return neg, zer


def piecewise_index(problem: JacobiProblem, partition, oracle: bool = False, tol: float = TOL_EIG) -> IndexReport:
    rep = index_report(problem, run_recursion(problem, partition))
    if oracle:
        rep.oracle_index, rep.oracle_nullity = hessian_oracle_index(problem, partition, tol)
    return rep


def _fine_grid(points: np.ndarray, factor: int) -> np.ndarray:
    pieces = [np.linspace(a, b, factor + 1)[:-1] for a, b in zip(points[:-1], points[1:])]
    return np.concatenate(pieces + [points[-1:]])


def main_lower_bound(problem: JacobiProblem, partitions, reference=None, factor: int = 8, tol: float = 1e-3,
                     max_doublings: int = 6, return_info: bool = False):
    """Crossing-sum lower bound for the Morse index over a family of partitions.

    Frames at the partition points come from one run on a common grid.  By
    default the grid refines every partition interval ``factor`` times and
    is doubled until those frames move by less than ``tol``; passing
    ``reference`` uses that partition's run as is, which bounds the index
    of the piecewise-constant problem on ``reference``.  The intersection
    of the whole curve is sampled on the grid.
    """
    parts = [_check_partition(p, 0.0, problem.t1) for p in partitions]
    pts = np.unique(np.concatenate(parts))
    if reference is not None:
        grid = _check_partition(reference, 0.0, problem.t1)
        if not _nested(pts, grid):
            raise ValueError("reference partition must contain every partition point")
        curve = run_recursion(problem, grid)
        at = {float(s): curve.frames[int(np.argmin(np.abs(grid - s)))] for s in pts}
    else:
        prev = None
        for _ in range(max_doublings + 1):
            grid = _fine_grid(pts, factor)
            curve = run_recursion(problem, grid)
            at = {float(s): curve.frames[int(np.argmin(np.abs(grid - s)))] for s in pts}
            if prev is not None and max(grassmannian_distance(prev[s], at[s]) for s in at) < tol:
                break
            prev = at
            factor *= 2
        else:
            raise RuntimeError("frames at partition points did not settle; the index may be infinite")
    pi = vertical_frame(problem.n)
    common = frames_intersection(curve.frames).shape[1]
    values = []
    for p in parts:
        seq = [at[float(s)] for s in p] + [pi]
        values.append(sum(maslov_increment(pi, seq[i], seq[i + 1]) for i in range(len(seq) - 1)) + common - problem.n)
    best = int(max(values))
    if return_info:
        return best, {"values": values, "grid": grid, "common": common}
    return best


def conjugate_point_times(problem: JacobiProblem, partition) -> list[tuple[float, int]]:
    """Times where the curve meets the vertical, with multiplicities.

    A sample lying on the vertical is reported at its own time.  A crossing
    strictly between samples is reported at the midpoint of its interval
    with the step's crossing count as multiplicity.
    """
    curve = run_recursion(problem, partition)
    pi = vertical_frame(problem.n)
    s = curve.partition
    out = []
    for i in range(1, len(s)):
        hit = intersection_dim(curve.frames[i], pi)
        if hit:
            out.append((float(s[i]), hit))
        elif intersection_dim(curve.frames[i - 1], pi) == 0:
            jump = maslov_increment(pi, curve.frames[i - 1], curve.frames[i])
            if jump:
                out.append((float(0.5 * (s[i - 1] + s[i])), jump))
    return out


@dataclass(frozen=True)
class IncrementCheck:
    lhs: int
    rhs: int
    hypotheses: bool


def _nested(coarse: np.ndarray, fine: np.ndarray) -> bool:
    return all(np.min(np.abs(fine - c)) < 1e-12 * max(1.0, abs(c)) for c in coarse)


def increment_bound_check(problem: JacobiProblem, coarse, fine) -> IncrementCheck:
    """Oracle index gain from refining versus the pair index of the two end frames.

    ``hypotheses`` reports whether the end frame of the coarse run is
    transversal to the vertical and the form is positive on the admissible
    part of the :func:`symmetric_form`-orthogonal complement of the coarse controls; under
    those conditions the two sides are expected to agree.
    """
    pc = _check_partition(coarse, 0.0, problem.t1)
    pf = _check_partition(fine, 0.0, problem.t1)
    if not _nested(pc, pf) or abs(pc[-1] - pf[-1]) > 1e-12:
        raise ValueError("coarse partition must be contained in the fine one with the same end")
    problem = freeze(problem, pf)
    lhs = hessian_oracle_index(problem, pf)[0] - hessian_oracle_index(problem, pc)[0]
    lc = run_recursion(problem, pc).final
    lf = run_recursion(problem, pf).final
    pi = vertical_frame(problem.n)
    rhs = pair_index(pi, lc, lf).negatives
    return IncrementCheck(int(lhs), int(rhs), _equality_hypotheses(problem, pc, pf, lc))


def _embedding(pc: np.ndarray, pf: np.ndarray, k: int) -> np.ndarray:
    """Matrix sending coarse piecewise-constant controls into fine ones."""
    emb = np.zeros(((len(pf) - 1) * k, (len(pc) - 1) * k))
    for j in range(len(pf) - 1):
        mid = 0.5 * (pf[j] + pf[j + 1])
        i = int(np.searchsorted(pc, mid) - 1)
        emb[j * k:(j + 1) * k, i * k:(i + 1) * k] = np.eye(k)
    return emb


def _equality_hypotheses(problem, pc, pf, lc) -> bool:
    if intersection_dim(lc, vertical_frame(problem.n)) != 0:
        return False
    fs, c = symmetric_form(problem, pf)
    u1 = _embedding(pc, pf, problem.k)
    u2 = null_space(u1.T @ fs)
    if u2.shape[1] == 0:
        return True
    adm = null_space(c @ u2)
    if adm.shape[1] == 0:
        return True
    w = u2 @ adm
    m = w.T @ fs @ w
    pos, _, _ = inertia(m, tol=TOL_EIG)
    return pos == m.shape[0]
