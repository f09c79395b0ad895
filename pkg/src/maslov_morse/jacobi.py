"""Jacobi curves of L-prederivatives for control problems.

The input is the linearization along an extremal: control directions
``X_t`` (2n x k) and a control Hessian ``b_t`` (k x k).  The second
variation on controls ``v`` supported in ``[0, t1]`` is

    F(v, w) = ∫ sigma(∫_0^τ X v, X_τ w_τ) + b_τ(v_τ, w_τ) dτ,

restricted to variations whose total displacement ``∫ X v`` is vertical.
Piecewise-constant variations on a partition are processed one interval at
a time, each step producing the next Lagrangian frame of the curve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from ._linalg import TOL_RANK, null_space, orth
from .grassmannian import LagrangianFrame, NotLagrangianError, grassmannian_distance, vertical
from .maslov import DiscreteLagrangianCurve
from .symplectic import standard_form

MatFn = Callable[[float], np.ndarray]


class NumericalDegeneracyError(RuntimeError):
    """A step produced a frame that is not Lagrangian at tolerance."""

    def __init__(self, message: str, interval: int | None = None, diagnostics: dict | None = None):
        super().__init__(message if interval is None else f"interval {interval}: {message}")
        self.interval = interval
        self.diagnostics = diagnostics or {}


def _const(m) -> MatFn:
    m = np.array(m, dtype=float)
    return lambda t: m


@dataclass(frozen=True, eq=False)
class JacobiProblem:
    """Linearized extremal data on ``[0, t1]``.

    ``quadrature`` is ``"midpoint"`` (``subcells`` midpoint cells per
    interval) or ``"exact-pc"`` for data that is constant between the
    sorted ``breakpoints``; the latter splits each interval at the
    breakpoints and is exact.
    """

    n: int
    k: int
    t1: float
    X: MatFn
    b: MatFn
    P: MatFn | None = None
    quadrature: str = "midpoint"
    breakpoints: tuple[float, ...] = ()
    subcells: int = 1

    def __post_init__(self):
        if self.n < 1 or self.k < 1 or not self.t1 > 0:
            raise ValueError("need n >= 1, k >= 1 and t1 > 0")
        if self.quadrature not in ("midpoint", "exact-pc"):
            raise ValueError(f"unknown quadrature {self.quadrature!r}")
        object.__setattr__(self, "breakpoints", tuple(sorted(float(s) for s in self.breakpoints)))
        for t in (0.0, 0.5 * self.t1, self.t1):
            x = np.asarray(self.X(t))
            bb = np.asarray(self.b(t))
            if x.shape != (2 * self.n, self.k) or bb.shape != (self.k, self.k):
                raise ValueError("X(t) must be 2n x k and b(t) k x k")
            if np.abs(bb - bb.T).max() > 1e-10 * max(1.0, np.abs(bb).max()):
                raise ValueError(f"b({t}) is not symmetric")
            if self.P is not None:
                _check_projector(self.P(t), self.k)

    @property
    def space(self):
        return standard_form(self.n)

    def _pieces(self, a: float, c: float):
        if self.quadrature == "exact-pc":
            cuts = [a] + [s for s in self.breakpoints if a < s < c] + [c]
        else:
            cuts = list(np.linspace(a, c, self.subcells + 1))
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (lo + hi)
            x = np.asarray(self.X(mid), dtype=float)
            bb = np.asarray(self.b(mid), dtype=float)
            if self.P is not None:
                p = np.asarray(self.P(mid), dtype=float)
                x, bb = x @ p, p @ bb @ p
            yield hi - lo, x, bb

    def interval_data(self, a: float, c: float) -> tuple[float, np.ndarray, np.ndarray]:
        """``(eps, Xbar, Qloc)`` for the interval ``[a, c]``.

        ``Xbar`` is the mean of ``X`` and ``Qloc(v, w)`` is the mean over
        the interval of ``sigma(∫_a^τ X v, X_τ w) + b_τ(v, w)``; it is not
        symmetric in general.
        """
        eps = c - a
        if not eps > 0:
            raise ValueError("interval must have positive length")
        j = self.space.omega
        acc = np.zeros((2 * self.n, self.k))
        total = np.zeros((self.k, self.k))
        for h, x, bb in self._pieces(a, c):
            total += h * (acc.T @ j @ x) + 0.5 * h * h * (x.T @ j @ x) + h * bb
            acc += h * x
        return eps, acc / eps, total / eps


def _check_projector(p, k):
    p = np.asarray(p, dtype=float)
    if p.shape != (k, k):
        raise ValueError("projector must be k x k")
    if np.abs(p @ p - p).max() > 1e-10 or np.abs(p - p.T).max() > 1e-10:
        raise ValueError("P(t) is not a symmetric idempotent")


def zero_problem(n: int = 1, k: int = 1, t1: float = 1.0) -> JacobiProblem:
    return JacobiProblem(n, k, t1, _const(np.zeros((2 * n, k))), _const(np.eye(k)), quadrature="exact-pc")


def piecewise_constant_problem(t1: float, breaks: Sequence[float], Xs, bs) -> JacobiProblem:
    """Data equal to ``Xs[i], bs[i]`` on ``[breaks[i], breaks[i+1])`` (``breaks`` includes 0 and t1)."""
    breaks = np.asarray(breaks, dtype=float)
    Xs = [np.asarray(x, dtype=float) for x in Xs]
    bs = [0.5 * (np.asarray(b, dtype=float) + np.asarray(b, dtype=float).T) for b in bs]
    if len(breaks) != len(Xs) + 1 or len(Xs) != len(bs):
        raise ValueError("need one (X, b) pair per break interval")

    def idx(t):
        return int(np.clip(np.searchsorted(breaks, t, side="right") - 1, 0, len(Xs) - 1))

    n2, k = Xs[0].shape
    return JacobiProblem(
        n2 // 2, k, float(t1), lambda t: Xs[idx(t)], lambda t: bs[idx(t)],
        quadrature="exact-pc", breakpoints=tuple(breaks[1:-1]),
    )


def freeze(problem: JacobiProblem, partition) -> JacobiProblem:
    """Piecewise-constant copy holding the quadrature values used on ``partition``.

    Intervals of any coarsening of ``partition`` then see exactly the data the
    fine partition sees, so nested variation spaces stay nested.
    """
    part = _check_partition(partition, 0.0, problem.t1)
    breaks, xs, bs = [0.0], [], []
    for a, c in zip(part[:-1], part[1:]):
        for h, x, bb in problem._pieces(a, c):
            breaks.append(breaks[-1] + h)
            xs.append(x)
            bs.append(bb)
    breaks[-1] = part[-1]
    return piecewise_constant_problem(part[-1], breaks, xs, bs)


def vertical_frame(n: int) -> LagrangianFrame:
    """The vertical subspace ``{(dp, 0)}``."""
    return vertical(standard_form(n))


# Frames are produced for the data with its momentum rows reflected and the
# local form negated.  In this orientation a positive control Hessian moves
# the curve in the positive direction and pair-index counts reproduce the
# negative index of F.
def _reflect(x: np.ndarray) -> np.ndarray:
    n = x.shape[0] // 2
    y = x.copy()
    y[:n] *= -1.0
    return y


@dataclass(frozen=True)
class StepRecord:
    """Diagnostics of one update: complement of ``E``, the map ``A`` on it, and the local form."""

    e_perp: np.ndarray
    A: np.ndarray
    Q: np.ndarray


def interval_step(
    frame: LagrangianFrame,
    xbar: np.ndarray,
    qloc: np.ndarray,
    eps: float,
    metric: np.ndarray | None = None,
    method: str = "pinv",
    tol: float = TOL_RANK,
) -> tuple[LagrangianFrame, StepRecord]:
    """One interval of the recursion from averaged data.

    Unknowns are ``c`` (coordinates in the frame) and a constant control
    ``v``; admissible pairs satisfy ``A^T c + Qhat^T v = 0`` where
    ``A = L^T J Y`` with ``Y`` the reflected ``xbar`` and ``Qhat = -qloc``.
    The new frame is spanned by ``L c + eps Y v`` over admissible pairs.
    ``metric`` is an inner product on controls used to pick the complement
    of ``E = ker A``; the result does not depend on it.
    """
    sp = frame.space
    L = frame.basis
    y = _reflect(np.asarray(xbar, dtype=float))
    qh = -np.asarray(qloc, dtype=float)
    k = y.shape[1]
    a_mat = L.T @ sp.omega @ y
    # ranks are judged against the size of the data, so an A that vanishes
    # identically is not mistaken for rounding noise of full rank
    sy = np.linalg.norm(y, 2) if y.size else 0.0
    sq = np.linalg.norm(qh, 2) if qh.size else 0.0
    if method == "lstsq":
        ker = null_space(np.hstack([a_mat.T, qh.T]), tol, scale=max(sy, sq))
        vecs = L @ ker[: sp.n] + eps * y @ ker[sp.n:]
        rec = StepRecord(np.zeros((k, 0)), a_mat, qh)
    elif method == "pinv":
        g = np.eye(k) if metric is None else np.asarray(metric, dtype=float)
        e = null_space(a_mat, tol, scale=sy)
        e_perp = null_space(e.T @ g, tol) if e.shape[1] else np.eye(k)
        keep = null_space(a_mat.T, tol, scale=sy)
        kk = null_space(e.T @ qh.T, tol, scale=sq) if e.shape[1] else np.eye(k)
        a_p = e_perp.T @ a_mat.T
        c = -np.linalg.pinv(a_p, rcond=tol) @ (e_perp.T @ qh.T @ kk)
        vecs = np.hstack([L @ keep, L @ c + eps * y @ kk])
        rec = StepRecord(e_perp, a_p, qh)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = orth(vecs, tol)
    try:
        return LagrangianFrame(sp, out), rec
    except NotLagrangianError as exc:
        raise NumericalDegeneracyError(str(exc), diagnostics={"rank": out.shape[1], "record": rec}) from exc


def step_prederivative(
    frame: LagrangianFrame,
    problem: JacobiProblem,
    interval: tuple[float, float],
    tol: float = TOL_RANK,
    metric: np.ndarray | None = None,
    method: str = "pinv",
) -> LagrangianFrame:
    eps, xbar, qloc = problem.interval_data(*interval)
    return interval_step(frame, xbar, qloc, eps, metric, method, tol)[0]


@dataclass(frozen=True, eq=False)
class LCurve:
    partition: np.ndarray
    frames: tuple[LagrangianFrame, ...]
    caps: tuple[StepRecord, ...] = field(default=())

    @property
    def curve(self) -> DiscreteLagrangianCurve:
        return DiscreteLagrangianCurve(self.partition, self.frames)

    @property
    def final(self) -> LagrangianFrame:
        return self.frames[-1]


def uniform_partition(t1: float, N: int, t0: float = 0.0) -> np.ndarray:
    if N < 1:
        raise ValueError("need at least one interval")
    return np.linspace(t0, t1, N + 1)


def _check_partition(part, t0=None, t1=None) -> np.ndarray:
    part = np.asarray(part, dtype=float)
    if part.ndim != 1 or len(part) < 2 or np.any(np.diff(part) <= 0):
        raise ValueError("partition must be strictly increasing with at least two points")
    if t0 is not None and not math.isclose(part[0], t0, abs_tol=1e-12):
        raise ValueError(f"partition must start at {t0}")
    if t1 is not None and part[-1] > t1 * (1 + 1e-12) + 1e-12:
        raise ValueError("partition exceeds the horizon")
    return part


def run_recursion(
    problem: JacobiProblem,
    partition,
    start: LagrangianFrame | None = None,
    method: str = "pinv",
    tol: float = TOL_RANK,
) -> LCurve:
    """Frames at every partition point, starting from the vertical at ``partition[0]``."""
    part = _check_partition(partition, None if start is not None else 0.0, problem.t1)
    frame = vertical_frame(problem.n) if start is None else start
    frames, caps = [frame], []
    for i in range(len(part) - 1):
        eps, xbar, qloc = problem.interval_data(part[i], part[i + 1])
        try:
            frame, rec = interval_step(frame, xbar, qloc, eps, method=method, tol=tol)
        except NumericalDegeneracyError as exc:
            raise NumericalDegeneracyError(str(exc), interval=i, diagnostics=exc.diagnostics) from exc
        frames.append(frame)
        caps.append(rec)
    return LCurve(part, tuple(frames), tuple(caps))


def direct_prederivative(problem: JacobiProblem, partition) -> LagrangianFrame:
    """Frame at the last partition point from one global kernel computation.

    Independent of the recursion: all interval conditions are stacked and
    solved at once.  Used to cross-check :func:`run_recursion`.
    """
    part = _check_partition(partition, 0.0, problem.t1)
    n, k = problem.n, problem.k
    j = problem.space.omega
    data = [problem.interval_data(part[i], part[i + 1]) for i in range(len(part) - 1)]
    nu = n + k * len(data)
    pos = np.zeros((2 * n, nu))
    pos[:n, :n] = np.eye(n)
    rows = []
    for i, (eps, xbar, qloc) in enumerate(data):
        y = _reflect(xbar)
        r = eps * (pos.T @ j @ y).T
        r[:, n + i * k:n + (i + 1) * k] -= eps * qloc.T
        rows.append(r)
        pos = pos.copy()
        pos[:, n + i * k:n + (i + 1) * k] += eps * y
    ker = null_space(np.vstack(rows))
    return LagrangianFrame(problem.space, orth(pos @ ker))


def refine_to_limit(problem: JacobiProblem, tol: float = 1e-6, max_depth: int = 8, n0: int = 16):
    """Dyadic refinement of uniform partitions until final frames settle.

    Returns ``(frame, info)`` where ``info`` has keys ``converged``,
    ``N`` (interval counts tried) and ``distances`` between successive
    final frames.
    """
    prev = run_recursion(problem, uniform_partition(problem.t1, n0)).final
    sizes, dists = [n0], []
    for d in range(1, max_depth + 1):
        N = n0 * 2**d
        cur = run_recursion(problem, uniform_partition(problem.t1, N)).final
        dist = grassmannian_distance(prev, cur)
        sizes.append(N)
        dists.append(dist)
        prev = cur
        if dist < tol:
            return cur, {"converged": True, "N": sizes, "distances": dists}
    return prev, {"converged": False, "N": sizes, "distances": dists}


def flow_property_defect(problem: JacobiProblem, s1: float, s2: float, partition1, partition2,
                         limit_depth: int = 4) -> float:
    """Distance at ``s2`` between one run over both partitions and a run restarted at ``s1``.

    The restart begins from the limit frame at ``s1`` (obtained by
    ``limit_depth`` dyadic refinements of four times ``partition1``) and
    uses only variations supported in ``[s1, s2]``.
    """
    p1 = _check_partition(partition1, 0.0)
    p2 = _check_partition(partition2, s1)
    if not (0 < s1 < s2 <= problem.t1) or not math.isclose(p1[-1], s1) or not math.isclose(p2[-1], s2):
        raise ValueError("partitions must cover [0, s1] and [s1, s2]")
    whole = run_recursion(problem, np.concatenate([p1, p2[1:]])).final
    head = replace(problem, t1=s1)
    limit, _ = refine_to_limit(head, tol=1e-12, max_depth=limit_depth, n0=max(len(p1) - 1, 16) * 4)
    restarted = run_recursion(problem, p2, start=limit).final
    return grassmannian_distance(whole, restarted)


def apply_projectors(problem: JacobiProblem) -> JacobiProblem:
    """Fold ``P`` into the data: ``X P`` and ``P b P``."""
    if problem.P is None:
        raise ValueError("problem has no projector")
    X, b, P = problem.X, problem.b, problem.P
    return replace(
        problem,
        X=lambda t: np.asarray(X(t)) @ np.asarray(P(t)),
        b=lambda t: np.asarray(P(t)) @ np.asarray(b(t)) @ np.asarray(P(t)),
        P=None,
    )


def time_variation_augment(problem: JacobiProblem, udot: MatFn, f_along: MatFn) -> JacobiProblem:
    """Append the time-rescaling control ``alpha`` with ``ds/dt = alpha``.

    ``f_along(t)`` is the velocity of the extremal in the pulled-back
    coordinates of ``X``; along an extremal it satisfies
    ``d/dt f_along = X_t udot(t)``, which is checked at a few times.  The
    clock ``s`` becomes an extra state with fixed endpoints, so the result
    has ``n + 1`` and ``k + 1``; its new column is ``f_along`` plus a unit
    clock velocity.  ``alpha`` enters linearly, so its Hessian row and
    column vanish (``dh/du = 0`` along the extremal).
    """
    X, b, n, k = problem.X, problem.b, problem.n, problem.k
    for t in np.linspace(0.1, 0.9, 5) * problem.t1:
        h = 1e-5 * max(problem.t1, 1.0)
        lhs = (np.asarray(f_along(t + h), dtype=float) - np.asarray(f_along(t - h), dtype=float)).ravel() / (2 * h)
        rhs = np.asarray(X(t)) @ np.asarray(udot(t), dtype=float).ravel()
        if np.abs(lhs - rhs).max() > 1e-4 * max(1.0, np.abs(rhs).max()):
            raise ValueError(f"f_along is not an extremal velocity at t={t:.4g}: d/dt f_along != X udot")

    def x_aug(t):
        x0 = np.asarray(X(t), dtype=float)
        f = np.asarray(f_along(t), dtype=float).ravel()
        out = np.zeros((2 * n + 2, k + 1))
        out[:n, :k], out[n + 1:2 * n + 1, :k] = x0[:n], x0[n:]
        out[:n, k], out[n + 1:2 * n + 1, k] = f[:n], f[n:]
        out[2 * n + 1, k] = 1.0
        return out

    def b_aug(t):
        out = np.zeros((k + 1, k + 1))
        out[:k, :k] = b(t)
        return out

    P = problem.P
    p_aug = None if P is None else (lambda t: np.pad(np.asarray(P(t)), ((0, 1), (0, 1))) + np.diag([0.0] * k + [1.0]))
    return replace(problem, n=n + 1, k=k + 1, X=x_aug, b=b_aug, P=p_aug)
