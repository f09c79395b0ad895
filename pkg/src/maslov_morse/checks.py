"""Randomized invariant suites shared by the test-suite and the ``check`` command."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._linalg import orth
from .finite import hessian_index_nullity, index_additivity_check, l_space, quadratic_problem
from .grassmannian import intersection_dim, random_lagrangian, vertical
from .jacobi import JacobiProblem, piecewise_constant_problem
from .maslov import chain_rule_defect, pair_index, triple_index
from .morse import main_lower_bound, piecewise_index
from .symplectic import standard_form

DEFAULT_SEED = 20240531


def random_symmetric(rng, k, definite=False):
    a = rng.standard_normal((k, k))
    return a @ a.T + 0.1 * np.eye(k) if definite else 0.5 * (a + a.T)


def random_jacobi_instance(rng: np.random.Generator, n_max: int = 3, k_max: int = 2, N_max: int = 16,
                           definite: bool = False) -> tuple[JacobiProblem, np.ndarray]:
    """Piecewise-constant data on a random partition of ``[0, 1]``.

    Control Hessians have mixed signs unless ``definite`` is set.
    """
    n = int(rng.integers(1, n_max + 1))
    k = int(rng.integers(1, k_max + 1))
    N = int(rng.integers(1, N_max + 1))
    part = np.sort(np.concatenate([[0.0], rng.uniform(0, 1, N - 1), [1.0]]))
    while np.any(np.diff(part) < 1e-3):
        part = np.sort(np.concatenate([[0.0], rng.uniform(0, 1, N - 1), [1.0]]))
    xs = [rng.standard_normal((2 * n, k)) * rng.uniform(0.5, 3.0) for _ in range(N)]
    bs = [random_symmetric(rng, k, definite) for _ in range(N)]
    return piecewise_constant_problem(1.0, part, xs, bs), part


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def _run(name, trials, seed, body: Callable[[np.random.Generator], tuple[bool, object]]) -> SuiteResult:
    res = SuiteResult(name)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        ok, detail = body(rng)
        res.total += 1
        if ok:
            res.passed += 1
        elif len(res.failures) < 3:
            res.failures.append({"seed": [seed, t], "detail": detail})
    return res


def _transversal_lagrangians(rng, n, count):
    sp = standard_form(n)
    while True:
        ls = [random_lagrangian(sp, rng) for _ in range(count)]
        if all(intersection_dim(a, b) == 0 for i, a in enumerate(ls) for b in ls[i + 1:]):
            return ls


def suite_kashiwara(trials, seed):
    def body(rng):
        n = int(rng.integers(1, 5))
        l0, l1, l2, l3 = _transversal_lagrangians(rng, n, 4)
        anti = triple_index(l2, l1, l0).signature + triple_index(l0, l1, l2).signature
        swap = triple_index(l0, l2, l1).signature + triple_index(l0, l1, l2).signature
        chain = chain_rule_defect(l0, l1, l2, l3)
        return anti == 0 and swap == 0 and chain == 0, (anti, swap, chain)
    return _run("kashiwara", trials, seed, body)


def suite_pair_index(trials, seed):
    def body(rng):
        n = int(rng.integers(1, 5))
        pi, l0, l1, l2 = _transversal_lagrangians(rng, n, 4)
        s = pair_index(pi, l0, l1).negatives + pair_index(pi, l1, l0).negatives
        tri = pair_index(pi, l0, l2).negatives <= pair_index(pi, l0, l1).negatives + pair_index(pi, l1, l2).negatives
        return s == n and tri, (s, tri)
    return _run("pair-index", trials, seed, body)


def random_form_and_subspace(rng):
    N = int(rng.integers(1, 13))
    r = int(rng.integers(0, N + 1))
    d = np.diag(rng.choice([-1.0, 0.0, 1.0], N, p=[0.4, 0.2, 0.4]) * rng.uniform(0.5, 2, N))
    o = np.linalg.qr(rng.standard_normal((N, N)))[0]
    q = o @ d @ o.T
    v = rng.standard_normal((N, int(rng.integers(0, N + 1))))
    if r and v.shape[1] and rng.random() < 0.3:
        # make V meet ker Q or its own Q-orthogonal
        v[:, 0] = o[:, np.argmin(np.abs(np.diag(d)))]
    return q, v


def suite_additivity(trials, seed):
    def body(rng):
        q, v = random_form_and_subspace(rng)
        d = index_additivity_check(q, v)
        return d == 0, d
    return _run("additivity", trials, seed, body)


def random_morse_problem(rng):
    """Quadratic cost with a quadratic constraint, critical at the origin.

    The Hessian is made singular on the constraint kernel about half of
    the time so that the nullity is not always zero.
    """
    n = int(rng.integers(1, 5))
    m = int(rng.integers(n, 9))
    a = rng.standard_normal((n, m))
    k = np.linalg.svd(a)[2][n:].T
    h = random_symmetric(rng, m)
    if k.shape[1] and rng.random() < 0.5:
        z = k[:, : int(rng.integers(1, k.shape[1] + 1))]
        pz = z @ np.linalg.pinv(z)
        h = h - pz @ h @ pz
    c = np.stack([random_symmetric(rng, m) for _ in range(n)])
    p = rng.standard_normal(n)
    g = a.T @ p
    return quadratic_problem(h, g, a, c), np.zeros(m), p


def suite_nullity(trials, seed):
    def body(rng):
        prob, u, p = random_morse_problem(rng)
        _, nul = hessian_index_nullity(prob, u, p)
        frame = l_space(prob, u, p)
        dim = intersection_dim(frame, vertical(frame.space))
        return nul == dim, (nul, dim)
    return _run("nullity", trials, seed, body)


def suite_oracle(trials, seed):
    def body(rng):
        prob, part = random_jacobi_instance(rng)
        rep = piecewise_index(prob, part, oracle=True)
        return rep.piecewise_index == rep.oracle_index, (rep.piecewise_index, rep.oracle_index)
    return _run("oracle-equivalence", trials, seed, body)


def random_coarsening(rng, part):
    keep = rng.random(len(part) - 2) < 0.5
    return np.concatenate([part[:1], part[1:-1][keep], part[-1:]])


def suite_lower_bound(trials, seed):
    def body(rng):
        prob, part = random_jacobi_instance(rng)
        family = [random_coarsening(rng, part) for _ in range(3)] + [part]
        bound = main_lower_bound(prob, family, reference=part)
        oracle = piecewise_index(prob, part, oracle=True).oracle_index
        return bound <= oracle, (bound, oracle)
    return _run("lower-bound", trials, seed, body)


SUITES = {
    "kashiwara": suite_kashiwara,
    "pair-index": suite_pair_index,
    "additivity": suite_additivity,
    "nullity": suite_nullity,
    "oracle-equivalence": suite_oracle,
    "lower-bound": suite_lower_bound,
}


def run_all(trials: int = 100, seed: int = DEFAULT_SEED) -> list[SuiteResult]:
    return [fn(trials, seed) for fn in SUITES.values()]
