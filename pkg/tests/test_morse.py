import numpy as np
import pytest

from maslov_morse._linalg import rank
from maslov_morse.checks import random_coarsening, random_jacobi_instance, random_symmetric
from maslov_morse.grassmannian import intersection_dim
from maslov_morse.jacobi import run_recursion, uniform_partition, vertical_frame, zero_problem
from maslov_morse.morse import (
    OracleSizeError,
    conjugate_point_times,
    frames_intersection,
    hessian_oracle_index,
    increment_bound_check,
    main_lower_bound,
    oracle_form,
    piecewise_index,
    symmetric_form,
)
from maslov_morse.problems import build_lq, oscillator

PI = np.pi


def test_zero_problem_index():
    rep = piecewise_index(zero_problem(2, 1, 1.0), uniform_partition(1.0, 8), oracle=True)
    assert rep.piecewise_index == 0 == rep.oracle_index
    assert rep.pair_terms == [0] * 9 and rep.nullity_term == 2


def test_report_identity_and_dict():
    p = oscillator(1.5 * PI)
    rep = piecewise_index(p, uniform_partition(p.t1, 32), oracle=True)
    assert rep.piecewise_index == sum(rep.pair_terms) + rep.nullity_term + sum(rep.local_terms) - rep.n
    assert rep.crossing_index == sum(rep.pair_terms) + rep.nullity_term - rep.n
    d = rep.to_dict()
    assert d["piecewise_index"] == rep.piecewise_index and rep.matches_oracle
    assert len(d["partition"]) == 33


@pytest.mark.parametrize("t1, expected", [(PI / 2, 0), (1.5 * PI, 1), (2.5 * PI, 2)])
def test_oscillator_indices(t1, expected):
    rep = piecewise_index(oscillator(t1), uniform_partition(t1, 64), oracle=True)
    assert rep.piecewise_index == expected == rep.oracle_index
    assert rep.oracle_nullity == 0


def test_frame_that_stops_moving_keeps_negative_directions():
    # on [1, 2] the control direction lies in the frame, so the frame stands still
    # while the negative control Hessian still contributes
    from maslov_morse.jacobi import piecewise_constant_problem

    p = piecewise_constant_problem(2.0, [0, 1, 2], [[[0.0], [1.0]], [[-1.0], [1.0]]], [[[1.0]], [[-0.5]]])
    part = np.array([0.0, 0.5, 1.0, 1.5, 2.0])
    rep = piecewise_index(p, part, oracle=True)
    assert rep.local_terms == [0, 0, 1, 1]
    assert rep.crossing_index == 0
    assert rep.piecewise_index == rep.oracle_index == 2


def test_local_terms_vanish_for_positive_b():
    rng = np.random.default_rng(9)
    for _ in range(30):
        problem, part = random_jacobi_instance(rng, k_max=3, definite=True)
        assert sum(piecewise_index(problem, part).local_terms) == 0


def test_oracle_zero_dynamics_positive_b():
    assert hessian_oracle_index(zero_problem(2, 2, 1.0), uniform_partition(1.0, 6)) == (0, 0)


def test_oracle_form_shapes_and_guard():
    p = oscillator(1.0)
    f, c = oracle_form(p, uniform_partition(1.0, 10))
    assert f.shape == (10, 10) and c.shape == (1, 10)
    s, _ = symmetric_form(p, uniform_partition(1.0, 10))
    assert np.allclose(s, s.T)
    with pytest.raises(OracleSizeError):
        oracle_form(p, uniform_partition(1.0, 2001))


def test_oracle_matches_brute_force_assembly():
    # assemble F by integrating the defining double integral on a fine grid
    rng = np.random.default_rng(0)
    p = build_lq(rng.standard_normal((1, 1)), [[1.0]], [[1.0]], [[-2.0]], 1.0, subcells=1)
    from maslov_morse.jacobi import freeze

    part = uniform_partition(1.0, 3)
    fz = freeze(p, part)
    f, _ = oracle_form(fz, part)
    j = fz.space.omega
    taus = np.linspace(0, 1, 3001)
    mids = 0.5 * (taus[1:] + taus[:-1])
    h = taus[1] - taus[0]
    brute = np.zeros((3, 3))
    for a in range(3):
        for b in range(3):
            acc = np.zeros(2)
            tot = 0.0
            for t in mids:
                x = fz.X(t)[:, 0]
                va = 1.0 if part[a] <= t < part[a + 1] else 0.0
                vb = 1.0 if part[b] <= t < part[b + 1] else 0.0
                tot += h * ((acc + 0.5 * h * x * va) @ j @ x * vb + fz.b(t)[0, 0] * va * vb)
                acc += h * x * va
            brute[a, b] = tot
    assert np.allclose(np.triu(f), np.triu(brute), atol=1e-6)
    assert np.allclose(f.diagonal(), brute.diagonal(), atol=1e-6)


@pytest.mark.parametrize("k_max", [2, 4])
def test_oracle_equivalence_batch(k_max):
    rng = np.random.default_rng(1)
    for _ in range(40):
        problem, part = random_jacobi_instance(rng, k_max=k_max)
        rep = piecewise_index(problem, part, oracle=True)
        assert rep.piecewise_index == rep.oracle_index


def test_vertical_intersection_equals_oracle_nullity_plus_defect():
    rng = np.random.default_rng(2)
    for _ in range(60):
        problem, part = random_jacobi_instance(rng)
        _, c = oracle_form(problem, part)
        nul = hessian_oracle_index(problem, part)[1]
        final = run_recursion(problem, part).final
        assert intersection_dim(final, vertical_frame(problem.n)) == nul + problem.n - rank(c)


def test_index_nondecreasing_under_refinement():
    rng = np.random.default_rng(3)
    for _ in range(30):
        problem, part = random_jacobi_instance(rng)
        coarse = random_coarsening(rng, part)
        assert piecewise_index(problem, coarse).piecewise_index <= piecewise_index(problem, part).piecewise_index


def test_oscillator_index_jumps_at_conjugate_points():
    values = [piecewise_index(oscillator(t1), uniform_partition(t1, 64)).piecewise_index
              for t1 in (0.9 * PI, 1.1 * PI, 1.9 * PI, 2.1 * PI)]
    assert values == [0, 1, 1, 2]


def test_lower_bound_examples():
    assert main_lower_bound(zero_problem(1, 1, 1.0), [uniform_partition(1.0, 4)]) == 0
    t1 = 1.5 * PI
    fam = [uniform_partition(t1, N) for N in (2, 4, 8)]
    assert main_lower_bound(oscillator(t1), fam) == 1


def test_lower_bound_below_oracle():
    rng = np.random.default_rng(4)
    for _ in range(40):
        problem, part = random_jacobi_instance(rng)
        oracle = hessian_oracle_index(problem, part)[0]
        fam = [random_coarsening(rng, part) for _ in range(3)]
        assert main_lower_bound(problem, fam, reference=part) <= oracle


def test_lower_bound_reference_must_contain_points():
    with pytest.raises(ValueError):
        main_lower_bound(oscillator(1.0), [[0.0, 0.3, 1.0]], reference=uniform_partition(1.0, 4))


def test_conjugate_points_oscillator():
    t1, N = 2.5 * PI, 256
    hits = conjugate_point_times(oscillator(t1), uniform_partition(t1, N))
    assert [m for _, m in hits] == [1, 1]
    for (t, _), target in zip(hits, (PI, 2 * PI)):
        assert abs(t - target) < 3 * t1 / N


def test_conjugate_points_degenerate_and_empty():
    part = uniform_partition(1.0, 5)
    assert conjugate_point_times(zero_problem(2, 1, 1.0), part) == [(float(s), 2) for s in part[1:]]
    rng = np.random.default_rng(5)
    p = build_lq(rng.standard_normal((2, 2)), rng.standard_normal((2, 2)), random_symmetric(rng, 2, True),
                 random_symmetric(rng, 2), 0.2)
    assert conjugate_point_times(p, uniform_partition(0.2, 16)) == []


def test_frames_intersection():
    curve = run_recursion(zero_problem(3, 1, 1.0), uniform_partition(1.0, 3))
    assert frames_intersection(curve.frames).shape[1] == 3
    curve = run_recursion(oscillator(1.0), uniform_partition(1.0, 3))
    assert frames_intersection(curve.frames).shape[1] == 0


def test_increment_identical_partitions():
    part = uniform_partition(2.0, 8)
    r = increment_bound_check(oscillator(2.0), part, part)
    assert (r.lhs, r.rhs) == (0, 0)


def test_increment_oscillator():
    t1 = 2.5 * PI
    r = increment_bound_check(oscillator(t1), uniform_partition(t1, 8), uniform_partition(t1, 16))
    assert r.lhs >= r.rhs


def test_increment_requires_nesting():
    with pytest.raises(ValueError):
        increment_bound_check(oscillator(1.0), [0.0, 0.3, 1.0], uniform_partition(1.0, 4))


def test_increment_random():
    rng = np.random.default_rng(6)
    equal_cases = 0
    for _ in range(40):
        problem, part = random_jacobi_instance(rng, definite=True)
        r = increment_bound_check(problem, random_coarsening(rng, part), part)
        assert r.lhs >= r.rhs
        if r.hypotheses:
            equal_cases += 1
            assert r.lhs == r.rhs
    assert equal_cases > 0
