import numpy as np
import pytest

from maslov_morse.grassmannian import (
    ChartCoordinates,
    ChartDomainError,
    LagrangianFrame,
    NotLagrangianError,
    darboux_adapted_basis,
    frame_from_graph,
    from_chart,
    grassmannian_distance,
    horizontal,
    intersection_dim,
    random_lagrangian,
    standard_chart,
    tangent_form,
    to_chart,
    vertical,
)
from maslov_morse.symplectic import is_symplectic_map, random_symplectic, standard_form


def frame(n, *cols):
    return LagrangianFrame(standard_form(n), np.array(cols, dtype=float).T)


def test_frame_rejects_non_lagrangian():
    with pytest.raises(NotLagrangianError):
        frame(2, [1, 0, 0, 0], [0, 0, 1, 0])
    with pytest.raises(NotLagrangianError):
        frame(2, [1, 0, 0, 0], [2, 0, 0, 0])
    with pytest.raises(NotLagrangianError):
        LagrangianFrame(standard_form(2), np.eye(3)[:, :2])


def test_intersection_examples():
    sp = standard_form(2)
    assert intersection_dim(vertical(sp), vertical(sp)) == 2
    assert intersection_dim(vertical(sp), horizontal(sp)) == 0
    a = frame(2, [1, 0, 0, 0], [0, 1, 0, 0])
    b = frame(2, [1, 0, 0, 0], [0, 0, 0, 1])
    assert intersection_dim(a, b) == 1


def test_mismatched_spaces():
    with pytest.raises(ValueError):
        intersection_dim(vertical(standard_form(1)), vertical(standard_form(2)))


def _maps_blocks(t, l0, l2):
    sp = l0.space
    assert is_symplectic_map(sp, t)
    assert grassmannian_distance(l0.transform(t), vertical(sp)) < 1e-9
    assert grassmannian_distance(l2.transform(t), horizontal(sp)) < 1e-9


def test_darboux_identity_case():
    sp = standard_form(2)
    t = darboux_adapted_basis(horizontal(sp), vertical(sp))
    assert np.allclose(t, np.eye(4))


def test_darboux_swapped_blocks():
    sp = standard_form(2)
    t = darboux_adapted_basis(vertical(sp), horizontal(sp))
    _maps_blocks(t, horizontal(sp), vertical(sp))
    j = sp.omega
    assert np.allclose(j.T @ j @ j, j)


@pytest.mark.parametrize("seed", range(20))
def test_darboux_random(seed):
    rng = np.random.default_rng(seed)
    sp = standard_form(3)
    l0, l2 = random_lagrangian(sp, rng), random_lagrangian(sp, rng)
    _maps_blocks(darboux_adapted_basis(l2, l0), l0, l2)


def test_darboux_requires_transversal():
    sp = standard_form(1)
    with pytest.raises(ChartDomainError):
        darboux_adapted_basis(vertical(sp), vertical(sp))


def test_chart_examples():
    sp = standard_form(1)
    ch = standard_chart(sp)
    assert np.allclose(to_chart(vertical(sp), ch).S, 0)
    assert np.allclose(to_chart(frame(1, [1, 2]), ch).S, [[2]])
    assert grassmannian_distance(from_chart(ChartCoordinates(np.zeros((1, 1)), ch)), vertical(sp)) < 1e-12
    with pytest.raises(ChartDomainError):
        to_chart(horizontal(sp), ch)


def test_from_chart_identity_n2():
    sp = standard_form(2)
    f = frame_from_graph(sp, np.eye(2))
    ref = LagrangianFrame(sp, np.vstack([np.eye(2), np.eye(2)]))
    assert grassmannian_distance(f, ref) < 1e-12


def test_non_symmetric_chart_rejected():
    with pytest.raises(ValueError):
        ChartCoordinates(np.array([[0.0, 1.0], [0.0, 0.0]]), standard_chart(standard_form(2)))


def test_chart_round_trips():
    rng = np.random.default_rng(7)
    for trial in range(1000):
        n = 1 + trial % 4
        sp = standard_form(n)
        chart = (random_lagrangian(sp, rng), random_lagrangian(sp, rng))
        l1 = random_lagrangian(sp, rng)
        # random charts can be badly conditioned; the bound scales with it
        cond = np.linalg.cond(darboux_adapted_basis(chart[1], chart[0]))
        c = to_chart(l1, chart)
        assert np.allclose(c.S, c.S.T)
        scale = cond * max(1.0, np.abs(c.S).max())
        assert grassmannian_distance(from_chart(c), l1) < 1e-10 * scale
        a = rng.standard_normal((n, n))
        s = a + a.T
        back = to_chart(from_chart(ChartCoordinates(s, chart)), chart).S
        assert np.abs(back - s).max() < 1e-10 * cond**2 * max(1.0, np.abs(s).max())


def test_standard_chart_round_trip_tight():
    rng = np.random.default_rng(8)
    for trial in range(1000):
        n = 1 + trial % 4
        sp = standard_form(n)
        a = rng.standard_normal((n, n))
        s = a + a.T
        f = frame_from_graph(sp, s)
        back = to_chart(f, standard_chart(sp)).S
        assert np.abs(back - s).max() < 1e-10
        assert grassmannian_distance(from_chart(to_chart(f, standard_chart(sp))), f) < 1e-10


def test_symplectic_action_preserves_intersections():
    rng = np.random.default_rng(3)
    for n in range(1, 5):
        sp = standard_form(n)
        l1 = random_lagrangian(sp, rng)
        l2 = vertical(sp)
        f = random_symplectic(n, rng)
        assert intersection_dim(l1.transform(f), l2.transform(f)) == intersection_dim(l1, l2)
        assert intersection_dim(l2.transform(f), vertical(sp).transform(f)) == n


def test_tangent_form_examples():
    sp = standard_form(1)
    v = vertical(sp)
    assert tangent_form(v, np.array([[0.0], [1.0]]))[0, 0] == pytest.approx(1.0)
    rng = np.random.default_rng(0)
    l = random_lagrangian(standard_form(3), rng)
    assert np.allclose(tangent_form(l, l.basis @ rng.standard_normal((3, 3))), 0, atol=1e-12)
    with pytest.raises(ValueError):
        tangent_form(v, np.zeros((2, 2)))


def test_tangent_form_of_chart_curve():
    # along S_t the derivative of the graph frame gives the form S_dot
    sp = standard_form(2)
    sdot = np.array([[2.0, 1.0], [1.0, -3.0]])
    basis = np.vstack([np.eye(2), np.zeros((2, 2))])
    f = LagrangianFrame(sp, basis)
    m = tangent_form(f, np.vstack([np.zeros((2, 2)), sdot]))
    assert np.allclose(np.linalg.eigvalsh(m), np.linalg.eigvalsh(sdot))


def test_distance_examples():
    rng = np.random.default_rng(1)
    sp = standard_form(2)
    assert grassmannian_distance(vertical(sp), horizontal(sp)) == pytest.approx(np.pi / 2)
    for _ in range(50):
        a, b, c = (random_lagrangian(sp, rng) for _ in range(3))
        assert grassmannian_distance(a, a) < 1e-7
        assert grassmannian_distance(a, b) == pytest.approx(grassmannian_distance(b, a))
        assert grassmannian_distance(a, c) <= grassmannian_distance(a, b) + grassmannian_distance(b, c) + 1e-12
