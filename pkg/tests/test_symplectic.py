import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maslov_morse.symplectic import (
    Subspace,
    SubspaceKind,
    SymplecticSpace,
    classify_subspace,
    darboux_matrix,
    is_symplectic_map,
    random_symplectic,
    skew_orthogonal_complement,
    standard_form,
    symplectic_product,
)
from maslov_morse._linalg import subspace_distance


def test_standard_form_n1():
    assert np.array_equal(standard_form(1).omega, [[0, 1], [-1, 0]])


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_standard_form_identities(n):
    j = standard_form(n).omega
    assert np.allclose(j @ j, -np.eye(2 * n))
    assert np.allclose(j.T, -j)


def test_rejects_bad_forms():
    with pytest.raises(ValueError):
        standard_form(0)
    with pytest.raises(ValueError):
        SymplecticSpace(1, np.eye(2))
    with pytest.raises(ValueError):
        SymplecticSpace(2, np.zeros((4, 4)))


def test_product_examples():
    sp = standard_form(1)
    assert symplectic_product(sp, [1, 0], [0, 1]) == 1
    assert symplectic_product(sp, [0, 1], [1, 0]) == -1
    with pytest.raises(ValueError):
        symplectic_product(sp, [1, 0, 0], [0, 1])


@given(st.lists(st.floats(-10, 10), min_size=6, max_size=6))
def test_product_alternating(v):
    assert symplectic_product(standard_form(3), v, v) == pytest.approx(0.0, abs=1e-9)


def test_symplectic_map_examples():
    sp = standard_form(1)
    assert is_symplectic_map(sp, np.eye(2))
    assert is_symplectic_map(sp, sp.omega)
    assert not is_symplectic_map(sp, 2 * np.eye(2))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_symplectic_group_closed(n):
    rng = np.random.default_rng(n)
    sp = standard_form(n)
    for _ in range(20):
        f, g = random_symplectic(n, rng), random_symplectic(n, rng)
        assert is_symplectic_map(sp, f @ g)
        assert is_symplectic_map(sp, np.linalg.inv(f))


def test_complement_dimensions(rng):
    sp = standard_form(4)
    g = Subspace(rng.standard_normal((8, 3)))
    c = skew_orthogonal_complement(sp, g)
    assert c.dim == 5
    cc = skew_orthogonal_complement(sp, c)
    assert subspace_distance(cc.basis, g.basis) < 1e-10


def test_complement_of_whole_space_is_zero():
    sp = standard_form(2)
    assert skew_orthogonal_complement(sp, Subspace(np.eye(4))).dim == 0


def test_lines_are_isotropic(rng):
    sp = standard_form(3)
    line = Subspace(rng.standard_normal(6))
    assert classify_subspace(sp, line) == SubspaceKind.ISOTROPIC


def test_classification_examples(rng):
    sp = standard_form(2)
    assert classify_subspace(sp, Subspace(np.eye(4)[:, :2])) == SubspaceKind.LAGRANGIAN
    assert classify_subspace(sp, Subspace(rng.standard_normal((4, 3)))) == SubspaceKind.COISOTROPIC
    s = rng.standard_normal((2, 2))
    sym = Subspace(np.vstack([np.eye(2), s + s.T]))
    skew = Subspace(np.vstack([np.eye(2), s - s.T + np.eye(2)]))
    assert classify_subspace(sp, sym) == SubspaceKind.LAGRANGIAN
    assert classify_subspace(sp, skew) != SubspaceKind.LAGRANGIAN
    assert classify_subspace(sp, Subspace(np.eye(4)[:, [0, 2]])) == SubspaceKind.GENERIC


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10_000))
def test_complement_dimension_formula(n, seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 2 * n + 1))
    g = Subspace.from_span(rng.standard_normal((2 * n, m)))
    assert g.dim + skew_orthogonal_complement(standard_form(n), g).dim == 2 * n


def test_darboux_matrix_reduces_general_form(rng):
    a = rng.standard_normal((4, 4))
    sp = SymplecticSpace(2, a - a.T)
    m = darboux_matrix(sp)
    assert np.allclose(m.T @ sp.omega @ m, standard_form(2).omega, atol=1e-9)
