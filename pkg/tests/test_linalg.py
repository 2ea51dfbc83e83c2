import numpy as np
import pytest

from oiasim.errors import NotHermitian, RankDeficient
from oiasim.grassmann import chordal_distance_sq
from oiasim.linalg import (
    herm,
    hermitian_eigen,
    orthonormal_basis,
    random_gaussian_matrix,
    trial_stream,
)


def test_gaussian_matrix_is_deterministic():
    a = random_gaussian_matrix(4, 2, np.random.default_rng(5))
    b = random_gaussian_matrix(4, 2, np.random.default_rng(5))
    assert a.shape == (4, 2)
    assert np.array_equal(a, b)


def test_gaussian_batch_prefix_matches_smaller_draw():
    big = random_gaussian_matrix(4, 2, np.random.default_rng(1), batch=(10,))
    small = random_gaussian_matrix(4, 2, np.random.default_rng(1), batch=(3,))
    assert np.array_equal(big[:3], small)


def test_gaussian_moments():
    h = random_gaussian_matrix(1, 1, np.random.default_rng(0), batch=(100_000,))[:, 0, 0]
    assert abs(h.mean()) < 0.02
    assert abs(np.mean(np.abs(h) ** 2) - 1.0) < 0.02
    # circular symmetry: equal power in real and imaginary parts, uncorrelated
    assert abs(np.var(h.real) - 0.5) < 0.01
    assert abs(np.mean(h.real * h.imag)) < 0.01


def test_trial_streams_differ_by_key():
    a = trial_stream(3, 0, 1).standard_normal(4)
    b = trial_stream(3, 0, 2).standard_normal(4)
    assert not np.allclose(a, b)
    assert np.array_equal(a, trial_stream(3, 0, 1).standard_normal(4))


def test_eigen_identity():
    eig = hermitian_eigen(np.eye(3))
    np.testing.assert_allclose(eig.eigenvalues, [1, 1, 1])


def test_eigen_diagonal():
    eig = hermitian_eigen(np.diag([1.0, 3.0]).astype(complex))
    np.testing.assert_allclose(eig.eigenvalues, [3, 1])
    np.testing.assert_allclose(np.abs(eig.eigenvectors), [[0, 1], [1, 0]], atol=1e-12)


def _char_poly_eigs_2x2(a):
    # roots of x^2 - tr(a) x + det(a)
    t = np.trace(a).real
    d = (a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]).real
    disc = np.sqrt(max(t * t / 4 - d, 0.0))
    return np.array([t / 2 + disc, t / 2 - disc])


def test_rank_deficient_gram_against_char_poly(rng):
    g = random_gaussian_matrix(2, 1, rng)
    a = g @ herm(g)
    np.testing.assert_allclose(hermitian_eigen(a).eigenvalues, _char_poly_eigs_2x2(a), atol=1e-12)


def test_rank_two_gram_has_two_positive_eigenvalues(rng):
    for _ in range(20):
        g = random_gaussian_matrix(4, 2, rng)
        w = hermitian_eigen(g @ herm(g)).eigenvalues
        assert np.count_nonzero(w > 1e-9) == 2


@pytest.mark.parametrize("n", [2, 4, 6])
def test_eigen_reconstruction_and_order(rng, n):
    for _ in range(100):
        x = random_gaussian_matrix(n, n, rng)
        a = x + herm(x)
        w, v = hermitian_eigen(a)
        assert np.all(np.diff(w) <= 0)
        assert np.linalg.norm(herm(v) @ v - np.eye(n)) < 1e-9
        rec = v @ np.diag(w) @ herm(v)
        assert np.linalg.norm(rec - a) / np.linalg.norm(a) < 1e-8


def test_eigen_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotHermitian):
        hermitian_eigen(np.ones((2, 3)))


def test_eigen_batched(rng):
    x = random_gaussian_matrix(3, 3, rng, batch=(5,))
    w, v = hermitian_eigen(x + herm(x))
    assert w.shape == (5, 3) and v.shape == (5, 3, 3)
    assert np.all(np.diff(w, axis=-1) <= 0)


def test_orthonormal_basis_of_semi_orthonormal_input(rng):
    q, _ = np.linalg.qr(random_gaussian_matrix(4, 2, rng))
    g = orthonormal_basis(q)
    np.testing.assert_allclose(g @ herm(g), q @ herm(q), atol=1e-10)


def test_orthonormal_basis_scale_invariant(rng):
    h = random_gaussian_matrix(4, 2, rng)
    a, b = orthonormal_basis(h), orthonormal_basis(5 * h)
    np.testing.assert_allclose(a @ herm(a), b @ herm(b), atol=1e-10)


def test_orthonormal_basis_matches_eigen_basis(rng):
    h = random_gaussian_matrix(4, 2, rng)
    eig_basis = hermitian_eigen(h @ herm(h)).eigenvectors[:, :2]
    assert chordal_distance_sq(orthonormal_basis(h), eig_basis) < 1e-9


@pytest.mark.parametrize("cols", [1, 2, 3])
def test_orthonormal_basis_properties(rng, cols):
    for _ in range(100):
        h = random_gaussian_matrix(2 * cols, cols, rng)
        g = orthonormal_basis(h)
        assert np.linalg.norm(herm(g) @ g - np.eye(cols)) < 1e-10
        proj_h = h @ np.linalg.solve(herm(h) @ h, herm(h))
        assert np.linalg.norm(g @ herm(g) - proj_h) < 1e-9


def test_orthonormal_basis_rank_deficient():
    h = np.array([[1, 2], [2, 4], [0, 0], [3, 6]], dtype=complex)
    with pytest.raises(RankDeficient):
        orthonormal_basis(h)
    with pytest.raises(RankDeficient):
        orthonormal_basis(np.zeros((2, 1), dtype=complex))
