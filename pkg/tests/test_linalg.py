import numpy as np
import pytest

from gsparse.errors import NotPositiveDefinite, RankDeficient
from gsparse.linalg import kernel_basis, solve_spd

from conftest import random_spd


def test_solve_identity():
    x = solve_spd(np.eye(3), np.array([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(x, [1.0, 2.0, 3.0], rtol=0, atol=1e-14)


def test_solve_diagonal():
    x = solve_spd(np.diag([2.0, 4.0]), np.array([2.0, 4.0]))
    np.testing.assert_allclose(x, [1.0, 1.0], rtol=0, atol=1e-14)


def test_solve_random_spd_residual(rng):
    # the residual bound is the oracle: no reference solution needed
    for _ in range(20):
        M = random_spd(rng, 5)
        b = rng.standard_normal(5)
        x = solve_spd(M, b)
        assert np.linalg.norm(M @ x - b) <= 1e-10 * (1.0 + np.linalg.norm(b))


def test_solve_rejects_asymmetric():
    M = np.array([[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(ValueError):
        solve_spd(M, np.ones(2))


def test_solve_not_positive_definite():
    M = np.array([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(NotPositiveDefinite):
        solve_spd(M, np.ones(2))


def test_solve_jitter_retry():
    M = np.array([[1.0, 0.0], [0.0, -1e-14]])
    x = solve_spd(M, np.array([1.0, 0.0]), jitter=1e-6)
    assert np.isfinite(x).all()


def test_kernel_one_dim():
    basis = kernel_basis(np.array([[1.0, 1.0]]))
    assert basis.shape == (2, 1)
    direction = np.array([1.0, -1.0]) / np.sqrt(2.0)
    assert abs(abs(basis[:, 0] @ direction) - 1.0) < 1e-12


def test_kernel_hand_checked():
    basis = kernel_basis(np.array([[1.0, 2.0]]))
    direction = np.array([2.0, -1.0]) / np.sqrt(5.0)
    assert abs(abs(basis[:, 0] @ direction) - 1.0) < 1e-12
    assert abs(np.array([[1.0, 2.0]]) @ basis[:, 0]) < 1e-10


def test_kernel_random_gaussian(rng):
    A = rng.standard_normal((3, 6))
    basis = kernel_basis(A)
    assert basis.shape == (6, 3)
    np.testing.assert_allclose(basis.T @ basis, np.eye(3), atol=1e-10)
    assert np.max(np.abs(A @ basis)) <= 1e-10


def test_kernel_rank_deficient():
    A = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])
    with pytest.raises(RankDeficient):
        kernel_basis(A)


def test_kernel_square_full_rank_is_trivial():
    basis = kernel_basis(np.eye(3))
    assert basis.shape == (3, 0)
