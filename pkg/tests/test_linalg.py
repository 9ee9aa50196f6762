import math

import numpy as np
import pytest

from core.errors import DimensionMismatch, SingularMatrix
from core.linalg import (
    condition_estimate,
    invert,
    multiply,
    offdiag_ratio,
    solve,
    spectral_norm_power_iteration,
    svd,
    unitarity_deviation,
)


def test_multiply_identity_and_hand_arithmetic(rng):
    a = rng.standard_normal((2, 3))
    assert np.array_equal(multiply(np.eye(2), a), a)
    assert np.array_equal(multiply([[1, 2], [3, 4]], [[1], [1]]), [[3], [7]])


def test_multiply_transpose_identity(rng):
    a, b = rng.standard_normal((5, 5)), rng.standard_normal((5, 5))
    assert np.allclose(multiply(a, b).T, multiply(b.T, a.T), atol=1e-12)


def test_multiply_is_associative(rng):
    a, b, c = (rng.standard_normal((4, 4)) for _ in range(3))
    assert np.allclose(multiply(multiply(a, b), c), multiply(a, multiply(b, c)), atol=1e-10)


def test_double_inverse_recovers_matrix(rng):
    a = rng.standard_normal((6, 6))
    assert np.allclose(invert(invert(a)), a, atol=1e-8)


def test_multiply_rejects_mismatched_shapes():
    with pytest.raises(DimensionMismatch):
        multiply(np.ones((2, 3)), np.ones((2, 3)))


def test_invert_closed_forms():
    assert np.array_equal(invert(np.eye(3)), np.eye(3))
    assert np.allclose(invert(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))


def test_invert_random_residual(rng):
    a = rng.standard_normal((8, 8))
    assert np.allclose(a @ invert(a), np.eye(8), atol=1e-8)


@pytest.mark.parametrize("matrix", [
    [[1.0, 2.0], [2.0, 4.0]],
    [[0.0, 0.0], [0.0, 0.0]],
])
def test_invert_rejects_singular(matrix):
    with pytest.raises(SingularMatrix):
        invert(matrix)


def test_invert_enforces_condition_cap():
    a = np.diag([1.0, 1e-7])
    assert np.allclose(invert(a), np.diag([1.0, 1e7]))
    with pytest.raises(SingularMatrix):
        invert(a, condition_cap=1e6)


def test_invert_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        invert(np.ones((2, 3)))


def test_solve_matches_numpy(rng):
    a, b = rng.standard_normal((4, 4)), rng.standard_normal(4)
    assert np.allclose(solve(a, b), np.linalg.solve(a, b))


def test_condition_estimate_of_identity():
    assert condition_estimate(np.eye(4)) == pytest.approx(1.0)


def test_svd_diagonal_and_orthogonal(rng):
    assert np.allclose(svd(np.diag([3.0, 1.0])).singular_values, [3.0, 1.0])
    q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    assert np.allclose(svd(q).singular_values, 1.0, atol=1e-9)


def test_svd_reconstructs_with_sorted_values(rng):
    a = rng.standard_normal((6, 6))
    f = svd(a)
    assert np.allclose(f.reconstruct(), a, atol=1e-10)
    assert np.all(np.diff(f.singular_values) <= 0)
    assert np.allclose(f.u.T @ f.u, np.eye(6), atol=1e-10)


def test_largest_singular_value_matches_power_iteration(rng):
    a = rng.standard_normal((6, 6))
    assert svd(a).singular_values[0] == pytest.approx(spectral_norm_power_iteration(a), abs=1e-6)


def test_unitarity_deviation_closed_forms():
    assert unitarity_deviation(np.eye(3)) == 0.0
    assert unitarity_deviation(2 * np.eye(2)) == pytest.approx(3 * math.sqrt(2))


def test_unitarity_deviation_of_random_channel_ratio():
    rng = np.random.default_rng(7)
    passing = 0
    for _ in range(1000):
        g, h = rng.standard_normal((8, 8)), rng.standard_normal((8, 8))
        try:
            passing += unitarity_deviation(g @ invert(h)) > 0.1
        except SingularMatrix:
            pass
    assert passing >= 990


def test_offdiag_ratio():
    assert offdiag_ratio(np.diag([1.0, 2.0])) == 0.0
    assert offdiag_ratio([[1.0, 1.0], [1.0, 1.0]]) == pytest.approx(math.sqrt(2) / 2)
