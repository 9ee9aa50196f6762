"""
Dense real linear algebra for latticewire

Matrices and vectors are plain float64 numpy arrays. The helpers here validate
shapes and finiteness, and wrap the LAPACK routines the schemes rely on.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from core.errors import ConvergenceFailure, DimensionMismatch, InvalidParameters, SingularMatrix

CONDITION_CAP = 1e12


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D float64 array"""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameters(f"{name} has non-finite entries")
    return arr


def as_vector(x, name="vector"):
    """Return ``x`` as a finite 1-D float64 array"""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameters(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True)
class SvdFactorization:
    """A = u @ diag(singular_values) @ v, singular values nonincreasing"""
    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray

    def reconstruct(self):
        return (self.u * self.singular_values) @ self.v


def multiply(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim not in (1, 2) or a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def condition_estimate(a):
    """1-norm condition number; inf for exactly singular input"""
    a = as_matrix(a)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return float(np.linalg.cond(a, 1))


def invert(a, condition_cap=CONDITION_CAP):
    """
    Invert a square matrix through a partial-pivot LU factorization.

    Refuses rank-deficient input and input whose 1-norm condition estimate
    exceeds ``condition_cap``.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise DimensionMismatch(f"cannot invert non-square matrix {a.shape}")

    with warnings.catch_warnings():
        warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
        try:
            lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
        except (scipy.linalg.LinAlgWarning, np.linalg.LinAlgError) as e:
            raise SingularMatrix(f"LU factorization failed: {e}") from e

    pivots = np.abs(np.diag(lu))
    scale = max(np.abs(a).max(), np.finfo(np.float64).tiny)
    if pivots.min() <= n * np.finfo(np.float64).eps * scale:
        raise SingularMatrix("zero pivot encountered; matrix is rank deficient")

    inverse = scipy.linalg.lu_solve((lu, piv), np.eye(n), check_finite=False)
    condition = np.linalg.norm(a, 1) * np.linalg.norm(inverse, 1)
    if not np.isfinite(condition) or condition > condition_cap:
        raise SingularMatrix(f"condition estimate {condition:.3g} exceeds cap {condition_cap:.3g}")
    return inverse


def solve(a, b, condition_cap=CONDITION_CAP):
    """Solve a @ x = b using the guarded inverse"""
    return multiply(invert(a, condition_cap), b)


def svd(a):
    a = as_matrix(a)
    try:
        u, s, v = np.linalg.svd(a)
    except np.linalg.LinAlgError as e:
        raise ConvergenceFailure(f"SVD did not converge: {e}") from e
    return SvdFactorization(u=u, singular_values=s, v=v)


def unitarity_deviation(a):
    """Frobenius distance of AᵗA from the identity"""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"unitarity is defined for square matrices, got {a.shape}")
    return float(np.linalg.norm(a.T @ a - np.eye(a.shape[0]), "fro"))


def offdiag_ratio(cov):
    """Off-diagonal Frobenius mass of a covariance relative to its trace"""
    cov = as_matrix(cov)
    off = cov - np.diag(np.diag(cov))
    trace = float(np.trace(cov))
    if trace <= 0:
        return 0.0
    return float(np.linalg.norm(off, "fro") / trace)


def spectral_norm_power_iteration(a, iterations=500, seed=0):
    """Largest singular value by power iteration on AᵗA"""
    a = as_matrix(a)
    x = np.random.default_rng(seed).standard_normal(a.shape[1])
    x /= np.linalg.norm(x)
    estimate = 0.0
    for _ in range(iterations):
        y = a.T @ (a @ x)
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0
        x = y / norm
        estimate = np.sqrt(norm)
    return float(estimate)
