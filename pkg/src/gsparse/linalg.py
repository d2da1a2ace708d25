"""Dense linear algebra substrate: SPD solves and kernel (null space) bases.

All functions are pure and operate on plain float64 ndarrays; inputs are
validated for finiteness at the boundary.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotPositiveDefinite, RankDeficient

#: Relative tolerance on singular values for numerical-rank decisions.
RANK_RTOL = 1e-12

#: Relative symmetry tolerance accepted by solve_spd.
SYMMETRY_RTOL = 1e-12


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def as_vector(v, name: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def solve_spd(M, b, jitter: float = 0.0) -> np.ndarray:
    """Solve M x = b for symmetric positive definite M via Cholesky.

    Never forms an inverse.  One step of iterative refinement keeps the
    relative residual ||Mx - b|| / (1 + ||b||) at working precision.  When the
    factorization fails and ``jitter`` > 0, a single retry on M + jitter*I
    is attempted; a second failure raises NotPositiveDefinite.
    """
    M = as_matrix(M, "M")
    b = as_vector(b, "b")
    n = M.shape[0]
    if M.shape[1] != n or b.shape[0] != n:
        raise DimensionMismatch(f"M is {M.shape}, b has length {b.shape[0]}")
    scale = np.max(np.abs(M))
    if np.max(np.abs(M - M.T)) > SYMMETRY_RTOL * max(scale, 1.0):
        raise ValueError("M is not symmetric within tolerance")
    try:
        factor = scipy.linalg.cho_factor(M, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError:
        if jitter > 0.0:
            try:
                factor = scipy.linalg.cho_factor(
                    M + jitter * np.eye(n), lower=True, check_finite=False
                )
            except scipy.linalg.LinAlgError as exc:
                raise NotPositiveDefinite(
                    f"Cholesky failed even with jitter {jitter:g}"
                ) from exc
        else:
            raise NotPositiveDefinite("Cholesky factorization hit a non-positive pivot")
    x = scipy.linalg.cho_solve(factor, b, check_finite=False)
    x += scipy.linalg.cho_solve(factor, b - M @ x, check_finite=False)
    return x


def kernel_basis(A) -> np.ndarray:
    """Orthonormal basis of {x : Ax = 0} for full-row-rank A (m <= n).

    Uses the QR factorization of A^T; the trailing n - m columns of Q span
    the kernel.  Raises RankDeficient when the smallest singular value falls
    below RANK_RTOL times the largest.
    """
    A = as_matrix(A, "A")
    m, n = A.shape
    if m > n:
        raise DimensionMismatch(f"A is {m}x{n}; full row rank requires m <= n")
    s = scipy.linalg.svdvals(A)
    if s[0] == 0.0 or s[-1] < RANK_RTOL * s[0]:
        raise RankDeficient(
            f"numerical rank below {m} (smallest/largest singular value = "
            f"{s[-1]:.3e}/{s[0]:.3e})"
        )
    Q, _ = scipy.linalg.qr(A.T, mode="full")
    return Q[:, m:]
