"""Dense linear-algebra primitives: compact SVD, thin QR, pseudoinverse,
matrix norms, and best rank-m truncation.

Everything operates on dense float64 numpy arrays and is deterministic for
fixed inputs.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NonFiniteError, RankTooLargeError

__all__ = [
    "SvdFactors",
    "as_matrix",
    "compact_svd",
    "thin_qr",
    "pinv",
    "matrix_norm",
    "best_rank_m_factors",
]


def as_matrix(A, name="matrix"):
    """Coerce to a 2-d float64 array and reject empty or non-finite input."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={A.ndim}")
    if A.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.isfinite(A).all():
        raise NonFiniteError(f"{name} contains NaN or Inf")
    return A


@dataclass(frozen=True)
class SvdFactors:
    """Compact SVD: U (d x r), sigma (r, positive, non-increasing), V (n x r)."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    rank: int


def compact_svd(A, rank_tol=0.0):
    """Compact SVD of A keeping only singular values above the rank cutoff.

    rank_tol = 0 selects the default cutoff max(d, n) * eps * sigma_1;
    otherwise the cutoff is rank_tol * sigma_1.  Columns of U are sign-fixed
    so the largest-magnitude entry of each is nonnegative, which makes the
    factorization reproducible.
    """
    A = as_matrix(A)
    if rank_tol < 0:
        raise ValueError("rank_tol must be nonnegative")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        r = 0
    else:
        cutoff = max(A.shape) * np.finfo(np.float64).eps * s[0] if rank_tol == 0.0 else rank_tol * s[0]
        r = int(np.count_nonzero(s > cutoff))
    U, s, V = U[:, :r], s[:r], Vt[:r].T
    if r:
        # sign convention: largest-|entry| of each U column made nonnegative
        picks = np.abs(U).argmax(axis=0)
        signs = np.sign(U[picks, np.arange(r)])
        signs[signs == 0] = 1.0
        U = U * signs
        V = V * signs
    return SvdFactors(U=U, sigma=s, V=V, rank=r)


def thin_qr(A):
    """Orthonormal basis of range(A) via rank-revealing pivoted QR.

    Returns Q with one column per numerically independent direction; a zero
    matrix yields Q with zero columns.
    """
    A = as_matrix(A)
    Q, R, _ = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return Q[:, :0]
    tol = max(A.shape) * np.finfo(np.float64).eps * diag[0]
    q = int(np.count_nonzero(diag > tol))
    return Q[:, :q]


def pinv(A):
    """Moore-Penrose pseudoinverse via the compact SVD."""
    f = compact_svd(A)
    if f.rank == 0:
        return np.zeros((A.shape[1], A.shape[0]))
    return (f.V / f.sigma) @ f.U.T


_NORMS = ("frobenius", "nuclear", "spectral", "l1", "linf", "l21")


def matrix_norm(A, kind):
    """Matrix norm of the requested kind.

    frobenius and spectral are the usual ones; nuclear is the sum of singular
    values; l1 is the sum of absolute entries; linf is the max absolute entry
    (the norm used in the solver's stopping rule); l21 is the sum of column
    l2 norms.
    """
    A = as_matrix(A)
    if kind == "frobenius":
        return float(np.linalg.norm(A))
    if kind == "nuclear":
        return float(np.linalg.svd(A, compute_uv=False).sum())
    if kind == "spectral":
        s = np.linalg.svd(A, compute_uv=False)
        return float(s[0]) if s.size else 0.0
    if kind == "l1":
        return float(np.abs(A).sum())
    if kind == "linf":
        return float(np.abs(A).max())
    if kind == "l21":
        return float(np.linalg.norm(A, axis=0).sum())
    raise ValueError(f"unknown norm kind {kind!r}; expected one of {_NORMS}")


def best_rank_m_factors(Z, m):
    """Factors (L, R) of the best rank-m Frobenius approximation of Z.

    L is (rows x m), R is (m x cols), and L @ R is the truncated SVD of Z, so
    ||Z - L R||_F^2 equals the sum of squared singular values beyond index m.
    """
    Z = as_matrix(Z)
    if not 1 <= m <= min(Z.shape):
        raise RankTooLargeError(f"m={m} outside [1, {min(Z.shape)}] for shape {Z.shape}")
    U, s, Vt = np.linalg.svd(Z, full_matrices=False)
    L = U[:, :m] * s[:m]
    R = Vt[:m]
    return L, R
