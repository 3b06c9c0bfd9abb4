"""Closed-form noiseless solutions.

For noiseless data the fixed-rank problems have exact solutions built from
the SVD of X: the shape-interaction projector V V^T, its best rank-m
factorization, the transposed variant U U^T, and the PCA basis.
"""

from dataclasses import dataclass

import numpy as np

from .errors import RankTooLargeError
from .linalg import as_matrix, compact_svd

__all__ = [
    "ClosedFormSolution",
    "sim_solution",
    "frr_closed_form",
    "tfrr_closed_form",
    "pca_basis",
]


@dataclass(frozen=True)
class ClosedFormSolution:
    Z: np.ndarray
    L: np.ndarray
    R: np.ndarray
    objective: float
    rank_x: int


def _checked_svd(X, m):
    f = compact_svd(X)
    if f.rank == 0:
        raise ValueError("input matrix is zero")
    if m is not None and not 1 <= m <= f.rank:
        raise RankTooLargeError(f"m={m} outside [1, rank={f.rank}]")
    return f


def sim_solution(X):
    """Shape-interaction projector Z = V V^T onto the row space of X.

    The minimal feasible representation for noiseless X: X Z = X, Z symmetric
    idempotent.  Degenerates to the identity when X has full column rank.
    """
    f = _checked_svd(as_matrix(X), None)
    return f.V @ f.V.T


def frr_closed_form(X, m):
    """Global optimum of the noiseless fixed-rank representation problem.

    Z = V V^T, L = first m columns of V, R = L^T.  The objective
    ||Z - L R||_F^2 equals rank(X) - m.
    """
    X = as_matrix(X)
    f = _checked_svd(X, m)
    Z = f.V @ f.V.T
    L = f.V[:, :m].copy()
    R = L.T.copy()
    objective = float(np.linalg.norm(Z - L @ R) ** 2)
    return ClosedFormSolution(Z=Z, L=L, R=R, objective=objective, rank_x=f.rank)


def tfrr_closed_form(X, m):
    """Transposed variant: Z = U U^T recovers the column space (Z X = X)."""
    X = as_matrix(X)
    f = _checked_svd(X, m)
    Z = f.U @ f.U.T
    L = f.U[:, :m].copy()
    R = L.T.copy()
    objective = float(np.linalg.norm(Z - L @ R) ** 2)
    return ClosedFormSolution(Z=Z, L=L, R=R, objective=objective, rank_x=f.rank)


def pca_basis(X, m):
    """Orthonormal d x m basis minimizing ||X - P P^T X||_F^2 (no centering)."""
    X = as_matrix(X)
    f = _checked_svd(X, m)
    return f.U[:, :m].copy()
