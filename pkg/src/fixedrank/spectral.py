"""Affinity construction, normalized-cut spectral clustering, and scoring."""

import numpy as np
from scipy.optimize import linear_sum_assignment

from .linalg import as_matrix

__all__ = ["build_affinity", "ncut", "clustering_accuracy"]


def build_affinity(M):
    """Symmetric nonnegative affinity |M| + |M^T| from a square representation."""
    M = as_matrix(M, "M")
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"representation must be square, got {M.shape}")
    return np.abs(M) + np.abs(M.T)


def _kmeans(points, k, rng, restarts=20, max_iter=300):
    """Seeded k-means with k-means++ initialization.

    Hand-rolled so results are bit-reproducible for a given generator state;
    best labels over the restarts by inertia, earliest restart wins ties.
    """
    n = points.shape[0]
    best_labels = None
    best_inertia = np.inf
    for _ in range(restarts):
        centers = np.empty((k, points.shape[1]))
        centers[0] = points[rng.integers(n)]
        d2 = ((points - centers[0]) ** 2).sum(axis=1)
        for j in range(1, k):
            total = d2.sum()
            if total > 0:
                idx = rng.choice(n, p=d2 / total)
            else:
                idx = rng.integers(n)
            centers[j] = points[idx]
            d2 = np.minimum(d2, ((points - centers[j]) ** 2).sum(axis=1))
        labels = None
        for _ in range(max_iter):
            dists = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = dists.argmin(axis=1)
            if labels is not None and np.array_equal(new_labels, labels):
                break
            labels = new_labels
            for j in range(k):
                members = points[labels == j]
                if len(members):
                    centers[j] = members.mean(axis=0)
        inertia = float(((points - centers[labels]) ** 2).sum())
        if inertia < best_inertia:
            best_inertia = inertia
            best_labels = labels.copy()
    return best_labels


def ncut(A, k, seed):
    """Normalized spectral clustering of a symmetric nonnegative affinity.

    Embeds with the k smallest eigenvectors of the symmetric normalized
    Laplacian, row-normalizes, and runs seeded k-means (20 restarts).
    Zero-degree vertices get an all-zero embedding row and join whichever
    centroid is nearest.
    """
    A = as_matrix(A, "A")
    n = A.shape[0]
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"affinity must be square, got {A.shape}")
    if (A < 0).any():
        raise ValueError("affinity must be entrywise nonnegative")
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside [1, {n}]")
    deg = A.sum(axis=1)
    if not (deg > 0).any():
        raise ValueError("affinity graph has no edges")
    inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
    lap = np.eye(n) - inv_sqrt[:, None] * A * inv_sqrt[None, :]
    _, vecs = np.linalg.eigh(lap)
    emb = vecs[:, :k]
    row_norms = np.linalg.norm(emb, axis=1, keepdims=True)
    emb = emb / np.where(row_norms > 0, row_norms, 1.0)
    rng = np.random.default_rng(seed)
    return _kmeans(emb, k, rng)


def clustering_accuracy(pred, truth):
    """Best-permutation agreement rate between two labelings.

    Builds the contingency matrix and solves the assignment problem, so the
    score is invariant to how either side names its clusters.
    """
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError(f"label vectors must match, got {pred.shape} and {truth.shape}")
    if pred.size == 0:
        raise ValueError("empty label vectors")
    k = int(max(pred.max(), truth.max())) + 1
    w = np.zeros((k, k))
    np.add.at(w, (pred, truth), 1.0)
    rows, cols = linear_sum_assignment(w.max() - w)
    return float(w[rows, cols].sum() / pred.size)
