"""Synthetic independent-subspace data and outlier injection.

generate() draws k subspaces of dimension d_l inside R^{d_h}: the first basis
is a random orthonormal frame and each subsequent one is a fixed random
rotation of the previous, with p points per subspace sampled as nonnegative
combinations of the basis columns.
"""

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = ["SyntheticSpec", "SyntheticData", "generate", "inject_outliers"]


@dataclass(frozen=True)
class SyntheticSpec:
    k: int
    p: int
    d_h: int
    d_l: int
    seed: int = 0

    def validate(self):
        for name in ("k", "p", "d_h", "d_l"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.d_l > self.d_h:
            raise ValueError("d_l cannot exceed d_h")
        if self.k * self.d_l > self.d_h:
            warnings.warn(
                f"k*d_l = {self.k * self.d_l} exceeds d_h = {self.d_h}; "
                "subspaces cannot be independent",
                stacklevel=2,
            )


@dataclass(frozen=True)
class SyntheticData:
    X: np.ndarray
    truth: np.ndarray
    bases: list


def _haar_rotation(dim, rng):
    # QR of a Gaussian with sign-fixed R diagonal is Haar on O(dim);
    # flipping one column lands it in SO(dim)
    Q, R = np.linalg.qr(rng.standard_normal((dim, dim)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def generate(spec):
    """Draw a SyntheticData sample for the given spec."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    U, _ = np.linalg.qr(rng.standard_normal((spec.d_h, spec.d_l)))
    T = _haar_rotation(spec.d_h, rng)
    bases = [U]
    for _ in range(spec.k - 1):
        bases.append(T @ bases[-1])
    blocks = []
    for i in range(spec.k):
        C = rng.uniform(0.0, 1.0, size=(spec.d_l, spec.p))
        blocks.append(bases[i] @ C)
    X = np.hstack(blocks)
    truth = np.repeat(np.arange(spec.k), spec.p)
    return SyntheticData(X=X, truth=truth, bases=bases)


def inject_outliers(X, count, magnitude, seed):
    """Append count columns of i.i.d. uniform [0, magnitude] entries to X.

    Returns the widened matrix and a boolean mask marking the appended
    columns.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[1]
    if not 0 <= count <= n:
        raise ValueError(f"count={count} outside [0, {n}]")
    if magnitude < 0:
        raise ValueError("magnitude must be nonnegative")
    mask = np.zeros(n + count, dtype=bool)
    if count == 0:
        return X.copy(), mask
    rng = np.random.default_rng(seed)
    extra = rng.uniform(0.0, magnitude, size=(X.shape[0], count))
    mask[n:] = True
    return np.hstack([X, extra]), mask
