"""Feature extraction from the transposed representation, outlier detection
on corruption energies, and a nearest-neighbor scorer.

Two projection strategies: tfrr1 keeps P = Z (features stay d-dimensional),
tfrr2 takes an orthonormal basis of the learned rank-m column space, giving
m-dimensional features y = P^T x.
"""

import json
import os
import warnings
from dataclasses import dataclass, asdict

import numpy as np
from scipy.spatial.distance import cdist

from .linalg import as_matrix, thin_qr
from .solver import SolverConfig, solve_tfrr
from . import matrix_io

__all__ = [
    "Extractor",
    "fit",
    "transform",
    "detect_outliers",
    "energy_gap_midpoint",
    "nn_classify",
    "save_extractor",
    "load_extractor",
]

_STRATEGIES = ("tfrr1", "tfrr2")


@dataclass(frozen=True)
class Extractor:
    strategy: str
    P: np.ndarray
    E: np.ndarray
    config: SolverConfig
    mean: np.ndarray | None = None  # set when fitted with centering


def fit(X_train, config, strategy, center=False):
    """Fit an Extractor on the columns of X_train.

    tfrr1 stores the full representation P = Z; tfrr2 stores an orthonormal
    basis of range(L R), which can come out with fewer than m columns when
    the learned product is rank deficient (a warning is issued).  center=True
    subtracts the training column mean before fitting and at transform time.
    """
    if strategy not in _STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {_STRATEGIES}")
    X_train = as_matrix(X_train, "X_train")
    mean = None
    if center:
        mean = X_train.mean(axis=1, keepdims=True)
        X_train = X_train - mean
    sol = solve_tfrr(X_train, config)
    if strategy == "tfrr1":
        P = sol.Z
    else:
        P = thin_qr(sol.L @ sol.R)
        if isinstance(config, dict):
            config = SolverConfig(**config)
        if P.shape[1] < config.m:
            warnings.warn(
                f"rank of L R is {P.shape[1]} < m = {config.m}; basis has fewer columns",
                stacklevel=2,
            )
    if isinstance(config, dict):
        config = SolverConfig(**config)
    return Extractor(strategy=strategy, P=P, E=sol.E, config=config, mean=mean)


def transform(ex, x):
    """Map a sample (length-d vector) or matrix of column samples to features.

    tfrr1 returns Z x (length d); tfrr2 returns P^T x (length m).
    """
    x = np.asarray(x, dtype=np.float64)
    vector = x.ndim == 1
    cols = x[:, None] if vector else x
    d = ex.P.shape[0]
    if cols.shape[0] != d:
        raise ValueError(f"sample dimension {cols.shape[0]} does not match extractor ({d})")
    if ex.mean is not None:
        cols = cols - ex.mean
    if ex.strategy == "tfrr1":
        out = ex.P @ cols
    else:
        out = ex.P.T @ cols
    return out[:, 0] if vector else out


def detect_outliers(E, gamma):
    """Flag columns of E whose l2 energy reaches gamma."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    E = np.asarray(E, dtype=np.float64)
    return np.linalg.norm(E, axis=0) >= gamma


def energy_gap_midpoint(energies, count):
    """Threshold halfway across the gap below the count largest energies.

    Useful when the number of corrupted columns is known and the energies
    split cleanly; detect_outliers at this gamma flags exactly the top count.
    """
    energies = np.sort(np.asarray(energies, dtype=np.float64))[::-1]
    if not 1 <= count < energies.size:
        raise ValueError(f"count={count} outside [1, {energies.size - 1}]")
    return float(0.5 * (energies[count - 1] + energies[count]))


def nn_classify(gallery, gallery_labels, probes):
    """Label each probe column by its nearest gallery column (Euclidean).

    Distance ties resolve to the lowest gallery index.
    """
    gallery = as_matrix(gallery, "gallery")
    probes = np.asarray(probes, dtype=np.float64)
    vector = probes.ndim == 1
    if vector:
        probes = probes[:, None]
    gallery_labels = np.asarray(gallery_labels, dtype=np.int64)
    if gallery_labels.shape[0] != gallery.shape[1]:
        raise ValueError("one label per gallery column required")
    if gallery.shape[1] == 0:
        raise ValueError("gallery is empty")
    if probes.shape[0] != gallery.shape[0]:
        raise ValueError(
            f"probe dimension {probes.shape[0]} does not match gallery ({gallery.shape[0]})"
        )
    dists = cdist(probes.T, gallery.T)
    nearest = dists.argmin(axis=1)  # argmin takes the first minimum: lowest index wins ties
    labels = gallery_labels[nearest]
    return labels[0] if vector else labels


def save_extractor(ex, directory):
    """Write an Extractor as matrix files plus a JSON metadata echo."""
    os.makedirs(directory, exist_ok=True)
    matrix_io.write_matrix(ex.P, os.path.join(directory, "P.frrm"))
    matrix_io.write_matrix(ex.E, os.path.join(directory, "E.frrm"))
    meta = {
        "strategy": ex.strategy,
        "centered": ex.mean is not None,
        "config": asdict(ex.config),
    }
    if ex.mean is not None:
        matrix_io.write_matrix(ex.mean, os.path.join(directory, "mean.frrm"))
    with open(os.path.join(directory, "extractor.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_extractor(directory):
    with open(os.path.join(directory, "extractor.json")) as fh:
        meta = json.load(fh)
    P = matrix_io.read_matrix(os.path.join(directory, "P.frrm"))
    E = matrix_io.read_matrix(os.path.join(directory, "E.frrm"))
    mean = None
    if meta.get("centered"):
        mean = matrix_io.read_matrix(os.path.join(directory, "mean.frrm"))
    return Extractor(
        strategy=meta["strategy"],
        P=P,
        E=E,
        config=SolverConfig(**meta["config"]),
        mean=mean,
    )
