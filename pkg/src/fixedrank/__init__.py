"""Fixed-rank representation toolkit.

Low-rank self-expressive models for subspace clustering and robust feature
extraction: closed-form noiseless solutions, an alternating-direction solver
with column-sparse corruption handling, spectral clustering utilities,
synthetic data generation, and matrix serialization.
"""

from .closed_form import (
    ClosedFormSolution,
    frr_closed_form,
    pca_basis,
    sim_solution,
    tfrr_closed_form,
)
from .errors import (
    BadMagicError,
    BadVersionError,
    FormatError,
    NonFiniteError,
    ParseError,
    RankTooLargeError,
    SingularSystemError,
    TruncatedFileError,
)
from .features import (
    Extractor,
    detect_outliers,
    energy_gap_midpoint,
    fit,
    load_extractor,
    nn_classify,
    save_extractor,
    transform,
)
from .linalg import SvdFactors, best_rank_m_factors, compact_svd, matrix_norm, pinv, thin_qr
from .matrix_io import read_labels, read_matrix, write_labels, write_matrix
from .solver import Solution, SolverConfig, diagnostics, prox_l21, solve_frr, solve_tfrr
from .spectral import build_affinity, clustering_accuracy, ncut
from .synth import SyntheticData, SyntheticSpec, generate, inject_outliers

__version__ = "0.1.0"

__all__ = [
    "BadMagicError",
    "BadVersionError",
    "ClosedFormSolution",
    "Extractor",
    "FormatError",
    "NonFiniteError",
    "ParseError",
    "RankTooLargeError",
    "SingularSystemError",
    "Solution",
    "SolverConfig",
    "SvdFactors",
    "SyntheticData",
    "SyntheticSpec",
    "TruncatedFileError",
    "best_rank_m_factors",
    "build_affinity",
    "clustering_accuracy",
    "compact_svd",
    "detect_outliers",
    "diagnostics",
    "energy_gap_midpoint",
    "fit",
    "frr_closed_form",
    "generate",
    "inject_outliers",
    "load_extractor",
    "matrix_norm",
    "ncut",
    "nn_classify",
    "pca_basis",
    "pinv",
    "prox_l21",
    "read_labels",
    "read_matrix",
    "save_extractor",
    "sim_solution",
    "solve_frr",
    "solve_tfrr",
    "thin_qr",
    "tfrr_closed_form",
    "transform",
    "write_labels",
    "write_matrix",
    "__version__",
]
