"""Alternating-direction solver for the robust fixed-rank problems.

solve_frr minimizes  ||Z - L R||_F^2 + mu * ||E||_{2,1}
subject to            X = X Z + E   (and optionally 1^T Z = 1^T),

with rank(L R) <= m, by cycling L, R, Z, E updates under an augmented
Lagrangian with multipliers (Lambda, Pi) and an increasing penalty beta.
solve_tfrr solves the transposed problem X = Z X + E the same way.

The stopping rule is feasibility of both constraints; the objective is not
monitored for termination.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .errors import NonFiniteError, RankTooLargeError, SingularSystemError
from .linalg import as_matrix

__all__ = ["SolverConfig", "Solution", "prox_l21", "solve_frr", "solve_tfrr", "diagnostics"]


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters for the alternating-direction solver.

    m is the target rank of L R.  mu weights the column-sparse corruption
    term.  beta0/beta_max bound the penalty schedule beta <- min(beta_max,
    rho * beta); when left as None they default to 0.1 / sigma1(X)^2 and
    1e10 / sigma1(X)^2, which keeps the first iterations in the regime where
    the rank objective still steers Z regardless of the data's scale.
    eps1/eps2 are the feasibility tolerances of the stopping rule.
    """

    m: int
    mu: float = 0.5
    beta0: float | None = None
    beta_max: float | None = None
    rho: float = 1.9
    eps1: float = 1e-6
    eps2: float = 1e-6
    max_iter: int = 1000
    seed: int = 0
    normalize_columns: bool = True

    def validate(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.beta0 is not None and self.beta0 <= 0:
            raise ValueError("beta0 must be positive")
        if self.rho <= 1:
            raise ValueError("rho must exceed 1")
        if self.eps1 <= 0 or self.eps2 <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.beta0 is not None and self.beta_max is not None and self.beta_max < self.beta0:
            raise ValueError("beta_max must be >= beta0")


@dataclass(frozen=True)
class Solution:
    Z: np.ndarray
    L: np.ndarray
    R: np.ndarray
    E: np.ndarray
    lam: np.ndarray
    pi: np.ndarray | None
    iterations: int
    primal_residual: float
    norm_residual: float
    objective: float
    converged: bool


def prox_l21(C, tau):
    """Column-wise shrinkage: the minimizer of tau*||E||_{2,1} + 0.5*||C - E||_F^2.

    Columns with l2 norm below tau collapse to zero; the rest shrink toward
    the origin by tau.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    C = np.asarray(C, dtype=np.float64)
    if tau == 0:
        return C.copy()
    norms = np.linalg.norm(C, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    scale = np.where(norms > tau, 1.0 - tau / safe, 0.0)
    return C * scale


def _orth_basis(A, m, rng):
    """Q with exactly m orthonormal columns spanning range(A).

    If A is rank deficient the basis is padded with random directions
    orthogonalized against what is already there, so L keeps m columns.
    """
    import scipy.linalg

    Q, Rf, _ = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(Rf))
    if diag.size == 0 or diag[0] == 0.0:
        q = 0
    else:
        tol = max(A.shape) * np.finfo(np.float64).eps * diag[0]
        q = int(np.count_nonzero(diag > tol))
    Q = Q[:, :q]
    if q < m:
        extra = rng.standard_normal((A.shape[0], m - q))
        if q:
            extra -= Q @ (Q.T @ extra)
        Qe, _ = np.linalg.qr(extra)
        Q = np.hstack([Q, Qe[:, : m - q]])
    return Q


def _objective(Z, L, R, E, mu, row_groups=False):
    # the l2,1 term sums column norms, or row norms in the transposed frame
    penalty = np.linalg.norm(E, axis=1 if row_groups else 0).sum()
    return float(np.linalg.norm(Z - L @ R) ** 2 + mu * penalty)


def _solve_core(X, config, prox_rows, trace):
    d, n = X.shape
    if config.m > n:
        raise RankTooLargeError(f"m={config.m} exceeds the number of columns n={n}")
    normalize = config.normalize_columns
    rng = np.random.default_rng(config.seed)
    m, mu = config.m, config.mu

    # penalty schedule; auto defaults are scale-invariant in the data
    sigma1_sq = float(np.linalg.norm(X, 2) ** 2)
    scale = sigma1_sq if sigma1_sq > 0 else 1.0
    beta = config.beta0 if config.beta0 is not None else 0.1 / scale
    beta_max = config.beta_max if config.beta_max is not None else 1e10 / scale
    if beta_max < beta:
        raise ValueError("resolved beta_max is below beta0")

    Z = np.zeros((n, n))
    E = np.zeros((d, n))
    Lam = np.zeros((d, n))
    Pi = np.zeros((1, n)) if normalize else None
    Q0, _ = np.linalg.qr(rng.standard_normal((n, m)))
    R = Q0.T
    L = Z @ R.T

    XtX = X.T @ X
    ones_n = np.ones((n, n))
    ones_row = np.ones((1, n))
    guard = 1e12 * max(np.linalg.norm(X), 1.0)

    factor = None
    factor_beta = None
    pres = nres = np.inf
    it = 0
    converged = False
    for it in range(1, config.max_iter + 1):
        # (a) factor update: L R becomes the projection of Z onto range(Z R^T)
        Q = _orth_basis(Z @ R.T, m, rng)
        L = Q
        R = Q.T @ Z

        # (b) Z update: SPD solve, factorization reused while beta is unchanged
        if factor_beta != beta:
            M = 2.0 * np.eye(n) + beta * XtX
            if normalize:
                M += beta * ones_n
            try:
                factor = cho_factor(M)
            except LinAlgError as exc:
                raise SingularSystemError(f"system matrix failed to factor at beta={beta}") from exc
            factor_beta = beta
        B = 2.0 * (L @ R) + beta * (XtX - X.T @ (E - Lam / beta))
        if normalize:
            B += beta * ones_n - np.ones((n, 1)) @ Pi
        Z = cho_solve(factor, B)

        # (c) corruption update via the l2,1 prox (on rows for the transposed problem)
        C = X - X @ Z + Lam / beta
        tau = mu / beta
        E = prox_l21(C.T, tau).T if prox_rows else prox_l21(C, tau)

        # (d) multiplier ascent
        primal = X - X @ Z - E
        Lam = Lam + beta * primal
        pres = float(np.abs(primal).max())
        if normalize:
            nr = ones_row @ Z - ones_row
            Pi = Pi + beta * nr
            nres = float(np.abs(nr).max())
        else:
            nres = 0.0

        if not (np.isfinite(Z).all() and np.isfinite(E).all()):
            raise NonFiniteError(f"solver diverged at iteration {it}")
        if np.linalg.norm(Z) > guard or np.linalg.norm(E) > guard:
            raise NonFiniteError(f"iterate norm exceeded divergence guard at iteration {it}")

        if trace is not None:
            obj = _objective(Z, L, R, E, mu, row_groups=prox_rows)
            trace.write(f"{it},{beta:.17g},{obj:.17g},{pres:.17g},{nres:.17g}\n")

        # (e) penalty growth
        beta = min(beta_max, config.rho * beta)

        if pres <= config.eps1 and (not normalize or nres <= config.eps2):
            converged = True
            break

    return Solution(
        Z=Z,
        L=L,
        R=R,
        E=E,
        lam=Lam,
        pi=Pi,
        iterations=it,
        primal_residual=pres,
        norm_residual=nres,
        objective=_objective(Z, L, R, E, mu, row_groups=prox_rows),
        converged=converged,
    )


def _run(X, config, prox_rows, trace_path):
    if isinstance(config, dict):
        config = SolverConfig(**config)
    config.validate()
    X = as_matrix(X, "X")
    if trace_path is None:
        return _solve_core(X, config, prox_rows, None)
    with open(trace_path, "w") as fh:
        return _solve_core(X, config, prox_rows, fh)


def solve_frr(X, config, trace_path=None):
    """Robust fixed-rank representation of the columns of X.

    Returns a Solution with Z (n x n), factors L (n x m) and R (m x n),
    corruption E (d x n), and multipliers.  converged=False means the
    feasibility tolerances were not met within max_iter; that is reported,
    not raised.  trace_path, when given, receives one comma-separated line
    per iteration: iter,beta,objective,primal_residual,norm_residual.
    """
    return _run(X, config, prox_rows=False, trace_path=trace_path)


def solve_tfrr(X, config, trace_path=None):
    """Robust transposed representation: X = Z X + E with Z of size d x d.

    Implemented by solving the column problem on X^T and transposing the
    result.  The l2,1 penalty is kept on the columns of the d x n corruption
    E (one weight per sample), which in the transposed frame means penalizing
    rows; the column-sum constraint does not apply and normalize_columns is
    ignored.
    """
    if isinstance(config, dict):
        config = SolverConfig(**config)
    tconfig = replace(config, normalize_columns=False)
    tconfig.validate()
    X = as_matrix(X, "X")
    sol = _run(X.T, tconfig, prox_rows=True, trace_path=trace_path)
    return Solution(
        Z=sol.Z.T,
        L=sol.R.T,
        R=sol.L.T,
        E=sol.E.T,
        lam=sol.lam.T,
        pi=None,
        iterations=sol.iterations,
        primal_residual=sol.primal_residual,
        norm_residual=sol.norm_residual,
        objective=sol.objective,
        converged=sol.converged,
    )


def diagnostics(X, sol, config):
    """Recompute reported quantities from the solution matrices alone.

    Returns a dict with the objective, both residuals, and per-column
    corruption energies ||E_i||_2.  The constraint orientation is inferred
    from the shape of Z: n x n means X = X Z + E, d x d means X = Z X + E
    (square X is read as the former).
    """
    if isinstance(config, dict):
        config = SolverConfig(**config)
    X = as_matrix(X, "X")
    d, n = X.shape
    Z, E = sol.Z, sol.E
    if E.shape != (d, n):
        raise ValueError(f"E has shape {E.shape}, expected {(d, n)}")
    if Z.shape == (n, n):
        residual = X - X @ Z - E
        norm_res = float(np.abs(np.ones((1, n)) @ Z - 1.0).max()) if config.normalize_columns else 0.0
    elif Z.shape == (d, d):
        residual = X - Z @ X - E
        norm_res = 0.0
    else:
        raise ValueError(f"Z has shape {Z.shape}, expected {(n, n)} or {(d, d)}")
    return {
        "objective": _objective(Z, sol.L, sol.R, E, config.mu),
        "primal_residual": float(np.abs(residual).max()),
        "norm_residual": norm_res,
        "e_column_energies": np.linalg.norm(E, axis=0),
    }
