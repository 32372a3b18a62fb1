"""Error metrics comparing a weighted coreset to the data it summarizes."""
from __future__ import annotations

import numpy as np

from .coreset import WeightedCoreset
from .errors import ConfigError, NumericalError
from .offline import as_matrix

ZERO_COST = 1e-12


def top_right_singular(M: np.ndarray, k: int) -> np.ndarray:
    """Top-``k`` right singular vectors as the rows of a (k, d) matrix."""
    d = M.shape[1]
    if M.shape[0] == 0:
        return np.zeros((0, d))
    try:
        _, _, Vt = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc
    return Vt[:k]


def projection_residual(A: np.ndarray, Vt: np.ndarray) -> float:
    """``||A - A V^T V||_F^2`` for orthonormal rows ``Vt``."""
    R = A - (A @ Vt.T) @ Vt
    return float(np.sum(R * R))


def svd_error(A, c: WeightedCoreset, k: int) -> float:
    """Relative excess rank-``k`` residual when using the coreset's subspace.

    ``(||A - A Vc^T Vc||^2 - ||A - A Va^T Va||^2) / ||A - A Va^T Va||^2`` with
    squared Frobenius norms, clamped below at zero.
    """
    A = as_matrix(A)
    d = A.shape[1]
    if not 1 <= k < d:
        raise ConfigError(f"need 1 <= k < d, got k={k}, d={d}")
    sigma = np.linalg.svd(A, compute_uv=False)
    if not np.sum(sigma[k:] ** 2) > ZERO_COST * max(float(np.sum(sigma**2)), 1.0):
        raise ConfigError(f"matrix has rank <= k={k}; relative error undefined")
    # both residuals go through the same arithmetic so equal subspaces give exactly 0
    opt = projection_residual(A, top_right_singular(A, k))
    Vc = top_right_singular(c.matrix(), k)
    err = (projection_residual(A, Vc) - opt) / opt
    return max(err, 0.0)


def random_unit_vectors(trials: int, d: int, rng) -> np.ndarray:
    X = np.random.default_rng(rng).standard_normal((trials, d))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def direction_error(A, c: WeightedCoreset, trials: int, rng) -> float:
    """Worst relative cost error over ``trials`` random hyperplane normals."""
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    A = as_matrix(A)
    X = random_unit_vectors(trials, A.shape[1], rng)
    truth = np.sum((A @ X.T) ** 2, axis=0)
    approx = c.weights @ ((c.rows @ X.T) ** 2) if c.size else np.zeros(trials)
    ok = truth >= ZERO_COST
    if not ok.any():
        return 0.0
    return float(np.max(np.abs(approx[ok] - truth[ok]) / truth[ok]))
