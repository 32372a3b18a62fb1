"""RAM-model sensitivity sampling over a fully materialized matrix."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coreset import WeightedCoreset
from .errors import ConfigError, NumericalError
from .linalg import DEFAULT_RANK_TOL


@dataclass(frozen=True)
class SensitivityProfile:
    s: np.ndarray
    rank: int

    @property
    def total(self) -> float:
        return float(self.s.sum())


def as_matrix(A) -> np.ndarray:
    A = np.array(A, dtype=np.float64, ndmin=2)
    if A.ndim != 2:
        raise ConfigError(f"expected a 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")
    return A


def exact_sensitivities(A, tau_rank: float = DEFAULT_RANK_TOL) -> SensitivityProfile:
    """Squared row norms of ``U`` from a thin SVD of ``A``.

    Singular values with ``sigma^2 <= tau_rank * sigma_max^2`` are discarded, the
    same relative cut the Gram-based oracle applies to eigenvalues.
    """
    A = as_matrix(A)
    if A.shape[0] < 1:
        raise ConfigError("need at least one row")
    try:
        U, sigma, _ = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc
    if sigma.size == 0 or not sigma[0] > 0:
        return SensitivityProfile(np.zeros(A.shape[0]), 0)
    r = int(np.count_nonzero(sigma**2 > tau_rank * sigma[0] ** 2))
    s = np.einsum("ij,ij->i", U[:, :r], U[:, :r])
    return SensitivityProfile(np.clip(s, 0.0, 1.0), r)


def required_m(t: float, d: int, epsilon: float, delta: float) -> int:
    """Sample count for an epsilon-coreset w.p. 1-delta with total sensitivity ``t``."""
    if not 0 < epsilon <= 1:
        raise ConfigError(f"epsilon must lie in (0, 1], got {epsilon}")
    if not 0 < delta <= 1:
        raise ConfigError(f"delta must lie in (0, 1], got {delta}")
    if t <= 0 or d < 2:
        raise ConfigError("need t > 0 and d >= 2")
    return math.ceil(3 * t / epsilon**2 * (math.log2(d) + math.log(1 / delta)))


def sample_coreset(A, prof: SensitivityProfile, m: int, rng, weights=None) -> WeightedCoreset:
    """Draw ``m`` rows i.i.d. with probability ``s_i / t``, weight ``t / (m s_i)``.

    Repeated draws are merged by summing their weights. ``weights`` (optional)
    are prior row weights that multiply the new ones; used when reducing blocks
    that are themselves coresets.
    """
    A = as_matrix(A)
    if m < 1:
        raise ConfigError("m must be positive")
    s = prof.s
    t = float(s.sum())
    if not t > 0:
        raise NumericalError("all-zero matrix has no sampling distribution")
    rng = np.random.default_rng(rng)
    draws = rng.choice(A.shape[0], size=m, p=s / t)
    idx, mult = np.unique(draws, return_counts=True)
    w = mult * t / (m * s[idx])
    if weights is not None:
        w = w * np.asarray(weights)[idx]
    return WeightedCoreset(idx.astype(np.int64), A[idx].copy(), w, rank_at_emit=prof.rank)
