"""Gram-matrix accumulation and the sensitivity oracle.

The oracle is built from the d x d Gram matrix alone: with ``G = V diag(lam) V^T``
(rank r after thresholding) we take ``Z = V diag(1/sqrt(lam))``, a right inverse
of ``diag(sqrt(lam)) V^T``. For any row ``a`` of the accumulated matrix ``A``,
``||Z^T a||^2`` is the squared norm of the matching row of ``U`` in a thin SVD of
``A``, i.e. its sensitivity (leverage score).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NumericalError

DEFAULT_RANK_TOL = 1e-12


def as_row(a, dim=None) -> np.ndarray:
    """Validate a dense row: 1-d, finite, and (optionally) of length ``dim``."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1:
        raise DimensionError(f"expected a 1-d row, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionError(f"row has dimension {a.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("row contains non-finite entries")
    return a


class GramMatrix:
    """Running ``A^T A`` over rows seen so far.

    Rank-one updates use ``np.outer(a, a)``, which is bitwise symmetric because
    floating-point multiplication commutes, so symmetry holds exactly.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise DimensionError("dimension must be positive")
        self.dim = int(dim)
        self.entries = np.zeros((self.dim, self.dim))
        self.rows_seen = 0

    @classmethod
    def from_rows(cls, rows) -> "GramMatrix":
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        g = cls(rows.shape[1])
        for a in rows:
            g.update(a)
        return g

    def update(self, a) -> "GramMatrix":
        a = as_row(a, self.dim)
        self.entries += np.outer(a, a)
        self.rows_seen += 1
        return self

    def copy(self) -> "GramMatrix":
        g = GramMatrix(self.dim)
        g.entries = self.entries.copy()
        g.rows_seen = self.rows_seen
        return g


def gram_update(g: GramMatrix, a) -> GramMatrix:
    return g.update(a)


@dataclass(frozen=True)
class ThinSVD:
    """Eigenpairs of a PSD matrix above the rank threshold, largest first."""

    V: np.ndarray
    Lambda: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.Lambda.shape[0])


def thin_svd_psd(g, tau_rank: float = DEFAULT_RANK_TOL) -> ThinSVD:
    """Thin SVD of a symmetric PSD matrix.

    For symmetric PSD input the left and right singular vectors coincide with
    the eigenvectors, so a symmetric eigensolver is enough. Eigenvalues
    ``<= tau_rank * lambda_max`` count as zero.
    """
    mat = g.entries if isinstance(g, GramMatrix) else np.asarray(g, dtype=np.float64)
    d = mat.shape[0]
    try:
        lam, vecs = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(lam)[::-1]
    lam, vecs = lam[order], vecs[:, order]
    lam_max = lam[0] if d else 0.0
    if not lam_max > 0:
        return ThinSVD(np.zeros((d, 0)), np.zeros(0))
    keep = lam > tau_rank * lam_max
    return ThinSVD(vecs[:, keep], lam[keep])


@dataclass(frozen=True)
class SensitivityOracle:
    """Maps a row to its sensitivity w.r.t. the rows that built the Gram matrix."""

    Z: np.ndarray
    svd: ThinSVD
    version: int = 0
    _ZT: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.Z.setflags(write=False)
        object.__setattr__(self, "_ZT", np.ascontiguousarray(self.Z.T))

    @property
    def rank(self) -> int:
        return self.svd.rank

    @property
    def dim(self) -> int:
        return self.Z.shape[0]

    def __call__(self, a) -> float:
        return sensitivity(self, a)

    def many(self, rows) -> np.ndarray:
        """Sensitivities of the rows of a 2-d array, clamped to [0, 1]."""
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != self.dim:
            raise DimensionError(f"expected (k, {self.dim}) rows, got {rows.shape}")
        if self.rank == 0:
            return np.zeros(rows.shape[0])
        proj = rows @ self.Z
        return np.clip(np.einsum("ij,ij->i", proj, proj), 0.0, 1.0)


def build_oracle(g, tau_rank: float = DEFAULT_RANK_TOL) -> SensitivityOracle:
    svd = thin_svd_psd(g, tau_rank)
    Z = svd.V / np.sqrt(svd.Lambda)
    version = g.rows_seen if isinstance(g, GramMatrix) else 0
    return SensitivityOracle(Z=Z, svd=svd, version=version)


def sensitivity(z: SensitivityOracle, a) -> float:
    a = np.asarray(a, dtype=np.float64)
    if a.shape != (z.dim,):
        raise DimensionError(f"row has shape {a.shape}, expected ({z.dim},)")
    if z.rank == 0:
        return 0.0
    p = z._ZT @ a
    return float(min(max(p @ p, 0.0), 1.0))


def total_sensitivity_check(z: SensitivityOracle, rows) -> float:
    """Sum of sensitivities over ``rows``; equals ``z.rank`` for the generating prefix."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if rows.size == 0:
        return 0.0
    return float(z.many(rows).sum())
