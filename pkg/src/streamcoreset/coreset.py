"""Weighted row subsets and their cost against hyperplanes through the origin."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

UNIT_TOL = 1e-9


@dataclass(frozen=True)
class WeightedCoreset:
    """Distinct input rows with positive weights.

    ``rows[j]`` is a bit-identical copy of input row ``indices[j]``. Weights
    multiply squared distances, so the matrix form scales rows by ``sqrt(w)``.
    """

    indices: np.ndarray
    rows: np.ndarray
    weights: np.ndarray
    rank_at_emit: int = 0
    singleton_count: int = 0
    m: Optional[int] = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for arr in (self.indices, self.rows, self.weights):
            arr.setflags(write=False)

    @classmethod
    def empty(cls, d: int, **kw) -> "WeightedCoreset":
        return cls(np.zeros(0, dtype=np.int64), np.zeros((0, d)), np.zeros(0), **kw)

    @classmethod
    def identity(cls, A) -> "WeightedCoreset":
        """All rows of ``A`` with weight one."""
        A = np.array(A, dtype=np.float64, ndmin=2)
        return cls(np.arange(A.shape[0], dtype=np.int64), A, np.ones(A.shape[0]))

    @property
    def meets_size_bound(self) -> bool:
        return self.m is not None and self.singleton_count >= self.m

    @property
    def size(self) -> int:
        return int(self.indices.shape[0])

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])

    def __len__(self):
        return self.size

    def items(self):
        for i, a, w in zip(self.indices, self.rows, self.weights):
            yield int(i), a, float(w)

    def matrix(self) -> np.ndarray:
        return np.sqrt(self.weights)[:, None] * self.rows

    def cost(self, x) -> float:
        return coreset_cost(self, x)


def check_unit(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    norm = np.linalg.norm(x)
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValueError(f"direction must be a unit vector, norm is {norm!r}")
    return x


def coreset_cost(c: WeightedCoreset, x) -> float:
    """Weighted sum of squared distances to the hyperplane with unit normal ``x``."""
    x = check_unit(x)
    if c.size == 0:
        return 0.0
    proj = c.rows @ x
    return float(np.dot(c.weights, proj * proj))
