"""Comparison methods: merge-and-reduce tree, uniform sampling, JL projection."""
from __future__ import annotations

from typing import Callable, Iterable, Iterator, Optional

import numpy as np

from .coreset import WeightedCoreset
from .errors import ConfigError, DimensionError
from .linalg import as_row
from .offline import as_matrix, exact_sensitivities, sample_coreset

# (indices, rows, weights, target size, rng) -> (indices, rows, weights)
Reducer = Callable[[np.ndarray, np.ndarray, np.ndarray, int, np.random.Generator], tuple]


def sensitivity_reducer(idx, rows, weights, size, rng):
    """Sensitivity-sample ``size`` draws from a weighted block."""
    scaled = np.sqrt(weights)[:, None] * rows
    prof = exact_sensitivities(scaled)
    if prof.rank == 0:
        return idx[:0], rows[:0], weights[:0]
    c = sample_coreset(rows, prof, size, rng, weights=weights)
    return idx[c.indices], c.rows, np.asarray(c.weights)


def uniform_reducer(idx, rows, weights, size, rng):
    """Keep ``size`` rows uniformly without replacement, rescaling by n/size."""
    n = rows.shape[0]
    if size >= n:
        return idx, rows, weights
    pick = np.sort(rng.choice(n, size=size, replace=False))
    return idx[pick], rows[pick], weights[pick] * (n / size)


REDUCERS = {"sensitivity": sensitivity_reducer, "uniform": uniform_reducer}


class MergeReduceTree:
    """Streaming merge-and-reduce over leaf blocks of ``leaf_size`` rows.

    Incoming rows fill a level-0 buffer. A full buffer becomes a block that is
    carried upward: whenever a level already holds a block, the two are
    concatenated (at most ``2 * leaf_size`` rows) and reduced to
    ``leaf_size`` rows for the next level. Weights compose multiplicatively.
    """

    def __init__(self, leaf_size: int, reducer="sensitivity", seed=0, dim: Optional[int] = None):
        if leaf_size < 1:
            raise ConfigError("leaf_size must be positive")
        self.leaf_size = int(leaf_size)
        self.reducer_name = reducer if isinstance(reducer, str) else getattr(reducer, "__name__", "custom")
        self.reducer: Reducer = REDUCERS[reducer] if isinstance(reducer, str) else reducer
        self.rng = np.random.default_rng(seed)
        self.dim = dim
        self.levels: list[Optional[tuple]] = []
        self._buf_idx: list[int] = []
        self._buf_rows: list[np.ndarray] = []
        self.n = 0
        self.reductions = 0
        self.peak_rows = 0

    @property
    def buffer_capacity(self) -> int:
        return 2 * self.leaf_size

    def push(self, row) -> "MergeReduceTree":
        row = as_row(row, self.dim)
        if self.dim is None:
            self.dim = row.shape[0]
        self._buf_idx.append(self.n)
        self._buf_rows.append(row)
        self.n += 1
        if len(self._buf_rows) == self.leaf_size:
            block = (
                np.array(self._buf_idx, dtype=np.int64),
                np.vstack(self._buf_rows),
                np.ones(self.leaf_size),
            )
            self._buf_idx, self._buf_rows = [], []
            self._carry(block)
        self.peak_rows = max(self.peak_rows, self.stored_rows)
        return self

    def extend(self, rows: Iterable) -> "MergeReduceTree":
        for r in rows:
            self.push(r)
        return self

    def _carry(self, block):
        level = 0
        while True:
            if level == len(self.levels):
                self.levels.append(None)
            resident = self.levels[level]
            if resident is None:
                self.levels[level] = block
                return
            self.levels[level] = None
            merged = tuple(np.concatenate([x, y]) for x, y in zip(resident, block))
            block = self.reducer(*merged, self.leaf_size, self.rng)
            self.reductions += 1
            level += 1

    @property
    def stored_rows(self) -> int:
        return len(self._buf_rows) + sum(b[0].shape[0] for b in self.levels if b is not None)

    @property
    def occupied_levels(self) -> int:
        return sum(b is not None for b in self.levels)

    def result(self) -> WeightedCoreset:
        """Union of the partial buffer and every resident block."""
        if self.n == 0:
            raise ConfigError("merge-reduce tree is empty")
        parts = [b for b in reversed(self.levels) if b is not None]
        if self._buf_rows:
            k = len(self._buf_rows)
            parts.append((np.array(self._buf_idx, dtype=np.int64), np.vstack(self._buf_rows), np.ones(k)))
        if not parts:
            return WeightedCoreset.empty(self.dim)
        idx, rows, w = (np.concatenate(col) for col in zip(*parts))
        order = np.argsort(idx, kind="stable")
        return WeightedCoreset(
            idx[order], rows[order], w[order],
            extra={"leaf_size": self.leaf_size, "levels": self.occupied_levels},
        )


def mr_push(tree: MergeReduceTree, row) -> MergeReduceTree:
    return tree.push(row)


def mr_result(tree: MergeReduceTree) -> WeightedCoreset:
    return tree.result()


def uniform_coreset(A, m: int, rng) -> WeightedCoreset:
    """``m`` rows without replacement, each weighted ``n / m``."""
    A = as_matrix(A)
    n = A.shape[0]
    if not 1 <= m <= n:
        raise ConfigError(f"need 1 <= m <= n, got m={m}, n={n}")
    rng = np.random.default_rng(rng)
    idx = np.sort(rng.choice(n, size=m, replace=False))
    return WeightedCoreset(idx.astype(np.int64), A[idx].copy(), np.full(m, n / m))


class JLProjector:
    """Maps sparse ``D``-dim rows to dense ``d``-dim rows via ``x^T R``.

    ``R`` has i.i.d. N(0, 1/d) entries and is generated lazily in blocks of
    ``block`` rows, each block seeded from ``(seed, block number)``, so only
    blocks touched by the input are ever materialized.
    """

    def __init__(self, source_dim: int, target_dim: int, seed: int = 0, block: int = 1024):
        if not 1 <= target_dim <= source_dim:
            raise ConfigError(f"need 1 <= d <= D, got d={target_dim}, D={source_dim}")
        self.D, self.d, self.seed, self.block = source_dim, target_dim, seed, block
        self._blocks: dict[int, np.ndarray] = {}

    def _block(self, b: int) -> np.ndarray:
        blk = self._blocks.get(b)
        if blk is None:
            rows = min(self.block, self.D - b * self.block)
            rng = np.random.default_rng([self.seed, b])
            blk = rng.standard_normal((rows, self.d)) / np.sqrt(self.d)
            self._blocks[b] = blk
        return blk

    def rows_of_R(self, cols: np.ndarray) -> np.ndarray:
        out = np.empty((cols.shape[0], self.d))
        bidx = cols // self.block
        for b in np.unique(bidx):
            sel = bidx == b
            out[sel] = self._block(int(b))[cols[sel] - b * self.block]
        return out

    def project(self, x) -> np.ndarray:
        if x.dim != self.D:
            raise DimensionError(f"sparse row has dim {x.dim}, projector expects {self.D}")
        if x.nnz == 0:
            return np.zeros(self.d)
        if x.indices[-1] >= self.D or x.indices[0] < 0:
            raise DimensionError("sparse index out of range")
        return x.values @ self.rows_of_R(x.indices)


def jl_project(rows: Iterable, D: int, d: int, seed: int = 0) -> Iterator[np.ndarray]:
    proj = JLProjector(D, d, seed)
    for x in rows:
        yield proj.project(x)
