"""One-pass coreset maintenance over an unbounded row stream."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .coreset import WeightedCoreset
from .linalg import DEFAULT_RANK_TOL, GramMatrix, SensitivityOracle, as_row, build_oracle
from .sampler import SamplerConfig, SamplerPool


@dataclass(frozen=True)
class StepStats:
    n: int
    rank: int
    singleton_count: int
    stored_entries: int
    stored_rows: int
    millis: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "r_n": self.rank,
            "singleton_count": self.singleton_count,
            "stored_entries": self.stored_entries,
            "stored_rows": self.stored_rows,
            "millis": self.millis,
        }


class StreamingCoreset:
    """Maintains a weighted-subset coreset of every prefix of a row stream.

    Each :meth:`step` updates the Gram matrix, feeds the row to every sampler,
    rebuilds the sensitivity oracle and prunes the samplers. The coreset is the
    set of rows held by singleton samplers; a row held by ``c`` of the ``|G|``
    singletons gets weight ``c * r / (|G| * s)``.

    Example
    -------
    >>> sc = StreamingCoreset(SamplerConfig(0.5, 0.1, d=2, m_override=4), seed=1)
    >>> c = sc.step([3.0, 4.0])
    >>> c.rank_at_emit
    1
    """

    def __init__(
        self,
        cfg: SamplerConfig,
        seed: int = 0,
        tau_rank: float = DEFAULT_RANK_TOL,
        recheck_all: bool = True,
        record_stats: bool = True,
    ):
        self.cfg = cfg
        self.seed = seed
        self.tau_rank = tau_rank
        self.gram = GramMatrix(cfg.d)
        self.pool = SamplerPool(cfg, seed=seed, recheck_all=recheck_all)
        self.oracle: SensitivityOracle = build_oracle(self.gram, tau_rank)
        self.record_stats = record_stats
        self.stats: list[StepStats] = []
        self._coreset: Optional[WeightedCoreset] = None

    @property
    def n(self) -> int:
        return self.gram.rows_seen

    @property
    def rank(self) -> int:
        return self.oracle.rank

    def push(self, a) -> None:
        """Process one row without materializing the coreset."""
        t0 = time.perf_counter()
        a = as_row(a, self.cfg.d)
        self.gram.update(a)
        self.pool.ingest(self.n - 1, a)
        self.oracle = build_oracle(self.gram, self.tau_rank)
        self.pool.prune(self.oracle)
        self._coreset = None
        if self.record_stats:
            self.stats.append(
                StepStats(
                    n=self.n,
                    rank=self.oracle.rank,
                    singleton_count=self.pool.singleton_count(),
                    stored_entries=self.pool.stored_entries,
                    stored_rows=self.pool.stored_rows,
                    millis=(time.perf_counter() - t0) * 1e3,
                )
            )

    def step(self, a) -> WeightedCoreset:
        self.push(a)
        return self.coreset()

    def extend(self, rows: Iterable) -> WeightedCoreset:
        for a in rows:
            self.push(a)
        return self.coreset()

    def coreset(self) -> WeightedCoreset:
        """The coreset for the rows seen so far (cached until the next row)."""
        if self._coreset is None:
            self._coreset = self._emit()
        return self._coreset

    finalize = coreset

    def _emit(self) -> WeightedCoreset:
        m = self.cfg.m
        held = self.pool.singletons()
        g = held.shape[0]
        r = self.oracle.rank
        if g == 0:
            return WeightedCoreset.empty(self.cfg.d, rank_at_emit=r, singleton_count=0, m=m)
        idx, mult = np.unique(held, return_counts=True)
        rows, sens, _ = self.pool.lookup(idx)
        weights = mult * r / (g * sens)
        return WeightedCoreset(
            indices=idx,
            rows=rows.copy(),
            weights=weights,
            rank_at_emit=r,
            singleton_count=g,
            m=m,
        )


def stream_coreset(rows: Iterable, cfg: SamplerConfig, seed: int = 0, **kw) -> WeightedCoreset:
    sc = StreamingCoreset(cfg, seed=seed, **kw)
    return sc.extend(rows)
