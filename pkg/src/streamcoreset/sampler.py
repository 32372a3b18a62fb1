"""Pool of independent singleton samplers.

Each sampler ``y`` receives every row ``i`` together with a uniform draw
``u_y(i)``. After the sensitivity oracle is rebuilt, an entry survives iff
``u <= s / (s + r)``. Since thresholds never increase along the stream, an
entry that is deleted can never re-qualify, so deletion is permanent.

Entries are held in flat arrays (row position, sampler id, draw) rather than
as ``8m`` python sets, and row vectors are stored once with a reference count
equal to the number of samplers still holding them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConfigError, DimensionError
from .linalg import SensitivityOracle, as_row

MAX_POOL_SIZE = 2**31 - 1


@dataclass(frozen=True)
class SamplerConfig:
    epsilon: float
    delta: float
    d: int
    m_override: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.d < 1:
            raise ConfigError(f"dimension must be positive, got {self.d}")
        if self.m_override is not None and self.m_override < 1:
            raise ConfigError(f"m_override must be positive, got {self.m_override}")
        if 8 * self.m > MAX_POOL_SIZE:
            raise ConfigError(f"pool size 8*{self.m} overflows")

    @property
    def m(self) -> int:
        if self.m_override is not None:
            return int(self.m_override)
        return required_samples(self.d, self.epsilon, self.delta)

    @property
    def pool_size(self) -> int:
        return 8 * self.m


def required_samples(d: int, epsilon: float, delta: float) -> int:
    """``ceil(3 d eps^-2 (log2(d)^2 + ln(2/delta)))`` singletons to aim for."""
    return math.ceil(3 * d / epsilon**2 * (math.log2(d) ** 2 + math.log(2 / delta)))


class SamplerEntry(NamedTuple):
    row_index: int
    u: float


def draw_uniforms(seed: int, row_index: int, pool_size: int) -> np.ndarray:
    """Draws ``u_y(i)`` for all samplers ``y``; a pure function of (seed, i, y)."""
    return np.random.default_rng([seed, row_index]).random(pool_size)


class SamplerPool:
    """The ``8m`` samplers plus the shared, reference-counted row store.

    Per-sampler ``counts`` and ``index_sums`` make singleton lookup O(pool
    size): a sampler of size one holds exactly the row whose index is its sum.
    """

    def __init__(self, cfg: SamplerConfig, seed: int = 0, recheck_all: bool = True):
        self.cfg = cfg
        self.seed = int(seed)
        self.pool_size = cfg.pool_size
        # when False, rows whose threshold did not decrease are not re-tested;
        # equivalent because thresholds are non-increasing
        self.recheck_all = recheck_all
        self.counts = np.zeros(self.pool_size, dtype=np.int64)
        self.index_sums = np.zeros(self.pool_size, dtype=np.int64)

        d = cfg.d
        self.row_ids = np.zeros(0, dtype=np.int64)
        self.row_vecs = np.zeros((0, d))
        self.row_sens = np.zeros(0)
        self.row_thresh = np.zeros(0)
        self.refcounts = np.zeros(0, dtype=np.int64)

        self.entry_pos = np.zeros(0, dtype=np.int64)
        self.entry_sampler = np.zeros(0, dtype=np.int64)
        self.entry_u = np.zeros(0)

        self._seen: set[int] = set()
        self._last_rank = 0

    # -- ingestion / pruning --------------------------------------------------

    def ingest(self, i: int, a, u: Optional[np.ndarray] = None) -> "SamplerPool":
        """Insert row ``i`` into every sampler with a fresh uniform draw."""
        i = int(i)
        if i in self._seen:
            raise ValueError(f"row index {i} was already ingested")
        a = as_row(a, self.cfg.d)
        if u is None:
            u = draw_uniforms(self.seed, i, self.pool_size)
        elif u.shape != (self.pool_size,):
            raise DimensionError("one draw per sampler is required")
        self._seen.add(i)

        pos = self.row_ids.shape[0]
        self.row_ids = np.append(self.row_ids, i)
        self.row_vecs = np.vstack([self.row_vecs, a[None, :]])
        self.row_sens = np.append(self.row_sens, 1.0)
        self.row_thresh = np.append(self.row_thresh, np.inf)
        self.refcounts = np.append(self.refcounts, self.pool_size)

        self.entry_pos = np.concatenate([self.entry_pos, np.full(self.pool_size, pos)])
        self.entry_sampler = np.concatenate(
            [self.entry_sampler, np.arange(self.pool_size, dtype=np.int64)]
        )
        self.entry_u = np.concatenate([self.entry_u, u])
        self.counts += 1
        self.index_sums += i
        return self

    def prune(self, z: SensitivityOracle) -> "SamplerPool":
        """Delete every entry whose draw exceeds ``s / (s + r)`` under oracle ``z``."""
        r = z.rank
        if self.row_ids.size == 0:
            self._last_rank = r
            return self
        sens = z.many(self.row_vecs)
        thresh = sens / (sens + r) if r else np.zeros_like(sens)
        # s == 0 only for the zero row; below any draw, so always deleted
        thresh[sens <= 0] = -1.0

        if self.recheck_all:
            keep = self.entry_u <= thresh[self.entry_pos]
        else:
            lowered = thresh < self.row_thresh
            test = lowered[self.entry_pos]
            keep = ~test | (self.entry_u <= thresh[self.entry_pos])

        self.row_sens = sens
        self.row_thresh = np.minimum(self.row_thresh, thresh)
        self._last_rank = r

        if not keep.all():
            gone = ~keep
            gone_samplers = self.entry_sampler[gone]
            gone_pos = self.entry_pos[gone]
            np.subtract.at(self.counts, gone_samplers, 1)
            np.subtract.at(self.index_sums, gone_samplers, self.row_ids[gone_pos])
            self.entry_pos = self.entry_pos[keep]
            self.entry_sampler = self.entry_sampler[keep]
            self.entry_u = self.entry_u[keep]
            self._collect_garbage()
        return self

    def _collect_garbage(self):
        refs = np.bincount(self.entry_pos, minlength=self.row_ids.shape[0])
        live = refs > 0
        if live.all():
            self.refcounts = refs
            return
        remap = np.cumsum(live) - 1
        self.entry_pos = remap[self.entry_pos]
        self.row_ids = self.row_ids[live]
        self.row_vecs = self.row_vecs[live]
        self.row_sens = self.row_sens[live]
        self.row_thresh = self.row_thresh[live]
        self.refcounts = refs[live]

    # -- queries ---------------------------------------------------------------

    def singletons(self) -> np.ndarray:
        """Row index held by each sampler of size exactly one (with multiplicity)."""
        return self.index_sums[self.counts == 1].copy()

    def singleton_count(self) -> int:
        return int(np.count_nonzero(self.counts == 1))

    @property
    def stored_entries(self) -> int:
        """Total sampler occupancy, ``sum_y |M_y|``."""
        return int(self.entry_u.shape[0])

    @property
    def stored_rows(self) -> int:
        """Distinct rows held by at least one sampler."""
        return int(self.row_ids.shape[0])

    @property
    def rank(self) -> int:
        return self._last_rank

    def sizes(self) -> np.ndarray:
        return self.counts.copy()

    def sampler(self, y: int) -> set:
        mask = self.entry_sampler == y
        return {
            SamplerEntry(int(self.row_ids[p]), float(u))
            for p, u in zip(self.entry_pos[mask], self.entry_u[mask])
        }

    @property
    def samplers(self) -> list:
        out = [set() for _ in range(self.pool_size)]
        for p, y, u in zip(self.entry_pos, self.entry_sampler, self.entry_u):
            out[y].add(SamplerEntry(int(self.row_ids[p]), float(u)))
        return out

    @property
    def row_store(self) -> dict:
        return {int(i): v for i, v in zip(self.row_ids, self.row_vecs)}

    def refcount(self, i: int) -> int:
        hit = np.flatnonzero(self.row_ids == i)
        return int(self.refcounts[hit[0]]) if hit.size else 0

    def lookup(self, indices) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectors, sensitivities and thresholds for stored row indices."""
        order = np.argsort(self.row_ids, kind="stable")
        pos = order[np.searchsorted(self.row_ids, indices, sorter=order)]
        return self.row_vecs[pos], self.row_sens[pos], self.row_thresh[pos]


def pool_init(cfg: SamplerConfig, seed: int = 0) -> SamplerPool:
    return SamplerPool(cfg, seed=seed)


def pool_ingest(p: SamplerPool, i: int, a, u=None) -> SamplerPool:
    return p.ingest(i, a, u)


def pool_prune(p: SamplerPool, z: SensitivityOracle) -> SamplerPool:
    return p.prune(z)


def singletons(p: SamplerPool) -> np.ndarray:
    return p.singletons()
