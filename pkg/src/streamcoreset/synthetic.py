"""Seeded synthetic row streams standing in for real document-term data."""
from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from .errors import ConfigError

KINDS = ("gaussian", "skewed", "lowrank")
SPIKE_SCALE = 100.0
LOWRANK_NOISE = 1e-6


def gen_synthetic(kind: str, n: int, d: int, seed: int = 0) -> Iterator[np.ndarray]:
    """Yield ``n`` rows of dimension ``d``.

    ``gaussian``: i.i.d. N(0, I). ``skewed``: like gaussian, but ``n // 100``
    rows (at seeded random positions) are replaced by ``100 * v`` for one fixed
    unit vector ``v``. ``lowrank``: rank ``ceil(d/3)`` factor model plus 1e-6
    isotropic noise.
    """
    if kind not in KINDS:
        raise ConfigError(f"unknown synthetic kind {kind!r}; choose from {KINDS}")
    if n < 0 or d < 1:
        raise ConfigError("need n >= 0 and d >= 1")
    rng = np.random.default_rng(seed)
    if kind == "gaussian":
        for _ in range(n):
            yield rng.standard_normal(d)
    elif kind == "skewed":
        v = rng.standard_normal(d)
        v /= np.linalg.norm(v)
        spikes = set(rng.choice(n, size=n // 100, replace=False).tolist()) if n else set()
        for i in range(n):
            row = rng.standard_normal(d)
            yield SPIKE_SCALE * v if i in spikes else row
    else:
        k = math.ceil(d / 3)
        W = rng.standard_normal((k, d))
        for _ in range(n):
            yield rng.standard_normal(k) @ W + LOWRANK_NOISE * rng.standard_normal(d)


def synthetic_matrix(kind: str, n: int, d: int, seed: int = 0) -> np.ndarray:
    rows = list(gen_synthetic(kind, n, d, seed))
    return np.vstack(rows) if rows else np.zeros((0, d))
