"""Benchmark driver: run each method over the same stream and score it."""
from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .baselines import MergeReduceTree, jl_project, uniform_coreset
from .coreset import WeightedCoreset
from .dataio import read_dense_csv, read_sparse_triplets
from .errors import ConfigError
from .metrics import direction_error, svd_error
from .sampler import SamplerConfig
from .streaming import StreamingCoreset
from .synthetic import KINDS, gen_synthetic

log = logging.getLogger(__name__)

METHODS = ("streaming", "mr-sensitivity", "mr-uniform", "uniform")
CSV_HEADER = ["method", "size", "svd_error", "dir_error", "seconds"]


@dataclass
class RunConfig:
    epsilon: float = 0.5
    delta: float = 0.1
    d: Optional[int] = None
    m_override: Optional[int] = None
    seed: int = 0
    inputs: list = field(default_factory=list)
    input_format: str = "synthetic"
    synthetic_kind: str = "skewed"
    n: int = 2000
    source_dim: Optional[int] = None
    methods: list = field(default_factory=lambda: list(METHODS))
    k: Optional[int] = None
    trials: int = 100
    repetitions: int = 10
    size: Optional[int] = None
    leaf_size: Optional[int] = None
    output: Optional[str] = None
    timing: bool = True

    def validate(self) -> "RunConfig":
        if self.input_format not in ("synthetic", "dense", "sparse"):
            raise ConfigError(f"unknown input format {self.input_format!r}")
        if self.input_format == "synthetic":
            if self.synthetic_kind not in KINDS:
                raise ConfigError(f"unknown synthetic kind {self.synthetic_kind!r}")
            if self.d is None or self.n < 1:
                raise ConfigError("synthetic input needs d and n >= 1")
        elif not self.inputs:
            raise ConfigError("no input paths given")
        if self.input_format == "sparse" and (self.source_dim is None or self.d is None):
            raise ConfigError("sparse input needs source_dim and target d")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ConfigError(f"unknown methods {bad}; choose from {METHODS}")
        if self.trials < 1 or self.repetitions < 1:
            raise ConfigError("trials and repetitions must be >= 1")
        for name in ("size", "leaf_size", "m_override"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigError(f"{name} must be positive")
        # checks epsilon/delta ranges
        SamplerConfig(self.epsilon, self.delta, self.d or 2, self.m_override)
        return self


@dataclass(frozen=True)
class ErrorReport:
    method: str
    size: float
    svd_error: float
    dir_error: float
    seconds: Optional[float]

    def csv_row(self) -> list:
        secs = "" if self.seconds is None else repr(self.seconds)
        return [self.method, repr(self.size), repr(self.svd_error), repr(self.dir_error), secs]


def load_rows(cfg: RunConfig):
    """The input stream described by ``cfg`` (a fresh iterator per call)."""
    if cfg.input_format == "synthetic":
        return gen_synthetic(cfg.synthetic_kind, cfg.n, cfg.d, cfg.seed)

    def chain():
        for path in cfg.inputs:
            if cfg.input_format == "dense":
                yield from read_dense_csv(path)
            else:
                yield from jl_project(
                    read_sparse_triplets(path, cfg.source_dim), cfg.source_dim, cfg.d, cfg.seed
                )

    return chain()


def build_coreset(method: str, A: np.ndarray, scfg: SamplerConfig, size: int, leaf: int, seed) -> WeightedCoreset:
    if method == "streaming":
        sc = StreamingCoreset(scfg, seed=seed, record_stats=False)
        return sc.extend(A)
    if method in ("mr-sensitivity", "mr-uniform"):
        tree = MergeReduceTree(leaf, method.split("-", 1)[1], seed=seed, dim=A.shape[1])
        return tree.extend(A).result()
    return uniform_coreset(A, min(size, A.shape[0]), seed)


def _rep_seed(seed: int, rep: int, method: str) -> int:
    ss = np.random.SeedSequence([seed, rep, METHODS.index(method)])
    return int(ss.generate_state(1)[0])


def run_benchmark(cfg: RunConfig) -> list[ErrorReport]:
    cfg.validate()
    A = np.vstack(list(load_rows(cfg)))
    n, d = A.shape
    if cfg.d is not None and cfg.d != d:
        raise ConfigError(f"data has dimension {d}, config says {cfg.d}")
    k = cfg.k if cfg.k is not None else d - 1
    scfg = SamplerConfig(cfg.epsilon, cfg.delta, d, cfg.m_override)
    size = cfg.size or scfg.m
    leaf = cfg.leaf_size or size
    log.info("n=%d d=%d k=%d m=%d size=%d leaf=%d", n, d, k, scfg.m, size, leaf)

    reports = []
    fh = writer = None
    if cfg.output:
        fh = open(cfg.output, "w", newline="")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        fh.flush()
        sidecar = dict(asdict(cfg), resolved={"n": n, "d": d, "k": k, "m": scfg.m, "size": size, "leaf_size": leaf})
        with open(cfg.output + ".json", "w") as js:
            json.dump(sidecar, js, indent=2, sort_keys=True)
            js.write("\n")
    try:
        for method in cfg.methods:
            sizes, svd_errs, dir_errs, secs = [], [], [], []
            for rep in range(cfg.repetitions):
                rs = _rep_seed(cfg.seed, rep, method)
                t0 = time.perf_counter()
                c = build_coreset(method, A, scfg, size, leaf, rs)
                secs.append(time.perf_counter() - t0)
                sizes.append(c.size)
                svd_errs.append(svd_error(A, c, k))
                dir_errs.append(direction_error(A, c, cfg.trials, [cfg.seed, rep]))
            rep_ = ErrorReport(
                method,
                float(np.mean(sizes)),
                float(np.mean(svd_errs)),
                float(np.mean(dir_errs)),
                float(np.mean(secs)) if cfg.timing else None,
            )
            reports.append(rep_)
            if writer is not None:
                writer.writerow(rep_.csv_row())
                fh.flush()
    finally:
        if fh is not None:
            fh.close()
    return reports
