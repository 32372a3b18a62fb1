"""Weighted-subset coresets for SVD over row streams."""
from .coreset import WeightedCoreset, coreset_cost
from .errors import ConfigError, CoresetError, DimensionError, InputFormatError, NumericalError
from .linalg import (
    GramMatrix,
    SensitivityOracle,
    ThinSVD,
    build_oracle,
    gram_update,
    sensitivity,
    thin_svd_psd,
    total_sensitivity_check,
)
from .offline import SensitivityProfile, exact_sensitivities, required_m, sample_coreset
from .sampler import SamplerConfig, SamplerEntry, SamplerPool, pool_init, pool_ingest, pool_prune, singletons
from .streaming import StepStats, StreamingCoreset, stream_coreset

__version__ = "0.1.0"
