"""Nondeterministic stochastic activity networks.

Build a network from :mod:`ndsan.model` types (or load one with
:func:`ndsan.netspec.parse_network`), simulate its completion time with
:func:`ndsan.sampler.run_batch`, summarize it with :mod:`ndsan.stats`, and,
for series-parallel reducible networks, compute the exact grid law with
:func:`ndsan.numeric.analyze`.
"""

from .distributions import Constant, Exponential, Triangular, TruncatedNormal, Uniform
from .model import (
    Acyclic,
    Decision,
    Loop,
    Trivial,
    ValidationReport,
    activity_count,
    is_series_parallel_reducible,
    series,
    validate,
)
from .numeric import DiscretizedDistribution, analyze
from .rng import RngStream
from .sampler import SampleBatch, critical_path, draw, run_batch, sample
from .stats import (
    EmpiricalDistribution,
    KsPlan,
    approximate_density,
    confidence_band,
    critical_value,
    ecdf,
    histogram,
    ks_statistic,
    plan_sample_size,
)

__version__ = "0.1.0"

__all__ = [
    "Acyclic",
    "Constant",
    "Decision",
    "DiscretizedDistribution",
    "EmpiricalDistribution",
    "Exponential",
    "KsPlan",
    "Loop",
    "RngStream",
    "SampleBatch",
    "Triangular",
    "Trivial",
    "TruncatedNormal",
    "Uniform",
    "ValidationReport",
    "activity_count",
    "analyze",
    "approximate_density",
    "confidence_band",
    "critical_path",
    "critical_value",
    "draw",
    "ecdf",
    "histogram",
    "is_series_parallel_reducible",
    "ks_statistic",
    "plan_sample_size",
    "run_batch",
    "sample",
    "series",
    "validate",
]
