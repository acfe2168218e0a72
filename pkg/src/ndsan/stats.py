"""Empirical completion-time distributions and Kolmogorov-Smirnov tools.

Critical values come from the classical KS table for N = 10..50 and the
asymptotic ``coef / sqrt(N)`` row for larger N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats as sp_stats

from .errors import EmptySampleError, UnsupportedConfidenceError, UnsupportedEpsilonError

EPSILONS = (0.20, 0.10, 0.05, 0.01)
TABLE_N = (10, 20, 30, 40, 50)
CRITICAL_TABLE = {
    0.20: (0.32, 0.23, 0.19, 0.17, 0.15),
    0.10: (0.37, 0.26, 0.22, 0.19, 0.17),
    0.05: (0.41, 0.29, 0.24, 0.21, 0.19),
    0.01: (0.49, 0.36, 0.29, 0.25, 0.23),
}
ASYMPTOTIC_COEF = {0.20: 1.07, 0.10: 1.22, 0.05: 1.36, 0.01: 1.63}
DEFAULT_DELTA = 25


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """Step CDF ``F(x) = #{t_i <= x} / N`` of a sample."""

    sorted_times: np.ndarray

    @property
    def N(self) -> int:
        return self.sorted_times.shape[0]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.searchsorted(self.sorted_times, x, side="right") / self.N

    def quantile(self, p: float) -> float:
        """Smallest sample value ``x`` with ``F(x) >= p``."""
        if not 0 < p <= 1:
            raise ValueError("p must lie in (0, 1]")
        k = max(1, math.ceil(p * self.N - 1e-12))
        return float(self.sorted_times[k - 1])

    def jumps(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct sample values and the CDF at each of them."""
        values, counts = np.unique(self.sorted_times, return_counts=True)
        return values, np.cumsum(counts) / self.N


@dataclass(frozen=True)
class KsPlan:
    max_error: float
    confidence: float
    epsilon: float
    N: int
    critical_value: float


@dataclass(frozen=True)
class DensityEstimate:
    delta: int
    points: list
    skipped: list = field(default_factory=list)

    @property
    def abscissae(self) -> np.ndarray:
        return np.array([t for t, _ in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([f for _, f in self.points])


def ecdf(batch) -> EmpiricalDistribution:
    """Empirical CDF of a :class:`~ndsan.sampler.SampleBatch` or array of times."""
    times = getattr(batch, "times", batch)
    arr = np.sort(np.asarray(times, dtype=float).reshape(-1))
    if arr.size == 0:
        raise EmptySampleError("sample is empty")
    return EmpiricalDistribution(arr)


def ks_statistic(emp: EmpiricalDistribution, reference_cdf) -> float:
    """Sup distance between ``emp`` and a reference CDF.

    For a continuous reference this is the exact supremum
    ``max_i max(|i/N - F(t_i)|, |(i-1)/N - F(t_i)|)``.  An
    :class:`EmpiricalDistribution` reference is compared with
    :func:`ks_two_sample` instead, so a sample against itself gives 0.
    """
    if isinstance(reference_cdf, EmpiricalDistribution):
        return ks_two_sample(emp, reference_cdf)
    t = emp.sorted_times
    n = emp.N
    f = _evaluate_cdf(reference_cdf, t)
    i = np.arange(1, n + 1)
    above = np.abs(i / n - f)
    below = np.abs((i - 1) / n - f)
    return float(max(above.max(), below.max()))


def _evaluate_cdf(cdf: Callable, t: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(cdf(t), dtype=float)
        if out.shape == t.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(cdf(x)) for x in t])


def ks_two_sample(a: EmpiricalDistribution, b: EmpiricalDistribution) -> float:
    """Sup distance between two step CDFs, checked at every jump point."""
    points = np.union1d(a.sorted_times, b.sorted_times)
    return float(np.max(np.abs(a(points) - b(points))))


def _check_epsilon(epsilon: float) -> float:
    for e in EPSILONS:
        if math.isclose(epsilon, e, abs_tol=1e-9):
            return e
    raise UnsupportedEpsilonError(f"epsilon must be one of {EPSILONS}, got {epsilon}")


def critical_value(N: int, epsilon: float) -> float:
    """K such that P(K_N <= K) = 1 - epsilon.

    Tabulated rows for N in 10..50 (untabulated N use the next row below),
    ``coef / sqrt(N)`` above 50, capped at the N = 50 row so the value never
    increases with N.  Below 10 the exact KS quantile is used.
    """
    eps = _check_epsilon(epsilon)
    if N < 1:
        raise ValueError("N must be >= 1")
    row = CRITICAL_TABLE[eps]
    if N > TABLE_N[-1]:
        return min(ASYMPTOTIC_COEF[eps] / math.sqrt(N), row[-1])
    if N < TABLE_N[0]:
        return float(sp_stats.kstwo.ppf(1.0 - eps, N))
    below = max(k for k, n in enumerate(TABLE_N) if n <= N)
    return row[below]


def plan_sample_size(max_error: float, confidence: float) -> KsPlan:
    """Smallest N whose critical value at ``1 - confidence`` is <= ``max_error``."""
    if not 0 < max_error < 1:
        raise ValueError("max_error must lie in (0, 1)")
    try:
        eps = _check_epsilon(1.0 - confidence)
    except UnsupportedEpsilonError:
        raise UnsupportedConfidenceError(
            f"confidence must be one of 0.80, 0.90, 0.95, 0.99, got {confidence}"
        ) from None
    tol = 1e-12
    for n in range(1, TABLE_N[-1] + 1):
        k = critical_value(n, eps)
        if k <= max_error + tol:
            return KsPlan(max_error, confidence, eps, n, k)
    # coef / e is rounded so that e.g. 1.36 / 0.02 gives exactly 4624.
    root = round(ASYMPTOTIC_COEF[eps] / max_error, 9)
    n = max(TABLE_N[-1] + 1, math.ceil(root * root - 1e-9))
    while critical_value(n, eps) > max_error + tol:
        n += 1
    return KsPlan(max_error, confidence, eps, n, critical_value(n, eps))


def confidence_band(emp: EmpiricalDistribution, epsilon: float):
    """``(lower, upper)`` callables: the ECDF shifted by -/+ K, clamped to [0, 1]."""
    k = critical_value(emp.N, epsilon)

    def lower(x):
        return np.clip(emp(x) - k, 0.0, 1.0)

    def upper(x):
        return np.clip(emp(x) + k, 0.0, 1.0)

    return lower, upper


def histogram(batch, bin_width: float = 1.0) -> list[tuple[float, int]]:
    """Counts per bin ``(a, b]`` labelled by ``b = k * bin_width``.

    Bins run contiguously from the first to the last occupied one.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    times = np.asarray(getattr(batch, "times", batch), dtype=float).reshape(-1)
    if times.size == 0:
        return []
    k = np.ceil(times / bin_width).astype(np.int64)
    # Repair float rounding so that (k-1)w < t <= kw holds exactly.
    k[(k - 1) * bin_width >= times] -= 1
    k[k * bin_width < times] += 1
    lo = int(k.min())
    counts = np.bincount(k - lo)
    return [((lo + j) * bin_width, int(c)) for j, c in enumerate(counts)]


def approximate_density(emp: EmpiricalDistribution, delta: int = DEFAULT_DELTA) -> DensityEstimate:
    """Difference quotients of the ECDF over order statistics ``delta`` apart.

    Emits ``f(t_{1+k delta})`` for ``k = 1 .. floor(N/delta) - 1`` (1-based
    order statistics).  Points whose two order statistics coincide are left
    out and their ``k`` recorded in ``skipped``.
    """
    n = emp.N
    if not 1 <= delta <= n - 1:
        raise ValueError(f"delta must lie in 1..{n - 1}, got {delta}")
    t = emp.sorted_times
    points, skipped = [], []
    for k in range(1, n // delta):
        hi, lo = t[k * delta], t[(k - 1) * delta]
        if hi == lo:
            skipped.append(k)
            continue
        f = (emp(hi) - emp(lo)) / (hi - lo)
        points.append((float(hi), float(f)))
    return DensityEstimate(delta, points, skipped)
