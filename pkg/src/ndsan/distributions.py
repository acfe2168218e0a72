"""Activity-duration laws.

All laws have nonnegative support.  Constructors never raise; invalid
parameters are reported by :meth:`problems` so that network validation can
collect every violation at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

# Truncation half-width of TruncatedNormal, in standard deviations.
TRUNCATION_SIGMAS = 3.0
# Upper support bound used for Exponential; mass beyond it is 1e-10.
EXPONENTIAL_TAIL = 1e-10
_MAX_REJECTIONS = 200


class DurationDistribution:
    """Interface shared by the duration laws."""

    family: str = ""

    def params(self) -> tuple[float, ...]:
        raise NotImplementedError

    def problems(self) -> list[str]:
        raise NotImplementedError

    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def ppf(self, u):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def draw_block(self, streams) -> np.ndarray:
        """One draw per stream, consuming uniforms from counter 0 upward."""
        return self.ppf(streams.uniform(0))


def _finite(*values) -> bool:
    return all(isinstance(v, (int, float)) and math.isfinite(v) for v in values)


@dataclass(frozen=True)
class Triangular(DurationDistribution):
    x1: float
    x2: float
    x3: float

    family = "triangular"

    def params(self):
        return (self.x1, self.x2, self.x3)

    def problems(self):
        if not _finite(self.x1, self.x2, self.x3):
            return ["triangular parameters must be finite numbers"]
        out = []
        if not self.x1 < self.x2 < self.x3:
            out.append(f"triangular parameters must satisfy x1 < x2 < x3, got {self.params()}")
        if self.x1 < 0:
            out.append(f"triangular x1 must be >= 0, got {self.x1}")
        return out

    @property
    def peak(self) -> float:
        """Density at the mode, 2 / (x3 - x1)."""
        return 2.0 / (self.x3 - self.x1)

    def support(self):
        return (float(self.x1), float(self.x3))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        a, b, c = self.x1, self.x2, self.x3
        y0 = self.peak
        up = y0 / (b - a) * (x - a)
        down = y0 / (c - b) * (c - x)
        out = np.where(x < b, up, down)
        return np.where((x < a) | (x >= c), 0.0, out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        a, b, c = self.x1, self.x2, self.x3
        left = (x - a) ** 2 / ((c - a) * (b - a))
        right = 1.0 - (c - x) ** 2 / ((c - a) * (c - b))
        out = np.where(x < b, left, right)
        return np.clip(np.where(x <= a, 0.0, np.where(x >= c, 1.0, out)), 0.0, 1.0)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        a, b, c = self.x1, self.x2, self.x3
        split = (b - a) / (c - a)
        left = a + np.sqrt(u * (c - a) * (b - a))
        right = c - np.sqrt((1.0 - u) * (c - a) * (c - b))
        return np.where(u < split, left, right)

    def mean(self):
        return (self.x1 + self.x2 + self.x3) / 3.0


@dataclass(frozen=True)
class TruncatedNormal(DurationDistribution):
    """Normal law with the given mean and variance, cut to mu +/- 3 sigma."""

    mu: float
    variance: float

    family = "truncated_normal"

    def params(self):
        return (self.mu, self.variance)

    def problems(self):
        if not _finite(self.mu, self.variance):
            return ["truncated_normal parameters must be finite numbers"]
        if self.variance <= 0:
            return [f"truncated_normal variance must be > 0, got {self.variance}"]
        lo = self.mu - TRUNCATION_SIGMAS * self.sigma
        if lo < 0:
            return [f"truncated_normal support starts at mu - 3 sigma = {lo:.6g} < 0"]
        return []

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def support(self):
        s = TRUNCATION_SIGMAS * self.sigma
        return (self.mu - s, self.mu + s)

    def cdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        lo = special.ndtr(-TRUNCATION_SIGMAS)
        hi = special.ndtr(TRUNCATION_SIGMAS)
        z = np.clip(z, -TRUNCATION_SIGMAS, TRUNCATION_SIGMAS)
        return (special.ndtr(z) - lo) / (hi - lo)

    def ppf(self, u):
        lo = special.ndtr(-TRUNCATION_SIGMAS)
        hi = special.ndtr(TRUNCATION_SIGMAS)
        p = lo + np.asarray(u, dtype=float) * (hi - lo)
        return self.mu + self.sigma * special.ndtri(p)

    def mean(self):
        return float(self.mu)

    def draw_block(self, streams):
        # Rejection against the untruncated normal; attempt k uses counter k.
        out = np.empty(len(streams))
        pending = np.arange(len(streams))
        for attempt in range(_MAX_REJECTIONS):
            if pending.size == 0:
                return out
            z = special.ndtri(streams.subset(pending).uniform(attempt))
            ok = np.abs(z) <= TRUNCATION_SIGMAS
            out[pending[ok]] = self.mu + self.sigma * z[ok]
            pending = pending[~ok]
        if pending.size:
            raise RuntimeError("truncated normal rejection did not terminate")
        return out


@dataclass(frozen=True)
class Uniform(DurationDistribution):
    lo: float
    hi: float

    family = "uniform"

    def params(self):
        return (self.lo, self.hi)

    def problems(self):
        if not _finite(self.lo, self.hi):
            return ["uniform bounds must be finite numbers"]
        if not 0 <= self.lo < self.hi:
            return [f"uniform bounds must satisfy 0 <= lo < hi, got {self.params()}"]
        return []

    def support(self):
        return (float(self.lo), float(self.hi))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def ppf(self, u):
        return self.lo + np.asarray(u, dtype=float) * (self.hi - self.lo)

    def mean(self):
        return (self.lo + self.hi) / 2.0


@dataclass(frozen=True)
class Exponential(DurationDistribution):
    rate: float

    family = "exponential"

    def params(self):
        return (self.rate,)

    def problems(self):
        if not _finite(self.rate) or self.rate <= 0:
            return [f"exponential rate must be > 0, got {self.rate}"]
        return []

    def support(self):
        # Effective bound: the law's support is unbounded.
        return (0.0, -math.log(EXPONENTIAL_TAIL) / self.rate)

    def cdf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        return -special.expm1(-self.rate * x)

    def ppf(self, u):
        return -special.log1p(-np.asarray(u, dtype=float)) / self.rate

    def mean(self):
        return 1.0 / self.rate


@dataclass(frozen=True)
class Constant(DurationDistribution):
    value: float

    family = "constant"

    def params(self):
        return (self.value,)

    def problems(self):
        if not _finite(self.value) or self.value < 0:
            return [f"constant duration must be a finite number >= 0, got {self.value}"]
        return []

    def support(self):
        return (float(self.value), float(self.value))

    def cdf(self, x):
        return np.where(np.asarray(x, dtype=float) >= self.value, 1.0, 0.0)

    def ppf(self, u):
        return np.full(np.shape(u), float(self.value))

    def mean(self):
        return float(self.value)

    def draw_block(self, streams):
        return np.full(len(streams), float(self.value))


FAMILIES = {
    cls.family: cls for cls in (Triangular, TruncatedNormal, Uniform, Exponential, Constant)
}
