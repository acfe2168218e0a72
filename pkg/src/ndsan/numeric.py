"""Grid-based distribution calculus for series-parallel reducible networks.

A :class:`DiscretizedDistribution` is a lattice law on ``0, h, 2h, ...``:
``mass[k]`` is the probability carried by cell ``k``, which stands for the
interval ``[kh - h/2, kh + h/2)``.  With that representation

* sums of independent variables are discrete convolutions of the masses,
* the max of independent variables has the product of the cumulative
  masses as its cumulative mass,
* decisions and loops are mixtures,

and every one of these is exact on the lattice, point masses included.  The
only approximation is the initial rounding of each activity to its cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import signal

from .distributions import Constant, DurationDistribution
from .errors import (
    GridMismatchError,
    InvalidLoopProbsError,
    NotReducibleError,
    SupportExceedsGridError,
    WeightSumError,
)
from .model import (
    PROB_TOL,
    Acyclic,
    Decision,
    Loop,
    Trivial,
    activity_count,
    loop_weights,
    sp_decomposition,
    validate,
)

DEFAULT_STEP = 0.01
MASS_TOL = 1e-6
# Above this many multiply-adds, convolve through the FFT.
_DIRECT_LIMIT = 4_000_000


@dataclass(frozen=True, eq=False)
class DiscretizedDistribution:
    grid_step: float
    mass: np.ndarray

    @property
    def size(self) -> int:
        return self.mass.shape[0]

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.size) * self.grid_step

    @property
    def pdf(self) -> np.ndarray:
        return self.mass / self.grid_step

    @property
    def cdf(self) -> np.ndarray:
        """Cumulative mass at each grid point (right-continuous, jumps kept)."""
        return np.minimum(np.cumsum(self.mass), 1.0)

    @property
    def total_mass(self) -> float:
        return float(self.mass.sum())

    @property
    def t_max(self) -> float:
        return (self.size - 1) * self.grid_step

    def mean(self) -> float:
        return float(np.dot(self.grid, self.mass))

    def variance(self) -> float:
        m = self.mean()
        return float(np.dot((self.grid - m) ** 2, self.mass))

    def mass_at(self, t: float) -> float:
        k = int(round(t / self.grid_step))
        return float(self.mass[k]) if 0 <= k < self.size else 0.0

    def cdf_at(self, t):
        """Continuous reference CDF.

        Cell ``k`` accumulates all its mass by ``kh + h/2``; the CDF is the
        linear interpolant through those cell edges, starting from 0 at
        ``t = 0``.
        """
        h = self.grid_step
        xp = np.concatenate(([0.0], (np.arange(self.size) + 0.5) * h))
        fp = np.concatenate(([0.0], self.cdf))
        return np.interp(np.asarray(t, dtype=float), xp, fp, left=0.0, right=fp[-1])

    def step_cdf_at(self, t):
        """Right-continuous step CDF: mass of all grid points <= t."""
        idx = np.floor(np.asarray(t, dtype=float) / self.grid_step + 1e-9).astype(int)
        cdf = self.cdf
        out = np.where(idx < 0, 0.0, cdf[np.clip(idx, 0, self.size - 1)])
        return out

    def padded(self, size: int) -> "DiscretizedDistribution":
        if size < self.size:
            tail = float(self.mass[size:].sum())
            if tail > MASS_TOL:
                raise SupportExceedsGridError(
                    f"mass {tail:.3g} lies beyond t = {(size - 1) * self.grid_step:.6g}"
                )
            return DiscretizedDistribution(self.grid_step, self.mass[:size].copy())
        out = np.zeros(size)
        out[: self.size] = self.mass
        return DiscretizedDistribution(self.grid_step, out)

    def trimmed(self) -> "DiscretizedDistribution":
        nz = np.flatnonzero(self.mass > 0)
        last = int(nz[-1]) + 1 if nz.size else 1
        return DiscretizedDistribution(self.grid_step, self.mass[:last].copy())


def point_mass(t: float, h: float) -> DiscretizedDistribution:
    k = int(round(t / h))
    mass = np.zeros(k + 1)
    mass[k] = 1.0
    return DiscretizedDistribution(h, mass)


def _cells(dist: DurationDistribution, h: float) -> DiscretizedDistribution:
    """Cell masses covering exactly the support of ``dist``."""
    if isinstance(dist, Constant):
        return point_mass(dist.value, h)
    lo, hi = dist.support()
    last = int(math.floor(hi / h + 0.5)) + 1
    edges = (np.arange(last + 1) - 0.5) * h
    edges[0] = min(0.0, lo)
    cdf = np.asarray(dist.cdf(edges), dtype=float)
    cdf[0] = 0.0
    mass = np.maximum(np.diff(cdf), 0.0)
    return DiscretizedDistribution(h, mass)


def _grid_size(h: float, t_max: float) -> int:
    return int(math.floor(t_max / h + 1e-9)) + 1


def discretize(dist: DurationDistribution, h: float, t_max: float) -> DiscretizedDistribution:
    """Tabulate ``dist`` on the grid ``0, h, ..., t_max``."""
    if h <= 0:
        raise ValueError("grid step must be positive")
    problems = dist.problems()
    if problems:
        raise ValueError("; ".join(problems))
    _, hi = dist.support()
    if hi > t_max + h / 2:
        raise SupportExceedsGridError(f"support reaches {hi:.6g} beyond t_max = {t_max:.6g}")
    return _cells(dist, h).padded(_grid_size(h, t_max))


def _check_grids(parts: Sequence[DiscretizedDistribution]) -> float:
    h = parts[0].grid_step
    for p in parts[1:]:
        if not math.isclose(p.grid_step, h, rel_tol=1e-12):
            raise GridMismatchError(f"grid steps {h} and {p.grid_step} differ")
    return h


def convolve(f: DiscretizedDistribution, g: DiscretizedDistribution) -> DiscretizedDistribution:
    """Law of the sum of independent variables, on the extended grid."""
    h = _check_grids([f, g])
    if f.size * g.size <= _DIRECT_LIMIT:
        mass = np.convolve(f.mass, g.mass)
    else:
        mass = np.maximum(signal.fftconvolve(f.mass, g.mass), 0.0)
    return DiscretizedDistribution(h, mass)


def mixture(weights: Sequence[float], parts: Sequence[DiscretizedDistribution]) -> DiscretizedDistribution:
    """Pointwise weighted sum of the parts' masses."""
    if len(weights) != len(parts) or not parts:
        raise ValueError("need one weight per part")
    total = math.fsum(weights)
    if abs(total - 1.0) > PROB_TOL or any(w < 0 for w in weights):
        raise WeightSumError(f"mixture weights sum to {total:.12g}, expected 1")
    h = _check_grids(parts)
    size = max(p.size for p in parts)
    mass = np.zeros(size)
    for w, p in zip(weights, parts):
        mass[: p.size] += w * p.mass
    return DiscretizedDistribution(h, mass)


def max_independent(parts: Sequence[DiscretizedDistribution]) -> DiscretizedDistribution:
    """Law of the max of independent variables: the product of their CDFs."""
    if not parts:
        raise ValueError("need at least one part")
    h = _check_grids(parts)
    if len(parts) == 1:
        return parts[0]
    size = max(p.size for p in parts)
    cdf = np.ones(size)
    for p in parts:
        c = np.ones(size)
        c[: p.size] = np.cumsum(p.mass)
        # Beyond its own grid a part's CDF stays at its final value.
        c[p.size:] = c[p.size - 1]
        cdf *= c
    mass = np.diff(cdf, prepend=0.0)
    return DiscretizedDistribution(h, np.maximum(mass, 0.0))


def loop_mixture(body: DiscretizedDistribution, continue_probs: Sequence[float]) -> DiscretizedDistribution:
    """Law of the total time of a random number of serial body executions."""
    q = list(continue_probs)
    if not q or q[-1] != 0.0 or any(not 0.0 <= x <= 1.0 for x in q):
        raise InvalidLoopProbsError(
            f"continue probabilities must lie in [0, 1] and end with 0, got {q}"
        )
    weights = loop_weights(q)
    assert abs(math.fsum(weights) - 1.0) <= 1e-12
    h = body.grid_step
    parts = [point_mass(0.0, h)]
    z = parts[0]
    for _ in range(1, len(q)):
        z = convolve(z, body)
        parts.append(z)
    pairs = [(w, p) for w, p in zip(weights, parts) if w > 0]
    return mixture([w for w, _ in pairs], [p for _, p in pairs])


# -- structural recursion -----------------------------------------------------


def support_bound(net) -> float:
    """Upper bound on the completion time (effective bound for exponentials)."""
    if isinstance(net, Trivial):
        return net.duration.support()[1]
    if isinstance(net, Acyclic):
        bounds = [support_bound(c) for c in net.children]
        finish = [0.0] * len(bounds)
        for v in net.order:
            start = max((finish[p] for p in net.predecessors[v]), default=0.0)
            finish[v] = start + bounds[v]
        return max(finish)
    if isinstance(net, Decision):
        middle = max(support_bound(c) for _, c in net.branches)
        return support_bound(net.entry) + middle + support_bound(net.exit)
    if isinstance(net, Loop):
        return (
            support_bound(net.entry)
            + (net.beta - 1) * support_bound(net.body)
            + support_bound(net.exit)
        )
    raise TypeError(f"not a network node: {type(net).__name__}")


def default_t_max(net, h: float) -> float:
    """Support bound plus room for cell rounding of every activity execution."""
    executions = activity_count(net) * _max_multiplicity(net)
    return support_bound(net) + (executions + 1) * h


def _max_multiplicity(net) -> int:
    if isinstance(net, Trivial):
        return 1
    if isinstance(net, Acyclic):
        return max(_max_multiplicity(c) for c in net.children)
    if isinstance(net, Decision):
        return max(
            [_max_multiplicity(net.entry), _max_multiplicity(net.exit)]
            + [_max_multiplicity(c) for _, c in net.branches]
        )
    return max(
        _max_multiplicity(net.entry),
        _max_multiplicity(net.exit),
        max(1, net.beta - 1) * _max_multiplicity(net.body),
    )


def _analyze(net, h: float) -> DiscretizedDistribution:
    if isinstance(net, Trivial):
        return _cells(net.duration, h)
    if isinstance(net, Acyclic):
        expr = sp_decomposition(net)
        if expr is None:
            raise NotReducibleError(
                "acyclic block has parallel branches sharing vertices; "
                "exact analysis is not available, use simulation"
            )
        children = [_analyze(c, h) for c in net.children]
        return _evaluate_expr(expr, children).trimmed()
    if isinstance(net, Decision):
        middle = mixture(
            list(net.probabilities), [_analyze(c, h) for _, c in net.branches]
        )
        return convolve(convolve(_analyze(net.entry, h), middle), _analyze(net.exit, h)).trimmed()
    if isinstance(net, Loop):
        ys = loop_mixture(_analyze(net.body, h), net.continue_probs)
        return convolve(convolve(_analyze(net.entry, h), ys), _analyze(net.exit, h)).trimmed()
    raise TypeError(f"not a network node: {type(net).__name__}")


def _evaluate_expr(expr, children):
    kind = expr[0]
    if kind == "leaf":
        return children[expr[1]]
    parts = [_evaluate_expr(e, children) for e in expr[1]]
    if kind == "series":
        out = parts[0]
        for p in parts[1:]:
            out = convolve(out, p)
        return out
    return max_independent(parts)


def analyze(net, h: float = DEFAULT_STEP, t_max: float | None = None) -> DiscretizedDistribution:
    """Completion-time law of a reducible network on the grid ``0..t_max``.

    Raises :class:`NotReducibleError` for acyclic blocks whose parallel
    branches share vertices, and :class:`SupportExceedsGridError` when the
    law does not fit below ``t_max``.
    """
    if h <= 0:
        raise ValueError("grid step must be positive")
    validate(net).raise_for_violations()
    if t_max is None:
        t_max = default_t_max(net, h)
    dist = _analyze(net, h)
    return dist.padded(_grid_size(h, t_max))
