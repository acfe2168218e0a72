"""Recursive completion-time simulation.

:func:`sample` draws one completion time; :func:`run_batch` draws ``N`` of
them.  Both go through the same block evaluator, which walks the network
once for a whole block of replications: a decision sends each replication
to the branch it selected, and a loop keeps executing its body only for the
replications whose iteration count is not yet exhausted.

Random numbers are addressed by position in the tree (see :mod:`ndsan.rng`),
so replication ``i`` of ``run_batch(net, N, seed)`` equals
``sample(net, RngStream(seed, i))`` bit for bit, independent of block size
and thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import DurationDistribution
from .model import (
    Acyclic,
    Decision,
    Loop,
    Trivial,
    source_and_sink,
    topological_order,
    validate,
)
from .rng import RngStream, Streams, stream_keys

BLOCK_SIZE = 1 << 16

# Child-stream tags inside composites.
_ENTRY, _EXIT, _FIRST = 0, 1, 2


@dataclass(frozen=True)
class SampleBatch:
    times: np.ndarray
    master_seed: int
    network: str
    N: int

    def __post_init__(self):
        if len(self.times) != self.N:
            raise ValueError("batch length does not match N")


def draw(dist: DurationDistribution, rng: RngStream) -> float:
    """One observation of ``dist`` from the root of ``rng``."""
    return float(dist.draw_block(rng.streams())[0])


def critical_path(dag: Sequence[Sequence[int]], weights: Sequence[float]) -> float:
    """Longest source-to-sink path, summing vertex weights.

    ``dag[i]`` lists the successors of vertex ``i``.  Raises
    :class:`~ndsan.errors.CyclicGraphError` or
    :class:`~ndsan.errors.MultipleSourcesOrSinksError`.
    """
    if len(weights) != len(dag):
        raise ValueError("need one weight per vertex")
    order = topological_order(dag)
    _, sink = source_and_sink(dag)
    finish = [0.0] * len(dag)
    start = [0.0] * len(dag)
    for v in order:
        finish[v] = start[v] + weights[v]
        for j in dag[v]:
            if finish[v] > start[j]:
                start[j] = finish[v]
    return finish[sink]


def _critical_path_block(net: Acyclic, times: list[np.ndarray]) -> np.ndarray:
    preds = net.predecessors
    finish = [None] * len(times)
    sink = None
    for v in net.order:
        ps = preds[v]
        if not ps:
            finish[v] = times[v]
        elif len(ps) == 1:
            finish[v] = finish[ps[0]] + times[v]
        else:
            start = finish[ps[0]]
            for p in ps[1:]:
                start = np.maximum(start, finish[p])
            finish[v] = start + times[v]
        if not net.successors[v]:
            sink = v
    return finish[sink]


def _evaluate(net, streams: Streams) -> np.ndarray:
    n = len(streams)
    if n == 0:
        return np.empty(0)
    if isinstance(net, Trivial):
        return net.duration.draw_block(streams)
    if isinstance(net, Acyclic):
        times = [_evaluate(child, streams.child(i)) for i, child in enumerate(net.children)]
        return _critical_path_block(net, times)
    if isinstance(net, Decision):
        entry = _evaluate(net.entry, streams.child(_ENTRY))
        pick = np.searchsorted(net.cumulative, streams.uniform(0), side="right")
        middle = np.zeros(n)
        for k, (_, branch) in enumerate(net.branches):
            chosen = pick == k
            if chosen.any():
                middle[chosen] = _evaluate(branch, streams.subset(chosen).child(_FIRST + k))
        return entry + middle + _evaluate(net.exit, streams.child(_EXIT))
    if isinstance(net, Loop):
        entry = _evaluate(net.entry, streams.child(_ENTRY))
        count = np.searchsorted(net.cumulative, streams.uniform(0), side="right")
        t_loop = np.zeros(n)
        for j in range(1, net.beta):
            active = count >= j
            if not active.any():
                break
            t_loop[active] += _evaluate(net.body, streams.subset(active).child(_FIRST + j))
        return entry + t_loop + _evaluate(net.exit, streams.child(_EXIT))
    raise TypeError(f"not a network node: {type(net).__name__}")


def sample(net, rng: RngStream) -> float:
    """One observation of the completion time of ``net``."""
    validate(net).raise_for_violations()
    return float(_evaluate(net, rng.streams())[0])


def sample_block(net, master_seed: int, indices) -> np.ndarray:
    """Completion times of the replications ``indices`` (no validation)."""
    return _evaluate(net, Streams(stream_keys(master_seed, indices)))


def run_batch(
    net,
    N: int,
    master_seed: int,
    *,
    name: str = "network",
    threads: int | None = None,
) -> SampleBatch:
    """``N`` independent completion times; replication ``i`` uses stream ``i``.

    ``threads`` defaults to 1; blocks are placed by index, so the result does
    not depend on it.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    validate(net).raise_for_violations()
    times = np.empty(N)
    starts = range(0, N, BLOCK_SIZE)

    def fill(start):
        stop = min(start + BLOCK_SIZE, N)
        times[start:stop] = sample_block(net, master_seed, np.arange(start, stop))

    workers = max(1, threads or 1)
    if workers == 1 or N <= BLOCK_SIZE:
        for s in starts:
            fill(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, starts))
    return SampleBatch(times=times, master_seed=master_seed, network=name, N=N)


def threads_from_env(default: int = 1) -> int:
    """Parallelism cap from ``NDSAN_THREADS``."""
    raw = os.environ.get("NDSAN_THREADS")
    if not raw:
        return default
    value = int(raw)
    if value < 1:
        raise ValueError("NDSAN_THREADS must be a positive integer")
    return value
