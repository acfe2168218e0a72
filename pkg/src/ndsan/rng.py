"""Counter-based random streams.

Every replication owns a 64-bit key derived from ``(master_seed, index)``.
Keys are split hierarchically (one child key per sub-network), and the
``c``-th uniform of a key is a pure function of ``(key, c)``.  Because no
generator state is shared, replications can be evaluated one at a time, in
vectorized blocks, or across threads and always produce the same values.

The mixing function is the SplitMix64 finalizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_SPLIT = np.uint64(0xD6E8FEB86659FD93)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / (1 << 53)


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer applied elementwise to a uint64 array."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def stream_keys(master_seed: int, indices) -> np.ndarray:
    """Root keys for the replications ``indices`` under ``master_seed``."""
    base = mix64(np.array([master_seed & _MASK64], dtype=np.uint64))
    idx = np.asarray(indices, dtype=np.uint64).reshape(-1)
    with np.errstate(over="ignore"):
        return mix64(base + (idx + np.uint64(1)) * _GOLDEN)


class Streams:
    """A block of independent streams, one key per replication."""

    __slots__ = ("keys",)

    def __init__(self, keys: np.ndarray):
        self.keys = keys

    def __len__(self) -> int:
        return self.keys.shape[0]

    def child(self, tag: int) -> "Streams":
        salt = mix64(np.array([tag], dtype=np.uint64) * _SPLIT + _GOLDEN)
        return Streams(mix64(self.keys ^ salt))

    def subset(self, mask: np.ndarray) -> "Streams":
        return Streams(self.keys[mask])

    def uniform(self, counter: int) -> np.ndarray:
        """The ``counter``-th uniform of every stream, strictly inside (0, 1)."""
        with np.errstate(over="ignore"):
            bits = mix64(self.keys + np.uint64(counter + 1) * _GOLDEN)
        return ((bits >> _S11).astype(np.float64) + 0.5) * _INV53


@dataclass(frozen=True)
class RngStream:
    """The random stream of replication ``stream_index`` under ``master_seed``."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if self.stream_index < 0:
            raise ValueError("stream_index must be nonnegative")

    def streams(self) -> Streams:
        return Streams(stream_keys(self.master_seed, [self.stream_index]))

    def uniforms(self, n: int) -> np.ndarray:
        """First ``n`` uniforms of the stream's root key."""
        s = self.streams()
        return np.array([s.uniform(c)[0] for c in range(n)])
