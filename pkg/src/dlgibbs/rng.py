"""Seeded, splittable random streams.

Every stochastic operation in this package draws from an :class:`RngStream`,
a thin wrapper around a counter-based Philox generator keyed by the pair
(seed, stream_id).  Identical pairs reproduce identical variate sequences
bit-for-bit within one build; distinct stream ids give statistically
independent streams.  Derived streams for parallel work (per replicate, per
chain role) are obtained with :meth:`RngStream.spawn`, which mixes integer
path components into a new stream id with a splitmix64 chain.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_stream_id(base: int, *components: int) -> int:
    """Mix integer path components into a new 64-bit stream id."""
    h = int(base) & _MASK64
    for c in components:
        h = _splitmix64(h ^ (int(c) & _MASK64))
    return h


class RngStream:
    """One independently seeded variate stream.

    Parameters
    ----------
    seed : int
        Experiment-level seed (64-bit).
    stream_id : int
        Stream selector (64-bit).  Streams with different ids are
        independent even under the same seed.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    @property
    def gen(self) -> np.random.Generator:
        """The live numpy generator backing this stream."""
        return self._gen

    def spawn(self, *components: int) -> "RngStream":
        """A fresh independent stream derived from integer path components.

        The derivation is a pure function of (stream_id, components), so
        workers can derive the same stream regardless of scheduling order.
        """
        return RngStream(self.seed, derive_stream_id(self.stream_id, *components))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"
