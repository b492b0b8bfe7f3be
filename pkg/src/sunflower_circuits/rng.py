"""Counter-based deterministic random streams (splitmix64).

Every random draw in this package comes from a :class:`CounterStream`.  A
stream is a pure function of ``(seed, stream_index, counter)``: output ``i``
is the splitmix64 finalizer applied to ``key + (i+1)*GOLDEN``, where the key
mixes the seed with the stream index.  This gives:

* bit-identical results for identical ``(seed, stream)`` on any platform,
* random access (``at(i)``), so vectorized block generation and scalar
  stateful draws agree slot-for-slot,
* cheap substream splitting for worker pools (``split(k)``), with
  deterministic ordered aggregation left to the caller.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# numpy copies of the constants, used by the vectorized path
_NP_GOLDEN = np.uint64(_GOLDEN)
_NP_MIX1 = np.uint64(_MIX1)
_NP_MIX2 = np.uint64(_MIX2)


def mix64(z: int) -> int:
    """splitmix64 finalizer: a 64-bit bijective hash."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def _block_mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _NP_MIX1
    z = (z ^ (z >> np.uint64(27))) * _NP_MIX2
    return z ^ (z >> np.uint64(31))


def threshold_for(p) -> int:
    """Acceptance threshold on a uniform 64-bit draw for probability p.

    ``draw < threshold`` happens with probability ``floor(p * 2^64) / 2^64``,
    which is exact for dyadic p (1/2, 1/4, 3/4, ...) and within 2^-64
    otherwise.
    """
    t = int(Fraction(p) * (1 << 64))
    return max(0, min(t, 1 << 64))


class CounterStream:
    """One deterministic stream of 64-bit values.

    The stateful interface (``next_u64``) and the random-access interface
    (``at`` / ``block``) read the same sequence; mixing them is safe as long
    as the caller keeps track of the consumed slot count.
    """

    __slots__ = ("seed", "stream", "key", "index")

    def __init__(self, seed: int, stream: int = 0):
        self.seed = seed & _MASK64
        self.stream = stream & _MASK64
        self.key = mix64(self.seed ^ mix64((self.stream + 1) * _GOLDEN))
        self.index = 0

    def split(self, k: int) -> "CounterStream":
        """Independent substream k (worker index k)."""
        return CounterStream(self.key, stream=k + 1)

    def at(self, i: int) -> int:
        return mix64(self.key + (i + 1) * _GOLDEN)

    def next_u64(self) -> int:
        v = self.at(self.index)
        self.index += 1
        return v

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n), exact via rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = ((1 << 64) // n) * n
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def block(self, start: int, count: int) -> np.ndarray:
        """Outputs for slots [start, start+count) as a uint64 array."""
        idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
        return _block_mix(np.uint64(self.key) + idx * _NP_GOLDEN)

    def bernoulli_block(self, start: int, count: int, p) -> np.ndarray:
        """Boolean array: slot i accepted with probability ~p (see threshold_for)."""
        t = threshold_for(p)
        if t >= 1 << 64:
            return np.ones(count, dtype=bool)
        if t <= 0:
            return np.zeros(count, dtype=bool)
        return self.block(start, count) < np.uint64(t)
