"""Deterministic 64-bit PRNG for workload generation.

Counter-based splitmix-style generator: output k of stream `seed` is
``mix64(seed + (k+1) * GOLDEN)`` where ``mix64`` is the standard 64-bit
finalizer below.  Because each output depends only on (seed, k), whole
matrices can be produced vectorized and out of order while staying
byte-identical across runs and platforms.

Constants (all arithmetic mod 2^64):
    GOLDEN = 0x9E3779B97F4A7C15
    mix64(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
              z ^= z >> 27; z *= 0x94D049BB133111EB;
              z ^= z >> 31
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1


def mix64(z: int) -> int:
    """Finalize one 64-bit state word (scalar reference implementation)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def stream(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Outputs offset .. offset+count-1 of the stream, as uint64 array."""
    if count < 0:
        raise ValueError("count must be non-negative")
    ctr = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK64) + ctr * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
    return z


def value(seed: int, index: int) -> int:
    """Scalar equivalent of stream(seed, ...)[index]."""
    return mix64((seed + (index + 1) * GOLDEN) & _MASK64)
