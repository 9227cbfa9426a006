"""Counter-based random streams.

Every random draw is a pure function of ``(key, counter)`` where the key is
derived by hashing a seed together with a tuple of stream coordinates
(e.g. level and node).  No generator state is carried between streams, so
results do not depend on processing order or on how work is split across
threads.

The mixing function is the SplitMix64 finalizer.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TWO_M53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def mix64(z):
    z = np.uint64(z)
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def stream_key(seed, a, b):
    """Key for the stream addressed by coordinates ``(a, b)`` under ``seed``."""
    h = mix64(np.uint64(seed) + _GOLDEN)
    h = mix64(h ^ (np.uint64(a) * _GOLDEN + np.uint64(0x632BE59BD9B4E019)))
    h = mix64(h ^ (np.uint64(b) * _M1 + np.uint64(0x8CB92BA72F3D8DD7)))
    return h


@njit(cache=True, nogil=True)
def draw_u64(key, counter):
    return mix64(key + (np.uint64(counter) + np.uint64(1)) * _GOLDEN)


@njit(cache=True, nogil=True)
def draw_uniform(key, counter):
    """Uniform double in (0, 1]; never returns 0 so ``log`` is always safe."""
    x = draw_u64(key, counter) >> _S11
    return (np.float64(x) + 1.0) * _TWO_M53


def derive_seed(seed: int, index: int) -> int:
    """Child seed for an independent sub-computation (e.g. one feature column)."""
    return int(stream_key(np.uint64(seed), np.uint64(0xC011), np.uint64(index)))


class CounterRNG:
    """Python-side view of one counter-based stream, handy for tests."""

    def __init__(self, seed: int, a: int = 0, b: int = 0):
        self.key = np.uint64(stream_key(np.uint64(seed), np.uint64(a), np.uint64(b)))
        self.counter = 0

    def uniform(self) -> float:
        u = draw_uniform(self.key, np.uint64(self.counter))
        self.counter += 1
        return float(u)
