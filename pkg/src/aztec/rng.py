"""Counter-based coin flips.

Every coin is a pure function of ``(seed, stream, *counters)``, hashed with
the splitmix64 finalizer, so draws are reproducible and independent of the
order in which they are requested. The scalar, numpy and numba paths all
produce the same bits.
"""

from __future__ import annotations

import numpy as np

GENERATOR_ID = "splitmix64-counter/v1"
MASK = 0xFFFFFFFFFFFFFFFF

STREAM_DYNAMICS = 0x5EED_0001
STREAM_CREATION = 0x5EED_0002
STREAM_KILLED = 0x5EED_0003


def _mix(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def hash_words(seed: int, *words: int) -> int:
    h = _mix(seed & MASK)
    for w in words:
        h = _mix(h ^ (w & MASK))
    return h


def coin(seed: int, *words: int) -> int:
    return hash_words(seed, *words) >> 63


_C0 = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S63 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(63)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = z + _C0
    z = (z ^ (z >> _S30)) * _C1
    z = (z ^ (z >> _S27)) * _C2
    return z ^ (z >> _S31)


def coin_array(seed: int, *words) -> np.ndarray:
    """Vectorised :func:`coin`; ``words`` may be ints or broadcastable integer arrays."""
    arrays = np.broadcast_arrays(*(np.asarray(w, dtype=np.int64).astype(np.uint64) for w in words))
    shape = arrays[0].shape if arrays else ()
    with np.errstate(over="ignore"):
        h = _mix_array(np.full(shape, seed & MASK, dtype=np.uint64))
        for w in arrays:
            h = _mix_array(h ^ w)
    return (h >> _S63).astype(np.int8)


class CoinField:
    """The coins ``beta^j_i(t)`` of the interlaced particle dynamics.

    ``trial`` separates independent trajectories under the same seed.
    """

    generator_id = GENERATOR_ID

    def __init__(self, seed: int, trial: int = 0):
        self.seed = int(seed)
        self.trial = int(trial)

    def __call__(self, j: int, i: int, t: int) -> int:
        return coin(self.seed, STREAM_DYNAMICS, self.trial, t, (j << 32) | i)

    def at(self, t: int, n: int) -> list[list[int]]:
        """All coins for time ``t``: ``result[j-1][i-1]`` is ``beta^j_i(t)``."""
        return [[self(j, i, t) for i in range(1, j + 1)] for j in range(1, n + 1)]


def dynamics_coins(seed: int, trials: np.ndarray, t: int, n: int) -> np.ndarray:
    """Coins for many trajectories at time ``t``; shape ``(len(trials), n(n+1)/2)``.

    Column order is line-major: (1,1), (2,1), (2,2), (3,1), ...
    Matches :class:`CoinField` bit for bit.
    """
    keys = np.array([(j << 32) | i for j in range(1, n + 1) for i in range(1, j + 1)], dtype=np.int64)
    trials = np.asarray(trials, dtype=np.int64)[:, None]
    return coin_array(seed, STREAM_DYNAMICS, trials, t, keys[None, :])
