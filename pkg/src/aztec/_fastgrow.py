"""Compiled shuffling loop for large orders.

Same grid layout, destruction rule, hole order and coins as the reference
path in :mod:`aztec.shuffling`; the tests check that both agree tile for tile.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .rng import STREAM_CREATION, hash_words

_EMPTY, _N, _S, _E, _W = 0, 1, 2, 3, 4


@njit(cache=True)
def _mix(z):
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _black_span(r, n):
    """First black column and last column of row ``r`` in the order-n diamond."""
    if r <= n - 1:
        v = n - 1 - r
        return v, 2 * n - 1 - v
    v = r - n
    return v + 1, 2 * n - 1 - v


@njit(cache=True)
def _step(old, new, m, prefix):
    """Build the order-m tiling in ``new`` from the order-(m-1) tiling in ``old``.

    Grids carry a two-square zero border: square ``(r, c)`` is stored at
    ``[r + 2, c + 2]``. Destruction and sliding are fused into a stencil: a
    square of the new grid receives an N from the square below it, an S from
    above, an E from the left and a W from the right, provided the old square
    at the same place does not destroy that domino.
    """
    size = 2 * m
    for R in range(2, size + 2):
        for C in range(2, size + 2):
            x = old[R - 1, C - 1]
            v = (old[R, C - 1] == _N) & (x != _S)
            v_s = (old[R - 2, C - 1] == _S) & (x != _N)
            v_e = (old[R - 1, C - 2] == _E) & (x != _W)
            v_w = (old[R - 1, C] == _W) & (x != _E)
            new[R, C] = v * _N + v_s * _S + v_e * _E + v_w * _W
    k = 0
    for r in range(size):
        lo, hi = _black_span(r, m)
        R = r + 2
        for c in range(lo, hi + 1, 2):
            C = c + 2
            if new[R, C] != _EMPTY:
                continue
            bit = _mix(prefix ^ np.uint64(k)) >> np.uint64(63)
            k += 1
            if bit:
                new[R, C] = _W
                new[R + 1, C] = _W
                new[R, C + 1] = _E
                new[R + 1, C + 1] = _E
            else:
                new[R, C] = _N
                new[R, C + 1] = _N
                new[R + 1, C] = _S
                new[R + 1, C + 1] = _S
    return k


@njit(cache=True)
def _grow(n, prefixes):
    a = np.zeros((2 * n + 4, 2 * n + 4), dtype=np.int8)
    b = np.zeros((2 * n + 4, 2 * n + 4), dtype=np.int8)
    for m in range(1, n + 1):
        _step(a, b, m, prefixes[m])
        a, b = b, a
    return a


def _prefixes(n: int, seed: int) -> np.ndarray:
    # hash state after absorbing (seed, stream, step); the block index is mixed in last
    return np.array([hash_words(seed, STREAM_CREATION, m) for m in range(n + 1)], dtype=np.uint64)


def grow_grid(n: int, seed: int) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=np.int8)
    out = _grow(n, _prefixes(n, seed))
    return np.ascontiguousarray(out[2:2 * n + 2, 2:2 * n + 2])
