"""Vectorized counter-based Philox4x32-10.

Every (path, step) pair owns a counter, so a path's random stream does not
depend on how many paths run next to it or in which order they are simulated.
numpy's ``Philox`` bit generator is sequential per instance; this module
evaluates the same block function on whole arrays of counters at once.
"""
from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint32(0x9E3779B9)
_W1 = np.uint32(0xBB67AE85)
_MASK = np.uint64(0xFFFFFFFF)
_SHIFT = np.uint64(32)


def philox4x32(ctr, key, rounds: int = 10) -> np.ndarray:
    """Philox4x32 block function.

    ``ctr`` has shape (..., 4) and ``key`` shape (..., 2), both uint32 words;
    the result has the broadcast shape (..., 4).
    """
    ctr = np.asarray(ctr, dtype=np.uint32)
    key = np.asarray(key, dtype=np.uint32)
    c0, c1, c2, c3 = (ctr[..., i] for i in range(4))
    k0, k1 = key[..., 0], key[..., 1]
    with np.errstate(over="ignore"):
        for r in range(rounds):
            p0 = _M0 * c0.astype(np.uint64)
            p1 = _M1 * c2.astype(np.uint64)
            hi0, lo0 = (p0 >> _SHIFT).astype(np.uint32), (p0 & _MASK).astype(np.uint32)
            hi1, lo1 = (p1 >> _SHIFT).astype(np.uint32), (p1 & _MASK).astype(np.uint32)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
            if r < rounds - 1:
                k0 = k0 + _W0
                k1 = k1 + _W1
    return np.stack(np.broadcast_arrays(c0, c1, c2, c3), axis=-1)


def seed_key(seed: int) -> np.ndarray:
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    return np.array([seed & 0xFFFFFFFF, seed >> 32], dtype=np.uint32)


def uniforms(seed: int, path_index, step, lane: int = 0) -> np.ndarray:
    """Two uniforms in (0, 1) per (path, step), shape (..., 2).

    The counter is (path low word, path high word, step, lane) and the key is
    the 64-bit seed split into words.  Each uniform takes 52 bits from a pair
    of output words and is offset by half a step, so neither 0 nor 1 occurs.
    """
    path_index = np.asarray(path_index, dtype=np.uint64)
    step = np.asarray(step, dtype=np.uint64)
    path_index, step = np.broadcast_arrays(path_index, step)
    ctr = np.stack(
        [
            (path_index & _MASK).astype(np.uint32),
            (path_index >> _SHIFT).astype(np.uint32),
            (step & _MASK).astype(np.uint32),
            np.full(path_index.shape, lane, np.uint32),
        ],
        axis=-1,
    )
    words = philox4x32(ctr, seed_key(seed)).astype(np.uint64)
    a = (words[..., 0] >> np.uint64(6)) << np.uint64(26) | (words[..., 1] >> np.uint64(6))
    b = (words[..., 2] >> np.uint64(6)) << np.uint64(26) | (words[..., 3] >> np.uint64(6))
    out = np.stack([a, b], axis=-1).astype(np.float64)
    # a + 0.5 needs 53 significant bits; 53-bit integers would round up to 1.0.
    return (out + 0.5) * 2.0**-52
