"""The unbiased mutation operator: draw ``k ~ D`` and flip ``k`` random positions."""

from __future__ import annotations

import numpy as np
from numba import njit

from .distributions import FlipDistribution, sample
from .errors import LengthMismatch, OutOfRange
from .objectives import BitString


@njit(cache=True)
def choose_flip_set(idx, k, rng):
    """Shuffle part of ``idx`` so that a uniform ``k``-subset sits in a known slice.

    Returns ``(lo, hi)``; the flipped positions are ``idx[lo:hi]``. Only
    ``min(k, n - k)`` swaps are made: for large ``k`` the kept positions
    are drawn instead and the remaining ones are flipped.
    """
    n = idx.shape[0]
    m = k if 2 * k <= n else n - k
    for j in range(m):
        r = j + rng.integers(0, n - j)
        tmp = idx[j]
        idx[j] = idx[r]
        idx[r] = tmp
    if m == k:
        return 0, k
    return m, n


@njit(cache=True)
def _flip_copy(bits, k, idx, rng):
    out = bits.copy()
    lo, hi = choose_flip_set(idx, k, rng)
    for j in range(lo, hi):
        out[idx[j]] ^= 1
    return out


def flip_k(x: BitString, k: int, rng: np.random.Generator) -> BitString:
    """Flip a uniformly random set of exactly ``k`` positions of ``x``."""
    if not 0 <= k <= x.n:
        raise OutOfRange(f"cannot flip {k} of {x.n} bits")
    idx = np.arange(x.n, dtype=np.int64)
    return BitString(_flip_copy(np.array(x.bits), k, idx, rng))


def mutate(x: BitString, d: FlipDistribution, rng: np.random.Generator) -> tuple[BitString, int]:
    if d.n != x.n:
        raise LengthMismatch(f"distribution has n={d.n}, point has n={x.n}")
    k = sample(d, rng)
    return flip_k(x, k, rng), k
