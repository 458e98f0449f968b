"""Bit-level helpers for spin configurations.

A configuration of N Ising spins is stored as the integer whose bit i encodes
spin i: bit 0 means sigma_i = +1, bit 1 means sigma_i = -1.  Index 0 is the
all-ones configuration.  Hamming distance is then a popcount of XOR and the
overlap <sigma, sigma'> equals N - 2 * d_H.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

__all__ = [
    "config_to_spins",
    "spins_to_config",
    "popcount",
    "hamming",
    "overlap_int",
    "all_spins",
    "masks_of_weight",
    "gray_code",
]


def config_to_spins(index: int | np.ndarray, n: int) -> np.ndarray:
    """Decode configuration index(es) to +-1 spin vectors.

    Scalar index -> shape (n,); array of m indexes -> shape (m, n).
    """
    idx = np.asarray(index, dtype=np.uint64)
    shifts = np.arange(n, dtype=np.uint64)
    bits = (idx[..., None] >> shifts) & np.uint64(1)
    return (1.0 - 2.0 * bits).astype(np.float64)


def spins_to_config(spins: np.ndarray) -> int:
    """Inverse of config_to_spins for a single +-1 vector."""
    spins = np.asarray(spins)
    if not np.all(np.abs(spins) == 1):
        raise ValueError("spins must be +-1")
    bits = (spins < 0).astype(np.uint64)
    return int((bits << np.arange(len(bits), dtype=np.uint64)).sum())


def popcount(x: np.ndarray | int) -> np.ndarray | int:
    """Number of set bits, elementwise."""
    if isinstance(x, (int, np.integer)):
        return int(x).bit_count()
    return np.bitwise_count(np.asarray(x, dtype=np.uint64))


def hamming(a: np.ndarray | int, b: np.ndarray | int) -> np.ndarray | int:
    """Hamming distance between configuration indexes, elementwise."""
    if isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer)):
        return (int(a) ^ int(b)).bit_count()
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    return popcount(a ^ b)


def overlap_int(a: np.ndarray | int, b: np.ndarray | int, n: int):
    """Integer overlap <sigma_a, sigma_b> = n - 2 * d_H(a, b)."""
    d = hamming(a, b)
    if isinstance(d, (int, np.integer)):
        return n - 2 * int(d)
    # popcount yields unsigned words; negative overlaps need a signed type.
    return n - 2 * d.astype(np.int64)


def all_spins(n: int) -> np.ndarray:
    """(2^n, n) matrix of all spin vectors, row index = configuration index."""
    return config_to_spins(np.arange(1 << n, dtype=np.uint64), n)


@lru_cache(maxsize=None)
def masks_of_weight(n: int, d: int) -> np.ndarray:
    """All n-bit masks with exactly d set bits, ascending, as uint64."""
    if d < 0 or d > n:
        return np.empty(0, dtype=np.uint64)
    out = np.fromiter(
        (sum(1 << i for i in c) for c in combinations(range(n), d)),
        dtype=np.uint64,
    )
    out.sort()
    return out


def gray_code(t: int | np.ndarray):
    """t-th element of the reflected Gray sequence: t XOR (t >> 1)."""
    if isinstance(t, (int, np.integer)):
        return int(t) ^ (int(t) >> 1)
    t = np.asarray(t, dtype=np.uint64)
    return t ^ (t >> np.uint64(1))
