"""Counter-based random streams.

Every stochastic quantity in the package is drawn from a Philox stream keyed
by (master seed, stream tags).  The value at stream index i depends only on
(seed, tags, i), never on generation order, block size, or worker count:
uniforms come straight from counter-indexed 64-bit words and normals from the
inverse CDF, so a range [a, b) of a stream can be generated on its own and is
bit-identical to the same range cut from a longer draw.  Philox emits four
64-bit words per counter tick, so positioning advances the counter by
start // 4 and discards start % 4 leading words.

Tag conventions used elsewhere in the package: couplings of degree k use tag
(TAG_COUPLING, k); planted centers use TAG_CENTER; samplers derive per-replica
seeds with derive().
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

__all__ = [
    "derive",
    "raw_words",
    "uniforms",
    "normals",
    "rademacher",
    "TAG_COUPLING",
    "TAG_CENTER",
    "TAG_GIBBS",
    "TAG_REPLICA",
    "TAG_WITNESS",
]

TAG_COUPLING = 1
TAG_CENTER = 2
TAG_GIBBS = 3
TAG_REPLICA = 4
TAG_WITNESS = 5

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix(x: int) -> int:
    # splitmix64 finalizer; full-period 64-bit mixing.
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive(seed: int, *tags: int) -> int:
    """Derive a child seed from (seed, tags), stable across runs.

    The accumulated state is multiplied by an odd constant before each tag
    is folded in, so the combination is neither linear in the raw integers
    (seed ^ tag structure) nor symmetric under swapping seed and tag.
    """
    x = _splitmix(seed & _MASK64)
    for t in tags:
        x = (x * _GOLDEN) & _MASK64
        x = _splitmix(x ^ (t & _MASK64))
    return x


def raw_words(seed: int, tags: tuple[int, ...], count: int, start: int = 0) -> np.ndarray:
    """64-bit words at stream indexes [start, start+count). One word per index.

    Philox.advance() counts 128-bit counter ticks (four words each), so the
    stream is positioned at the enclosing tick and the start % 4 words ahead
    of the requested range are dropped.
    """
    if count < 0 or start < 0:
        raise ValueError("count and start must be nonnegative")
    key = (derive(seed, *tags), derive(seed, *tags, 0x5EED))
    bg = Philox(key=np.array(key, dtype=np.uint64))
    tick, skip = divmod(start, 4)
    if tick:
        bg.advance(tick)
    gen = Generator(bg)
    # Full-range uint64: the masked-rejection path always accepts, so exactly
    # one Philox word is consumed per value and word alignment is preserved.
    w = gen.integers(0, _MASK64, dtype=np.uint64, endpoint=True, size=skip + count)
    return w[skip:]


def uniforms(seed: int, tags: tuple[int, ...], count: int, start: int = 0) -> np.ndarray:
    """Uniforms on (0, 1) at the given stream indexes."""
    w = raw_words(seed, tags, count, start)
    return (w >> np.uint64(11)).astype(np.float64) * 2.0**-53 + 2.0**-54


def normals(seed: int, tags: tuple[int, ...], count: int, start: int = 0) -> np.ndarray:
    """Standard normals via inverse CDF of counter-indexed uniforms."""
    return ndtri(uniforms(seed, tags, count, start))


def rademacher(seed: int, tags: tuple[int, ...], count: int, start: int = 0) -> np.ndarray:
    """+-1 values from the sign bit of counter-indexed uniforms."""
    return np.where(uniforms(seed, tags, count, start) < 0.5, -1.0, 1.0)
