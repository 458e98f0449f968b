"""Gray-code enumeration kernels.

Each kernel walks a contiguous range [t0, t1) of the reflected Gray sequence
for one interaction degree, re-anchoring with a direct evaluation at t0 and
then applying incremental flip deltas; results are accumulated into the
2^N energy table at the visited configuration indexes.  Step t flips site
ctz(t), so gray(t) = gray(t-1) XOR (1 << ctz(t)).

Flip deltas exploit multilinearity: flipping spin i changes only tuples with
odd multiplicity of index i.  For degrees 2 and 3 the per-site slices are
pre-symmetrized (R2 = T + T^t, R3[i] = T[i,:,:] + T[:,i,:] + T[:,:,i]) so a
delta is one masked contraction of a contiguous slice:

    delta_2 = -2 s_i * <R2[i, :], sigma~>
    delta_3 = -2 s_i * (sigma~^t R3[i] sigma~ + T[i,i,i])

with sigma~ equal to sigma zeroed at i (even multiplicities cancel; the
all-i tuple is odd for degree 3).  Degrees >= 4 use the generic telescoped
form, one axis position at a time.

Anything here is private plumbing behind landscape.enumerate_table; the
numpy contraction in disorder.energy is the independent oracle route.
"""

import numba
import numpy as np


@numba.njit(cache=True, nogil=True, inline="always")
def _ctz(t):
    i = 0
    while (t >> i) & 1 == 0:
        i += 1
    return i


@numba.njit(cache=True, nogil=True)
def _eval_direct(tflat, k, n, sigma, scratch):
    """Full contraction of one degree-k tensor with sigma; O(n^k)."""
    size = n ** (k - 1)
    for j in range(size):
        s = 0.0
        base = j * n
        for d in range(n):
            s += tflat[base + d] * sigma[d]
        scratch[j] = s
    while size > 1:
        size //= n
        for j in range(size):
            s = 0.0
            base = j * n
            for d in range(n):
                s += scratch[base + d] * sigma[d]
            scratch[j] = s
    return scratch[0]


@numba.njit(cache=True, nogil=True)
def walk2(table, t2, r2, n, t0, t1, scale):
    sigma = np.empty(n)
    scratch = np.empty(n)
    c = t0 ^ (t0 >> 1)
    for i in range(n):
        sigma[i] = 1.0 - 2.0 * ((c >> i) & 1)
    e = scale * _eval_direct(t2, 2, n, sigma, scratch)
    table[c] += e
    for t in range(t0 + 1, t1):
        i = _ctz(t)
        s = sigma[i]
        sigma[i] = 0.0
        acc = 0.0
        base = i * n
        for b in range(n):
            acc += r2[base + b] * sigma[b]
        e += scale * (-2.0 * s) * acc
        sigma[i] = -s
        c ^= 1 << i
        table[c] += e


@numba.njit(cache=True, nogil=True)
def walk3(table, t3, r3, diag3, n, t0, t1, scale):
    sigma = np.empty(n)
    scratch = np.empty(n * n)
    c = t0 ^ (t0 >> 1)
    for i in range(n):
        sigma[i] = 1.0 - 2.0 * ((c >> i) & 1)
    e = scale * _eval_direct(t3, 3, n, sigma, scratch)
    table[c] += e
    nn = n * n
    for t in range(t0 + 1, t1):
        i = _ctz(t)
        s = sigma[i]
        sigma[i] = 0.0
        acc = 0.0
        base_i = i * nn
        for b in range(n):
            sb = sigma[b]
            if sb == 0.0:
                continue
            row = base_i + b * n
            inner = 0.0
            for d in range(n):
                inner += r3[row + d] * sigma[d]
            acc += sb * inner
        e += scale * (-2.0 * s) * (acc + diag3[i])
        sigma[i] = -s
        c ^= 1 << i
        table[c] += e


@numba.njit(cache=True, nogil=True)
def walk_generic(table, tflat, k, n, t0, t1, scale):
    sigma = np.empty(n)
    scratch = np.empty(n ** (k - 1))
    powers = np.empty(k, dtype=np.int64)
    for a in range(k):
        powers[a] = n ** (k - 1 - a)
    c = t0 ^ (t0 >> 1)
    for i in range(n):
        sigma[i] = 1.0 - 2.0 * ((c >> i) & 1)
    e = scale * _eval_direct(tflat, k, n, sigma, scratch)
    table[c] += e
    size = n ** (k - 1)
    for t in range(t0 + 1, t1):
        i = _ctz(t)
        s = sigma[i]
        delta = 0.0
        for pos in range(k):
            acc = 0.0
            for j in range(size):
                rem = j
                flat = i * powers[pos]
                sgn = 1.0
                # digits of j map to the k-1 axes around pos, most
                # significant first; axis a < pos reads the flipped spin.
                for m in range(k - 1):
                    a = m if m < pos else m + 1
                    p = n ** (k - 2 - m)
                    d = rem // p
                    rem -= d * p
                    flat += d * powers[a]
                    if d == i:
                        sgn *= -s if a < pos else s
                    else:
                        sgn *= sigma[d]
                acc += tflat[flat] * sgn
            delta += (-2.0 * s) * acc
        e += scale * delta
        sigma[i] = -s
        c ^= 1 << i
        table[c] += e
