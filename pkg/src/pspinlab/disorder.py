"""Gaussian disorder tensors and energy evaluation.

A disorder realization G holds, for each degree k of the mixture, the flat
C-ordered array of i.i.d. standard normal couplings g_{i1..ik} over all N^k
ordered tuples.  The Hamiltonian is

    H(sigma; G) = sum_k gamma_k N^{-(k-1)/2} sum_{i1..ik} g_{i1..ik}
                  sigma_{i1} ... sigma_{ik},

so E[H(sigma) H(sigma')] = N xi(<sigma, sigma'>/N).  Couplings are stored
raw (unscaled); the gamma_k N^{-(k-1)/2} prefactors are applied at
evaluation time.

Planting adds the mean beta gamma_k N^{-(k-1)/2} sigma*_{i1}...sigma*_{ik}
to each raw coupling, which tilts energies by exactly
H(sigma; G) = beta N xi(<sigma*, sigma>/N) + H(sigma; Gtilde).

The interpolation G_tau = (1 - tau) G + sqrt(2 tau - tau^2) G' preserves
the coupling variance for all tau and reaches an independent copy at tau=1.

All sampling is split-stable: coupling index i of degree k depends only on
(seed, k, i), so arrays are reproducible regardless of order or blocking.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import DomainError, ResourceCapError, ShapeMismatchError
from .mixture import MixtureSpec, format_mixture, parse_mixture, xi

__all__ = [
    "DisorderTensor",
    "PlantedInstance",
    "sample_null",
    "sample_planted",
    "interpolate",
    "energy",
    "energy_batch",
    "flip_delta",
    "save_tensor",
    "load_tensor",
    "MAX_SCALARS",
]

MAX_SCALARS = 10**8

_KINDS = ("null", "planted", "interpolated", "custom")


@dataclass(eq=False)
class DisorderTensor:
    """Raw couplings per degree, flat in C (mixed-radix) order."""

    n: int
    spec: MixtureSpec
    couplings: dict[int, np.ndarray]
    seed: int | None
    kind: str

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if self.kind not in _KINDS:
            raise DomainError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if set(self.couplings) != set(self.spec.degrees):
            raise ShapeMismatchError(
                f"couplings for degrees {sorted(self.couplings)} do not match "
                f"mixture degrees {self.spec.degrees}"
            )
        for k, arr in self.couplings.items():
            if arr.shape != (self.n**k,):
                raise ShapeMismatchError(
                    f"degree {k} array has shape {arr.shape}, want ({self.n**k},)"
                )

    @property
    def total_scalars(self) -> int:
        return sum(self.n**k for k in self.spec.degrees)


@dataclass(eq=False)
class PlantedInstance:
    """A planted draw: shifted tensor, its center, the tilt, and the null part."""

    tensor: DisorderTensor
    null_tensor: DisorderTensor
    center: np.ndarray
    beta: float
    seed: int


def _check_budget(n: int, spec: MixtureSpec, max_scalars: int) -> None:
    total = sum(n**k for k in spec.degrees)
    if total > max_scalars:
        raise ResourceCapError(
            f"tensor needs {total} scalars, cap is {max_scalars}", total
        )


def sample_null(n: int, spec: MixtureSpec, seed: int,
                max_scalars: int = MAX_SCALARS) -> DisorderTensor:
    """i.i.d. standard normal couplings for every degree of the mixture."""
    _check_budget(n, spec, max_scalars)
    couplings = {
        k: rng.normals(seed, (rng.TAG_COUPLING, k), n**k) for k in spec.degrees
    }
    return DisorderTensor(n=n, spec=spec, couplings=couplings, seed=seed, kind="null")


def _sign_pattern(center: np.ndarray, k: int) -> np.ndarray:
    """Flat C-ordered array of products center_{i1} ... center_{ik}."""
    pat = center.astype(np.float64)
    for _ in range(k - 1):
        pat = (pat[:, None] * center[None, :]).reshape(-1)
    return pat


def sample_planted(n: int, spec: MixtureSpec, beta: float, seed: int,
                   max_scalars: int = MAX_SCALARS) -> PlantedInstance:
    """Draw sigma* uniformly, then couplings with mean tilted toward it."""
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    _check_budget(n, spec, max_scalars)
    center = rng.rademacher(seed, (rng.TAG_CENTER,), n)
    null_c: dict[int, np.ndarray] = {}
    shifted: dict[int, np.ndarray] = {}
    for k, g in spec.terms:
        base = rng.normals(seed, (rng.TAG_COUPLING, k), n**k)
        null_c[k] = base
        shift = beta * g * float(n) ** (-(k - 1) / 2.0) * _sign_pattern(center, k)
        shifted[k] = base + shift
    null_tensor = DisorderTensor(n=n, spec=spec, couplings=null_c, seed=seed, kind="null")
    tensor = DisorderTensor(n=n, spec=spec, couplings=shifted, seed=seed, kind="planted")
    return PlantedInstance(
        tensor=tensor, null_tensor=null_tensor, center=center, beta=beta, seed=seed
    )


def interpolate(a: DisorderTensor, b: DisorderTensor, tau: float) -> DisorderTensor:
    """Variance-preserving path (1-tau) a + sqrt(2 tau - tau^2) b."""
    if not 0.0 <= tau <= 1.0:
        raise DomainError(f"tau must be in [0, 1], got {tau}")
    if a.n != b.n or a.spec != b.spec:
        raise ShapeMismatchError("tensors differ in size or mixture")
    c1 = 1.0 - tau
    c2 = np.sqrt(tau * (2.0 - tau))
    couplings = {k: c1 * a.couplings[k] + c2 * b.couplings[k] for k in a.spec.degrees}
    return DisorderTensor(n=a.n, spec=a.spec, couplings=couplings, seed=None,
                          kind="interpolated")


def _validate_sigma(g: DisorderTensor, sigma: np.ndarray) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.shape != (g.n,):
        raise ShapeMismatchError(f"sigma has shape {sigma.shape}, want ({g.n},)")
    return sigma


def energy(g: DisorderTensor, sigma: np.ndarray) -> float:
    """H(sigma; G) by direct contraction of each degree with sigma.

    sigma may be any real vector of length N (multilinear extension); spin
    configurations are the +-1 case.
    """
    sigma = _validate_sigma(g, sigma)
    n = g.n
    total = 0.0
    for k, gamma in g.spec.terms:
        v = g.couplings[k]
        for _ in range(k):
            v = v.reshape(-1, n) @ sigma
        total += gamma * float(n) ** (-(k - 1) / 2.0) * float(v[0] if v.ndim else v)
    return total


def energy_batch(g: DisorderTensor, spins: np.ndarray) -> np.ndarray:
    """H for every row of an (m, N) matrix at once (BLAS contraction)."""
    spins = np.asarray(spins, dtype=np.float64)
    if spins.ndim != 2 or spins.shape[1] != g.n:
        raise ShapeMismatchError(f"spins has shape {spins.shape}, want (m, {g.n})")
    n = g.n
    m = spins.shape[0]
    out = np.zeros(m)
    for k, gamma in g.spec.terms:
        x = spins @ g.couplings[k].reshape(n, -1)
        for _ in range(k - 1):
            x = (x.reshape(m, n, -1) * spins[:, :, None]).sum(axis=1)
        out += gamma * float(n) ** (-(k - 1) / 2.0) * x.reshape(m)
    return out


def flip_delta(g: DisorderTensor, sigma: np.ndarray, i: int) -> float:
    """H(sigma with spin i flipped) - H(sigma), in O(sum_k k N^{k-1}).

    Telescopes the flip one tensor axis at a time: the term for axis `pos`
    contracts the axis-`pos` slice at index i with the flipped spins on the
    axes before it and the original spins after it.  Tuples containing i
    with odd multiplicity end up flipped, even multiplicities cancel.
    """
    sigma = _validate_sigma(g, sigma)
    if not np.all(np.abs(sigma) == 1.0):
        raise DomainError("flip_delta needs a +-1 configuration")
    if not 0 <= i < g.n:
        raise DomainError(f"site {i} outside range(0, {g.n})")
    n = g.n
    flipped = sigma.copy()
    flipped[i] = -sigma[i]
    delta = 0.0
    for k, gamma in g.spec.terms:
        tensor = g.couplings[k].reshape((n,) * k)
        acc = 0.0
        for pos in range(k):
            x = np.take(tensor, i, axis=pos)
            for _ in range(pos):
                x = np.tensordot(flipped, x, axes=(0, 0))
            for _ in range(k - 1 - pos):
                x = np.tensordot(sigma, x, axes=(0, 0))
            acc += float(x)
        delta += gamma * float(n) ** (-(k - 1) / 2.0) * (-2.0 * sigma[i]) * acc
    return delta


_MAGIC = b"PSGT"
_FORMAT_VERSION = 1
_KIND_CODE = {k: i for i, k in enumerate(_KINDS)}


def save_tensor(g: DisorderTensor, path: str) -> None:
    """Binary dump: header {magic, version, N, degrees, mixture, seed, kind}
    followed by per-degree little-endian float64 blocks in degree order."""
    mix = format_mixture(g.spec).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIH", _FORMAT_VERSION, g.n, len(g.spec.degrees)))
        fh.write(struct.pack(f"<{len(g.spec.degrees)}I", *g.spec.degrees))
        fh.write(struct.pack("<H", len(mix)))
        fh.write(mix)
        has_seed = g.seed is not None
        fh.write(struct.pack("<BQB", has_seed, g.seed if has_seed else 0,
                             _KIND_CODE[g.kind]))
        for k in g.spec.degrees:
            fh.write(np.ascontiguousarray(g.couplings[k], dtype="<f8").tobytes())


def load_tensor(path: str) -> DisorderTensor:
    """Inverse of save_tensor; validates magic, version and block sizes."""
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise DomainError(f"{path}: not a disorder tensor dump")
        version, n, ndeg = struct.unpack("<IIH", fh.read(10))
        if version != _FORMAT_VERSION:
            raise DomainError(f"{path}: unsupported format version {version}")
        degrees = struct.unpack(f"<{ndeg}I", fh.read(4 * ndeg))
        (mix_len,) = struct.unpack("<H", fh.read(2))
        spec = parse_mixture(fh.read(mix_len).decode())
        if spec.degrees != degrees:
            raise ShapeMismatchError(f"{path}: degree list does not match mixture")
        has_seed, seed, kind_code = struct.unpack("<BQB", fh.read(10))
        couplings = {}
        for k in degrees:
            raw = fh.read(8 * n**k)
            if len(raw) != 8 * n**k:
                raise ShapeMismatchError(f"{path}: truncated block for degree {k}")
            couplings[k] = np.frombuffer(raw, dtype="<f8").astype(np.float64)
        if fh.read(1):
            raise ShapeMismatchError(f"{path}: trailing bytes after last block")
    return DisorderTensor(
        n=n, spec=spec, couplings=couplings,
        seed=int(seed) if has_seed else None, kind=_KINDS[kind_code],
    )


def covariance_check_value(spec: MixtureSpec, n: int, q: float) -> float:
    """Model covariance N xi(q) for tests and reports."""
    return n * xi(spec, q)
