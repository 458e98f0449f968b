"""Exact landscapes for desk-scale N.

enumerate_table computes H over all 2^N configurations via a Gray-code walk
with incremental flip deltas, split into a fixed set of 2^min(N,6) blocks.
Each block re-anchors with one direct evaluation, so rounding drift cannot
accumulate across blocks, and the block structure never depends on the
worker count: outputs are bit-identical for any number of workers.  Degrees
are accumulated one after another so every table entry sees the same
addition order.

On top of the table: exact Gibbs ensembles (log-partition, inverse-CDF
sampling, band masses), superlevel sets {H >= beta' xi(1) N}, exact maxima
over fixed-overlap slices, and the planted-vs-null log-likelihood ratio

    log LR = log Z_N(beta) - N log 2 - beta^2 N xi(1) / 2,

which equals the log of the ratio of the planted marginal density of the
couplings to the null density.
"""

from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import logsumexp

from . import _kernels, rng
from .bits import all_spins, config_to_spins, masks_of_weight, popcount, spins_to_config
from .disorder import DisorderTensor, energy_batch
from .errors import DomainError, ResourceCapError, ShapeMismatchError
from .mixture import MixtureSpec, format_mixture, parse_mixture, xi

__all__ = [
    "EnergyTable",
    "GibbsEnsemble",
    "SliceMax",
    "enumerate_table",
    "gibbs_ensemble",
    "log_partition",
    "gibbs_sample",
    "superlevel",
    "energy_band_mass",
    "slice_max",
    "log_likelihood_ratio",
    "save_table",
    "load_table",
    "MAX_SITES",
]

MAX_SITES = 26


@dataclass(eq=False)
class EnergyTable:
    """H at every configuration; index bit i encodes spin i (bit 1 = -1)."""

    n: int
    spec: MixtureSpec
    energies: np.ndarray
    seed: int | None
    kind: str


@dataclass(eq=False)
class GibbsEnsemble:
    """Exact Gibbs weights exp(beta H - log Z) over the table."""

    table: EnergyTable
    beta: float
    log_z: float
    log_weights: np.ndarray


def _default_workers() -> int:
    env = os.environ.get("PSPINLAB_WORKERS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def enumerate_table(g: DisorderTensor, workers: int | None = None,
                    max_sites: int = MAX_SITES) -> EnergyTable:
    """Exact energy table for all 2^N configurations.

    The Gray walk is split into fixed blocks processed by `workers` threads;
    block boundaries and per-block arithmetic are worker-independent.
    """
    n = g.n
    if n > max_sites:
        raise ResourceCapError(
            f"2^{n} table exceeds the {max_sites}-site enumeration cap", 1 << n
        )
    if workers is None:
        workers = _default_workers()
    total = 1 << n
    nblocks = 1 << min(n, 6)
    block = total // nblocks
    bounds = [(b * block, (b + 1) * block) for b in range(nblocks)]
    table = np.zeros(total)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for k, gamma in g.spec.terms:
            scale = gamma * float(n) ** (-(k - 1) / 2.0)
            flat = np.ascontiguousarray(g.couplings[k])
            if k == 2:
                t2 = flat.reshape(n, n)
                r2 = np.ascontiguousarray(t2 + t2.T).reshape(-1)
                jobs = [
                    pool.submit(_kernels.walk2, table, flat, r2, n, t0, t1, scale)
                    for t0, t1 in bounds
                ]
            elif k == 3:
                t3 = flat.reshape(n, n, n)
                r3 = np.ascontiguousarray(
                    t3 + t3.transpose(1, 0, 2) + t3.transpose(2, 0, 1)
                ).reshape(-1)
                diag3 = np.ascontiguousarray(np.einsum("iii->i", t3))
                jobs = [
                    pool.submit(_kernels.walk3, table, flat, r3, diag3, n, t0, t1, scale)
                    for t0, t1 in bounds
                ]
            else:
                jobs = [
                    pool.submit(_kernels.walk_generic, table, flat, k, n, t0, t1, scale)
                    for t0, t1 in bounds
                ]
            # Degrees must land in a fixed order at every entry.
            for j in jobs:
                j.result()
    return EnergyTable(n=n, spec=g.spec, energies=table, seed=g.seed, kind=g.kind)


def log_partition(table: EnergyTable, beta: float) -> float:
    """log Z_N(beta) = log sum_sigma exp(beta H(sigma))."""
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    return float(logsumexp(beta * table.energies))


def gibbs_ensemble(table: EnergyTable, beta: float) -> GibbsEnsemble:
    log_z = log_partition(table, beta)
    return GibbsEnsemble(
        table=table, beta=beta, log_z=log_z,
        log_weights=beta * table.energies - log_z,
    )


def gibbs_sample(ens: GibbsEnsemble, count: int, seed: int) -> np.ndarray:
    """Exact i.i.d. draws from the ensemble, as configuration indexes."""
    if count < 0:
        raise DomainError(f"count must be >= 0, got {count}")
    cdf = np.cumsum(np.exp(ens.log_weights))
    u = rng.uniforms(seed, (rng.TAG_GIBBS,), count)
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(cdf) - 1).astype(np.uint64)


def superlevel(table: EnergyTable, beta_level: float, xi1: float | None = None) -> np.ndarray:
    """Boolean mask of {sigma : H(sigma) >= beta_level * xi(1) * N}."""
    if xi1 is None:
        xi1 = xi(table.spec, 1.0)
    return table.energies >= beta_level * xi1 * table.n


def energy_band_mass(ens: GibbsEnsemble, eps: float) -> float:
    """Exact Gibbs mass of {|H / (N xi(1) beta) - 1| <= eps}."""
    if ens.beta <= 0:
        raise DomainError("energy band is defined for beta > 0")
    if eps < 0:
        raise DomainError(f"eps must be >= 0, got {eps}")
    scale = ens.table.n * xi(ens.table.spec, 1.0) * ens.beta
    mask = np.abs(ens.table.energies / scale - 1.0) <= eps
    if not mask.any():
        return 0.0
    return float(np.exp(logsumexp(ens.log_weights[mask])))


@dataclass(frozen=True)
class SliceMax:
    """Exact max of H/N over a fixed-overlap slice."""

    value: float
    q_requested: float
    q_used: float
    overlap: int
    adjusted: bool
    route: str
    slice_size: int


def _feasible_overlap(n: int, q: float) -> tuple[int, bool]:
    """Nearest integer overlap with the parity of n; ties toward larger."""
    target = n * q
    lo = math.floor(target)
    if (n - lo) % 2 != 0:
        lo -= 1
    hi = lo + 2
    m = hi if abs(hi - target) <= abs(lo - target) else lo
    m = max(-n, min(n, m))
    return m, abs(m - target) > 1e-9


def slice_max(source: EnergyTable | DisorderTensor, sigma: np.ndarray, q: float) -> SliceMax:
    """max{H(sigma')/N : <sigma, sigma'> = N q}, exact.

    Infeasible overlaps (parity) are rounded to the nearest feasible value
    and reported via q_used/adjusted.  Small slices are enumerated as
    sign-flip subsets of sigma; otherwise the full table is filtered.
    """
    if not -1.0 <= q <= 1.0:
        raise DomainError(f"q must be in [-1, 1], got {q}")
    n = source.n
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.shape != (n,) or not np.all(np.abs(sigma) == 1.0):
        raise ShapeMismatchError("sigma must be a +-1 vector of length N")
    m, adjusted = _feasible_overlap(n, q)
    d = (n - m) // 2
    size = comb(n, d)
    ref = spins_to_config(sigma)

    use_subsets = size <= (1 << n) // 4
    if use_subsets:
        configs = np.uint64(ref) ^ masks_of_weight(n, d)
        if isinstance(source, EnergyTable):
            vals = source.energies[configs]
        else:
            vals = energy_batch(source, config_to_spins(configs, n))
        route = "subset"
    else:
        if isinstance(source, EnergyTable):
            table = source
        else:
            table = enumerate_table(source)
        idx = np.arange(1 << n, dtype=np.uint64)
        dist = popcount(idx ^ np.uint64(ref))
        vals = table.energies[dist == d]
        route = "filter"
    return SliceMax(
        value=float(np.max(vals)) / n, q_requested=q, q_used=m / n,
        overlap=m, adjusted=adjusted, route=route, slice_size=size,
    )


def log_likelihood_ratio(table: EnergyTable, beta: float) -> float:
    """log (planted marginal density / null density) of the realized couplings.

    Equals log Z_N(beta) - N log 2 - beta^2 N xi(1) / 2 by Gaussian algebra.
    """
    n = table.n
    return (
        log_partition(table, beta)
        - n * math.log(2.0)
        - 0.5 * beta * beta * n * xi(table.spec, 1.0)
    )


_MAGIC = b"PSET"
_FORMAT_VERSION = 1


def save_table(table: EnergyTable, path: str) -> None:
    """Binary dump: {magic, version, N, mixture, seed, kind} + 2^N float64 LE."""
    mix = format_mixture(table.spec).encode()
    kind = table.kind.encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _FORMAT_VERSION, table.n))
        fh.write(struct.pack("<H", len(mix)))
        fh.write(mix)
        has_seed = table.seed is not None
        fh.write(struct.pack("<BQ", has_seed, table.seed if has_seed else 0))
        fh.write(struct.pack("<H", len(kind)))
        fh.write(kind)
        fh.write(np.ascontiguousarray(table.energies, dtype="<f8").tobytes())


def load_table(path: str) -> EnergyTable:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise DomainError(f"{path}: not an energy table dump")
        version, n = struct.unpack("<II", fh.read(8))
        if version != _FORMAT_VERSION:
            raise DomainError(f"{path}: unsupported format version {version}")
        (mix_len,) = struct.unpack("<H", fh.read(2))
        spec = parse_mixture(fh.read(mix_len).decode())
        has_seed, seed = struct.unpack("<BQ", fh.read(9))
        (kind_len,) = struct.unpack("<H", fh.read(2))
        kind = fh.read(kind_len).decode()
        raw = fh.read(8 * (1 << n))
        if len(raw) != 8 * (1 << n) or fh.read(1):
            raise ShapeMismatchError(f"{path}: wrong energy block size")
        energies = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    return EnergyTable(n=n, spec=spec, energies=energies,
                       seed=int(seed) if has_seed else None, kind=kind)


def spins_of(table: EnergyTable, configs: np.ndarray) -> np.ndarray:
    """Decode configuration indexes drawn from this table."""
    return config_to_spins(configs, table.n)


def all_configurations(n: int) -> np.ndarray:
    """(2^n, n) spin matrix aligned with table indexing (test/demo helper)."""
    return all_spins(n)
