"""Overlap-gap probes: slice maxima, correlated-disorder witnesses,
exceptional sets.

Three families of measurements live here.

Slice maxima.  For i.i.d. disorder the expected maximum of H over the slice
{sigma' : <sigma, sigma'> = Nq} is bounded by comparison with a decoupled
Gaussian process; the resulting closed form is 2 sqrt(xi'(1)) N phi(h) with
h = Phi^{-1}((1+q)/2).  sf_bound evaluates the bound, sf_empirical estimates
the true expectation by Monte Carlo with exact per-draw slice scans.

Witness probabilities.  For a configuration sigma and interpolated disorder
G_tau = (1-tau) G + sqrt(2 tau - tau^2) G', the witness event asks for a
sigma' with H(sigma'; G_tau) >= beta' xi(1) N and overlap <sigma, sigma'>/N
inside a window.  soft_ogp_estimate measures the probability of that event
under Gibbs samples (null model) or planted centers; tau1_probability handles
the independent-disorder endpoint.  Inner existence tests are exact full-table
scans, so the only stochastic error is the outer Monte Carlo loop.

Exceptional sets.  A point sigma in the super-level set is exceptional at
level tau when its conditional witness probability given G is at least
e^{-cN/2}; the exceptional set of a disorder is the union over a tau grid
{k/K : k < K}.  Membership uses an open overlap window and per-(tau, replica)
derived seeds keyed by the bit pattern of tau, so refining K from K to 2K
reuses the shared grid points exactly and per-sample monotonicity in both K
and c holds exactly, not just in distribution.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import rng
from .bits import config_to_spins, spins_to_config
from .disorder import DisorderTensor, energy, interpolate, sample_null, sample_planted
from .errors import DomainError
from .landscape import (
    EnergyTable,
    enumerate_table,
    gibbs_ensemble,
    gibbs_sample,
    slice_max,
    superlevel,
)
from .mixture import MixtureSpec, xi
from .thresholds import OgpBand, gauss_pdf, half_quantile

__all__ = [
    "SoftOgpEstimate",
    "MembershipResult",
    "MassEstimate",
    "sf_bound",
    "sf_empirical",
    "soft_ogp_estimate",
    "tau1_probability",
    "exceptional_membership",
    "exceptional_mass",
]


@dataclass(frozen=True)
class SoftOgpEstimate:
    """Monte Carlo probability of the banded-overlap witness event."""

    tau: float
    band: OgpBand
    beta: float
    beta_prime: float
    estimate: float
    std_error: float
    replicas: int
    mode: str
    note: str | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.estimate <= 1.0:
            raise DomainError(f"estimate outside [0, 1]: {self.estimate}")
        if self.std_error < 0:
            raise DomainError(f"negative std error: {self.std_error}")


@dataclass(frozen=True)
class MembershipResult:
    """Exceptional-set membership of one configuration.

    member compares the Monte Carlo conditional probability against
    e^{-cN/2}; indeterminate flags estimates within two standard errors of
    the threshold, where the comparison is not trustworthy.  in_domain is
    False when the configuration is not in the super-level set at beta',
    in which case member is False by convention.
    """

    in_domain: bool
    member: bool
    conditional_prob: float
    std_error: float
    threshold: float
    indeterminate: bool


@dataclass(frozen=True)
class MassEstimate:
    """Estimated Gibbs mass of the exceptional set over a disorder ensemble."""

    mass: float
    std_error: float
    indicators: np.ndarray  # bool, shape (num tensors, replicas)
    witness_probs: np.ndarray  # float, shape (num tensors, replicas, K)
    threshold: float
    grid: tuple[float, ...]


def _float_tag(x: float) -> int:
    """Stable 64-bit tag from the bit pattern of a float."""
    return struct.unpack("<Q", struct.pack("<d", float(x)))[0]


def _window_ints(n: int, q_low: float, q_high: float, closed: bool) -> tuple[int, int]:
    """Integer overlap bounds for <sigma, sigma'> in the window.

    Closed windows include integer overlaps equal to n*q; open windows
    exclude them.  Returns (lo, hi) with the window empty when lo > hi.
    """
    if closed:
        lo = math.ceil(q_low * n - 1e-9)
        hi = math.floor(q_high * n + 1e-9)
    else:
        lo = math.floor(q_low * n + 1e-9) + 1
        hi = math.ceil(q_high * n - 1e-9) - 1
    return lo, hi


def _window_empty(n: int, lo: int, hi: int) -> bool:
    """True when no overlap of the parity of n lies in [lo, hi]."""
    if lo > hi:
        return True
    first = lo if (lo - n) % 2 == 0 else lo + 1
    return first > hi


def _window_hit(n: int, s_configs: np.ndarray, cfg: int, lo: int, hi: int) -> bool:
    if len(s_configs) == 0 or lo > hi:
        return False
    d = np.bitwise_count(s_configs ^ np.uint32(cfg)).astype(np.int64)
    ov = n - 2 * d
    return bool(np.any((ov >= lo) & (ov <= hi)))


def sf_bound(spec: MixtureSpec, n: int, q: float) -> float:
    """Comparison-process bound 2 sqrt(xi'(1)) N phi(Phi^{-1}((1+q)/2))."""
    if not 0.0 <= q < 1.0:
        raise DomainError(f"q must lie in [0, 1), got {q}")
    return 2.0 * math.sqrt(xi(spec, 1.0, order=1)) * n * gauss_pdf(half_quantile(q))


def sf_empirical(
    spec: MixtureSpec,
    n: int,
    q: float,
    replicas: int,
    seed: int,
    tensor_factory: Callable[[int], DisorderTensor] | None = None,
) -> tuple[float, float]:
    """Monte Carlo E[max over the overlap-q slice of H] for i.i.d. disorder.

    The reference configuration is all-ones (the slice law is invariant under
    global sign flips of sites).  Each draw's slice maximum is exact.
    tensor_factory, when given, replaces the i.i.d. sampling (testing seam);
    it receives the replica index.  Returns (mean, standard error) in
    absolute energy units, comparable with sf_bound.
    """
    if replicas < 1:
        raise DomainError(f"replicas must be >= 1, got {replicas}")
    ref = np.ones(n)
    values = np.empty(replicas)
    for i in range(replicas):
        if tensor_factory is not None:
            g = tensor_factory(i)
        else:
            g = sample_null(n, spec, rng.derive(seed, rng.TAG_REPLICA, i))
        values[i] = slice_max(g, ref, q).value * n
    se = float(values.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
    return float(values.mean()), se


def soft_ogp_estimate(
    mode: str,
    n: int,
    spec: MixtureSpec,
    beta: float,
    beta_prime: float,
    band: OgpBand,
    tau: float,
    outer_replicas: int,
    inner_samples: int,
    seed: int,
    workers: int | None = None,
) -> SoftOgpEstimate:
    """Probability of a banded-overlap witness in correlated disorder.

    Null mode: draw G, exact-sample inner_samples configurations from the
    Gibbs measure at beta, draw an independent G', and test each sample for a
    witness sigma' in the super-level set of G_tau at beta' with overlap in
    the closed window [q_low, q_high].  Planted mode: draw (G, sigma) from
    the planted joint law instead (inner_samples is ignored there, the center
    is the sample).  The standard error is computed across outer replicas, so
    correlations between same-disorder samples are accounted for.
    """
    if mode not in ("null_model", "planted_model"):
        raise DomainError(f"mode must be null_model or planted_model, got {mode!r}")
    if outer_replicas < 1 or inner_samples < 1:
        raise DomainError("outer_replicas and inner_samples must be >= 1")
    if not 0.0 <= tau <= 1.0:
        raise DomainError(f"tau must lie in [0, 1], got {tau}")

    xi1 = xi(spec, 1.0)
    lo, hi = _window_ints(n, band.q_low, band.q_high, closed=True)
    note = None
    if _window_empty(n, lo, hi):
        note = "empty overlap window at this parity grid"

    per_replica = np.empty(outer_replicas)
    for i in range(outer_replicas):
        seed_i = rng.derive(seed, rng.TAG_REPLICA, i)
        if mode == "null_model":
            g = sample_null(n, spec, seed_i)
            table = enumerate_table(g, workers=workers)
            ens = gibbs_ensemble(table, beta)
            cfgs = gibbs_sample(ens, inner_samples, rng.derive(seed_i, rng.TAG_GIBBS))
        else:
            inst = sample_planted(n, spec, beta, seed_i)
            g = inst.tensor
            cfgs = np.array([spins_to_config(inst.center)], dtype=np.uint64)
        if note is not None:
            per_replica[i] = 0.0
            continue
        gp = sample_null(n, spec, rng.derive(seed_i, rng.TAG_WITNESS))
        table_tau = enumerate_table(interpolate(g, gp, tau), workers=workers)
        s_configs = np.nonzero(superlevel(table_tau, beta_prime, xi1=xi1))[0]
        s_configs = s_configs.astype(np.uint32)
        hits = [_window_hit(n, s_configs, int(c), lo, hi) for c in cfgs]
        per_replica[i] = float(np.mean(hits))

    est = float(per_replica.mean())
    if outer_replicas > 1:
        se = float(per_replica.std(ddof=1) / math.sqrt(outer_replicas))
    else:
        se = 0.0
    return SoftOgpEstimate(
        tau=tau, band=band, beta=beta, beta_prime=beta_prime, estimate=est,
        std_error=se, replicas=outer_replicas, mode=mode, note=note,
    )


def tau1_probability(
    n: int,
    spec: MixtureSpec,
    beta: float,
    q_low: float,
    replicas: int,
    seed: int,
    workers: int | None = None,
) -> tuple[float, float]:
    """P(exists sigma' in S_beta(G') with <sigma, sigma'>/N >= q_low).

    G' is fresh disorder, independent of sigma, so by sign invariance sigma
    is fixed to all-ones.  The inner scan is exact; returns (estimate,
    standard error).  For a fixed replica the indicator is monotone in q_low
    by construction (the same maximal overlap decides every threshold).
    """
    if replicas < 1:
        raise DomainError(f"replicas must be >= 1, got {replicas}")
    xi1 = xi(spec, 1.0)
    lo = math.ceil(q_low * n - 1e-9)
    hits = np.empty(replicas)
    for i in range(replicas):
        g = sample_null(n, spec, rng.derive(seed, rng.TAG_REPLICA, i))
        table = enumerate_table(g, workers=workers)
        s_configs = np.nonzero(superlevel(table, beta, xi1=xi1))[0].astype(np.uint32)
        hits[i] = float(_window_hit(n, s_configs, 0, lo, n))
    est = float(hits.mean())
    se = float(hits.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
    return est, se


def _witness_hits(
    g: DisorderTensor,
    beta_prime: float,
    band: OgpBand,
    tau: float,
    sigma_cfgs: np.ndarray,
    inner_replicas: int,
    seed: int,
    workers: int | None = None,
) -> np.ndarray:
    """Witness indicators, shape (len(sigma_cfgs), inner_replicas).

    The overlap window is open, matching exceptional-set membership.  The
    fresh-disorder seed for inner replica j at level tau is derived from
    (seed, tau bit pattern, j), independent of the sigma list and of any
    surrounding grid, which is what makes grid refinements exactly nested.
    At tau = 0 the interpolation returns G itself, so a single exact scan
    serves every inner replica.
    """
    n = g.n
    xi1 = xi(g.spec, 1.0)
    lo, hi = _window_ints(n, band.q_low, band.q_high, closed=False)
    hits = np.zeros((len(sigma_cfgs), inner_replicas), dtype=bool)
    if lo > hi or inner_replicas == 0:
        return hits
    if tau == 0.0:
        table = enumerate_table(g, workers=workers)
        s_configs = np.nonzero(superlevel(table, beta_prime, xi1=xi1))[0]
        s_configs = s_configs.astype(np.uint32)
        for si, cfg in enumerate(sigma_cfgs):
            hits[si, :] = _window_hit(n, s_configs, int(cfg), lo, hi)
        return hits
    for j in range(inner_replicas):
        gp = sample_null(
            n, g.spec, rng.derive(seed, rng.TAG_WITNESS, _float_tag(tau), j)
        )
        table = enumerate_table(interpolate(g, gp, tau), workers=workers)
        s_configs = np.nonzero(superlevel(table, beta_prime, xi1=xi1))[0]
        s_configs = s_configs.astype(np.uint32)
        for si, cfg in enumerate(sigma_cfgs):
            hits[si, j] = _window_hit(n, s_configs, int(cfg), lo, hi)
    return hits


def exceptional_membership(
    sigma: np.ndarray | int,
    g: DisorderTensor,
    beta_prime: float,
    band: OgpBand,
    tau: float,
    c: float,
    inner_replicas: int,
    seed: int,
    workers: int | None = None,
) -> MembershipResult:
    """Is sigma exceptional at level tau: witness probability >= e^{-cN/2}?

    sigma may be a +-1 vector or a configuration index.  Points outside the
    super-level set at beta' are out of domain and never members.  The
    conditional probability is a Monte Carlo average of exact witness scans
    over fresh disorder; estimates within two standard errors of the
    threshold are flagged indeterminate rather than silently classified.
    """
    if c < 0:
        raise DomainError(f"c must be >= 0, got {c}")
    if inner_replicas < 1:
        raise DomainError(f"inner_replicas must be >= 1, got {inner_replicas}")
    n = g.n
    if isinstance(sigma, (int, np.integer)):
        cfg = int(sigma)
        spins = config_to_spins(cfg, n)
    else:
        spins = np.asarray(sigma, dtype=np.float64)
        cfg = spins_to_config(spins)
    threshold = math.exp(-c * n / 2.0)
    level = beta_prime * xi(g.spec, 1.0) * n
    if energy(g, spins) < level:
        return MembershipResult(
            in_domain=False, member=False, conditional_prob=0.0,
            std_error=0.0, threshold=threshold, indeterminate=False,
        )
    hits = _witness_hits(
        g, beta_prime, band, tau, np.array([cfg], dtype=np.uint64),
        inner_replicas, seed, workers=workers,
    )[0]
    p = float(hits.mean())
    se = (
        float(hits.std(ddof=1) / math.sqrt(inner_replicas))
        if inner_replicas > 1
        else 0.0
    )
    return MembershipResult(
        in_domain=True,
        member=p >= threshold,
        conditional_prob=p,
        std_error=se,
        threshold=threshold,
        indeterminate=abs(p - threshold) <= 2.0 * se,
    )


def exceptional_mass(
    tensors: Sequence[DisorderTensor],
    beta: float,
    beta_prime: float,
    band: OgpBand,
    K: int,
    c: float,
    replicas: int,
    seed: int,
    workers: int | None = None,
    detail: bool = False,
) -> float | MassEstimate:
    """Estimated E[mu_{beta, G}(union of exceptional sets over {k/K})].

    For each disorder, `replicas` configurations are exact-sampled from the
    Gibbs measure and tested for membership at every grid level; the inner
    witness tables are built once per (disorder, tau, inner replica) and
    shared across the samples.  Inner replica count equals `replicas` as
    well.  Returns the scalar mass, or the full per-sample indicator detail
    when detail=True.
    """
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    if replicas < 1:
        raise DomainError(f"replicas must be >= 1, got {replicas}")
    if c < 0:
        raise DomainError(f"c must be >= 0, got {c}")
    if len(tensors) == 0:
        raise DomainError("need at least one disorder tensor")
    grid = tuple(k / K for k in range(K))
    n = tensors[0].n
    threshold = math.exp(-c * n / 2.0)
    xi1 = xi(tensors[0].spec, 1.0)

    indicators = np.zeros((len(tensors), replicas), dtype=bool)
    probs = np.zeros((len(tensors), replicas, K))
    for gi, g in enumerate(tensors):
        table = enumerate_table(g, workers=workers)
        ens = gibbs_ensemble(table, beta)
        cfgs = gibbs_sample(ens, replicas, rng.derive(seed, rng.TAG_GIBBS, gi))
        in_domain = table.energies[cfgs] >= beta_prime * xi1 * n
        seed_g = rng.derive(seed, rng.TAG_WITNESS, gi)
        for k, tau in enumerate(grid):
            hits = _witness_hits(
                g, beta_prime, band, tau, cfgs, replicas, seed_g, workers=workers
            )
            probs[gi, :, k] = hits.mean(axis=1)
        member = (probs[gi] >= threshold).any(axis=1)
        indicators[gi] = member & in_domain
    per_tensor = indicators.mean(axis=1)
    mass = float(per_tensor.mean())
    if len(tensors) > 1:
        se = float(per_tensor.std(ddof=1) / math.sqrt(len(tensors)))
    else:
        se = (
            float(indicators[0].std(ddof=1) / math.sqrt(replicas))
            if replicas > 1
            else 0.0
        )
    if not detail:
        return mass
    return MassEstimate(
        mass=mass, std_error=se, indicators=indicators, witness_probs=probs,
        threshold=threshold, grid=grid,
    )
