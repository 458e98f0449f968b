"""Deterministic search algorithms and their stability diagnostics.

An algorithm here is a pure map from a disorder tensor to a point of
[-1, 1]^N with Euclidean norm at most sqrt(B N).  The module measures how
such maps respond to correlated perturbations of the disorder:

  chi_N(tau) = (1/N) E <A(G), A(G_tau)>,   G_tau = (1-tau) G + sqrt(2tau - tau^2) G',

estimated by Monte Carlo with the same (G, G') pair shared across the whole
tau grid of a replica.  For an L-Lipschitz map (in the coupling vector, with
||A|| <= sqrt(N)) the overlap concentrates around chi_N(tau) at Gaussian rate
2 exp(-N t^2 / (8 L^2)); chi_concentration_check compares empirical
exceedance frequencies against that rate, and falls back to a descriptive
empirical scale when no constant is claimed.

Three built-in baselines cover the extremes: a constant map (L = 0), a
clamped linear read-out of the diagonal couplings whose correlation curve is
exactly 1 - tau when the clamp is inactive, and a greedy single-spin-flip
ascent with no claimed constant.  A hash-based control is deliberately
unstable and should fail any claimed constant: it exists to prove the
concentration check can detect violations.

rarity_report assembles the terms that relate an algorithm's output to the
Gibbs geometry: the probabilities of landing outside the super-level sets at
beta and beta', the probability of landing in the exceptional set (union
over the tau grid {k/K : k < K}), and the Gibbs mass of that set for
contrast.  Real-valued outputs are rounded coordinatewise by sign, ties to
+1, before any set-membership test; both pre- and post-rounding energies are
recorded.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.random import Generator, Philox

from . import rng
from .disorder import DisorderTensor, energy, flip_delta, interpolate, sample_null
from .errors import DomainError, ShapeMismatchError
from .mixture import MixtureSpec, xi
from .ogp import MassEstimate, exceptional_mass, exceptional_membership
from .thresholds import OgpBand

__all__ = [
    "SearchAlgorithm",
    "ChiCurve",
    "ConcentrationRow",
    "ConcentrationCheck",
    "GridSelection",
    "RarityReport",
    "baseline_constant",
    "baseline_diagonal",
    "baseline_greedy",
    "baseline_hash_control",
    "chi_estimate",
    "chi_concentration_check",
    "required_grid_size",
    "grid_tau_select",
    "rarity_report",
]


@dataclass(frozen=True)
class SearchAlgorithm:
    """A named deterministic map from disorder to a point of [-1, 1]^N.

    lipschitz is the claimed Lipschitz constant with respect to the flat
    coupling vector (None when no constant is claimed); norm_bound is the B
    with ||output||^2 <= B N, checked on every call.
    """

    name: str
    fn: Callable[[DisorderTensor], np.ndarray]
    lipschitz: float | None
    norm_bound: float = 1.0

    def __post_init__(self) -> None:
        if self.lipschitz is not None and self.lipschitz < 0:
            raise DomainError(
                f"{self.name}: lipschitz must be >= 0, got {self.lipschitz}"
            )
        if not self.norm_bound > 0:
            raise DomainError(
                f"{self.name}: norm_bound must be positive, got {self.norm_bound}"
            )

    def __call__(self, g: DisorderTensor) -> np.ndarray:
        out = np.asarray(self.fn(g), dtype=np.float64)
        if out.shape != (g.n,):
            raise ShapeMismatchError(
                f"{self.name}: output shape {out.shape}, want ({g.n},)"
            )
        if not np.all(np.isfinite(out)):
            raise DomainError(f"{self.name}: non-finite output")
        if float(out @ out) > self.norm_bound * g.n * (1.0 + 1e-12) + 1e-9:
            raise DomainError(
                f"{self.name}: squared norm {float(out @ out):.6g} exceeds "
                f"B*N = {self.norm_bound * g.n:.6g}"
            )
        return out


@dataclass(frozen=True)
class ChiCurve:
    """Monte Carlo correlation curve of an algorithm along the interpolation."""

    taus: tuple[float, ...]
    estimates: tuple[float, ...]
    std_errors: tuple[float, ...]
    replicas: int
    algorithm: str
    n: int
    spec: MixtureSpec

    def __post_init__(self) -> None:
        if list(self.taus) != sorted(self.taus):
            raise DomainError("tau grid must be sorted")
        if not all(math.isfinite(v) for v in self.estimates):
            raise DomainError("non-finite chi estimate")


@dataclass(frozen=True)
class ConcentrationRow:
    t: float
    exceedance: float
    bound: float
    std_error: float
    passed: bool | None  # None in descriptive mode


@dataclass(frozen=True)
class ConcentrationCheck:
    """Empirical overlap-concentration table for one tau."""

    rows: tuple[ConcentrationRow, ...]
    chi_hat: float
    lipschitz: float
    descriptive: bool
    tau: float
    replicas: int
    algorithm: str


@dataclass(frozen=True)
class GridSelection:
    """Result of scanning a correlation curve for an in-window grid point."""

    k: int | None
    tau_k: float | None
    chi_at_k: float | None
    required_k: int | None
    no_witness: bool
    endpoint_failure: str | None


@dataclass(frozen=True)
class RarityReport:
    """All measured terms relating an algorithm's output to the Gibbs geometry."""

    algorithm: str
    n: int
    beta: float
    beta_prime: float
    band: OgpBand
    grid_k: int
    rate_c: float
    replicas: int
    inner_replicas: int
    p_not_in_s_beta: float
    p_not_in_s_beta_se: float
    p_not_in_s_beta_prime: float
    p_not_in_s_beta_prime_se: float
    p_in_exceptional: float
    p_in_exceptional_se: float
    gibbs_exceptional_mass: float
    gibbs_exceptional_mass_se: float
    combined_lhs: float
    rounding: str
    pre_energies: tuple[float, ...]
    post_energies: tuple[float, ...]
    not_in_beta_indicators: np.ndarray = field(repr=False, default=None)
    not_in_beta_prime_indicators: np.ndarray = field(repr=False, default=None)
    in_exceptional_indicators: np.ndarray = field(repr=False, default=None)


def baseline_constant(sigma0: np.ndarray) -> SearchAlgorithm:
    """Algorithm that ignores the disorder and returns the fixed point sigma0."""
    fixed = np.asarray(sigma0, dtype=np.float64).copy()
    if fixed.ndim != 1:
        raise ShapeMismatchError(f"sigma0 must be a vector, got shape {fixed.shape}")
    if not np.all(np.abs(fixed) <= 1.0 + 1e-12):
        raise DomainError("sigma0 coordinates must lie in [-1, 1]")

    def fn(g: DisorderTensor) -> np.ndarray:
        if g.n != len(fixed):
            raise ShapeMismatchError(
                f"constant baseline built for n={len(fixed)}, tensor has n={g.n}"
            )
        return fixed.copy()

    return SearchAlgorithm(name="constant", fn=fn, lipschitz=0.0, norm_bound=1.0)


def baseline_diagonal(scale: float) -> SearchAlgorithm:
    """Clamped linear read-out of the top-degree diagonal couplings.

    output_i = clamp(scale * g_{i,i,...,i}, -1, 1) using the highest degree
    in the mixture.  This map is linear in the couplings wherever the clamp
    is inactive, with exact Lipschitz constant `scale`, and its unclamped
    correlation curve is chi(tau)/chi(0) = 1 - tau by Gaussian bilinearity.
    """
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale}")

    def fn(g: DisorderTensor) -> np.ndarray:
        k = g.spec.max_degree
        n = g.n
        stride = (n**k - 1) // (n - 1) if n > 1 else 1
        diag = g.couplings[k][np.arange(n) * stride]
        return np.clip(scale * diag, -1.0, 1.0)

    return SearchAlgorithm(name="diagonal", fn=fn, lipschitz=scale, norm_bound=1.0)


def baseline_greedy(max_sweeps: int) -> SearchAlgorithm:
    """Single-spin-flip ascent: fixed site order, flip on strict improvement.

    Starts from all-ones and sweeps sites 0..n-1, flipping whenever the
    energy gain is strictly positive, until a full sweep makes no flip or
    max_sweeps is reached.  Deterministic; no Lipschitz constant is claimed.
    """
    if max_sweeps < 1:
        raise DomainError(f"max_sweeps must be >= 1, got {max_sweeps}")

    def fn(g: DisorderTensor) -> np.ndarray:
        sigma = np.ones(g.n)
        for _ in range(max_sweeps):
            changed = False
            for i in range(g.n):
                if flip_delta(g, sigma, i) > 0.0:
                    sigma[i] = -sigma[i]
                    changed = True
            if not changed:
                break
        return sigma

    return SearchAlgorithm(name="greedy", fn=fn, lipschitz=None, norm_bound=1.0)


def baseline_hash_control(claimed_lipschitz: float = 0.01) -> SearchAlgorithm:
    """Deliberately unstable control: signs derived from a hash of the couplings.

    Any perturbation of the disorder reshuffles the output completely, so the
    claimed Lipschitz constant is false by construction and the concentration
    check is expected to flag violations.  Exists as a negative control.
    """
    if not claimed_lipschitz > 0:
        raise DomainError(f"claimed_lipschitz must be positive, got {claimed_lipschitz}")

    def fn(g: DisorderTensor) -> np.ndarray:
        h = hashlib.blake2b(digest_size=16)
        h.update(g.n.to_bytes(4, "little"))
        for k in sorted(g.couplings):
            h.update(g.couplings[k].tobytes())
        key = np.frombuffer(h.digest(), dtype=np.uint64)
        gen = Generator(Philox(key=key))
        return np.where(gen.random(g.n) < 0.5, -1.0, 1.0)

    return SearchAlgorithm(
        name="hash_control", fn=fn, lipschitz=claimed_lipschitz, norm_bound=1.0
    )


def _overlap_draws(
    alg: SearchAlgorithm,
    n: int,
    spec: MixtureSpec,
    taus: np.ndarray,
    replicas: int,
    seed: int,
) -> np.ndarray:
    """Per-replica overlaps <A(G), A(G_tau)>/n, shape (replicas, len(taus)).

    One (G, G') pair per replica is shared across the entire tau grid, so
    curve differences along tau are not polluted by independent resampling.
    """
    out = np.empty((replicas, len(taus)))
    for i in range(replicas):
        g = sample_null(n, spec, rng.derive(seed, rng.TAG_REPLICA, i))
        gp = sample_null(n, spec, rng.derive(seed, rng.TAG_REPLICA, i, 1))
        x0 = alg(g)
        for j, tau in enumerate(taus):
            xt = alg(interpolate(g, gp, float(tau)))
            out[i, j] = float(x0 @ xt) / n
    return out


def chi_estimate(
    alg: SearchAlgorithm,
    n: int,
    spec: MixtureSpec,
    tau_grid,
    replicas: int,
    seed: int,
) -> ChiCurve:
    """Monte Carlo estimate of the correlation curve on a tau grid."""
    taus = np.unique(np.asarray(tau_grid, dtype=np.float64))
    if len(taus) == 0:
        raise DomainError("tau grid is empty")
    if taus[0] < 0.0 or taus[-1] > 1.0:
        raise DomainError("tau grid must lie inside [0, 1]")
    if replicas < 1:
        raise DomainError(f"replicas must be >= 1, got {replicas}")
    draws = _overlap_draws(alg, n, spec, taus, replicas, seed)
    est = draws.mean(axis=0)
    if replicas > 1:
        se = draws.std(axis=0, ddof=1) / math.sqrt(replicas)
    else:
        se = np.zeros(len(taus))
    return ChiCurve(
        taus=tuple(float(t) for t in taus),
        estimates=tuple(float(v) for v in est),
        std_errors=tuple(float(v) for v in se),
        replicas=replicas,
        algorithm=alg.name,
        n=n,
        spec=spec,
    )


def chi_concentration_check(
    alg: SearchAlgorithm,
    n: int,
    spec: MixtureSpec,
    tau: float,
    replicas: int,
    t_grid,
    seed: int,
) -> ConcentrationCheck:
    """Empirical exceedance of |overlap - chi_hat| >= t versus the Gaussian rate.

    With a claimed constant L the bound is 2 exp(-n t^2 / (8 L^2)) and each
    row passes when frequency <= bound + 3 SE (the L = 0 edge demands zero
    exceedance exactly).  Without a claimed constant the table is descriptive:
    L is replaced by the empirical scale std(overlap) sqrt(n)/2 and no
    pass/fail verdict is issued.
    """
    if replicas < 2:
        raise DomainError(f"replicas must be >= 2, got {replicas}")
    ts = [float(t) for t in t_grid]
    if any(t <= 0 for t in ts):
        raise DomainError("t grid must be positive")
    draws = _overlap_draws(
        alg, n, spec, np.array([float(tau)]), replicas, seed
    )[:, 0]
    chi_hat = float(draws.mean())
    descriptive = alg.lipschitz is None
    if descriptive:
        lip = float(draws.std(ddof=1)) * math.sqrt(n) / 2.0
    else:
        lip = float(alg.lipschitz)
    rows = []
    for t in ts:
        exceed = float(np.mean(np.abs(draws - chi_hat) >= t))
        se = math.sqrt(exceed * (1.0 - exceed) / replicas)
        if lip > 0:
            bound = 2.0 * math.exp(-n * t * t / (8.0 * lip * lip))
        else:
            bound = 0.0
        passed = None if descriptive else exceed <= bound + 3.0 * se
        rows.append(
            ConcentrationRow(
                t=t, exceedance=exceed, bound=min(bound, 1.0), std_error=se,
                passed=passed,
            )
        )
    return ConcentrationCheck(
        rows=tuple(rows), chi_hat=chi_hat, lipschitz=lip,
        descriptive=descriptive, tau=float(tau), replicas=replicas,
        algorithm=alg.name,
    )


def required_grid_size(L: float, band: OgpBand) -> int:
    """Grid size ceil(10 L^2 / (q_high - q_low)) for the intermediate-tau scan."""
    width = band.q_high - band.q_low
    if width <= 0:
        raise DomainError("band has no width")
    if L <= 0:
        raise DomainError(f"L must be positive, got {L}")
    # Guard against float noise pushing an exact integer over the ceiling.
    return math.ceil(10.0 * L * L / width * (1.0 - 1e-12))


def grid_tau_select(
    chi: ChiCurve,
    band: OgpBand,
    delta: float | None = None,
    L: float | None = None,
) -> GridSelection:
    """Find an interior grid point whose correlation lies inside the window.

    Preconditions on the curve endpoints: chi(0) > q_high - delta and
    chi(1) < q_low + delta.  If either fails, the selection reports which
    endpoint bound failed instead of choosing a point.  Otherwise the
    smallest interior k with chi(tau_k) strictly inside
    (q_low + delta, q_high - delta) is returned; when no grid point
    qualifies, the interior point closest to the window midpoint is returned
    with no_witness set.  delta defaults to a quarter of the window width and
    must stay below half of it.
    """
    width = band.q_high - band.q_low
    if width <= 0:
        raise DomainError("band has no width")
    if delta is None:
        delta = width / 4.0
    if not 0.0 < delta < width / 2.0:
        raise DomainError(
            f"delta must lie in (0, {width / 2.0}), got {delta}"
        )
    taus = chi.taus
    if len(taus) < 3:
        raise DomainError("curve needs at least three grid points")
    if abs(taus[0] - 0.0) > 1e-12 or abs(taus[-1] - 1.0) > 1e-12:
        raise DomainError("curve grid must start at tau=0 and end at tau=1")
    required = required_grid_size(L, band) if L is not None else None

    failures = []
    if not chi.estimates[0] > band.q_high - delta:
        failures.append(
            f"tau=0 endpoint: chi(0)={chi.estimates[0]:.6g} is not above "
            f"q_high - delta = {band.q_high - delta:.6g}"
        )
    if not chi.estimates[-1] < band.q_low + delta:
        failures.append(
            f"tau=1 endpoint: chi(1)={chi.estimates[-1]:.6g} is not below "
            f"q_low + delta = {band.q_low + delta:.6g}"
        )
    if failures:
        return GridSelection(
            k=None, tau_k=None, chi_at_k=None, required_k=required,
            no_witness=True, endpoint_failure="; ".join(failures),
        )

    lo, hi = band.q_low + delta, band.q_high - delta
    interior = range(1, len(taus) - 1)
    for k in interior:
        if lo < chi.estimates[k] < hi:
            return GridSelection(
                k=k, tau_k=taus[k], chi_at_k=chi.estimates[k],
                required_k=required, no_witness=False, endpoint_failure=None,
            )
    mid = (band.q_low + band.q_high) / 2.0
    best = min(interior, key=lambda k: abs(chi.estimates[k] - mid))
    return GridSelection(
        k=best, tau_k=taus[best], chi_at_k=chi.estimates[best],
        required_k=required, no_witness=True, endpoint_failure=None,
    )


def _round_spins(x: np.ndarray) -> np.ndarray:
    """Coordinatewise sign with ties to +1."""
    return np.where(x >= 0.0, 1.0, -1.0)


def rarity_report(
    alg: SearchAlgorithm,
    n: int,
    spec: MixtureSpec,
    beta: float,
    beta_prime: float,
    band: OgpBand,
    K: int,
    c: float,
    replicas: int,
    seed: int,
    inner_replicas: int = 64,
    mass_tensors: int | None = None,
    mass_samples: int = 16,
    workers: int | None = None,
) -> RarityReport:
    """Measure where an algorithm's outputs land relative to the Gibbs geometry.

    Per replica: draw G, run the algorithm, round the output to +-1 (ties to
    +1), and record whether the rounded point misses the super-level sets at
    beta and beta' and whether it belongs to the exceptional set (union over
    {k/K : k < K} at rate c, with inner Monte Carlo witness scans).  The
    Gibbs mass of the exceptional set is estimated on the first mass_tensors
    disorders with mass_samples Gibbs samples each, for contrast.  The
    combined left-hand side is p_in_exceptional + 4 p_not_in_s_beta_prime.
    Everything is derived from the master seed; rerunning is bit-identical.
    """
    if replicas < 1:
        raise DomainError(f"replicas must be >= 1, got {replicas}")
    if K < 1:
        raise DomainError(f"K must be >= 1, got {K}")
    xi1 = xi(spec, 1.0)
    tensors: list[DisorderTensor] = []
    not_b = np.zeros(replicas, dtype=bool)
    not_bp = np.zeros(replicas, dtype=bool)
    in_e = np.zeros(replicas, dtype=bool)
    pre_e = np.empty(replicas)
    post_e = np.empty(replicas)
    for i in range(replicas):
        g = sample_null(n, spec, rng.derive(seed, rng.TAG_REPLICA, i))
        tensors.append(g)
        x = alg(g)
        if i == 0 and not np.array_equal(x, alg(g)):
            raise DomainError(f"{alg.name}: output is not deterministic")
        s = _round_spins(x)
        pre_e[i] = energy(g, x)
        post_e[i] = energy(g, s)
        not_b[i] = post_e[i] < beta * xi1 * n
        not_bp[i] = post_e[i] < beta_prime * xi1 * n
        seed_i = rng.derive(seed, rng.TAG_WITNESS, i)
        for k in range(K):
            res = exceptional_membership(
                s, g, beta_prime, band, k / K, c, inner_replicas, seed_i,
                workers=workers,
            )
            if res.member:
                in_e[i] = True
                break

    m = mass_tensors if mass_tensors is not None else min(8, replicas)
    m = max(1, min(m, replicas))
    mass_est = exceptional_mass(
        tensors[:m], beta, beta_prime, band, K, c, mass_samples,
        rng.derive(seed, rng.TAG_GIBBS), workers=workers, detail=True,
    )
    assert isinstance(mass_est, MassEstimate)

    def _rate(v: np.ndarray) -> tuple[float, float]:
        p = float(v.mean())
        se = math.sqrt(p * (1.0 - p) / len(v)) if len(v) > 1 else 0.0
        return p, se

    pa, pa_se = _rate(not_b)
    pb, pb_se = _rate(not_bp)
    pe, pe_se = _rate(in_e)
    return RarityReport(
        algorithm=alg.name, n=n, beta=beta, beta_prime=beta_prime, band=band,
        grid_k=K, rate_c=c, replicas=replicas, inner_replicas=inner_replicas,
        p_not_in_s_beta=pa, p_not_in_s_beta_se=pa_se,
        p_not_in_s_beta_prime=pb, p_not_in_s_beta_prime_se=pb_se,
        p_in_exceptional=pe, p_in_exceptional_se=pe_se,
        gibbs_exceptional_mass=mass_est.mass,
        gibbs_exceptional_mass_se=mass_est.std_error,
        combined_lhs=pe + 4.0 * pb,
        rounding="coordinatewise sign, ties to +1",
        pre_energies=tuple(float(v) for v in pre_e),
        post_energies=tuple(float(v) for v in post_e),
        not_in_beta_indicators=not_b,
        not_in_beta_prime_indicators=not_bp,
        in_exceptional_indicators=in_e,
    )
