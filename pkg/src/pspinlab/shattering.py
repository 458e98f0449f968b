"""Cluster decomposition of the low-temperature Gibbs measure.

Given a full energy table on the hypercube, this module isolates the
configurations that sit near the typical energy scale beta * xi(1) * N and
have no near-typical-energy point at intermediate Hamming distance, groups
that set into clusters by Hamming proximity, and measures the decomposition
exactly: cluster diameters, pairwise separation, per-cluster Gibbs mass, and
collective coverage of the measure.

Conventions.  Distances are normalized Hamming distances d(x, y) = (number of
differing sites) / N, related to the overlap by d = (1 - <x, y>/N) / 2.  A
point sigma is *regular* at parameters (beta, eps, r, R) when

  (a)  |H(sigma) / (N beta xi(1)) - 1| <= eps / 2, and
  (b)  no sigma' with H(sigma') >= (1 - eps/2) beta xi(1) N satisfies
       d(sigma, sigma') in [r, R].

Since (a) implies H(sigma) >= (1 - eps/2) beta xi(1) N, two regular points
are never at distance in [r, R] of each other: their distance is below r or
above R.  Joining regular points at distance <= 2r therefore reproduces the
ball-overlap equivalence exactly whenever R >= 2r, and the resulting clusters
have diameter < r.  Both facts are checked, not assumed, by
verify_decomposition.

The energy band in (a) is normalized by xi(1) so that a pure p-spin model
(xi(1) = 1) reduces to the plain H / (N beta) convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, ResourceCapError
from .landscape import EnergyTable, gibbs_ensemble, superlevel
from .mixture import xi
from .thresholds import OgpBand

__all__ = [
    "ShatterParams",
    "ClusterDecomposition",
    "ShatterReport",
    "regular_set",
    "build_clusters",
    "verify_decomposition",
    "binary_entropy",
    "entropy_mass_bound",
]

MAX_REGULAR = 10**6

_PAIR_CHUNK = 8_388_608  # xor words held in memory per block of the pair scan


@dataclass(frozen=True)
class ShatterParams:
    """Regular-set parameters: inverse temperature, band width, and radii.

    eps is the full band width: condition (a) uses eps/2 on each side and the
    shell level is (1 - eps/2) beta.  The radii come from the attached
    OgpBand.  full_separation records whether r < R/3, the regime in which
    inter-cluster distances can be certified to exceed R.
    """

    beta: float
    eps: float
    band: OgpBand

    def __post_init__(self) -> None:
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise DomainError(f"beta must be positive, got {self.beta}")
        if not (0 < self.eps < 2):
            raise DomainError(f"eps must lie in (0, 2), got {self.eps}")
        if not self.band.r < self.band.R:
            raise DomainError(
                f"inner radius {self.band.r} must be below outer radius {self.band.R}"
            )

    @property
    def r(self) -> float:
        return self.band.r

    @property
    def R(self) -> float:
        return self.band.R

    @property
    def full_separation(self) -> bool:
        return self.band.r < self.band.R / 3.0


@dataclass(frozen=True)
class ClusterDecomposition:
    """Clusters of a regular set, with sizes, diameters and representatives.

    clusters[i] is a sorted array of configuration indexes; representative[i]
    is its numerically smallest member (a deterministic choice).  Diameters
    are normalized Hamming distances; masses are filled by
    verify_decomposition and stay None here unless an ensemble was supplied.
    """

    n: int
    band: OgpBand
    regular: np.ndarray
    clusters: tuple[np.ndarray, ...]
    representatives: tuple[int, ...]
    sizes: tuple[int, ...]
    diameters: tuple[float, ...]
    dichotomy_violations: int
    params: ShatterParams | None = None

    @property
    def num_clusters(self) -> int:
        return len(self.clusters)


@dataclass(frozen=True)
class ShatterReport:
    """Exact measurements of the four decomposition properties.

    Scalars are None when vacuous (no cluster with two points, fewer than two
    clusters, or no params available for the complement breakdown).
    min_separation is reported when r < R/3; otherwise most_pairs_stat gives
    the Gibbs-mass-weighted fraction of cluster pairs at distance <= R.
    """

    num_clusters: int
    max_diameter: float | None
    min_separation: float | None
    most_pairs_stat: float | None
    max_mass: float
    coverage: float
    band_failure_mass: float | None
    shell_failure_mass: float | None
    full_separation: bool
    dichotomy_violations: int
    pairs_in_shell_range: int
    cluster_sizes: tuple[int, ...]
    cluster_masses: tuple[float, ...]
    cluster_diameters: tuple[float, ...]
    representatives: tuple[int, ...]
    settings: dict = field(default_factory=dict)


def _shell_bounds(n: int, r: float, R: float) -> tuple[int, int]:
    # Integer Hamming distances d with r <= d/n <= R, robust to float fuzz.
    lo = int(math.ceil(r * n - 1e-9))
    hi = int(math.floor(R * n + 1e-9))
    return lo, hi


def _distance_scan(configs: np.ndarray, other: np.ndarray):
    """Yield (i0, distance block) for chunked popcount of all cross pairs."""
    if len(configs) == 0 or len(other) == 0:
        return
    rows = max(1, _PAIR_CHUNK // len(other))
    for i0 in range(0, len(configs), rows):
        block = configs[i0:i0 + rows, None] ^ other[None, :]
        yield i0, np.bitwise_count(block)


def regular_set(table: EnergyTable, params: ShatterParams) -> np.ndarray:
    """Configuration indexes passing the band and shell-emptiness conditions.

    Exact: the energy band is tested on every configuration and the shell
    condition is tested against the full super-level set at (1 - eps/2) beta.
    Returns a sorted uint32 array.
    """
    n = table.n
    xi1 = xi(table.spec, 1.0)
    scale = n * params.beta * xi1
    band_mask = np.abs(table.energies / scale - 1.0) <= params.eps / 2.0
    candidates = np.nonzero(band_mask)[0].astype(np.uint32)
    if len(candidates) == 0:
        return candidates

    level_mask = superlevel(table, (1.0 - params.eps / 2.0) * params.beta, xi1=xi1)
    level = np.nonzero(level_mask)[0].astype(np.uint32)
    lo, hi = _shell_bounds(n, params.r, params.R)
    if lo > hi or len(level) == 0:
        return np.sort(candidates)

    keep = np.ones(len(candidates), dtype=bool)
    for i0, dist in _distance_scan(candidates, level):
        bad = ((dist >= lo) & (dist <= hi)).any(axis=1)
        keep[i0:i0 + len(bad)] &= ~bad
    return np.sort(candidates[keep])


def build_clusters(
    regular: np.ndarray,
    band: OgpBand,
    n: int,
    params: ShatterParams | None = None,
) -> ClusterDecomposition:
    """Group a regular set into clusters by Hamming proximity.

    Two points are joined when their distance is at most 2r (the
    ball-intersection witness).  Components come from an exact sparse
    connected-components pass.  The dichotomy "same cluster or farther than
    R - r" is then verified over all pairs; violations are counted (they can
    only occur when the input set does not actually satisfy the regular-set
    shell condition).
    """
    regular = np.sort(np.asarray(regular, dtype=np.uint32))
    if len(regular) > MAX_REGULAR:
        raise ResourceCapError(
            f"regular set of size {len(regular)} exceeds the pair-scan cap "
            f"{MAX_REGULAR}",
            size=len(regular),
        )
    m = len(regular)
    if m == 0:
        return ClusterDecomposition(
            n=n, band=band, regular=regular, clusters=(), representatives=(),
            sizes=(), diameters=(), dichotomy_violations=0, params=params,
        )

    join_hi = int(math.floor(2.0 * band.r * n + 1e-9))
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    for i0, dist in _distance_scan(regular, regular):
        rr, cc = np.nonzero(dist <= join_hi)
        rows.append((rr + i0).astype(np.int64))
        cols.append(cc.astype(np.int64))
    r_idx = np.concatenate(rows)
    c_idx = np.concatenate(cols)
    graph = csr_matrix(
        (np.ones(len(r_idx), dtype=np.int8), (r_idx, c_idx)), shape=(m, m)
    )
    num, labels = connected_components(graph, directed=False)

    # Order clusters by their smallest member so the output is deterministic.
    order = np.full(num, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(order, labels, regular.astype(np.int64))
    rank = np.argsort(order, kind="stable")
    relabel = np.empty(num, dtype=np.int64)
    relabel[rank] = np.arange(num)
    labels = relabel[labels]

    clusters = tuple(
        regular[labels == c] for c in range(num)
    )
    representatives = tuple(int(c[0]) for c in clusters)
    sizes = tuple(len(c) for c in clusters)

    # Second pass: per-cluster diameters and the dichotomy check.
    sep_hi = int(math.floor((band.R - band.r) * n + 1e-9))
    diam = np.zeros(num, dtype=np.int64)
    violations = 0
    for i0, dist in _distance_scan(regular, regular):
        lab_rows = labels[i0:i0 + dist.shape[0]]
        same = lab_rows[:, None] == labels[None, :]
        intra = np.where(same, dist, 0)
        np.maximum.at(diam, lab_rows, intra.max(axis=1))
        violations += int(np.count_nonzero(~same & (dist <= sep_hi)))
    violations //= 2  # each unordered pair was seen twice

    return ClusterDecomposition(
        n=n, band=band, regular=regular, clusters=clusters,
        representatives=representatives, sizes=sizes,
        diameters=tuple(float(d) / n for d in diam),
        dichotomy_violations=violations, params=params,
    )


def verify_decomposition(
    dec: ClusterDecomposition,
    table: EnergyTable,
    beta: float,
    band: OgpBand | None = None,
) -> ShatterReport:
    """Measure the four decomposition properties exactly.

    Diameters and separations are recomputed from the stored clusters; masses
    come from the exact Gibbs weights at the given beta.  When dec carries
    params, the complement of the covered mass is split into the energy-band
    failure mass and the shell failure mass; the three parts sum to one
    exactly because the second is measured inside the band.
    """
    band = band if band is not None else dec.band
    n = dec.n
    ens = gibbs_ensemble(table, beta)
    weights = np.exp(ens.log_weights)

    masses = tuple(float(weights[c].sum()) for c in dec.clusters)
    coverage = float(weights[dec.regular].sum()) if len(dec.regular) else 0.0
    max_mass = max(masses) if masses else 0.0

    max_diameter = max(dec.diameters) if dec.diameters else None

    lo, hi = _shell_bounds(n, band.r, band.R)
    min_sep: float | None = None
    shell_pairs = 0
    close_pairs: set[tuple[int, int]] = set()
    if dec.num_clusters >= 2 or len(dec.regular) >= 2:
        labels = np.empty(len(dec.regular), dtype=np.int64)
        pos = np.searchsorted(dec.regular, np.concatenate(dec.clusters))
        start = 0
        for c_id, cl in enumerate(dec.clusters):
            labels[pos[start:start + len(cl)]] = c_id
            start += len(cl)
        best = n + 1
        sep_int = int(math.floor(band.R * n + 1e-9))
        for i0, dist in _distance_scan(dec.regular, dec.regular):
            lab_rows = labels[i0:i0 + dist.shape[0]]
            same = lab_rows[:, None] == labels[None, :]
            shell_pairs += int(np.count_nonzero((dist >= lo) & (dist <= hi)))
            inter = np.where(same, n + 1, dist)
            if inter.size:
                best = min(best, int(inter.min()))
            if dec.num_clusters >= 2:
                rr, cc = np.nonzero(~same & (dist <= sep_int))
                for a, b in zip(lab_rows[rr], labels[cc]):
                    key = (int(min(a, b)), int(max(a, b)))
                    close_pairs.add(key)
        shell_pairs //= 2
        if dec.num_clusters >= 2:
            min_sep = best / n

    full_sep = band.r < band.R / 3.0
    most_pairs: float | None = None
    if not full_sep and dec.num_clusters >= 2:
        m_arr = np.array(masses)
        total = float(np.sum(np.outer(m_arr, m_arr)) - np.sum(m_arr**2)) / 2.0
        close = sum(masses[a] * masses[b] for a, b in close_pairs)
        most_pairs = close / total if total > 0 else 0.0

    band_fail = shell_fail = None
    if dec.params is not None:
        xi1 = xi(table.spec, 1.0)
        scale = n * dec.params.beta * xi1
        in_band = np.abs(table.energies / scale - 1.0) <= dec.params.eps / 2.0
        band_mass = float(weights[in_band].sum())
        band_fail = 1.0 - band_mass
        shell_fail = band_mass - coverage

    return ShatterReport(
        num_clusters=dec.num_clusters,
        max_diameter=max_diameter,
        min_separation=min_sep if full_sep else None,
        most_pairs_stat=most_pairs,
        max_mass=max_mass,
        coverage=coverage,
        band_failure_mass=band_fail,
        shell_failure_mass=shell_fail,
        full_separation=full_sep,
        dichotomy_violations=dec.dichotomy_violations,
        pairs_in_shell_range=shell_pairs,
        cluster_sizes=dec.sizes,
        cluster_masses=masses,
        cluster_diameters=dec.diameters,
        representatives=dec.representatives,
        settings={"beta": beta, "r": band.r, "R": band.R, "n": n},
    )


def binary_entropy(s: float) -> float:
    """-s log s - (1-s) log(1-s) in nats; 0 at the endpoints."""
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"entropy argument must lie in [0, 1], got {s}")
    if s in (0.0, 1.0):
        return 0.0
    return float(-s * math.log(s) - (1.0 - s) * math.log(1.0 - s))


def entropy_mass_bound(
    cluster_size_exponent: float, beta: float, eps: float, eps_prime: float
) -> float:
    """Per-cluster log-mass rate bound from counting and energy ceilings.

    A cluster of at most e^{aN} points, each with energy at most
    (1 + eps/2) beta N, has Gibbs log-mass per site at most

        a + (1 + eps/2) beta^2 - beta^2 / 2 - log 2 + t,

    once log Z / N >= log 2 + beta^2 / 2 - t, with the partition-function
    slack t = [1 - (1 - eps')^2 (1 + eps)] (log 2) / 2.  The caller passes
    a = cluster_size_exponent, typically the binary entropy of the cluster
    diameter.  Energies are in the xi(1) = 1 normalization.
    """
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    t = (1.0 - (1.0 - eps_prime) ** 2 * (1.0 + eps)) * math.log(2.0) / 2.0
    return (
        cluster_size_exponent
        + (1.0 + eps / 2.0) * beta**2
        - beta**2 / 2.0
        - math.log(2.0)
        + t
    )
