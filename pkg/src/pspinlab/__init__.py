"""Desk-scale numerical laboratory for mixed p-spin Ising spin glasses.

The package is organized bottom-up: deterministic counter-based randomness
(rng), bit-level configuration tools (bits), mixture polynomials (mixture),
Gaussian disorder tensors and planted tilts (disorder), exact landscape
enumeration and Gibbs sampling (landscape), replica and large-p thresholds
(thresholds), cluster decompositions of super-level sets (shattering),
overlap-gap and exceptional-set probes (ogp), and search-algorithm
diagnostics (algolab).  The cli module exposes all of it as subcommands of
the `pspinlab` entry point.
"""

from .algolab import (
    ChiCurve,
    ConcentrationCheck,
    ConcentrationRow,
    GridSelection,
    RarityReport,
    SearchAlgorithm,
    baseline_constant,
    baseline_diagonal,
    baseline_greedy,
    baseline_hash_control,
    chi_concentration_check,
    chi_estimate,
    grid_tau_select,
    rarity_report,
    required_grid_size,
)
from .bits import (
    all_spins,
    config_to_spins,
    gray_code,
    hamming,
    masks_of_weight,
    overlap_int,
    popcount,
    spins_to_config,
)
from .disorder import (
    MAX_SCALARS,
    DisorderTensor,
    PlantedInstance,
    energy,
    energy_batch,
    flip_delta,
    interpolate,
    load_tensor,
    sample_null,
    sample_planted,
    save_tensor,
)
from .errors import (
    AccuracyError,
    DomainError,
    InvalidDegreeError,
    ResourceCapError,
    ShapeMismatchError,
)
from .landscape import (
    MAX_SITES,
    EnergyTable,
    GibbsEnsemble,
    SliceMax,
    energy_band_mass,
    enumerate_table,
    gibbs_ensemble,
    gibbs_sample,
    load_table,
    log_likelihood_ratio,
    log_partition,
    save_table,
    slice_max,
    superlevel,
)
from .mixture import MixtureSpec, format_mixture, parse_mixture, pure, xi
from .ogp import (
    MassEstimate,
    MembershipResult,
    SoftOgpEstimate,
    exceptional_mass,
    exceptional_membership,
    sf_bound,
    sf_empirical,
    soft_ogp_estimate,
    tau1_probability,
)
from .shattering import (
    MAX_REGULAR,
    ClusterDecomposition,
    ShatterParams,
    ShatterReport,
    binary_entropy,
    build_clusters,
    entropy_mass_bound,
    regular_set,
    verify_decomposition,
)
from .thresholds import (
    LargePConstants,
    OgpBand,
    OgpBandReport,
    ThresholdReport,
    bar_beta_d,
    bar_beta_d_spherical,
    beta_c_bounds,
    beta_d,
    beta_d_spherical,
    e_alg,
    gauss_pdf,
    half_quantile,
    large_p_constants,
    ogp_band_pure_p,
    replica_fixed_point_map,
    u_dual,
    u_objective,
    v_rate,
    w_rate,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # mixture
    "MixtureSpec", "pure", "xi", "parse_mixture", "format_mixture",
    # errors
    "DomainError", "InvalidDegreeError", "ShapeMismatchError",
    "ResourceCapError", "AccuracyError",
    # bits
    "config_to_spins", "spins_to_config", "popcount", "hamming",
    "overlap_int", "all_spins", "masks_of_weight", "gray_code",
    # disorder
    "DisorderTensor", "PlantedInstance", "sample_null", "sample_planted",
    "interpolate", "energy", "energy_batch", "flip_delta", "save_tensor",
    "load_tensor", "MAX_SCALARS",
    # landscape
    "EnergyTable", "GibbsEnsemble", "SliceMax", "enumerate_table",
    "gibbs_ensemble", "log_partition", "gibbs_sample", "superlevel",
    "energy_band_mass", "slice_max", "log_likelihood_ratio", "save_table",
    "load_table", "MAX_SITES",
    # thresholds
    "ThresholdReport", "OgpBand", "OgpBandReport", "LargePConstants",
    "replica_fixed_point_map", "beta_d", "bar_beta_d", "bar_beta_d_spherical",
    "large_p_constants", "beta_d_spherical", "beta_c_bounds", "e_alg",
    "u_dual", "u_objective", "ogp_band_pure_p", "v_rate", "w_rate",
    "gauss_pdf", "half_quantile",
    # shattering
    "ShatterParams", "ClusterDecomposition", "ShatterReport", "regular_set",
    "build_clusters", "verify_decomposition", "binary_entropy",
    "entropy_mass_bound", "MAX_REGULAR",
    # ogp
    "SoftOgpEstimate", "MembershipResult", "MassEstimate", "sf_bound",
    "sf_empirical", "soft_ogp_estimate", "tau1_probability",
    "exceptional_membership", "exceptional_mass",
    # algolab
    "SearchAlgorithm", "ChiCurve", "ConcentrationRow", "ConcentrationCheck",
    "GridSelection", "RarityReport", "baseline_constant", "baseline_diagonal",
    "baseline_greedy", "baseline_hash_control", "chi_estimate",
    "chi_concentration_check", "required_grid_size", "grid_tau_select",
    "rarity_report",
]
