"""How stable search algorithms betray themselves on correlated disorder.

Run a few toy search algorithms on pairs of tau-correlated instances and
measure the overlap correlation chi(tau) between their outputs. A Lipschitz
algorithm concentrates: its output overlap stays near chi(tau) with
exponentially small exceedance, which is exactly the handle the rarity
argument needs. The script estimates chi curves, runs the concentration
audit (which a fake "stable" algorithm fails), picks the interpolation
point a certification would use, and finishes with the rarity report: the
probability that the algorithm's output lands in the high-energy
exceptional set, bounded by pieces that are each measurable.
"""

import argparse

import numpy as np

from pspinlab import (
    OgpBand,
    baseline_constant,
    baseline_diagonal,
    baseline_greedy,
    baseline_hash_control,
    chi_concentration_check,
    chi_estimate,
    grid_tau_select,
    parse_mixture,
    pure,
    rarity_report,
    required_grid_size,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=14)
    ap.add_argument("--mixture", type=parse_mixture, default=pure(3))
    ap.add_argument("--seed", type=int, default=9)
    args = ap.parse_args()
    n, spec = args.n, args.mixture

    taus = [0.0, 0.25, 0.5, 0.75, 1.0]
    algs = [
        baseline_constant(np.ones(n)),
        baseline_diagonal(0.5),
        baseline_greedy(3),
    ]
    print(f"chi(tau) = E[<A(G), A(G_tau)>] / norm^2 on {n} sites, "
          f"400 replica pairs")
    for alg in algs:
        curve = chi_estimate(alg, n, spec, taus, replicas=400,
                             seed=args.seed)
        vals = ", ".join(f"{v:+.3f}" for v in curve.estimates)
        lip = "?" if alg.lipschitz is None else f"{alg.lipschitz:g}"
        print(f"  {alg.name:<16} (L = {lip:>4}): {vals}")
    print("  the constant map ignores the disorder entirely (chi == 1); "
          "the diagonal map")
    print("  decays linearly to zero as the disorders decorrelate; greedy "
          "is descriptive")
    print("  only, with no Lipschitz certificate")
    print()

    print("concentration audit at tau = 0.5, exceedance vs the "
          "L-dependent bound")
    for alg, label in ((baseline_diagonal(0.05), "honest"),
                       (baseline_hash_control(), "fake certificate")):
        check = chi_concentration_check(alg, n, spec, tau=0.5,
                                        replicas=300, t_grid=[0.1, 0.2],
                                        seed=args.seed + 1)
        print(f"  {alg.name} ({label}):")
        for row in check.rows:
            verdict = ("pass" if row.passed else
                       "FAIL" if row.passed is not None else "descriptive")
            print(f"    t = {row.t:.1f}: exceedance {row.exceedance:.4f} "
                  f"vs bound {row.bound:.4f} -> {verdict}")
    print("  the hash control claims a tiny Lipschitz constant but "
          "scrambles with the")
    print("  disorder, so its exceedance blows through the claimed bound")
    print()

    band = OgpBand(q_low=0.3, q_high=0.6)
    alg = baseline_diagonal(2.0)
    curve = chi_estimate(alg, n, spec, np.linspace(0.0, 1.0, 11),
                         replicas=400, seed=args.seed + 2)
    sel = grid_tau_select(curve, band, L=2.0)
    print(f"interpolation point for the window [{band.q_low}, "
          f"{band.q_high}], diagonal at L = 2")
    if sel.endpoint_failure:
        print(f"  endpoint precondition failed: {sel.endpoint_failure}")
    else:
        print(f"  selected grid index {sel.k} of {len(curve.taus) - 1}, "
              f"tau_k = {sel.tau_k:.2f}, chi there = {sel.chi_at_k:.4f}"
              + (" (nearest to midpoint, no interior witness)"
                 if sel.no_witness else ""))
        print(f"  a full certificate at L = 2 needs a grid of "
              f"{required_grid_size(2.0, band)} points; the 11-point "
              f"curve is for illustration")
    print()

    print("rarity report at n = 10, level beta' = 0.6: for a Lipschitz "
          "algorithm the")
    print("combined quantity P(exceptional) + 4 P(miss the level) must "
          "stay near 1 or above")
    kw = dict(n=10, spec=spec, beta=0.5, beta_prime=0.6,
              band=OgpBand(q_low=0.8, q_high=0.95), K=2, c=2.0,
              replicas=120, seed=args.seed + 3, inner_replicas=12,
              mass_samples=4)
    for alg in (baseline_diagonal(2.0), baseline_greedy(8)):
        rep = rarity_report(alg, **kw)
        print(f"  {rep.algorithm} "
              f"({'stable' if alg.lipschitz is not None else 'unstable'}):")
        print(f"    P(output misses the level)  = "
              f"{rep.p_not_in_s_beta_prime:.4f} +/- "
              f"{rep.p_not_in_s_beta_prime_se:.4f}")
        print(f"    P(output in exceptional set) = "
              f"{rep.p_in_exceptional:.4f} +/- "
              f"{rep.p_in_exceptional_se:.4f} "
              f"(its Gibbs mass: {rep.gibbs_exceptional_mass:.4f})")
        print(f"    combined left side = {rep.combined_lhs:.4f}")
    print("  the stable diagonal map obeys the bound the only way it can, "
          "by missing the")
    print("  level almost always; greedy drives the combined value below "
          "1, which is")
    print("  exactly the instability the Lipschitz hypothesis rules out")


if __name__ == "__main__":
    main()
