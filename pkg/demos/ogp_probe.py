"""Probing the overlap-gap structure of a small model by Monte Carlo.

Three measurements on the same mixture. First, the comparison-process
bound on the expected maximum over a fixed-overlap slice, against the
exact slice maximum averaged over fresh disorder draws. Second, the soft
overlap-gap estimate: the probability that two coupled replicas, drawn at
correlation tau between their disorders, land with overlap inside a
forbidden window; under shattering this probability collapses once tau
leaves the endpoints. Third, the exceptional-set machinery: per-state
membership tests at a grid of correlations, and the aggregate Gibbs mass
of states that stay findable across the grid, which the theory forces to
be exponentially rare.
"""

import argparse

import numpy as np

from pspinlab import (
    OgpBand,
    enumerate_table,
    exceptional_mass,
    exceptional_membership,
    parse_mixture,
    pure,
    sample_null,
    sf_bound,
    sf_empirical,
    soft_ogp_estimate,
    tau1_probability,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--mixture", type=parse_mixture, default=pure(3))
    ap.add_argument("--seed", type=int, default=5)
    ap.add_argument("--replicas", type=int, default=200)
    args = ap.parse_args()
    n, spec = args.n, args.mixture

    print(f"slice-max bound vs Monte Carlo, n = {n}, "
          f"{args.replicas} disorder draws")
    for q in (0.25, 0.5, 0.75):
        bound = sf_bound(spec, n, q)
        est, se = sf_empirical(spec, n, q, args.replicas, args.seed)
        print(f"  q = {q:.2f}: bound {bound:8.4f}, "
              f"empirical {est:8.4f} +/- {se:.4f} "
              f"(slack {bound - est:+.4f})")
    print()

    band = OgpBand(q_low=0.3, q_high=0.6)
    beta = 0.5
    print(f"soft overlap-gap estimate, window [{band.q_low}, {band.q_high}], "
          f"sampling beta = {beta}")
    print("  probability that a Gibbs sample from disorder G has a witness")
    print("  above level beta' in tau-correlated disorder, overlap in the "
          "window:")
    for beta_prime in (0.7, 1.1):
        vals = []
        for tau in (0.0, 0.25, 0.5, 0.75, 1.0):
            est = soft_ogp_estimate("null_model", n, spec, beta, beta_prime,
                                    band, tau, outer_replicas=60,
                                    inner_samples=40, seed=args.seed + 1)
            vals.append(f"{est.estimate:.3f}")
        print(f"  beta' = {beta_prime}: tau grid 0, .25, .5, .75, 1 -> "
              + ", ".join(vals))
    print("  (a permissive level is easy to witness at every tau; a "
          "selective one empties out)")
    p1, se1 = tau1_probability(n, spec, 1.1, band.q_low,
                               replicas=120, seed=args.seed + 2)
    print(f"  shared-disorder pair above beta' = 1.1 with overlap >= "
          f"{band.q_low}: {p1:.4f} +/- {se1:.4f}")
    print()

    g = sample_null(n, spec, args.seed + 3)
    table = enumerate_table(g)
    ground = int(np.argmax(table.energies))
    level = 0.9
    c = 2.0
    print(f"exceptional-set membership at level beta' = {level}, c = {c}")
    for cfg, label in ((ground, "ground state"), (0, "all-ones")):
        res = exceptional_membership(cfg, g, level, band, tau=0.5,
                                     c=c, inner_replicas=64,
                                     seed=args.seed + 4)
        if not res.in_domain:
            print(f"  {label} (configuration {cfg}): below the level, "
                  f"out of domain, never a member")
            continue
        status = "member" if res.member else "not a member"
        if res.indeterminate:
            status += " (within noise of the threshold)"
        print(f"  {label} (configuration {cfg}): witness prob "
              f"{res.conditional_prob:.4f} vs threshold "
              f"{res.threshold:.3e}: {status}")
    print()

    tensors = [sample_null(n, spec, args.seed + 10 + i) for i in range(4)]
    print(f"Gibbs mass of the exceptional set, averaged over "
          f"{len(tensors)} instances x 48 replicas")
    for level in (0.8, 0.9, 1.0):
        detail = exceptional_mass(tensors, beta=0.6, beta_prime=level,
                                  band=band, K=4, c=c, replicas=48,
                                  seed=args.seed + 5, detail=True)
        hits = int(detail.indicators.sum())
        print(f"  level beta' = {level:.1f}: mass {detail.mass:.4f} "
              f"+/- {detail.std_error:.4f} "
              f"({hits} of {detail.indicators.size} draws)")
    print(f"  correlation grid {[f'{t:.2f}' for t in detail.grid]}, "
          f"witness threshold e^(-c n / 2) = {detail.threshold:.3e}")
    print("  (the theory makes this mass e^(-Theta(n)) above the "
          "shattering level; the decay")
    print("  with beta' is already visible at n = 12)")


if __name__ == "__main__":
    main()
