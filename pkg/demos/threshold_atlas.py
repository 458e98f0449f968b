"""A tour of the deterministic thresholds attached to a mixture.

For a mixture function xi(x) = sum gamma_k^2 x^k this script walks through
the quantities that depend on xi alone, with no disorder sampled anywhere:
the replica fixed-point threshold and its detection boundary, the spherical
variants, the algorithmic energy density, the dual form of the slice-max
bound, and the large-degree constants that govern where overlap-gap bands
can be certified.
"""

import argparse
import math

import numpy as np

from pspinlab import (
    bar_beta_d,
    bar_beta_d_spherical,
    beta_c_bounds,
    beta_d,
    beta_d_spherical,
    e_alg,
    format_mixture,
    large_p_constants,
    ogp_band_pure_p,
    parse_mixture,
    pure,
    sf_bound,
    u_dual,
    xi,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mixture", type=parse_mixture, default=pure(3),
                    help="pure:p or k:gamma,k:gamma (default pure:3)")
    args = ap.parse_args()
    spec = args.mixture

    print(f"mixture {format_mixture(spec)}")
    print(f"  xi(1) = {xi(spec, 1.0):.6f}, xi'(1) = {xi(spec, 1.0, 1):.6f}, "
          f"xi''(1) = {xi(spec, 1.0, 2):.6f}")
    print()

    print("fixed-point thresholds")
    rep = beta_d(spec)
    print(f"  dynamical threshold beta_d = {rep.value:.6f} "
          f"(first nonzero fixed point q* = {rep.minimizer:.6f})")
    bar = bar_beta_d(spec)
    print(f"  certification boundary bar beta_d = {bar.value:.6f} "
          f"(minimizing q = {bar.minimizer:.6f})")
    bar_s = bar_beta_d_spherical(spec)
    print(f"  spherical counterpart = {bar_s.value:.6f}")
    lo, hi = beta_c_bounds(spec.max_degree)
    print(f"  static threshold bracket for p={spec.max_degree}: "
          f"[{lo:.4f}, {hi:.4f}]")
    print()

    print("algorithmic reach")
    print(f"  E_ALG = integral of sqrt(xi'') over [0,1] = {e_alg(spec):.6f}")
    for q in (0.0, 0.3, 0.6, 0.9):
        h_star, dmin = u_dual(q)
        print(f"  dual minimum at q={q:.1f}: h* = {h_star:.4f}, "
              f"value {dmin:.6f}, per-site slice bound "
              f"{sf_bound(spec, 1, q):.6f}")
    print()

    print("large-degree constants for the band construction")
    c = large_p_constants()
    print(f"  inf of sqrt(2 lam)/(1 - e^-lam) = {c.limit:.6f} "
          f"at lam = {c.lambda_star:.6f}")
    print(f"  level {c.level:.6f} spans [{c.lambda2:.4f}, {c.lambda1:.4f}] "
          f"with ratio {c.lambda1 / c.lambda2:.4f}")
    print(f"  spherical beta_d at p=1000: {beta_d_spherical(1000):.6f} "
          f"(limit sqrt(e) = {math.sqrt(math.e):.6f})")
    print()

    print("certified overlap bands for pure models (eps' = 0.5)")
    for p in (20, 50, 100, 200):
        band = ogp_band_pure_p(p, 0.5)
        if not band.feasible:
            print(f"  p={p}: infeasible ({'; '.join(band.reasons)})")
            continue
        print(f"  p={p}: window [{band.q_low:.6f}, {band.q_high:.6f}], "
              f"radii r={band.band.r:.6f} R={band.band.R:.6f}, "
              f"band half-width eps={band.eps:.5f}")
    ratios = [beta_d(pure(p)).value * math.sqrt(p / (2 * math.log(p)))
              for p in (20, 50, 100, 200)]
    print("  normalized beta_d(p) sqrt(p / 2 log p):",
          ", ".join(f"{v:.4f}" for v in ratios), "(decreasing toward 1)")


if __name__ == "__main__":
    main()
