"""Threshold scalars against independent oracles and closed forms.

Oracle routes used here deliberately avoid the production code paths:
scipy.integrate.quad for the fixed-point map, naive fixed-point iteration on
a beta grid for the dynamical threshold, numeric integration of E|g + h| for
the dual identity, and scipy.optimize for the large-p curve minima.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import minimize_scalar
from scipy.stats import norm

from pspinlab import (
    DomainError,
    MixtureSpec,
    OgpBand,
    bar_beta_d,
    bar_beta_d_spherical,
    beta_c_bounds,
    beta_d,
    beta_d_spherical,
    e_alg,
    large_p_constants,
    ogp_band_pure_p,
    pure,
    replica_fixed_point_map,
    u_dual,
    u_objective,
    v_rate,
    w_rate,
)
from pspinlab.mixture import xi


def _map_oracle(spec, beta, q):
    """F(q; beta) by scipy quadrature of the tilted integrand."""
    a = beta * math.sqrt(xi(spec, q, 1))
    if a == 0.0:
        return 0.0
    val, _ = quad(
        lambda z: math.tanh(a * (a + z)) ** 2 * norm.pdf(z), -12, 12,
        epsabs=1e-12, epsrel=1e-12,
    )
    return val


def test_fixed_point_map_matches_quadrature_oracle():
    rng = np.random.default_rng(2024)
    spec3 = pure(3)
    mix = MixtureSpec(terms=((2, 0.6), (4, 0.8)))
    for _ in range(12):
        beta = float(rng.uniform(0.1, 2.0))
        q = float(rng.uniform(0.0, 1.0))
        for spec in (spec3, mix):
            have = replica_fixed_point_map(spec, beta, q)
            want = _map_oracle(spec, beta, q)
            assert abs(have - want) < 1e-8


def test_fixed_point_map_edge_cases():
    spec = pure(3)
    assert replica_fixed_point_map(spec, 0.0, 0.5) == 0.0
    assert replica_fixed_point_map(spec, 1.0, 0.0) == 0.0  # xi'(0) = 0 for p >= 3
    with pytest.raises(DomainError):
        replica_fixed_point_map(spec, -1.0, 0.5)
    with pytest.raises(DomainError):
        replica_fixed_point_map(spec, 1.0, 1.5)


def _beta_d_oracle(spec, betas):
    """First beta in the grid whose map iteration from q=0.999 stays away
    from zero.  Naive and independent of the production bisection."""
    for beta in betas:
        q = 0.999
        for _ in range(400):
            q = replica_fixed_point_map(spec, beta, q)
        if q > 1e-6:
            return beta
    return None


def test_beta_d_pure3_matches_iteration_oracle():
    spec = pure(3)
    rep = beta_d(spec)
    betas = np.arange(1.0, 1.1, 5e-4)
    first = _beta_d_oracle(spec, betas)
    assert first is not None
    assert abs(rep.value - first) <= 1e-3
    # the reported fixed point satisfies the equation at beta_d + tol
    q = rep.minimizer
    assert q is not None and 0 < q <= 1
    resid = replica_fixed_point_map(spec, rep.value + 1e-8, q) - q
    assert abs(resid) < 1e-6


def test_beta_d_mixture_runs_and_is_positive():
    mix = MixtureSpec(terms=((3, 0.8), (4, 0.6)))
    rep = beta_d(mix)
    assert 0.5 < rep.value < 2.0


def test_e_alg_closed_form_pure_p():
    for p in range(3, 11):
        want = 2.0 * math.sqrt((p - 1) / p)
        assert abs(e_alg(pure(p)) - want) < 1e-10


def test_e_alg_mixture_against_quad_oracle():
    mix = MixtureSpec(terms=((2, 0.5), (3, 0.9)))
    want, _ = quad(
        lambda x: math.sqrt(2 * 0.25 + 6 * 0.81 * x), 0.0, 1.0, epsabs=1e-12
    )
    assert abs(e_alg(mix) - want) < 1e-10


def test_u_dual_identity_against_numeric_minimization():
    for q in np.arange(0.0, 0.95, 0.05):
        # independent route: integrate E|g+h| numerically, minimize on h >= 0
        def obj(h):
            val, _ = quad(lambda g: abs(g + h) * norm.pdf(g), -12, 12,
                          epsabs=1e-12)
            return val - h * q
        res = minimize_scalar(obj, bounds=(0.0, 6.0), method="bounded",
                              options={"xatol": 1e-10})
        h_star, minimum = u_dual(float(q))
        assert abs(minimum - res.fun) < 1e-8
        assert abs(h_star - norm.ppf((1 + q) / 2)) < 1e-9
        assert abs(u_objective(h_star, float(q)) - minimum) < 1e-12


def test_rate_functions():
    assert v_rate(0.0) == 1.0
    assert abs(v_rate(1.0) - 1.0 / (1.0 - math.exp(-1.0))) < 1e-14
    lam = 0.8
    assert abs(w_rate(lam) - math.sqrt(2 * lam) / (1 - math.exp(-lam))) < 1e-14


def test_large_p_constants_defining_relations():
    from scipy.optimize import brentq

    c = large_p_constants()
    # stationarity of w: exp(lam) = 2 lam + 1 at the minimizer.  w is flat
    # there, so the argmin is only determined to ~sqrt(value tolerance).
    root = brentq(lambda x: math.exp(x) - 2 * x - 1, 0.5, 3.0, xtol=1e-14)
    assert abs(c.lambda_star - root) < 1e-6
    assert abs(c.lambda_star - 1.2564311793115355) < 1e-6
    assert abs(c.limit - 2.2160358671664717) < 1e-10
    res = minimize_scalar(lambda x: float(w_rate(x)), bounds=(0.5, 3.0),
                          method="bounded", options={"xatol": 1e-12})
    assert abs(c.limit - res.fun) < 1e-10
    # level: both crossings sit on the curve and the ratio is exactly 3
    assert abs(float(w_rate(c.lambda2)) - c.level) < 1e-9
    assert abs(float(w_rate(c.lambda1)) - c.level) < 1e-9
    assert abs(c.lambda1 - 3.0 * c.lambda2) < 1e-6
    # slightly below the level the sublevel interval is narrower than 3x
    v = c.level - 1e-3
    l2 = brentq(lambda x: float(w_rate(x)) - v, 1e-12, c.lambda_star)
    l1 = brentq(lambda x: float(w_rate(x)) - v, c.lambda_star, 10.0)
    assert l1 / l2 < 3.0


def test_beta_d_spherical_closed_form_and_limit():
    assert abs(beta_d_spherical(3) - math.sqrt(4.0 / 3.0)) < 1e-12
    want4 = math.sqrt(27.0 / (4.0 * 4.0))
    assert abs(beta_d_spherical(4) - want4) < 1e-12
    # approaches sqrt(e) from below at rate O(1/p)
    rel = abs(beta_d_spherical(1000) - math.sqrt(math.e)) / math.sqrt(math.e)
    assert rel < 0.002
    assert beta_d_spherical(4000) > beta_d_spherical(1000)


def test_beta_c_bounds():
    lo, hi = beta_c_bounds(3)
    assert abs(hi - math.sqrt(2 * math.log(2))) < 1e-14
    assert abs(lo - (1 - 2.0**-3) * hi) < 1e-14
    with pytest.raises(DomainError):
        beta_c_bounds(1)


def test_bar_beta_d_reports_are_consistent():
    spec = pure(3)
    rep = bar_beta_d(spec)
    # independent evaluation of the objective at the reported minimizer
    q = rep.minimizer

    def obj(qq):
        return (2 * math.sqrt(3) * norm.pdf(norm.ppf((1 + qq) / 2))
                / (1 - qq**3))
    assert abs(obj(q) - rep.value) < 1e-9
    grid = np.linspace(1e-4, 1 - 1e-4, 4001)
    assert rep.value <= min(obj(v) for v in grid) + 1e-6

    sph = bar_beta_d_spherical(spec)

    def obj_s(qq):
        return math.sqrt(3 * (1 - qq * qq)) / (1 - qq**3)
    assert abs(obj_s(sph.minimizer) - sph.value) < 1e-9


def test_ogp_band_pure_p_frozen_instance():
    # p=100, eps'=0.5: frozen from an independent sympy/bisection session
    rep = ogp_band_pure_p(100, 0.5)
    assert rep.feasible
    assert abs(rep.delta - 0.453850386748491) < 1e-12
    assert abs(rep.q_low - 0.9954614961325151) < 1e-12
    assert abs(rep.q_high - 0.998763200712162) < 1e-12
    assert abs(rep.eps - 0.010685611012473117) < 1e-9
    band = rep.band
    assert isinstance(band, OgpBand)
    assert band.r < band.R / 3.0
    assert abs(band.r - 0.0006183996439190209) < 1e-15
    assert abs(band.R - 0.0022692519337424444) < 1e-15
    # delta solves v(delta) sqrt(1+delta) = 1 + eps'
    lhs = float(v_rate(rep.delta)) * math.sqrt(1 + rep.delta)
    assert abs(lhs - 1.5) < 1e-10


def test_ogp_band_pure_p_infeasible_small_p():
    rep = ogp_band_pure_p(3, 0.5)
    assert not rep.feasible
    assert rep.band is None
    assert len(rep.reasons) >= 1


def test_band_radii_roundtrip():
    band = OgpBand.from_radii(r=0.01, R=0.2)
    assert abs(band.q_high - 0.98) < 1e-15
    assert abs(band.q_low - 0.6) < 1e-15
    assert abs(band.r - 0.01) < 1e-15
    assert abs(band.R - 0.2) < 1e-15
    with pytest.raises(DomainError):
        OgpBand(q_low=0.9, q_high=0.2)
