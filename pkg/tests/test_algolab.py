"""Algorithm harness: correlation curves, stability checks, rarity reports.

The diagonal baseline has a known closed-form curve chi(tau)/chi(0) = 1 - tau
from Gaussian bilinearity, which provides the main quantitative oracle here.
"""

import math

import numpy as np
import pytest

from pspinlab import (
    ChiCurve,
    DomainError,
    OgpBand,
    SearchAlgorithm,
    ShapeMismatchError,
    baseline_constant,
    baseline_diagonal,
    baseline_greedy,
    baseline_hash_control,
    chi_concentration_check,
    chi_estimate,
    flip_delta,
    grid_tau_select,
    pure,
    rarity_report,
    required_grid_size,
    sample_null,
)


def test_constant_baseline_zero_variance_curve():
    n = 10
    alg = baseline_constant(np.ones(n))
    curve = chi_estimate(alg, n, pure(3), [0.0, 0.5, 1.0], replicas=8, seed=1)
    assert all(v == pytest.approx(1.0, abs=1e-12) for v in curve.estimates)
    assert all(s == 0.0 for s in curve.std_errors)
    assert alg.lipschitz == 0.0


def test_diagonal_baseline_linear_curve():
    # unclamped regime: small scale keeps the clamp inactive w.h.p.
    n, scale = 12, 0.05
    alg = baseline_diagonal(scale)
    taus = [0.0, 0.25, 0.5, 0.75, 1.0]
    curve = chi_estimate(alg, n, pure(3), taus, replicas=4000, seed=2)
    chi0 = curve.estimates[0]
    assert chi0 > 0
    for tau, est, se in zip(curve.taus, curve.estimates, curve.std_errors):
        want = (1.0 - tau) * chi0
        assert abs(est - want) <= 3.0 * se + 3.0 * curve.std_errors[0] + 1e-4


def test_greedy_baseline_reaches_local_maximum():
    n = 10
    alg = baseline_greedy(max_sweeps=50)
    g = sample_null(n, pure(3), seed=3)
    out = alg(g)
    assert np.all(np.abs(out) == 1.0)
    assert np.array_equal(out, alg(g))
    for i in range(n):
        assert flip_delta(g, out, i) <= 0.0


def test_hash_control_violates_claimed_constant():
    alg = baseline_hash_control(claimed_lipschitz=0.01)
    check = chi_concentration_check(alg, n=14, spec=pure(3), tau=0.5,
                                    replicas=300, t_grid=[0.2], seed=4)
    assert not check.descriptive
    assert any(row.passed is False for row in check.rows)


def test_stable_baseline_passes_concentration():
    alg = baseline_diagonal(0.05)
    check = chi_concentration_check(alg, n=14, spec=pure(3), tau=0.5,
                                    replicas=300, t_grid=[0.1, 0.2, 0.4],
                                    seed=5)
    assert all(row.passed for row in check.rows)
    assert check.lipschitz == pytest.approx(0.05)
    for row in check.rows:
        want = min(2.0 * math.exp(-14 * row.t**2 / (8 * 0.05**2)), 1.0)
        assert row.bound == pytest.approx(want, rel=1e-12)


def test_zero_lipschitz_demands_zero_exceedance():
    n = 9
    alg = baseline_constant(np.ones(n))
    check = chi_concentration_check(alg, n, pure(3), tau=0.3, replicas=50,
                                    t_grid=[0.05, 0.5], seed=6)
    for row in check.rows:
        assert row.bound == 0.0
        assert row.exceedance == 0.0
        assert row.passed


def test_descriptive_mode_issues_no_verdict():
    alg = baseline_greedy(max_sweeps=20)
    assert alg.lipschitz is None
    check = chi_concentration_check(alg, n=10, spec=pure(3), tau=0.5,
                                    replicas=40, t_grid=[0.2], seed=7)
    assert check.descriptive
    assert all(row.passed is None for row in check.rows)
    assert check.lipschitz >= 0.0


def test_required_grid_size_examples():
    band = OgpBand(q_low=0.3, q_high=0.7)
    assert required_grid_size(2.0, band) == 100
    assert required_grid_size(1.0, band) == 25
    with pytest.raises(DomainError):
        required_grid_size(0.0, band)


def _curve(taus, estimates):
    return ChiCurve(
        taus=tuple(taus), estimates=tuple(estimates),
        std_errors=tuple(0.0 for _ in taus), replicas=10,
        algorithm="synthetic", n=10, spec=pure(3),
    )


def test_grid_selection_finds_interior_witness():
    band = OgpBand(q_low=0.3, q_high=0.7)  # delta defaults to 0.1
    curve = _curve([0.0, 0.25, 0.5, 0.75, 1.0],
                   [0.95, 0.72, 0.5, 0.3, 0.05])
    sel = grid_tau_select(curve, band)
    # k=1 gives 0.72 >= 0.6: not strictly inside (0.4, 0.6); k=2 gives 0.5
    assert sel.k == 2 and sel.tau_k == 0.5 and not sel.no_witness
    assert sel.endpoint_failure is None
    sel_l = grid_tau_select(curve, band, L=2.0)
    assert sel_l.required_k == 100


def test_grid_selection_no_witness_jump():
    band = OgpBand(q_low=0.3, q_high=0.7)
    # curve jumps over the window: no interior point inside (0.4, 0.6)
    curve = _curve([0.0, 0.5, 1.0], [0.95, 0.05, 0.01])
    sel = grid_tau_select(curve, band)
    assert sel.no_witness and sel.endpoint_failure is None
    assert sel.k == 1  # nearest interior point to the midpoint


def test_grid_selection_endpoint_failures():
    band = OgpBand(q_low=0.3, q_high=0.7)
    flat = _curve([0.0, 0.5, 1.0], [0.5, 0.5, 0.5])
    sel = grid_tau_select(flat, band)
    assert sel.no_witness and sel.k is None
    assert "tau=0" in sel.endpoint_failure and "tau=1" in sel.endpoint_failure
    with pytest.raises(DomainError):
        grid_tau_select(_curve([0.0, 1.0], [1.0, 0.0]), band)
    with pytest.raises(DomainError):
        grid_tau_select(_curve([0.1, 0.5, 1.0], [1.0, 0.5, 0.0]), band)
    with pytest.raises(DomainError):
        grid_tau_select(flat, band, delta=0.2)  # >= width/2


def test_search_algorithm_validates_output():
    def bad_shape(g):
        return np.ones((g.n, 2))

    def too_long(g):
        return np.full(g.n, 2.0)

    g = sample_null(6, pure(3), seed=8)
    with pytest.raises(ShapeMismatchError):
        SearchAlgorithm(name="bad", fn=bad_shape, lipschitz=None)(g)
    with pytest.raises(DomainError):
        SearchAlgorithm(name="long", fn=too_long, lipschitz=None)(g)
    ok = SearchAlgorithm(name="ok", fn=lambda g: np.zeros(g.n), lipschitz=0.0)
    assert np.array_equal(ok(g), np.zeros(6))
    with pytest.raises(DomainError):
        SearchAlgorithm(name="neg", fn=lambda g: np.zeros(g.n), lipschitz=-1.0)


def test_rarity_report_identity_and_determinism():
    n = 8
    alg = baseline_greedy(max_sweeps=30)
    band = OgpBand(q_low=0.2, q_high=0.8)
    kw = dict(n=n, spec=pure(3), beta=0.5, beta_prime=0.25, band=band, K=2,
              c=2.0, replicas=6, seed=9, inner_replicas=8, mass_samples=4)
    rep = rarity_report(alg, **kw)
    again = rarity_report(alg, **kw)
    assert rep.combined_lhs == again.combined_lhs
    assert rep.p_in_exceptional == again.p_in_exceptional
    assert np.array_equal(rep.in_exceptional_indicators,
                          again.in_exceptional_indicators)
    # combined LHS is exactly the stated combination
    want = rep.p_in_exceptional + 4.0 * rep.p_not_in_s_beta_prime
    assert rep.combined_lhs == want
    # indicator means match reported rates
    assert rep.p_not_in_s_beta == rep.not_in_beta_indicators.mean()
    assert rep.p_not_in_s_beta_prime == rep.not_in_beta_prime_indicators.mean()
    # post-rounding energies are the energies of +-1 points: S_beta misses
    # are exactly the post energies below the level
    from pspinlab.mixture import xi

    level = 0.5 * xi(pure(3), 1.0) * n
    want_miss = np.array(rep.post_energies) < level
    assert np.array_equal(rep.not_in_beta_indicators, want_miss)


def test_rarity_report_greedy_beats_level_more_often_than_constant():
    # greedy ascent lands above the beta' level far more often than a fixed
    # point does; rarity rates must reflect that ordering
    n = 8
    band = OgpBand(q_low=0.2, q_high=0.8)
    kw = dict(n=n, spec=pure(3), beta=0.4, beta_prime=0.2, band=band, K=1,
              c=4.0, replicas=12, seed=10, inner_replicas=4, mass_samples=4)
    greedy = rarity_report(baseline_greedy(40), **kw)
    const = rarity_report(baseline_constant(np.ones(n)), **kw)
    assert greedy.p_not_in_s_beta_prime <= const.p_not_in_s_beta_prime
