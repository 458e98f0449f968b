"""Gaussian disorder: energies, planted tilts, and the interpolation path."""

import math

import numpy as np
import pytest

from pspinlab import (
    DisorderTensor,
    DomainError,
    MixtureSpec,
    ShapeMismatchError,
    energy,
    energy_batch,
    flip_delta,
    interpolate,
    load_tensor,
    pure,
    sample_null,
    sample_planted,
    save_tensor,
)
from pspinlab.bits import all_spins
from pspinlab.mixture import xi


def _energy_oracle(g, sigma):
    """Direct nested-loop Hamiltonian, independent of the tensordot route."""
    total = 0.0
    n = g.n
    for k, gamma in g.spec.terms:
        block = g.couplings[k].reshape((n,) * k)
        scale = gamma * n ** (-(k - 1) / 2.0)
        it = np.nditer(block, flags=["multi_index"])
        for val in it:
            prod = 1.0
            for i in it.multi_index:
                prod *= sigma[i]
            total += scale * float(val) * prod
    return total


def test_energy_matches_bruteforce_oracle():
    spec = MixtureSpec(terms=((2, 0.7), (3, 1.2)))
    g = sample_null(5, spec, seed=3)
    rng = np.random.default_rng(0)
    for _ in range(4):
        sigma = np.where(rng.random(5) < 0.5, -1.0, 1.0)
        assert abs(energy(g, sigma) - _energy_oracle(g, sigma)) < 1e-10


def test_energy_batch_matches_scalar():
    spec = pure(3)
    g = sample_null(8, spec, seed=9)
    spins = all_spins(8)[:40]
    batch = energy_batch(g, spins)
    for i in range(40):
        assert abs(batch[i] - energy(g, spins[i])) < 1e-10


def test_energy_accepts_real_vectors():
    g = sample_null(6, pure(3), seed=1)
    x = np.full(6, 0.5)
    # multilinear: scaling every coordinate by t scales degree-3 energy by t^3
    assert abs(energy(g, x) - 0.125 * energy(g, np.ones(6))) < 1e-12


def test_flip_delta_matches_energy_difference():
    spec = MixtureSpec(terms=((2, 0.5), (4, 1.0)))
    g = sample_null(7, spec, seed=11)
    sigma = np.ones(7)
    for i in range(7):
        flipped = sigma.copy()
        flipped[i] = -1.0
        want = energy(g, flipped) - energy(g, sigma)
        assert abs(flip_delta(g, sigma, i) - want) < 1e-10


def test_flip_delta_requires_spins():
    g = sample_null(5, pure(2), seed=2)
    with pytest.raises(DomainError):
        flip_delta(g, np.full(5, 0.5), 1)


def test_planted_decomposition_identity():
    """H(sigma'; G_planted) = beta N xi(q) + H(sigma'; G_null) exactly."""
    n, beta = 10, 0.7
    spec = pure(3)
    inst = sample_planted(n, spec, beta, seed=21)
    rng = np.random.default_rng(5)
    for _ in range(25):
        sigma = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        q = float(sigma @ inst.center) / n
        have = energy(inst.tensor, sigma)
        want = beta * n * xi(spec, q) + energy(inst.null_tensor, sigma)
        assert abs(have - want) <= 1e-9 * max(1.0, abs(want))


def test_planted_center_is_spins():
    inst = sample_planted(8, pure(2), 0.5, seed=4)
    assert set(np.unique(inst.center)) <= {-1.0, 1.0}
    assert inst.tensor.kind == "planted"
    assert inst.null_tensor.kind == "null"


def test_interpolation_endpoints_and_variance():
    spec = pure(2)
    n = 300  # 90_000 couplings
    a = sample_null(n, spec, seed=31)
    b = sample_null(n, spec, seed=32)
    t0 = interpolate(a, b, 0.0)
    assert np.array_equal(t0.couplings[2], a.couplings[2])
    t1 = interpolate(a, b, 1.0)
    assert np.array_equal(t1.couplings[2], b.couplings[2])
    for tau in (0.3, 0.8):
        gt = interpolate(a, b, tau)
        v = gt.couplings[2].var()
        se = math.sqrt(2.0 / gt.couplings[2].size)
        assert abs(v - 1.0) < 3 * se + 0.01
        # correlation with the tau=0 endpoint is 1 - tau
        corr = float(np.mean(gt.couplings[2] * a.couplings[2]))
        assert abs(corr - (1 - tau)) < 3 * se + 0.01


def test_interpolation_tau_validation():
    a = sample_null(4, pure(2), seed=1)
    b = sample_null(4, pure(2), seed=2)
    with pytest.raises(DomainError):
        interpolate(a, b, -0.1)
    with pytest.raises(DomainError):
        interpolate(a, b, 1.1)


def test_interpolation_requires_matching_tensors():
    a = sample_null(4, pure(2), seed=1)
    c = sample_null(5, pure(2), seed=1)
    with pytest.raises(ShapeMismatchError):
        interpolate(a, c, 0.5)


def test_save_load_roundtrip(tmp_path):
    spec = MixtureSpec(terms=((2, 0.5), (3, 1.5)))
    g = sample_null(6, spec, seed=77)
    path = str(tmp_path / "tensor.bin")
    save_tensor(g, path)
    h = load_tensor(path)
    assert h.n == g.n and h.spec == g.spec and h.kind == g.kind
    for k in g.couplings:
        assert np.array_equal(h.couplings[k], g.couplings[k])


def test_sampling_is_seed_deterministic():
    a = sample_null(6, pure(3), seed=5)
    b = sample_null(6, pure(3), seed=5)
    c = sample_null(6, pure(3), seed=6)
    assert np.array_equal(a.couplings[3], b.couplings[3])
    assert not np.array_equal(a.couplings[3], c.couplings[3])


def test_resource_cap():
    from pspinlab import ResourceCapError
    with pytest.raises(ResourceCapError):
        sample_null(10_000, pure(3), seed=1)  # 10^12 scalars
