"""Configuration encoding, distances, and Gray-code order."""

import numpy as np

from pspinlab import bits


def test_config_spin_roundtrip_scalar_and_batch():
    n = 7
    for idx in (0, 1, 5, 2**n - 1):
        s = bits.config_to_spins(idx, n)
        assert s.shape == (n,)
        assert set(np.unique(s)) <= {-1.0, 1.0}
        assert bits.spins_to_config(s) == idx
    batch = bits.config_to_spins(np.arange(2**n, dtype=np.uint64), n)
    assert batch.shape == (2**n, n)
    recon = [bits.spins_to_config(row) for row in batch]
    assert recon == list(range(2**n))


def test_bit_zero_means_plus_one():
    s = bits.config_to_spins(0, 5)
    assert np.array_equal(s, np.ones(5))
    s1 = bits.config_to_spins(1, 5)
    assert s1[0] == -1.0 and np.all(s1[1:] == 1.0)


def test_popcount_and_hamming():
    xs = np.array([0, 1, 3, 255, 2**20 - 1], dtype=np.uint64)
    assert list(bits.popcount(xs)) == [0, 1, 2, 8, 20]
    assert bits.hamming(0b1010, 0b0110) == 2
    a = np.array([0, 7], dtype=np.uint64)
    assert list(bits.hamming(a, np.uint64(1))) == [1, 2]


def test_overlap_matches_spin_dot_product():
    n = 9
    idx = np.arange(2**n, dtype=np.uint64)
    spins = bits.config_to_spins(idx, n)
    ref = bits.config_to_spins(57, n)
    dots = spins @ ref
    ov = bits.overlap_int(idx, np.uint64(57), n)
    assert np.array_equal(np.asarray(ov, dtype=np.int64), dots.astype(np.int64))


def test_gray_code_neighbors_differ_in_one_bit():
    t = np.arange(1, 2**10, dtype=np.uint64)
    g = bits.gray_code(t)
    gp = bits.gray_code(t - 1)
    assert np.all(bits.popcount(np.bitwise_xor(g, gp)) == 1)
    assert len(np.unique(bits.gray_code(np.arange(2**10, dtype=np.uint64)))) == 2**10


def test_masks_of_weight():
    m = bits.masks_of_weight(6, 2)
    assert len(m) == 15
    assert np.all(bits.popcount(m) == 2)
    assert len(np.unique(m)) == 15


def test_all_spins_rows_match_encoding():
    n = 5
    table = bits.all_spins(n)
    assert table.shape == (2**n, n)
    assert np.array_equal(table[19], bits.config_to_spins(19, n))
