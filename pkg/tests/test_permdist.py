from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import chi2

from prclab.codes import LinearCode, make_spec
from prclab.permdist import (PartitionInconsistent, PermKey, TooLargeToEnumerate, dump_samples, exact_tv_tiny,
                             load_samples, noiseless_counts, partition_matches, puzzles_to_codes_convert,
                             random_global_perm, recover_partition, sample_no_alphabet_perm,
                             sample_permuted_codes, sample_permuted_puzzles, sample_uniform, subst_channel,
                             tv_bound)
from prclab.rng import make_rng


def _chi2_uniform(values, cells):
    counts = np.bincount(np.asarray(values).reshape(-1), minlength=cells)
    exp = counts.sum() / cells
    return ((counts - exp) ** 2 / exp).sum()


def test_subst_channel_examples():
    x = np.arange(5)
    assert np.array_equal(subst_channel(x, 0.0, 5, make_rng(1)), x)
    y = subst_channel(np.zeros(10 ** 5, dtype=int), 1.0, 5, make_rng(2))
    assert _chi2_uniform(y, 5) < chi2.ppf(0.999, 4)


def test_resample_rate():
    # fraction of symbols changed is eta * (1 - 1/q)
    eta, q, n = 1 / 32, 127, 10 ** 4
    y = subst_channel(np.zeros(n, dtype=int), eta, q, make_rng(3))
    rate = eta * (1 - 1 / q)
    sd = np.sqrt(n * rate * (1 - rate))
    assert abs(np.count_nonzero(y) - n * rate) <= 3 * sd


@given(st.integers(0, 2 ** 32))
def test_permkey_apply_invert(seed):
    key = PermKey.generate(7, 5, seed)
    c = make_rng(seed, 1).integers(0, 5, size=(3, 7))
    assert np.array_equal(key.invert(key.apply(c)), c)
    assert np.array_equal(PermKey.generate(7, 5, seed).sigma, key.sigma)


def test_trivial_code_is_uniform():
    code = LinearCode.trivial(2, 3)
    X = sample_permuted_codes(code, PermKey.generate(2, 3, 4), 0.0, 10 ** 5, make_rng(5))
    assert _chi2_uniform(X[:, 0] * 3 + X[:, 1], 9) < chi2.ppf(0.999, 8)
    Y = sample_no_alphabet_perm(code, [1, 0], 0.0, 10 ** 5, make_rng(6))
    assert _chi2_uniform(Y[:, 0] * 3 + Y[:, 1], 9) < chi2.ppf(0.999, 8)


def test_single_position_marginals_rs():
    spec = make_spec(5, 2)
    X = sample_permuted_codes(spec, PermKey.generate(4, 5, 8), 0.1, 2 * 10 ** 4, make_rng(9))
    for i in range(4):
        assert _chi2_uniform(X[:, i], 5) < chi2.ppf(0.999, 4)


def test_raw_codewords_without_noise():
    spec = make_spec(5, 2)
    X = sample_no_alphabet_perm(spec, np.arange(4), 0.0, 50, make_rng(10))
    code = LinearCode.from_spec(spec)
    cws = {tuple(r) for r in code.codewords().tolist()}
    assert all(tuple(r) in cws for r in X.tolist())
    again = sample_no_alphabet_perm(spec, np.arange(4), 0.0, 50, make_rng(10))
    assert np.array_equal(X, again)


def test_puzzle_sampler():
    code = LinearCode.trivial(3, 2)
    pi = random_global_perm(3, 2, make_rng(1))
    assert sample_permuted_puzzles(code, pi, 5, 0, make_rng(2)).shape == (5, 0)
    P = sample_permuted_puzzles(code, pi, 6 * 10 ** 4, 2, make_rng(3))
    assert _chi2_uniform(P, 6) < chi2.ppf(0.999, 5)
    assert np.array_equal(P[:10], sample_permuted_puzzles(code, pi, 6 * 10 ** 4, 2, make_rng(3))[:10])


def test_converter_needs_enough_samples():
    code = LinearCode.random_mds_dual(8, 3, 5, 3, make_rng(3))
    failures = 0
    for t in range(10):
        pi = random_global_perm(8, 5, make_rng(20, t))
        X = sample_permuted_puzzles(code, pi, 10, 7, make_rng(21, t))
        try:
            puzzles_to_codes_convert(X, 8, 5, 0.2, make_rng(22, t))
        except PartitionInconsistent:
            failures += 1
    assert failures >= 8


def test_converter_partition_sizes():
    code = LinearCode.random_mds_dual(8, 3, 5, 3, make_rng(3))
    pi = random_global_perm(8, 5, make_rng(30))
    X = sample_permuted_puzzles(code, pi, 4800, 7, make_rng(31))
    sets = recover_partition(X, 8, 5)
    assert all(len(S) == 5 for S in sets)
    assert partition_matches(sets, pi, 8, 5)
    conv, fails = puzzles_to_codes_convert(X, 8, 5, 0.2, make_rng(32), partition=sets)
    good = [c for c in conv if c is not None]
    assert len(good) + fails == 4800
    assert all(c.shape == (8,) and c.min() >= 0 and c.max() < 5 for c in good)


def test_tv_trivial_is_zero_and_mass_exact():
    assert exact_tv_tiny(LinearCode.trivial(2, 2), 0.0, 1) == 0.0
    assert exact_tv_tiny(LinearCode.trivial(3, 2), 0.3, 2) == pytest.approx(0.0, abs=1e-12)
    counts = noiseless_counts(LinearCode.trivial(2, 2), 1)
    assert np.all(counts == counts[0])


def test_tv_even_weight():
    ew4 = LinearCode.even_weight(4)
    d = ew4.dual_distance()
    assert d == 4
    tv = exact_tv_tiny(ew4, 0.25, 1)
    assert tv <= tv_bound(4, 2, 1, 0.25, d)
    # with q = 2 a random alphabet flip per position makes one sample exactly uniform
    assert exact_tv_tiny(ew4, 0.0, 1) == pytest.approx(0.0, abs=1e-12)
    assert exact_tv_tiny(ew4, 0.0, 2) > 0


def test_tv_monotone_and_bounded():
    for code in (LinearCode.even_weight(4), LinearCode.even_weight(5), LinearCode(np.array([[1, 1, 0, 0], [0, 1, 1, 1]]), 2)):
        d = code.dual_distance()
        vals = [exact_tv_tiny(code, eta, 2) for eta in (0.0, 0.1, 0.25, 0.5)]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
        for eta, v in zip((0.0, 0.1, 0.25, 0.5), vals):
            assert v <= tv_bound(code.n, 2, 2, eta, d) + 1e-12


def test_tv_guard():
    with pytest.raises(TooLargeToEnumerate):
        exact_tv_tiny(LinearCode.trivial(7, 2), 0.1, 1)


def test_linear_tests_are_fooled():
    code = LinearCode.even_weight(6)
    d = code.dual_distance()
    X = sample_permuted_codes(code, PermKey.generate(6, 2, 41), 0.1, 10 ** 5, make_rng(42))
    signs = 1 - 2 * X
    import itertools
    for w in range(1, d // 2 + 1):
        for S in itertools.combinations(range(6), w):
            est = np.prod(signs[:, list(S)], axis=1).mean()
            assert abs(est) <= 4 / np.sqrt(len(X))


def test_dump_load_roundtrip():
    X = sample_uniform(4, 5, 3, make_rng(1))
    text = dump_samples(X, 4, 5, 0.125)
    assert text.splitlines()[0] == "# permdist v1 n=4 q=5 T=3 eta=0.125"
    header, Y = load_samples(text)
    assert header == dict(n=4, q=5, T=3, eta=0.125)
    assert np.array_equal(X, Y)
