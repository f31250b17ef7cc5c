from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prclab.attacks import (FourierAttackConfig, PlantedPredicateSpec, RankAttackConfig, TooManyCoefficients,
                            TooManyMonomials, fourier_attack, fourier_coefficients, monomials, planted_sample,
                            power_matrix, rank_attack, rank_trial, uniform_bound_precondition)
from prclab.codes import LinearCode, make_spec
from prclab.rng import make_rng


def test_power_matrix_small_examples():
    X = np.array([[1, 2], [3, 4]])
    P0 = power_matrix(X, 0, 5)
    assert P0.shape == (1, 2) and np.all(P0 == 1)
    assert power_matrix(X, 1, 5).shape == (3, 2)
    rows = {tuple(r) for r in power_matrix(X, 2, 5)}
    assert (3, 3) in rows and (1, 1) in rows and (1, 4) in rows


@given(st.integers(1, 4), st.integers(0, 3), st.integers(0, 2 ** 31))
@settings(max_examples=30)
def test_power_matrix_rows_are_products(T, r, seed):
    q = 13
    rng = make_rng(seed)
    X = rng.integers(0, q, size=(T, 6))
    P = power_matrix(X, r, q)
    assert P.shape[0] == math.comb(r + T, r)
    monos = monomials(T, r)
    for idx in rng.choice(len(monos), size=min(10, len(monos)), replace=False):
        want = np.ones(6, dtype=np.int64)
        for j in monos[idx]:
            want = want * X[j] % q
        assert np.array_equal(P[idx], want)


def test_monomial_guard():
    with pytest.raises(TooManyMonomials):
        power_matrix(np.zeros((40, 3)), 6, 7)


def test_planted_dictator_and_parity():
    rng = make_rng(1)
    pp = PlantedPredicateSpec(4, 8, "dictator", (2,))
    X = planted_sample(pp, 500, rng)
    assert np.array_equal(X[:, 4], X[:, 2])
    pp = PlantedPredicateSpec(4, 8, "parity", (0, 3), sigma=(7, 6, 5, 4, 3, 2, 1, 0))
    X = planted_sample(pp, 500, rng)
    assert np.array_equal(X[:, 3], X[:, 7] ^ X[:, 4])
    assert pp.witness() == ((4, 7), 3)


def test_planted_noise_rate():
    pp = PlantedPredicateSpec(4, 8, "dictator", (0,), rho=0.25)
    X = planted_sample(pp, 20000, make_rng(2))
    assert abs(np.mean(X[:, 4] != X[:, 0]) - 0.25) < 0.02


def test_fourier_recovers_planted_parity():
    pp = PlantedPredicateSpec(8, 16, "parity", (1, 5), sigma=tuple(np.roll(np.arange(16), 3)))
    stat, S, i, pairs = fourier_coefficients(planted_sample(pp, 4000, make_rng(3)), 2)
    assert stat == pytest.approx(1.0)
    assert tuple(sorted(S + (i,))) == tuple(sorted(pp.witness()[0] + (pp.witness()[1],)))
    assert pairs == sum(math.comb(16, d) * (16 - d) for d in range(3))


def test_fourier_null_scale():
    """Under uniform bits the max coefficient stays below a union-bound Gaussian scale."""
    count, n, t = 10_000, 32, 2
    pairs = sum(math.comb(n, d) * (n - d) for d in range(t + 1))
    scale = math.sqrt(2 * math.log(2 * pairs / 0.01)) / math.sqrt(count)
    for trial in range(5):
        X = make_rng(4, trial).integers(0, 2, size=(count, n))
        assert fourier_coefficients(X, t)[0] < scale


def test_fourier_guard():
    with pytest.raises(TooManyCoefficients):
        fourier_coefficients(np.zeros((4, 65)), 2)


def test_fourier_attack_report_csv():
    rep = fourier_attack(FourierAttackConfig(n=16, ell=8, count=2000, trials=3), seed=5)
    assert rep.advantage == 1.0 and rep.extra["witness_found"] == 3
    lines = rep.to_csv().splitlines()
    assert lines[0].startswith("# {") and lines[1] == "trial,hypothesis,statistic,accept"
    assert len(lines) == 2 + 6


def test_rank_degenerate_cases_have_no_advantage():
    full = rank_attack(RankAttackConfig(q=11, k=10, eta=0.1, T=2, r=2, threshold=6, trials=20), seed=6)
    assert full.advantage <= 0.1
    noise = rank_attack(RankAttackConfig(q=31, k=3, eta=1.0, T=3, r=3, threshold=20, trials=20), seed=7)
    assert noise.advantage <= 0.2


def test_rank_structured_bound_per_trial():
    cfg = RankAttackConfig(q=31, k=3, eta=0.05, T=3, r=3, threshold=20, trials=1)
    code = LinearCode.from_spec(make_spec(cfg.q, cfg.k))
    for t in range(20):
        rank, noisy = rank_trial(cfg, "structured", 8, t, code)
        assert rank <= min(noisy + cfg.k * cfg.r + 1, math.comb(cfg.r + cfg.T, cfg.r))


def test_rank_separates_when_monomials_exceed_n():
    cfg = RankAttackConfig(q=101, k=3, eta=0.1, T=4, r=4, threshold=60, trials=10)
    assert uniform_bound_precondition(cfg.n, cfg.q, cfg.T, cfg.r)
    assert rank_attack(cfg, seed=9).advantage >= 0.8


def test_rank_jobs_deterministic():
    cfg = RankAttackConfig(q=31, k=3, eta=0.1, T=3, r=3, threshold=15, trials=4)
    a, b = rank_attack(cfg, seed=10, jobs=1), rank_attack(cfg, seed=10, jobs=2)
    assert a.to_csv() == b.to_csv()


def test_majority_witness_any_support_coordinate():
    rep = fourier_attack(FourierAttackConfig(n=16, ell=8, f="majority", support=(0, 1, 2), count=4000, trials=3),
                         seed=11)
    assert rep.advantage == 1.0 and rep.extra["witness_found"] == 3
    pp = PlantedPredicateSpec(8, 16, "majority", (0, 1, 2))
    assert pp.witnesses() == {(0, 8), (1, 8), (2, 8)}
