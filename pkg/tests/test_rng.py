from __future__ import annotations

import itertools

import numpy as np
from scipy.stats import chisquare

from prclab.rng import child_seed, fisher_yates, invert_perm, is_permutation, make_rng


def test_shuffle_uniform_over_s4():
    perms = {p: i for i, p in enumerate(itertools.permutations(range(4)))}
    rng = make_rng(1)
    counts = np.zeros(24)
    for _ in range(24_000):
        counts[perms[tuple(fisher_yates(4, rng).tolist())]] += 1
    assert chisquare(counts).pvalue > 1e-3


def test_shuffle_edges_and_inverse():
    assert fisher_yates(0, make_rng(1)).tolist() == []
    assert fisher_yates(1, make_rng(1)).tolist() == [0]
    p = fisher_yates(300, make_rng(2))
    assert is_permutation(p, 300)
    assert np.array_equal(p[invert_perm(p)], np.arange(300))


def test_streams_replay_and_differ():
    assert np.array_equal(make_rng(5, 1).integers(0, 1 << 30, 8), make_rng(5, 1).integers(0, 1 << 30, 8))
    assert not np.array_equal(make_rng(5, 1).integers(0, 1 << 30, 8), make_rng(5, 2).integers(0, 1 << 30, 8))
    assert child_seed(5, 1) == child_seed(5, 1) != child_seed(5, 2)
