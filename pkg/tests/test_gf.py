from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from prclab.gf import (NotGenerator, NotPrime, ZeroInverse, field_new, fq_inv, inv_table, is_generator,
                       is_prime, matrix_rank, next_prime, nullspace, row_reduce, solve)
from prclab.rng import make_rng

PRIMES = [2, 3, 5, 7, 11, 13, 17, 101, 127, 257]


def test_field_new_examples():
    assert field_new(5).gamma == 2
    assert field_new(2).gamma == 1
    with pytest.raises(NotPrime):
        field_new(6)
    with pytest.raises(NotGenerator):
        field_new(5, 4)


def test_generator_order_is_exact():
    for q in PRIMES:
        g = field_new(q).gamma
        powers = {pow(g, e, q) for e in range(q - 1)}
        assert powers == set(range(1, q))


def test_is_prime_against_sieve():
    N = 5000
    sieve = np.ones(N, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(N ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    assert [is_prime(i) for i in range(N)] == sieve.tolist()
    assert is_prime(2 ** 61 - 1) and not is_prime(2 ** 61 + 1)
    assert next_prime(128) == 131 and next_prime(127) == 127


def test_fq_inv_examples():
    ctx = field_new(5)
    assert fq_inv(ctx, 1) == 1
    assert fq_inv(ctx, 2) == 3
    with pytest.raises(ZeroInverse):
        fq_inv(ctx, 0)


@given(st.sampled_from(PRIMES[1:]), st.integers(1, 10 ** 6), st.integers(1, 10 ** 6))
def test_inverse_of_product(q, a, b):
    a, b = a % q or 1, b % q or 1
    ctx = field_new(q)
    assert fq_inv(ctx, a * b % q) == fq_inv(ctx, b) * fq_inv(ctx, a) % q


@given(st.sampled_from(PRIMES), st.integers(-10 ** 9, 10 ** 9))
def test_additive_inverse(q, a):
    assert (a + (q - a % q)) % q == 0


def test_inv_table():
    for q in PRIMES:
        t = inv_table(q)
        assert all(i * int(t[i]) % q == 1 for i in range(1, q))


def test_rank_examples():
    assert matrix_rank(np.eye(3, dtype=int), 5) == 3
    assert matrix_rank(np.zeros((2, 4), dtype=int), 5) == 0
    assert matrix_rank([[1, 2], [2, 4]], 5) == 1


def _rank_column_pivot(M, q):
    """Independent oracle: eliminate column-first with full pivot search."""
    A = [list(map(int, r)) for r in np.asarray(M) % q]
    rows, cols = len(A), len(A[0]) if A else 0
    rank = 0
    used_rows: set[int] = set()
    for c in range(cols - 1, -1, -1):
        piv = next((r for r in range(rows) if r not in used_rows and A[r][c]), None)
        if piv is None:
            continue
        used_rows.add(piv)
        inv = pow(A[piv][c], -1, q)
        for r in range(rows):
            if r != piv and A[r][c]:
                f = A[r][c] * inv % q
                A[r] = [(x - f * y) % q for x, y in zip(A[r], A[piv])]
        rank += 1
    return rank


def test_rank_two_elimination_orders():
    rng = make_rng(11)
    for _ in range(100):
        M = rng.integers(0, 7, size=(8, 8))
        if rng.random() < 0.5:
            M[rng.integers(0, 8)] = (M[0] * 3 + M[1]) % 7
        assert matrix_rank(M, 7) == _rank_column_pivot(M, 7)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2 ** 32))
def test_rref_nullspace_solve(r, c, seed):
    q = 7
    M = make_rng(seed).integers(0, q, size=(r, c))
    R, piv = row_reduce(M, q)
    assert len(piv) == matrix_rank(M, q)
    K = nullspace(M, q)
    assert K.shape[0] == c - len(piv)
    assert not np.any((M @ K.T) % q)
    x = make_rng(seed, 1).integers(0, q, size=c)
    b = M @ x % q
    sol = solve(M, b, q)
    assert sol is not None and np.array_equal(M @ sol % q, b)


def test_solve_inconsistent():
    assert solve([[1, 1], [1, 1]], [0, 1], 5) is None


def test_is_generator():
    assert is_generator(7, 3) and not is_generator(7, 2)
