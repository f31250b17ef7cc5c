"""Prime-field arithmetic, vectors and matrices over F_q, and rank by row reduction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import rref_mod


class NotPrime(ValueError):
    pass


class NotGenerator(ValueError):
    pass


class ZeroInverse(ZeroDivisionError):
    pass


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    # deterministic Miller-Rabin for 64-bit inputs
    d, r = q - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if a % q == 0:
            continue
        x = pow(a, d, q)
        if x in (1, q - 1):
            continue
        for _ in range(r - 1):
            x = x * x % q
            if x == q - 1:
                break
        else:
            return False
    return True


def _prime_factors(m: int) -> list[int]:
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return out


def is_generator(q: int, g: int) -> bool:
    g %= q
    if g == 0:
        return False
    if q == 2:
        return g == 1
    return all(pow(g, (q - 1) // p, q) != 1 for p in _prime_factors(q - 1))


def next_prime(x: int) -> int:
    x = max(2, x)
    while not is_prime(x):
        x += 1
    return x


@dataclass(frozen=True)
class FieldCtx:
    q: int
    gamma: int

    def add(self, a, b):
        return (a + b) % self.q

    def sub(self, a, b):
        return (a - b) % self.q

    def mul(self, a, b):
        return (a * b) % self.q

    def neg(self, a):
        return (-a) % self.q

    def inv(self, a: int) -> int:
        return fq_inv(self, a)

    def pow(self, a: int, e: int) -> int:
        return pow(int(a), e, self.q)

    def vec(self, elems) -> np.ndarray:
        return np.asarray(elems, dtype=np.int64) % self.q


def field_new(q: int, gamma_hint: int | None = None) -> FieldCtx:
    if q < 2 or not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    if gamma_hint is not None:
        if not is_generator(q, gamma_hint):
            raise NotGenerator(f"{gamma_hint} does not generate F_{q}*")
        return FieldCtx(q, gamma_hint % q)
    if q == 2:
        return FieldCtx(2, 1)
    for g in range(2, q):
        if is_generator(q, g):
            return FieldCtx(q, g)
    raise NotGenerator(f"no generator found for {q}")  # unreachable for prime q


def fq_inv(ctx: FieldCtx, a: int) -> int:
    a = int(a) % ctx.q
    if a == 0:
        raise ZeroInverse("0 has no inverse")
    return pow(a, -1, ctx.q)


def inv_table(q: int) -> np.ndarray:
    """Inverses of 0..q-1 (entry 0 is 0)."""
    t = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        t[a] = pow(a, -1, q)
    return t


def row_reduce(M, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of M over F_q and its pivot columns.

    Works on a copy; entries must fit comfortably in int64 after one product.
    """
    A = np.array(M, dtype=np.int64, copy=True) % q
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if A.size == 0:
        return A, []
    if q >= 1 << 31:
        raise ValueError("row reduction needs q < 2^31 to keep products in int64")
    piv = rref_mod(A, q)
    return A, [int(c) for c in piv]


def matrix_rank(M, q: int | FieldCtx) -> int:
    if isinstance(q, FieldCtx):
        q = q.q
    M = np.asarray(M)
    if M.size == 0:
        return 0
    # eliminate along the shorter side
    if M.shape[0] > M.shape[1]:
        M = M.T
    return len(row_reduce(M, q)[1])


def nullspace(M, q: int) -> np.ndarray:
    """Basis of the right nullspace of M over F_q, one vector per row."""
    A, piv = row_reduce(M, q)
    cols = A.shape[1]
    free = [c for c in range(cols) if c not in set(piv)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(piv):
            basis[i, p] = (-A[r, f]) % q
    return basis


def solve(M, b, q: int) -> np.ndarray | None:
    """One solution x of M x = b over F_q, or None if inconsistent."""
    M = np.asarray(M, dtype=np.int64)
    aug = np.concatenate([M, np.asarray(b, dtype=np.int64).reshape(-1, 1)], axis=1)
    A, piv = row_reduce(aug, q)
    cols = M.shape[1]
    if cols in piv:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for r, p in enumerate(piv):
        x[p] = A[r, cols]
    return x
