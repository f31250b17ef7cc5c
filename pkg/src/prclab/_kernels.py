"""Compiled inner loops."""
from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def line_votes(y_term, first, rest, q, need):
    """For each (i0, r): votes over lam of (y_term - first[i0] - rest[r]) mod q.

    All inputs are residues in [0, q).  Returns rows (i0, r, lam, votes) with
    votes >= need.
    """
    n0, P = first.shape
    nr = rest.shape[0]
    counts = np.zeros(q, dtype=np.int32)
    base = np.empty(P, dtype=np.int32)
    hits = []
    for i0 in range(n0):
        for p in range(P):
            b = y_term[p] - first[i0, p]
            base[p] = b + q if b < 0 else b
        for r in range(nr):
            counts[:] = 0
            row = rest[r]
            for p in range(P):
                v = base[p] - row[p]
                if v < 0:
                    v += q
                counts[v] += 1
            for lam in range(q):
                if counts[lam] >= need:
                    hits.append((i0, r, lam, counts[lam]))
    res = np.zeros((len(hits), 4), dtype=np.int64)
    for i in range(len(hits)):
        a, b, c, d = hits[i]
        res[i, 0] = a
        res[i, 1] = b
        res[i, 2] = c
        res[i, 3] = d
    return res


@numba.njit(cache=True)
def rref_mod(A, q):
    """In-place reduced row echelon form over F_q (q prime); returns pivot columns."""
    rows, cols = A.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = -1
        for i in range(r, rows):
            if A[i, c] != 0:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(c, cols):
                t = A[r, j]
                A[r, j] = A[p, j]
                A[p, j] = t
        # Fermat inverse of the pivot
        inv = 1
        base = A[r, c]
        e = q - 2
        while e > 0:
            if e & 1:
                inv = inv * base % q
            base = base * base % q
            e >>= 1
        for j in range(c, cols):
            A[r, j] = A[r, j] * inv % q
        for i in range(rows):
            if i == r:
                continue
            f = A[i, c]
            if f == 0:
                continue
            for j in range(c, cols):
                A[i, j] = (A[i, j] - f * A[r, j]) % q
        pivots[r] = c
        r += 1
    return pivots[:r]
