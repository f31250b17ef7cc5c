"""Permuted-codes and permuted-puzzles distributions.

A permuted-codes sample takes a uniform codeword c, applies a secret position
permutation sigma and per-position alphabet permutations pi_i
(hat_c[i] = pi_i(c[sigma[i]])), then a substitution channel.  The key is shared
by all T samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codes import LinearCode
from .rng import fisher_yates, invert_perm, is_permutation, make_rng


class DimensionMismatch(ValueError):
    pass


class PartitionInconsistent(RuntimeError):
    pass


class TooLargeToEnumerate(ValueError):
    pass


@dataclass
class PermKey:
    sigma: np.ndarray
    pis: np.ndarray  # n x q, row i is pi_i
    source_seed: int | None = None

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=np.int64)
        self.pis = np.atleast_2d(np.asarray(self.pis, dtype=np.int64))
        n = self.sigma.size
        if not is_permutation(self.sigma) or self.pis.shape[0] != n:
            raise ValueError("sigma must be a permutation matching pis")
        if not all(is_permutation(p) for p in self.pis):
            raise ValueError("every pi_i must be a permutation")

    @property
    def n(self) -> int:
        return self.sigma.size

    @property
    def q(self) -> int:
        return self.pis.shape[1]

    @classmethod
    def generate(cls, n: int, q: int, seed: int) -> "PermKey":
        rng = make_rng(seed)
        sigma = fisher_yates(n, rng)
        pis = np.stack([fisher_yates(q, rng) for _ in range(n)]) if n else np.zeros((0, q), np.int64)
        return cls(sigma, pis, seed)

    @classmethod
    def identity(cls, n: int, q: int) -> "PermKey":
        return cls(np.arange(n), np.tile(np.arange(q), (n, 1)))

    def apply(self, c) -> np.ndarray:
        """hat_c[i] = pi_i(c[sigma[i]]); works on batches along the last axis."""
        c = np.asarray(c, dtype=np.int64)
        return self.pis[np.arange(self.n), c[..., self.sigma]]

    def invert(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.int64)
        pinv = np.stack([invert_perm(p) for p in self.pis])
        out = np.empty_like(y)
        out[..., self.sigma] = pinv[np.arange(self.n), y]
        return out


def subst_channel(x, eta: float, q: int, rng: np.random.Generator) -> np.ndarray:
    """Resample each symbol uniformly with probability eta (it may stay the same)."""
    if not 0 <= eta <= 1:
        raise ValueError("eta must lie in [0, 1]")
    x = np.asarray(x, dtype=np.int64)
    hit = rng.random(x.shape) < eta
    return np.where(hit, rng.integers(0, q, size=x.shape), x)


def _as_code(code) -> LinearCode:
    if isinstance(code, LinearCode):
        return code
    return LinearCode.from_spec(code)


def sample_permuted_codes(code, key: PermKey, eta: float, T: int, rng: np.random.Generator) -> np.ndarray:
    """T x n array of samples from the permuted-codes distribution under `key`."""
    code = _as_code(code)
    if key.n != code.n or key.q != code.q:
        raise DimensionMismatch(f"key ({key.n}, {key.q}) vs code ({code.n}, {code.q})")
    c = code.sample(rng, T)
    return subst_channel(key.apply(c), eta, code.q, rng)


def sample_no_alphabet_perm(code, sigma, eta: float, T: int, rng: np.random.Generator) -> np.ndarray:
    code = _as_code(code)
    sigma = np.asarray(sigma, dtype=np.int64)
    if sigma.size != code.n:
        raise DimensionMismatch("sigma length differs from block length")
    c = code.sample(rng, T)
    return subst_channel(c[:, sigma], eta, code.q, rng)


def sample_uniform(n: int, q: int, T: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, q, size=(T, n), dtype=np.int64)


def random_global_perm(n: int, q: int, rng: np.random.Generator) -> np.ndarray:
    """Permutation of [n] x [q], encoded on flat indices i*q + v."""
    return fisher_yates(n * q, rng)


def sample_permuted_puzzles(code, pi_global, T: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """T x m array of flat symbols pi(i_j, c_{i_j}) with i_j i.i.d. uniform over [n]."""
    code = _as_code(code)
    if m > code.n:
        raise ValueError("m must be at most n")
    pi_global = np.asarray(pi_global, dtype=np.int64)
    c = code.sample(rng, T)
    idx = rng.integers(0, code.n, size=(T, m))
    vals = np.take_along_axis(c, idx, axis=1)
    return pi_global[idx * code.q + vals]


def recover_partition(samples, n: int, q: int) -> list[list[int]]:
    """Greedy grouping of [n] x [q] symbols by the never-co-occur rule."""
    samples = np.asarray(samples, dtype=np.int64)
    N = n * q
    co = np.zeros((N, N), dtype=bool)
    for row in samples:
        u = np.unique(row)
        co[np.ix_(u, u)] = True
    placed = np.zeros(N, dtype=bool)
    sets: list[list[int]] = []
    for _ in range(n):
        S: list[int] = []
        for a in range(N):
            if placed[a]:
                continue
            if not S or any(not co[a, b] for b in S):
                S.append(a)
                placed[a] = True
        sets.append(S)
    return sets


def puzzles_to_codes_convert(samples, n: int, q: int, eta: float, rng: np.random.Generator,
                             partition: list[list[int]] | None = None):
    """Convert puzzle samples into permuted-codes samples.

    Returns (converted, fails): converted is a list with one entry per input
    sample, either a length-n vector or None where the sample failed.
    """
    samples = np.asarray(samples, dtype=np.int64)
    sets = recover_partition(samples, n, q) if partition is None else partition
    if len(sets) != n or any(len(S) != q for S in sets):
        raise PartitionInconsistent(f"set sizes {[len(S) for S in sets]} (expected {q} each)")
    pi_adv = fisher_yates(n, rng)
    phi = np.empty(n * q, dtype=np.int64)
    local = np.empty(n * q, dtype=np.int64)
    for ell, S in enumerate(sets):
        bij = fisher_yates(q, rng)
        for pos, a in enumerate(S):
            phi[a] = pi_adv[ell]
            local[a] = bij[pos]
    out = []
    fails = 0
    for row in samples:
        c_hat = rng.integers(0, q, size=n, dtype=np.int64)
        k = int(rng.binomial(n, 1 - eta))
        I = np.unique(phi[row])
        if I.size < k:
            out.append(None)
            fails += 1
            continue
        chosen = set(rng.choice(I, size=k, replace=False).tolist())
        for a in row:
            ell = int(phi[a])
            if ell in chosen:
                c_hat[ell] = local[a]
        out.append(c_hat)
    return out, fails


def partition_matches(sets, pi_global, n: int, q: int) -> bool:
    """True iff every recovered set is exactly the image of one index under pi."""
    inv = invert_perm(pi_global)
    for S in sets:
        if len(S) != q or len({int(inv[a]) // q for a in S}) != 1:
            return False
    return True


# -- exact total variation at tiny scale -------------------------------------

TV_GUARD = dict(n=6, q=2, T=2)


def tv_bound(n: int, q: int, T: int, eta: float, d: int) -> float:
    return n * T * math.comb(n + q ** T - 1, q ** T - 1) * (1 - eta) ** (d / 2)


def noiseless_counts(code: LinearCode, T: int) -> np.ndarray:
    """Integer weights of the noiseless permuted distribution over (q^T)^n.

    Output index: column symbol s_i = sum_t x[t, i] q^t, then sum_i s_i (q^T)^i.
    """
    import itertools
    n, q = code.n, code.q
    Q = q ** T
    cws = code.codewords()
    # columns of every T-tuple of codewords as symbols in [Q]
    tuples = np.array(list(itertools.product(range(len(cws)), repeat=T)), dtype=np.int64)
    cols = np.zeros((len(tuples), n), dtype=np.int64)
    for t in range(T):
        cols += cws[tuples[:, t]] * q ** t
    # a per-position alphabet permutation acts on the T-symbol column through
    # the same pi applied to each of its coordinates
    alpha = [np.array(p, dtype=np.int64) for p in itertools.permutations(range(q))]
    col_maps = []
    digits = (np.arange(Q)[:, None] // q ** np.arange(T)) % q
    for p in alpha:
        col_maps.append((p[digits] * q ** np.arange(T)).sum(axis=1))
    col_maps = np.stack(col_maps)  # |S_q| x Q
    weights = Q ** np.arange(n, dtype=np.int64)
    counts = np.zeros(Q ** n, dtype=np.int64)
    for sigma in itertools.permutations(range(n)):
        perm_cols = cols[:, list(sigma)]
        for choice in itertools.product(range(len(alpha)), repeat=n):
            mapped = col_maps[np.array(choice)[None, :], perm_cols]
            counts += np.bincount(mapped @ weights, minlength=Q ** n)
    return counts


def exact_tv_tiny(code, eta: float, T: int) -> float:
    code = _as_code(code)
    n, q = code.n, code.q
    if n > TV_GUARD["n"] or q != TV_GUARD["q"] or T > TV_GUARD["T"]:
        raise TooLargeToEnumerate(f"(n={n}, q={q}, T={T}) outside n<=6, q=2, T<=2")
    counts = noiseless_counts(code, T)
    P = counts / counts.sum()
    # noise acts independently on each of the n*T symbols
    K = (1 - eta) * np.eye(q) + eta / q
    P = P.reshape((q,) * (n * T))
    for ax in range(n * T):
        P = np.moveaxis(np.tensordot(K, P, axes=([0], [ax])), 0, ax)
    U = 1.0 / q ** (n * T)
    return 0.5 * math.fsum(abs(float(v) - U) for v in P.reshape(-1))


def dump_samples(samples, n: int, q: int, eta: float) -> str:
    samples = np.asarray(samples)
    lines = [f"# permdist v1 n={n} q={q} T={len(samples)} eta={eta}"]
    lines += [" ".join(str(int(v)) for v in row) for row in samples]
    return "\n".join(lines) + "\n"


def load_samples(text: str) -> tuple[dict, np.ndarray]:
    header: dict = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    key, val = tok.split("=", 1)
                    header[key] = float(val) if key == "eta" else int(val)
        elif line.strip():
            rows.append([int(v) for v in line.split()])
    return header, np.array(rows, dtype=np.int64)
