"""Reed-Solomon and folded Reed-Solomon codes over prime fields.

Evaluation points are consecutive powers of the field generator,
gamma^0, ..., gamma^(n-1), with n = q - 1.  Messages are coefficient vectors
of length k (degree at most k - 1, low degree first).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .gf import FieldCtx, field_new, next_prime


class LengthMismatch(ValueError):
    pass


class FoldMismatch(ValueError):
    pass


class TooManyPositions(ValueError):
    pass


@dataclass(frozen=True)
class CodeSpec:
    ctx: FieldCtx
    k: int
    s: int = 1
    n: int = field(default=-1)

    def __post_init__(self):
        n = self.ctx.q - 1 if self.n == -1 else self.n
        if n != self.ctx.q - 1:
            raise ValueError(f"n must equal q-1={self.ctx.q - 1}, got {n}")
        object.__setattr__(self, "n", n)
        if not 1 <= self.k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}")
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if n % self.s:
            raise FoldMismatch(f"s={self.s} does not divide n={n}")

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def N(self) -> int:
        if self.n % self.s:
            raise FoldMismatch(f"s={self.s} does not divide n={self.n}")
        return self.n // self.s

    @cached_property
    def points(self) -> np.ndarray:
        q, g = self.ctx.q, self.ctx.gamma
        pts = np.empty(self.n, dtype=np.int64)
        x = 1
        for j in range(self.n):
            pts[j] = x
            x = x * g % q
        return pts

    @cached_property
    def vandermonde(self) -> np.ndarray:
        """n x k matrix V with V[j, i] = gamma^(j*i); codeword = V @ msg."""
        q = self.ctx.q
        V = np.ones((self.n, self.k), dtype=np.int64)
        for i in range(1, self.k):
            V[:, i] = V[:, i - 1] * self.points % q
        return V


def make_spec(q: int, k: int, s: int = 1, gamma: int | None = None) -> CodeSpec:
    return CodeSpec(field_new(q, gamma), k, s)


def spec_for_lambda(lam: int, k: int, s: int = 1) -> CodeSpec:
    """Code with q the smallest prime >= lam and n = q - 1."""
    return make_spec(next_prime(lam), k, s)


def rs_encode(spec: CodeSpec, msg) -> np.ndarray:
    msg = np.asarray(msg, dtype=np.int64)
    if msg.shape[-1] != spec.k:
        raise LengthMismatch(f"message length {msg.shape[-1]} != k={spec.k}")
    q = spec.q
    # Horner over all points at once; also works on a batch of messages
    out = np.zeros(msg.shape[:-1] + (spec.n,), dtype=np.int64)
    for i in range(spec.k - 1, -1, -1):
        out = (out * spec.points + (msg[..., i:i + 1] % q)) % q
    return out


def rs_encode_batch(spec: CodeSpec, msgs) -> np.ndarray:
    return rs_encode(spec, msgs)


def frs_fold(spec: CodeSpec, cw) -> np.ndarray:
    """Group symbols into N tuples of s consecutive symbols (shape N x s)."""
    cw = np.asarray(cw, dtype=np.int64)
    if cw.shape[-1] != spec.n:
        raise LengthMismatch(f"codeword length {cw.shape[-1]} != n={spec.n}")
    if spec.n % spec.s:
        raise FoldMismatch(f"s={spec.s} does not divide n={spec.n}")
    return cw.reshape(cw.shape[:-1] + (spec.n // spec.s, spec.s))


def frs_unfold(folded) -> np.ndarray:
    folded = np.asarray(folded)
    return folded.reshape(folded.shape[:-2] + (-1,))


def sample_message(spec: CodeSpec, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, spec.q, size=spec.k, dtype=np.int64)


def sample_codeword(spec: CodeSpec, rng: np.random.Generator) -> np.ndarray:
    return rs_encode(spec, sample_message(spec, rng))


def interpolate(spec: CodeSpec, xs, ys) -> np.ndarray:
    """Lagrange interpolation: coefficients (low first) of the degree < len(xs) polynomial."""
    q = spec.q
    xs = [int(x) % q for x in xs]
    ys = [int(y) % q for y in ys]
    m = len(xs)
    coeffs = [0] * m
    for i in range(m):
        # basis polynomial prod_{j != i} (X - x_j) / (x_i - x_j)
        basis = [1]
        denom = 1
        for j in range(m):
            if j == i:
                continue
            basis = [(a - xs[j] * b) % q for a, b in zip([0] + basis, basis + [0])]
            denom = denom * (xs[i] - xs[j]) % q
        scale = ys[i] * pow(denom, -1, q) % q
        for d in range(m):
            coeffs[d] = (coeffs[d] + scale * basis[d]) % q
    return np.array(coeffs, dtype=np.int64)


def is_codeword(spec: CodeSpec, word) -> bool:
    """True iff `word` is the evaluation of a polynomial of degree < k."""
    word = np.asarray(word, dtype=np.int64) % spec.q
    if word.shape != (spec.n,):
        return False
    msg = interpolate(spec, spec.points[:spec.k], word[:spec.k])
    return bool(np.array_equal(rs_encode(spec, msg), word))


def kwise_uniformity_check(spec: CodeSpec, positions, samples: int, rng: np.random.Generator) -> float:
    """Chi-square statistic of the joint law of `positions` over uniform codewords."""
    positions = sorted(set(int(p) for p in positions))
    if len(positions) > spec.k:
        raise TooManyPositions(f"{len(positions)} positions > k={spec.k}")
    if not positions or samples <= 0:
        return 0.0
    q = spec.q
    msgs = rng.integers(0, q, size=(samples, spec.k), dtype=np.int64)
    V = spec.vandermonde[positions]
    vals = (msgs @ V.T) % q
    idx = np.zeros(samples, dtype=np.int64)
    for c in range(vals.shape[1]):
        idx = idx * q + vals[:, c]
    cells = q ** len(positions)
    counts = np.bincount(idx, minlength=cells)
    expected = samples / cells
    return float(((counts - expected) ** 2 / expected).sum())


class LinearCode:
    """Generic linear code over F_q given by a k x n generator matrix."""

    def __init__(self, G, q: int):
        self.G = np.atleast_2d(np.asarray(G, dtype=np.int64)) % q
        self.q = q
        self.k, self.n = self.G.shape

    @classmethod
    def from_spec(cls, spec: CodeSpec) -> "LinearCode":
        return cls(spec.vandermonde.T, spec.q)

    @classmethod
    def trivial(cls, n: int, q: int) -> "LinearCode":
        return cls(np.eye(n, dtype=np.int64), q)

    @classmethod
    def even_weight(cls, n: int) -> "LinearCode":
        G = np.zeros((n - 1, n), dtype=np.int64)
        for i in range(n - 1):
            G[i, i] = G[i, n - 1] = 1
        return cls(G, 2)

    @classmethod
    def random_mds_dual(cls, n: int, k: int, q: int, min_dual: int, rng, tries: int = 1000) -> "LinearCode":
        """Random [n, k] code whose dual distance is at least `min_dual`."""
        for _ in range(tries):
            code = cls(rng.integers(0, q, size=(k, n)), q)
            if code.dual_distance() >= min_dual:
                return code
        raise RuntimeError("no code with the requested dual distance found")

    def sample(self, rng, T: int | None = None) -> np.ndarray:
        shape = (self.k,) if T is None else (T, self.k)
        return (rng.integers(0, self.q, size=shape) @ self.G) % self.q

    def codewords(self) -> np.ndarray:
        msgs = np.array(list(np.ndindex(*(self.q,) * self.k)), dtype=np.int64).reshape(-1, self.k)
        return np.unique((msgs @ self.G) % self.q, axis=0)

    def dual_codewords(self) -> np.ndarray:
        from .gf import nullspace
        H = nullspace(self.G, self.q)
        if H.shape[0] == 0:
            return np.zeros((1, self.n), dtype=np.int64)
        return LinearCode(H, self.q).codewords()

    def dual_distance(self) -> int:
        """Minimum weight of a nonzero dual codeword (n + 1 if the dual is trivial)."""
        D = self.dual_codewords()
        w = np.count_nonzero(D, axis=1)
        w = w[w > 0]
        return int(w.min()) if w.size else self.n + 1
