"""Insertion/deletion edit distance and edit-ball utilities over bit strings.

Substitutions are not a primitive move here: turning "0" into "1" costs a
deletion plus an insertion, so ED(a, b) = |a| + |b| - 2 LCS(a, b).
Bit strings are plain Python str over "01".
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class BallTooLarge(ValueError):
    pass


MAX_BALL_LEN = 32
MAX_BALL_EDITS = 4


def as_bits(x) -> str:
    if isinstance(x, str):
        return x
    return "".join("1" if int(v) else "0" for v in x)


def lcs_length(a: str, b: str) -> int:
    """Bit-parallel LCS (Hyyro's recurrence) using Python integers."""
    a, b = as_bits(a), as_bits(b)
    if not a or not b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    full = (1 << len(a)) - 1
    masks = {"0": 0, "1": 0}
    for i, ch in enumerate(a):
        masks[ch] |= 1 << i
    V = full
    for ch in b:
        U = V & masks.get(ch, 0)
        V = ((V + U) | (V - U)) & full
    return len(a) - bin(V).count("1")


def edit_distance(a, b) -> int:
    a, b = as_bits(a), as_bits(b)
    return len(a) + len(b) - 2 * lcs_length(a, b)


@dataclass(frozen=True)
class SEDBudget:
    ham_frac: float
    edit_frac: float
    reference_len: int

    def __post_init__(self):
        if not (0 <= self.ham_frac <= 1 and 0 <= self.edit_frac <= 1):
            raise ValueError("budget fractions must lie in [0, 1]")

    @property
    def subs(self) -> int:
        return math.floor(self.ham_frac * self.reference_len + 1e-9)

    @property
    def indels(self) -> int:
        return math.floor(self.edit_frac * self.reference_len + 1e-9)


def sed_min_indels(w: str, y: str, max_subs: int) -> int:
    """Fewest indels turning some w'' (Ham(w, w'') <= max_subs) into y."""
    w, y = as_bits(w), as_bits(y)
    H = max(0, min(max_subs, len(w)))
    inf = 1 << 30
    # dp[j, s]: best cost for the current prefix of w against y[:j] using s substitutions
    yb = np.frombuffer(y.encode(), dtype=np.uint8)
    prev = np.full((len(y) + 1, H + 1), inf, dtype=np.int64)
    prev[:, 0] = np.arange(len(y) + 1)
    for i in range(1, len(w) + 1):
        cur = np.full_like(prev, inf)
        cur[0, 0] = i
        eq = yb == ord(w[i - 1])
        for j in range(1, len(y) + 1):
            best = np.minimum(prev[j] + 1, cur[j - 1] + 1)
            if eq[j - 1]:
                best = np.minimum(best, prev[j - 1])
            else:
                best[1:] = np.minimum(best[1:], prev[j - 1, :-1])
            cur[j] = best
        prev = cur
    return int(prev[len(y)].min())


def sed_member(w, y, budget: SEDBudget) -> bool:
    w, y = as_bits(w), as_bits(y)
    if budget.reference_len != len(w):
        raise ValueError("budget.reference_len must equal |w|")
    if abs(len(y) - len(w)) > budget.indels:
        return False
    return sed_min_indels(w, y, budget.subs) <= budget.indels


def _neighbours(s: str):
    for i in range(len(s)):
        yield s[:i] + s[i + 1:]
    for i in range(len(s) + 1):
        yield s[:i] + "0" + s[i:]
        yield s[:i] + "1" + s[i:]


def edit_ball_enumerate(w, max_edits: int, check_guard: bool = True) -> set[str]:
    w = as_bits(w)
    if max_edits < 0:
        raise ValueError("max_edits must be non-negative")
    if check_guard and (len(w) > MAX_BALL_LEN or max_edits > MAX_BALL_EDITS):
        raise BallTooLarge(f"|w|={len(w)}, d={max_edits} exceeds ({MAX_BALL_LEN}, {MAX_BALL_EDITS})")
    ball = {w}
    frontier = {w}
    for _ in range(max_edits):
        nxt = set()
        for s in frontier:
            for t in _neighbours(s):
                if t not in ball:
                    nxt.add(t)
        ball |= nxt
        frontier = nxt
    return ball


def edit_ball_same_length(w, max_edits: int) -> set[str]:
    """Strings of length |w| within indel distance max_edits (d/2 del+ins pairs)."""
    w = as_bits(w)
    ball = {w}
    frontier = {w}
    for _ in range(max_edits // 2):
        nxt = set()
        for s in frontier:
            for i in range(len(s)):
                d = s[:i] + s[i + 1:]
                for jj in range(len(d) + 1):
                    for ch in "01":
                        t = d[:jj] + ch + d[jj:]
                        if t not in ball:
                            nxt.add(t)
        ball |= nxt
        frontier = nxt
    return ball


def ed_ball_bound(n: int, d: int, alphabet: int = 2) -> float:
    """Upper bound (e (n+d) (|alphabet|+1) / d)^d on an indel ball's size."""
    if d == 0:
        return 1.0
    return (math.e * (n + d) * (alphabet + 1) / d) ** d


def sed_ball_bound(n: int, p: float, eps: float) -> float:
    """Upper bound on |SEDball(z, 1/2 - p, eps)| for z of length n."""
    if eps <= 0:
        return 2.0 ** (n * (1 - p * p))
    return 2.0 ** (n * (1 - p * p + math.log2(6 * math.e) * eps * math.log2(1 / eps)))


def hamming_ball(w: str, radius: int) -> set[str]:
    from itertools import combinations
    w = as_bits(w)
    out = set()
    for r in range(min(radius, len(w)) + 1):
        for pos in combinations(range(len(w)), r):
            lst = list(w)
            for p in pos:
                lst[p] = "1" if lst[p] == "0" else "0"
            out.add("".join(lst))
    return out


def sed_ball_enumerate(w, ham_frac: float, edit_frac: float) -> set[str]:
    w = as_bits(w)
    b = SEDBudget(ham_frac, edit_frac, len(w))
    out: set[str] = set()
    for z in hamming_ball(w, b.subs):
        out |= edit_ball_enumerate(z, b.indels, check_guard=False)
    return out
