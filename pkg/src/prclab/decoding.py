"""Unique decoding and list recovery for RS / folded RS codes.

`unique_decode` is Berlekamp-Welch.  `list_recover_rs` is a Guruswami-Sudan
interpolation with Roth-Ruckenstein root finding, falling back to exact
subset interpolation when the interpolation system is overdetermined.
`list_recover_bruteforce` enumerates every message and serves as the oracle.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .codes import CodeSpec, frs_fold, rs_encode
from ._kernels import line_votes
from .gf import nullspace, solve


class BudgetTooLarge(ValueError):
    pass


class OracleTooLarge(ValueError):
    pass


class AgreementBelowGuarantee(ValueError):
    pass


ORACLE_LIMIT = 1 << 24


@dataclass
class RecoveryResult:
    # message tuple -> number of positions whose list contains the codeword symbol
    codewords: dict = field(default_factory=dict)
    method: str = ""

    def messages(self) -> set:
        return set(self.codewords)

    def __bool__(self) -> bool:
        return bool(self.codewords)


# -- univariate polynomials as int lists, low degree first -------------------

def _trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_divmod(a: list[int], b: list[int], q: int) -> tuple[list[int], list[int]]:
    a = _trim([x % q for x in a])
    b = _trim([x % q for x in b])
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    inv_lead = pow(b[-1], -1, q)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    rem = a[:]
    for i in range(len(a) - len(b), -1, -1):
        c = rem[i + len(b) - 1] * inv_lead % q
        quot[i] = c
        if c:
            for j, bj in enumerate(b):
                rem[i + j] = (rem[i + j] - c * bj) % q
    return _trim(quot), _trim(rem[:len(b) - 1])


# -- unique decoding ---------------------------------------------------------

def unique_decode(spec: CodeSpec, received, max_errors: int):
    """Message within Hamming distance `max_errors` of `received`, else None."""
    n, k, q = spec.n, spec.k, spec.q
    if max_errors < 0 or max_errors > (n - k) // 2:
        raise BudgetTooLarge(f"max_errors={max_errors} exceeds {(n - k) // 2}")
    y = np.asarray(received, dtype=np.int64) % q
    if y.shape != (n,):
        raise ValueError(f"received word must have length {n}")
    e = max_errors
    xs = spec.points
    # unknowns: E_0..E_{e-1} (E monic of degree e), Q_0..Q_{e+k-1}
    nq = e + k
    pows = np.ones((n, max(nq, e + 1)), dtype=np.int64)
    for j in range(1, pows.shape[1]):
        pows[:, j] = pows[:, j - 1] * xs % q
    A = np.zeros((n, e + nq), dtype=np.int64)
    A[:, :e] = (-y[:, None] * pows[:, :e]) % q
    A[:, e:] = pows[:, :nq]
    rhs = y * pows[:, e] % q
    sol = solve(A, rhs, q)
    if sol is None:
        return None
    E = [int(v) for v in sol[:e]] + [1]
    Q = [int(v) for v in sol[e:]]
    p, r = poly_divmod(Q, E, q)
    if r or len(p) > k:
        return None
    msg = np.zeros(k, dtype=np.int64)
    msg[:len(p)] = p
    if int(np.count_nonzero(rs_encode(spec, msg) != y)) > e:
        return None
    return msg


# -- list-recovery helpers ---------------------------------------------------

def _symbol_codes(spec: CodeSpec, lists) -> list[np.ndarray]:
    """Each list as a sorted int array; FRS tuples are packed base q."""
    out = []
    for L in lists:
        vals = []
        for v in L:
            if spec.s == 1:
                vals.append(int(np.asarray(v).reshape(-1)[0]) if np.ndim(v) else int(v))
            else:
                vals.append(_pack(v, spec.q))
        out.append(np.array(sorted(set(vals)), dtype=np.int64))
    return out


def _pack(t, q: int) -> int:
    """Tuples pack least-significant first; an int is taken as already packed."""
    if np.ndim(t) == 0:
        return int(t)
    code = 0
    for v in reversed(list(t)):
        code = code * q + int(v)
    return code


def _check_lists(spec: CodeSpec, lists) -> None:
    N = spec.n // spec.s
    if len(lists) != N:
        raise ValueError(f"expected {N} lists, got {len(lists)}")


def agreement(spec: CodeSpec, codes: list[np.ndarray], msgs) -> np.ndarray:
    """Per-message count of positions whose list contains the codeword symbol."""
    msgs = np.atleast_2d(np.asarray(msgs, dtype=np.int64))
    cw = rs_encode(spec, msgs)
    if spec.s > 1:
        folded = frs_fold(spec, cw)
        weights = spec.q ** np.arange(spec.s, dtype=np.int64)
        cw = (folded * weights).sum(axis=-1)
    total = np.zeros(len(msgs), dtype=np.int64)
    for i, L in enumerate(codes):
        if L.size:
            total += np.isin(cw[:, i], L)
    return total


def _membership_table(spec: CodeSpec, codes: list[np.ndarray]) -> np.ndarray:
    tab = np.zeros((len(codes), spec.q), dtype=bool)
    for i, L in enumerate(codes):
        tab[i, L] = True
    return tab


def _result(spec: CodeSpec, codes, msgs, t_rec: int, method: str) -> RecoveryResult:
    res = RecoveryResult(method=method)
    if len(msgs) == 0:
        return res
    msgs = np.unique(np.asarray(msgs, dtype=np.int64).reshape(-1, spec.k), axis=0)
    agr = agreement(spec, codes, msgs)
    for m, a in zip(msgs, agr):
        if a >= t_rec:
            res.codewords[tuple(int(v) for v in m)] = int(a)
    return res


def list_recover_bruteforce(spec: CodeSpec, lists, t_rec: int) -> RecoveryResult:
    _check_lists(spec, lists)
    total = spec.q ** spec.k
    if total > ORACLE_LIMIT:
        raise OracleTooLarge(f"q^k = {total} exceeds {ORACLE_LIMIT}")
    codes = _symbol_codes(spec, lists)
    res = RecoveryResult(method="bruteforce")
    chunk = 1 << 15
    digits = spec.q ** np.arange(spec.k, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        msgs = (idx[:, None] // digits) % spec.q
        agr = agreement(spec, codes, msgs)
        for j in np.nonzero(agr >= t_rec)[0]:
            res.codewords[tuple(int(v) for v in msgs[j])] = int(agr[j])
    return res


# -- subset interpolation ----------------------------------------------------

def _lagrange_rows(spec: CodeSpec, pos_points: np.ndarray) -> np.ndarray:
    """k x k matrix B with msg = B @ values for the given k evaluation points."""
    q, k = spec.q, spec.k
    V = np.ones((k, k), dtype=np.int64)
    for j in range(1, k):
        V[:, j] = V[:, j - 1] * pos_points % q
    # invert V over F_q by Gauss-Jordan on [V | I]
    from .gf import row_reduce
    A, piv = row_reduce(np.concatenate([V, np.eye(k, dtype=np.int64)], axis=1), q)
    return A[:, k:]


def _eval_positions(spec: CodeSpec, subset) -> tuple[np.ndarray, int]:
    """Evaluation-point indices for folded positions; first k are used."""
    idx = np.concatenate([np.arange(p * spec.s, (p + 1) * spec.s) for p in subset])
    return idx, len(idx)


def _interpolate_combos(spec: CodeSpec, lists_vals, subset) -> np.ndarray:
    """Messages interpolated from every choice of list entries on `subset`."""
    q, k, s = spec.q, spec.k, spec.s
    idx, _ = _eval_positions(spec, subset)
    use = idx[:k]
    B = _lagrange_rows(spec, spec.points[use])
    grids = np.meshgrid(*[lists_vals[p] for p in subset], indexing="ij")
    combos = np.stack([g.reshape(-1) for g in grids], axis=1)
    if s > 1:
        digits = q ** np.arange(s, dtype=np.int64)
        combos = ((combos[:, :, None] // digits) % q).reshape(len(combos), -1)
    vals = combos[:, :k]
    return (vals @ B.T) % q


def _subset_size(spec: CodeSpec) -> int:
    return -(-spec.k // spec.s)


def list_recover_interpolate(spec: CodeSpec, lists, t_rec: int, limit: int = 1 << 22) -> RecoveryResult:
    """Exact recovery by interpolating through every list choice on small subsets.

    With u = ceil(k/s) and S the n - t + u positions with the smallest lists,
    any codeword with t agreements agrees on at least u positions of S, so
    enumerating all u-subsets of S and their list entries finds it.
    """
    _check_lists(spec, lists)
    N = spec.n // spec.s
    u = _subset_size(spec)
    codes = _symbol_codes(spec, lists)
    if t_rec < u:
        raise ValueError("t_rec below the interpolation subset size")
    if t_rec > N:
        return RecoveryResult(method="interpolate")
    order = sorted(range(N), key=lambda i: codes[i].size)
    S = [i for i in order[:N - t_rec + u] if codes[i].size]
    work = sum(math.prod(codes[i].size for i in sub) for sub in itertools.combinations(S, u))
    if work > limit:
        raise OracleTooLarge(f"subset enumeration needs {work} interpolations")
    found = []
    for sub in itertools.combinations(S, u):
        found.append(_interpolate_combos(spec, codes, sub))
    msgs = np.concatenate(found) if found else np.zeros((0, spec.k), dtype=np.int64)
    return _result(spec, codes, msgs, t_rec, "interpolate")


def _poly_mul_linear(p: list[int], root: int, q: int) -> list[int]:
    """p(X) * (X - root)."""
    out = [0] * (len(p) + 1)
    for i, c in enumerate(p):
        out[i + 1] = (out[i + 1] + c) % q
        out[i] = (out[i] - root * c) % q
    return out


def _line_votes(spec: CodeSpec, codes, sub, t_rec: int, chunk: int = 4096):
    """Messages through every choice of entries on the k-1 positions `sub`.

    Fixing k-1 evaluations leaves a line m0 + lam * d with
    d = prod (X - x_j).  Each other list point (p, y) lies on exactly one lam,
    so vote counts plus k-1 are exact agreements.
    """
    q, k = spec.q, spec.k
    xs = spec.points
    u = len(sub)
    d = [1]
    for j in sub:
        d = _poly_mul_linear(d, int(xs[j]), q)
    d_eval = np.zeros(spec.n, dtype=np.int64)
    for c in reversed(d):
        d_eval = (d_eval * xs + c) % q
    others = [p for p in range(spec.n) if p not in set(sub) and codes[p].size]
    pp = np.concatenate([np.full(codes[p].size, p) for p in others]) if others else np.zeros(0, np.int64)
    yy = np.concatenate([codes[p] for p in others]) if others else np.zeros(0, np.int64)
    inv_d = np.array([pow(int(v), -1, q) for v in d_eval[pp]], dtype=np.int64)
    # Lagrange basis for the k-1 chosen points, padded to length k
    basis = np.zeros((u, k), dtype=np.int64)
    for a, ja in enumerate(sub):
        poly = [1]
        denom = 1
        for jb in sub:
            if jb == ja:
                continue
            poly = _poly_mul_linear(poly, int(xs[jb]), q)
            denom = denom * (int(xs[ja]) - int(xs[jb])) % q
        inv = pow(denom, -1, q)
        basis[a, :len(poly)] = [c * inv % q for c in poly]
    V = spec.vandermonde  # n x k
    basis_eval = (basis @ V[pp].T) % q if pp.size else np.zeros((u, 0), np.int64)  # u x P
    # lam = y/d(x_p) - sum_a v_a * basis_a(x_p)/d(x_p); tabulate each term per list entry
    y_term = (yy * inv_d % q).astype(np.int32)
    scaled = basis_eval * inv_d[None, :] % q
    tables = [(codes[j][:, None] * scaled[a][None, :] % q).astype(np.int32) for a, j in enumerate(sub)]
    sizes = [codes[j].size for j in sub]
    d_vec = np.zeros(k, dtype=np.int64)
    d_vec[:len(d)] = d
    found = {}
    P = yy.size
    # iterate over the first chosen position, vectorise over the rest
    rest = np.zeros((1, P), dtype=np.int32)
    rest_idx = [()]
    for a in range(1, u):
        rest = ((rest[:, None, :] + tables[a][None, :, :]) % q).reshape(-1, P)
        rest_idx = [ri + (b,) for ri in rest_idx for b in range(sizes[a])]
    first = tables[0] if u else np.zeros((1, P), dtype=np.int32)
    hits = line_votes(y_term, np.ascontiguousarray(first), np.ascontiguousarray(rest), q, max(t_rec - u, 0))
    for i0, r, l, v in hits:
        choice = (int(i0),) + rest_idx[int(r)]
        vals = np.array([codes[j][c] for j, c in zip(sub, choice)], dtype=np.int64)
        m0 = (vals @ basis) % q
        msg = (m0 + int(l) * d_vec) % q
        found[tuple(int(x) for x in msg)] = int(v) + u
    return found


def list_recover_sampled(spec: CodeSpec, lists, t_rec: int, rng: np.random.Generator,
                         attempts: int = 30, pool: int | None = None, stop_early: bool = True) -> RecoveryResult:
    """Randomised recovery for agreement below the algebraic radius.

    Each attempt picks k-1 positions among the `pool` smallest nonempty lists
    and runs a line vote (RS) or full interpolation (folded codes).  Every
    returned codeword carries its exact agreement, so the output is always a
    subset of the exact answer.
    """
    _check_lists(spec, lists)
    N = spec.n // spec.s
    codes = _symbol_codes(spec, lists)
    nonempty = sorted((i for i in range(N) if codes[i].size), key=lambda i: (codes[i].size, i))
    res = RecoveryResult(method="sampled")
    u = spec.k - 1 if spec.s == 1 else _subset_size(spec)
    if t_rec > N or len(nonempty) < max(u, 1):
        return res
    pool = len(nonempty) if pool is None else max(u, min(pool, len(nonempty)))
    cand = nonempty[:pool]
    for _ in range(attempts):
        sub = sorted(int(v) for v in rng.choice(cand, size=u, replace=False))
        if spec.s == 1:
            found = _line_votes(spec, codes, sub, t_rec) if u else {}
            if u == 0:
                counts = np.zeros(spec.q, dtype=np.int64)
                for c in codes:
                    counts[c] += 1
                found = {(int(v),): int(counts[v]) for v in np.nonzero(counts >= t_rec)[0]}
        else:
            msgs = _interpolate_combos(spec, codes, sub)
            agr = agreement(spec, codes, msgs)
            found = {tuple(int(v) for v in msgs[j]): int(agr[j]) for j in np.nonzero(agr >= t_rec)[0]}
        res.codewords.update(found)
        if res.codewords and stop_early:
            break
    return res


# -- Guruswami-Sudan ----------------------------------------------------------

def gs_guarantee(k: int, ell: int, n: int) -> float:
    return math.sqrt((k - 1) * ell * n)


def _monomials(D: int, k: int) -> list[tuple[int, int]]:
    w = k - 1
    out = []
    b = 0
    while w * b <= D:
        for a in range(D - w * b + 1):
            out.append((a, b))
        b += 1
    return out


def gs_interpolate(spec: CodeSpec, points, r: int, D: int):
    """Nonzero Q(X,Y) of (1,k-1)-weighted degree <= D vanishing to order r on
    every point, as a 2-d coefficient array Q[a, b], or None."""
    q = spec.q
    mons = _monomials(D, spec.k)
    A = max(a for a, _ in mons) + 1
    B = max(b for _, b in mons) + 1
    rows = []
    binom = [[math.comb(a, u) % q for u in range(max(A, B))] for a in range(max(A, B))]
    for x, y in points:
        xp = [pow(int(x), e, q) for e in range(A)]
        yp = [pow(int(y), e, q) for e in range(B)]
        for u in range(r):
            for v in range(r - u):
                row = []
                for a, b in mons:
                    if a < u or b < v:
                        row.append(0)
                    else:
                        row.append(binom[a][u] * binom[b][v] * xp[a - u] * yp[b - v] % q)
                rows.append(row)
    M = np.array(rows, dtype=np.int64).reshape(len(rows), len(mons))
    basis = nullspace(M, q) if len(rows) else np.eye(len(mons), dtype=np.int64)[:1]
    if basis.shape[0] == 0:
        return None
    Q = np.zeros((A, B), dtype=np.int64)
    for (a, b), c in zip(mons, basis[0]):
        Q[a, b] = c
    return Q


def _shift(Q: np.ndarray, alpha: int, q: int) -> np.ndarray:
    """Coefficients of Q(X, X*Y + alpha)."""
    A, B = Q.shape
    out = np.zeros((A + B, B), dtype=np.int64)
    for b in range(B):
        col = Q[:, b]
        if not col.any():
            continue
        for j in range(b + 1):
            c = math.comb(b, j) * pow(alpha, b - j, q) % q
            if c:
                out[j:j + A, j] = (out[j:j + A, j] + c * col) % q
    return out


def gs_roots(Q: np.ndarray, k: int, q: int) -> list[tuple[int, ...]]:
    """All f of degree < k with Q(X, f(X)) = 0 (plus possibly spurious ones)."""
    found: list[tuple[int, ...]] = []
    ys = np.arange(q, dtype=np.int64)

    def rec(Q, prefix):
        nz = np.nonzero(Q.any(axis=1))[0]
        if nz.size == 0:
            return
        Q = Q[nz[0]:]
        # drop trailing all-zero rows/cols
        Q = Q[:np.nonzero(Q.any(axis=1))[0][-1] + 1]
        Q = Q[:, :np.nonzero(Q.any(axis=0))[0][-1] + 1]
        row = Q[0]
        vals = np.zeros(q, dtype=np.int64)
        for c in row[::-1]:
            vals = (vals * ys + c) % q
        for alpha in np.nonzero(vals == 0)[0]:
            f = prefix + (int(alpha),)
            if len(f) == k:
                found.append(f)
            else:
                rec(_shift(Q, int(alpha), q), f)

    rec(np.asarray(Q, dtype=np.int64) % q, ())
    return found


def list_recover_rs(spec: CodeSpec, lists, t_rec: int, max_multiplicity: int = 3,
                    fallback: bool = True) -> RecoveryResult:
    if spec.s != 1:
        raise ValueError("list_recover_rs needs an unfolded code")
    _check_lists(spec, lists)
    n, k, q = spec.n, spec.k, spec.q
    codes = _symbol_codes(spec, lists)
    ell = max((c.size for c in codes), default=0)
    if t_rec < gs_guarantee(k, ell, n) - 1e-12:
        raise AgreementBelowGuarantee(
            f"t_rec={t_rec} < sqrt((k-1) l n) = {gs_guarantee(k, ell, n):.3f}")
    if t_rec > n:
        return RecoveryResult(method="gs")
    if k == 1:
        counts = np.zeros(q, dtype=np.int64)
        for c in codes:
            counts[c] += 1
        return _result(spec, codes, np.nonzero(counts >= t_rec)[0].reshape(-1, 1), t_rec, "gs")
    points = [(int(spec.points[i]), int(y)) for i, c in enumerate(codes) for y in c]
    for r in range(1, max_multiplicity + 1):
        # a codeword with t agreements gives Q(X, f(X)) at least t*r roots,
        # so degree t*r - 1 forces Q(X, f(X)) = 0
        D = t_rec * r - 1
        if D < 0:
            break
        Q = gs_interpolate(spec, points, r, D)
        if Q is None:
            continue
        roots = gs_roots(Q, k, q)
        msgs = np.array(roots, dtype=np.int64).reshape(-1, k)
        return _result(spec, codes, msgs, t_rec, f"gs(r={r})")
    if not fallback:
        return RecoveryResult(method="gs-failed")
    return list_recover_interpolate(spec, lists, t_rec)


def list_recover_frs(spec: CodeSpec, lists, t_rec: int, check_guarantee: bool = True) -> RecoveryResult:
    if spec.s < 2:
        raise ValueError("list_recover_frs needs s >= 2")
    _check_lists(spec, lists)
    N = spec.n // spec.s
    ell = max((len(L) for L in lists), default=0)
    bound = spec.k * (N * ell) ** (1.0 / (spec.s + 1)) + 2
    if check_guarantee and t_rec < bound - 1e-12:
        raise AgreementBelowGuarantee(f"t_rec={t_rec} < k (N l)^(1/(s+1)) + 2 = {bound:.3f}")
    if spec.q ** spec.k <= ORACLE_LIMIT:
        return list_recover_bruteforce(spec, lists, t_rec)
    return list_recover_interpolate(spec, lists, t_rec)
