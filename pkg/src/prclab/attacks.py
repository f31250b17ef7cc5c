"""Distinguishers: the rank attack on unpermuted-alphabet RS samples and the Fourier attack."""
from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass, field
from itertools import combinations, combinations_with_replacement

import numpy as np

from .codes import LinearCode, make_spec
from .gf import matrix_rank
from .permdist import PermKey, sample_permuted_codes, sample_uniform, subst_channel
from .rng import child_seed, fisher_yates, make_rng

MONOMIAL_LIMIT = 10 ** 5


class TooManyMonomials(ValueError):
    pass


class TooManyCoefficients(ValueError):
    pass


@dataclass
class DistinguisherReport:
    name: str
    threshold: float
    stats0: list = field(default_factory=list)   # uniform hypothesis
    stats1: list = field(default_factory=list)   # structured hypothesis
    accept0: list = field(default_factory=list)
    accept1: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def trials(self) -> tuple[int, int]:
        return len(self.stats0), len(self.stats1)

    @property
    def p0(self) -> float:
        return float(np.mean(self.accept0)) if self.accept0 else 0.0

    @property
    def p1(self) -> float:
        return float(np.mean(self.accept1)) if self.accept1 else 0.0

    @property
    def advantage(self) -> float:
        return abs(self.p1 - self.p0)

    def summary(self) -> dict:
        return dict(name=self.name, threshold=self.threshold, trials=list(self.trials),
                    p_accept_uniform=self.p0, p_accept_structured=self.p1, advantage=self.advantage,
                    mean_stat_uniform=float(np.mean(self.stats0)) if self.stats0 else None,
                    mean_stat_structured=float(np.mean(self.stats1)) if self.stats1 else None,
                    bounds=self.bounds, config=self.config)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("# " + json.dumps(self.config, sort_keys=True, separators=(",", ":")) + "\n")
        out.write("trial,hypothesis,statistic,accept\n")
        for hyp, stats, acc in (("uniform", self.stats0, self.accept0), ("structured", self.stats1, self.accept1)):
            for t, (s, a) in enumerate(zip(stats, acc)):
                out.write(f"{t},{hyp},{_fmt(s)},{int(a)}\n")
        return out.getvalue()

    def summary_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=2)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


# -- rank attack -----------------------------------------------------------------

def monomials(T: int, r: int) -> list[tuple[int, ...]]:
    """Multisets of row indices of size <= r, by degree then lexicographically."""
    out: list[tuple[int, ...]] = []
    for d in range(r + 1):
        out.extend(combinations_with_replacement(range(T), d))
    return out


def power_matrix(X, r: int, q: int) -> np.ndarray:
    """All coordinate-wise products of up to r rows of X (with repetition), C(r+T, r) rows."""
    X = np.asarray(X, dtype=np.int64) % q
    if X.ndim != 2:
        raise ValueError("X must be a matrix")
    if r < 0:
        raise ValueError("r must be non-negative")
    T, n = X.shape
    M = math.comb(r + T, r)
    if M > MONOMIAL_LIMIT:
        raise TooManyMonomials(f"C({r}+{T}, {r}) = {M} rows exceeds {MONOMIAL_LIMIT}")
    rows = {(): np.ones(n, dtype=np.int64)}
    out = np.empty((M, n), dtype=np.int64)
    for idx, mono in enumerate(monomials(T, r)):
        if mono not in rows:
            rows[mono] = rows[mono[:-1]] * X[mono[-1]] % q
        out[idx] = rows[mono]
    return out


def rank_statistic(X, r: int, q: int) -> int:
    return matrix_rank(power_matrix(X, r, q), q)


def rs_side_bound(n: int, k: int, eta: float, T: int, r: int) -> float:
    return n - n * (1 - eta) ** T + k * r + 1


def uniform_side_bound(n: int, q: int, r: int) -> float:
    return n * (1 - math.log(r) / math.log(q)) - 1 / math.log(q)


def uniform_bound_precondition(n: int, q: int, T: int, r: int) -> bool:
    """r^n * q^(C(r+T, r) - n) >= 1, checked in logs."""
    return n * math.log(r) + (math.comb(r + T, r) - n) * math.log(q) >= 0


@dataclass(frozen=True)
class RankAttackConfig:
    q: int = 101
    k: int = 3
    eta: float = 0.1
    T: int = 4
    r: int = 3
    threshold: float = 60.0
    trials: int = 100
    # structured side drawn from the full permuted-codes distribution instead
    negative_control: bool = False

    @property
    def n(self) -> int:
        return self.q - 1


def structured_rank_trial(code: LinearCode, cfg: RankAttackConfig, rng) -> tuple[int, int]:
    """(rank of X^r, number of columns altered by the channel) for one no-alphabet-permutation draw."""
    sigma = fisher_yates(code.n, rng)
    clean = code.sample(rng, cfg.T)[:, sigma]
    X = subst_channel(clean, cfg.eta, code.q, rng)
    noisy = int(np.any(X != clean, axis=0).sum())
    return rank_statistic(X, cfg.r, code.q), noisy


def rank_trial(cfg: RankAttackConfig, hypothesis: str, seed: int, trial: int, code: LinearCode | None = None):
    """One trial; returns (rank, noisy column count or -1)."""
    if code is None:
        code = LinearCode.from_spec(make_spec(cfg.q, cfg.k))
    if hypothesis == "uniform":
        rng = make_rng(seed, 0, trial)
        return rank_statistic(sample_uniform(cfg.n, cfg.q, cfg.T, rng), cfg.r, cfg.q), -1
    rng = make_rng(seed, 1, trial)
    if cfg.negative_control:
        key = PermKey.generate(cfg.n, cfg.q, child_seed(seed, 2, trial))
        X = sample_permuted_codes(code, key, cfg.eta, cfg.T, rng)
        return rank_statistic(X, cfg.r, cfg.q), -1
    return structured_rank_trial(code, cfg, rng)


def rank_attack(cfg: RankAttackConfig, seed: int = 0, jobs: int = 1) -> DistinguisherReport:
    """Accept 'structured' iff rank(X^r) <= threshold."""
    code = LinearCode.from_spec(make_spec(cfg.q, cfg.k))
    tasks = [(h, t) for h in ("uniform", "structured") for t in range(cfg.trials)]
    results = _map(jobs, _rank_worker, [(cfg, h, seed, t) for h, t in tasks], code=code)
    rep = DistinguisherReport("rank", cfg.threshold, config=dict(asdict(cfg), seed=seed, attack="rank"))
    noisy = []
    for (h, _), (rk, nz) in zip(tasks, results):
        acc = rk <= cfg.threshold
        if h == "uniform":
            rep.stats0.append(rk)
            rep.accept0.append(acc)
        else:
            rep.stats1.append(rk)
            rep.accept1.append(acc)
            noisy.append(nz)
    rep.bounds = dict(rs_side=rs_side_bound(cfg.n, cfg.k, cfg.eta, cfg.T, cfg.r),
                      uniform_side=uniform_side_bound(cfg.n, cfg.q, cfg.r),
                      uniform_precondition=uniform_bound_precondition(cfg.n, cfg.q, cfg.T, cfg.r),
                      max_rank=min(math.comb(cfg.r + cfg.T, cfg.r), cfg.n))
    rep.extra["noisy_columns"] = noisy
    return rep


def _rank_worker(args, code=None):
    cfg, h, seed, t = args
    return rank_trial(cfg, h, seed, t, code=code)


def _map(jobs: int, fn, items, **kw):
    if jobs <= 1:
        return [fn(it, **kw) for it in items]
    from concurrent.futures import ProcessPoolExecutor
    from functools import partial
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(partial(fn, **kw), items, chunksize=max(1, len(items) // (4 * jobs))))


# -- Fourier attack --------------------------------------------------------------

PREDICATES = ("parity", "majority", "dictator")


@dataclass(frozen=True)
class PlantedPredicateSpec:
    """Rows sigma(x || f(x) || y) with x uniform of length ell and filler y uniform.

    f acts on the coordinates `support` of x; rho flips the f bit independently.
    """
    ell: int
    n: int
    f: str = "parity"
    support: tuple[int, ...] = (0, 1)
    sigma: tuple[int, ...] | None = None
    rho: float = 0.0

    def __post_init__(self):
        if self.f not in PREDICATES:
            raise ValueError(f"unknown predicate {self.f!r}")
        if not 0 < self.ell < self.n:
            raise ValueError("need 0 < ell < n")
        if any(not 0 <= s < self.ell for s in self.support) or len(set(self.support)) != len(self.support):
            raise ValueError("support must be distinct coordinates of x")
        if self.f == "dictator" and len(self.support) != 1:
            raise ValueError("dictator takes one coordinate")
        if self.f == "majority" and len(self.support) % 2 == 0:
            raise ValueError("majority needs an odd support")
        if self.sigma is not None and sorted(self.sigma) != list(range(self.n)):
            raise ValueError("sigma must permute range(n)")

    def perm(self) -> np.ndarray:
        return np.arange(self.n) if self.sigma is None else np.asarray(self.sigma)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        sub = x[:, list(self.support)]
        if self.f == "parity":
            return sub.sum(axis=1) % 2
        if self.f == "majority":
            return (2 * sub.sum(axis=1) > len(self.support)).astype(np.int64)
        return sub[:, 0].copy()

    def weight(self) -> float:
        """Largest Fourier coefficient magnitude of f (in the +-1 encoding)."""
        if self.f == "majority":
            w = len(self.support)
            return math.comb(w - 1, (w - 1) // 2) / 2 ** (w - 1)
        return 1.0

    def witness(self) -> tuple[tuple[int, ...], int]:
        """(S, i) carrying the planted coefficient, in output coordinates."""
        p = self.perm()
        S = tuple(self.support) if self.f == "parity" else (self.support[0],)
        return tuple(sorted(int(p[s]) for s in S)), int(p[self.ell])

    def witnesses(self) -> set[tuple[int, ...]]:
        """All sorted S + (i,) index sets carrying the top coefficient."""
        p = self.perm()
        out = int(p[self.ell])
        if self.f == "parity":
            return {tuple(sorted([int(p[s]) for s in self.support] + [out]))}
        return {tuple(sorted((int(p[s]), out))) for s in self.support}


def planted_sample(pp: PlantedPredicateSpec, count: int, rng) -> np.ndarray:
    """count x n bit matrix; column sigma(j) holds the j-th bit of x || f(x) || y."""
    x = rng.integers(0, 2, size=(count, pp.ell))
    fx = pp.evaluate(x)
    if pp.rho > 0:
        fx = fx ^ (rng.random(count) < pp.rho)
    y = rng.integers(0, 2, size=(count, pp.n - pp.ell - 1))
    raw = np.concatenate([x, fx[:, None], y], axis=1)
    out = np.empty_like(raw)
    out[:, pp.perm()] = raw
    return out.astype(np.uint8)


def fourier_guard(n: int, t: int, max_n: int = 64, max_t: int = 2) -> None:
    if n > max_n or t > max_t:
        raise TooManyCoefficients(f"n={n}, t={t} exceeds guard n<={max_n}, t<={max_t}")


def fourier_coefficients(samples, t: int) -> tuple[float, tuple[int, ...], int, int]:
    """Max |E[chi_S(r) r_i]| over |S| <= t, i not in S (0 -> +1, 1 -> -1).

    Returns (max, S, i, number of (S, i) pairs).
    """
    B = np.asarray(samples)
    count, n = B.shape
    fourier_guard(n, t)
    if count == 0:
        raise ValueError("no samples")
    R = 1.0 - 2.0 * B.astype(np.float64)
    best, best_S, best_i, pairs = -1.0, (), -1, 0
    for d in range(t + 1):
        for S in combinations(range(n), d):
            chi = np.prod(R[:, list(S)], axis=1) if d else np.ones(count)
            est = chi @ R / count
            if d:
                est[list(S)] = 0.0
            pairs += n - d
            i = int(np.argmax(np.abs(est)))
            if abs(est[i]) > best:
                best, best_S, best_i = float(abs(est[i])), S, i
    return best, best_S, best_i, pairs


def fourier_threshold(count: int, planted_weight: float) -> float:
    return 4 / math.sqrt(count) + planted_weight / 2


@dataclass(frozen=True)
class FourierAttackConfig:
    n: int = 32
    ell: int = 16
    f: str = "parity"
    support: tuple[int, ...] = (0, 1)
    rho: float = 0.0
    count: int = 10_000
    t: int = 2
    trials: int = 20
    threshold: float | None = None

    def predicate(self, rng) -> PlantedPredicateSpec:
        sigma = tuple(int(v) for v in fisher_yates(self.n, rng))
        return PlantedPredicateSpec(self.ell, self.n, self.f, tuple(self.support), sigma, self.rho)


def fourier_attack(cfg: FourierAttackConfig, seed: int = 0, jobs: int = 1) -> DistinguisherReport:
    """Accept 'structured' iff the largest low-degree correlation exceeds the threshold."""
    weight = PlantedPredicateSpec(cfg.ell, cfg.n, cfg.f, tuple(cfg.support)).weight()
    thr = cfg.threshold if cfg.threshold is not None else fourier_threshold(cfg.count, weight)
    tasks = [(h, t) for h in ("uniform", "structured") for t in range(cfg.trials)]
    results = _map(jobs, _fourier_worker, [(cfg, h, seed, t) for h, t in tasks])
    rep = DistinguisherReport("fourier", thr, config=dict(asdict(cfg), seed=seed, attack="fourier"))
    hits = 0
    for (h, _), (stat, S, i, wit) in zip(tasks, results):
        acc = stat > thr
        if h == "uniform":
            rep.stats0.append(stat)
            rep.accept0.append(acc)
        else:
            rep.stats1.append(stat)
            rep.accept1.append(acc)
            hits += tuple(sorted(S + (i,))) in wit
    rep.bounds = dict(null_scale=4 / math.sqrt(cfg.count), planted_weight=weight)
    rep.extra["witness_found"] = hits
    return rep


def _fourier_worker(args):
    cfg, h, seed, t = args
    if h == "uniform":
        rng = make_rng(seed, 0, t)
        X = rng.integers(0, 2, size=(cfg.count, cfg.n), dtype=np.uint8)
        wit = set()
    else:
        rng = make_rng(seed, 1, t)
        pp = cfg.predicate(rng)
        X = planted_sample(pp, cfg.count, rng)
        wit = pp.witnesses()
    stat, S, i, _ = fourier_coefficients(X, cfg.t)
    return stat, S, i, wit
