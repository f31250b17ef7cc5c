"""Pseudorandom codes: a substitution-robust scheme over F_q and an
edit-robust scheme over bits.

Both keys hold a position permutation sigma, per-position alphabet
permutations pi_i and a one-time pad o.  A codeword symbol at position
sigma(i) is masked by o[sigma(i)] and relabelled by pi_i.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .codes import CodeSpec, frs_fold, make_spec, rs_encode, sample_codeword
from .decoding import (
    AgreementBelowGuarantee, RecoveryResult, gs_guarantee, list_recover_frs,
    list_recover_interpolate, list_recover_rs, list_recover_sampled, unique_decode,
)
from .editdist import edit_ball_same_length
from .permdist import PermKey, subst_channel
from .rng import invert_perm, make_rng


class DeltaTooLarge(ValueError):
    pass


# -- keys ----------------------------------------------------------------------

@dataclass
class PRCKey:
    kind: str  # "edit" or "subst"
    perm: PermKey
    pad: np.ndarray
    q: int
    n: int
    k: int
    s: int = 1
    _pinv: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.pad = np.asarray(self.pad, dtype=np.int64)
        if self.kind not in ("edit", "subst"):
            raise ValueError(f"unknown key kind {self.kind!r}")
        N = self.n // self.s
        if self.perm.n != N or self.pad.size != N:
            raise ValueError("key dimensions do not match the code")

    @property
    def sigma(self) -> np.ndarray:
        return self.perm.sigma

    @property
    def pis(self) -> np.ndarray:
        return self.perm.pis

    @property
    def seed(self) -> int | None:
        return self.perm.source_seed

    @property
    def pinv(self) -> np.ndarray:
        if self._pinv is None:
            self._pinv = np.stack([invert_perm(p) for p in self.perm.pis])
        return self._pinv

    @property
    def sigma_inv(self) -> np.ndarray:
        return invert_perm(self.perm.sigma)

    def spec(self) -> CodeSpec:
        return make_spec(self.q, self.k, self.s)


def _keygen(kind: str, spec: CodeSpec, seed: int | None = None, rng=None) -> PRCKey:
    """Key from a 64-bit seed (stored) or from an explicit generator."""
    N = spec.n // spec.s
    alpha = spec.q ** spec.s
    if seed is None:
        if rng is None:
            raise ValueError("need a seed or an rng")
        seed = int(rng.integers(0, 2 ** 63))
    perm = PermKey.generate(N, alpha, seed)
    pad = make_rng(seed, 1).integers(0, alpha, size=N, dtype=np.int64)
    return PRCKey(kind, perm, pad, spec.q, spec.n, spec.k, spec.s)


def subst_keygen(spec: CodeSpec, rng=None, seed: int | None = None) -> PRCKey:
    return _keygen("subst", spec, seed, rng)


def edit_keygen(spec: CodeSpec, rng=None, seed: int | None = None) -> PRCKey:
    return _keygen("edit", spec, seed, rng)


def key_to_json(key: PRCKey, include_arrays: bool | None = None) -> str:
    """Canonical JSON.  Arrays are omitted when a seed regenerates them."""
    doc = {"version": 1, "kind": key.kind, "q": key.q, "n": key.n, "k": key.k, "s": key.s}
    if key.seed is not None:
        doc["seed"] = f"{key.seed:016x}"
    if include_arrays or (include_arrays is None and key.seed is None):
        doc["sigma"] = [int(v) for v in key.sigma]
        doc["pis"] = [[int(v) for v in row] for row in key.pis]
        doc["pad"] = [int(v) for v in key.pad]
    return json.dumps(doc, separators=(",", ":"), sort_keys=False) + "\n"


def key_from_json(text: str) -> PRCKey:
    doc = json.loads(text)
    if doc.get("version") != 1:
        raise ValueError(f"unsupported key version {doc.get('version')}")
    spec = make_spec(int(doc["q"]), int(doc["k"]), int(doc.get("s", 1)))
    if int(doc["n"]) != spec.n:
        raise ValueError("n must equal q - 1")
    if "sigma" in doc:
        seed = int(doc["seed"], 16) if "seed" in doc else None
        perm = PermKey(doc["sigma"], doc["pis"], seed)
        key = PRCKey(doc["kind"], perm, np.array(doc["pad"]), spec.q, spec.n, spec.k, spec.s)
        if seed is not None:
            regen = _keygen(doc["kind"], spec, seed)
            if not (np.array_equal(regen.sigma, key.sigma) and np.array_equal(regen.pis, key.pis)
                    and np.array_equal(regen.pad, key.pad)):
                raise ValueError("explicit key arrays disagree with the stored seed")
        return key
    if "seed" not in doc:
        raise ValueError("key file needs either a seed or explicit arrays")
    return _keygen(doc["kind"], spec, int(doc["seed"], 16))


# -- bit string I/O ------------------------------------------------------------

def bits_to_hex(bits: str) -> tuple[str, int]:
    """MSB-first packing, final byte zero-padded; returns (hex, bit length)."""
    nbits = len(bits)
    padded = bits + "0" * (-nbits % 8)
    data = bytes(int(padded[i:i + 8], 2) for i in range(0, len(padded), 8))
    return data.hex(), nbits


def hex_to_bits(hexstr: str, nbits: int) -> str:
    data = bytes.fromhex(hexstr.strip())
    bits = "".join(f"{b:08b}" for b in data)
    if nbits > len(bits):
        raise ValueError("bit length exceeds the encoded data")
    return bits[:nbits]


# -- substitution PRC ----------------------------------------------------------

def unique_radius(spec: CodeSpec) -> int:
    return (spec.n - spec.k) // 2


def default_delta(spec: CodeSpec) -> float:
    """Largest decodable error fraction under the unique decoder."""
    return unique_radius(spec) / spec.n


@dataclass(frozen=True)
class SubstConfig:
    delta: float
    eta_enc: float
    channel_budget: float

    @classmethod
    def default(cls, spec: CodeSpec, delta: float | None = None) -> "SubstConfig":
        d = default_delta(spec) if delta is None else delta
        return cls(d, d / 3, d / 3)

    def validate(self, spec: CodeSpec, slack_sigmas: float = 3.0) -> None:
        n, q = spec.n, spec.q
        if math.floor(self.delta * n + 1e-9) > unique_radius(spec):
            raise DeltaTooLarge(f"delta*n = {self.delta * n:.2f} exceeds radius {unique_radius(spec)}")
        rate = self.eta_enc * (1 - 1 / q)
        sd = math.sqrt(n * rate * (1 - rate))
        need = n * rate + slack_sigmas * sd + math.floor(self.channel_budget * n + 1e-9)
        if need > math.floor(self.delta * n + 1e-9):
            raise DeltaTooLarge(
                f"encoder noise {n * rate:.1f} (+{slack_sigmas} sd) plus channel "
                f"{self.channel_budget * n:.1f} exceeds delta*n = {self.delta * n:.1f}")


def subst_encode(spec: CodeSpec, key: PRCKey, delta: float | SubstConfig, rng) -> np.ndarray:
    cfg = delta if isinstance(delta, SubstConfig) else SubstConfig.default(spec, delta)
    if math.floor(cfg.delta * spec.n + 1e-9) > unique_radius(spec):
        raise DeltaTooLarge(f"delta={cfg.delta} beyond the unique decoding radius")
    c = sample_codeword(spec, rng)
    c_hat = key.perm.apply(c)
    c_noisy = subst_channel(c_hat, cfg.eta_enc, spec.q, rng)
    return (c_noisy + key.pad) % spec.q


def subst_unmask(key: PRCKey, y) -> np.ndarray:
    """Invert pad and permutations: y''[sigma[i]] = pi_i^{-1}(y[i] - o[i])."""
    y1 = (np.asarray(y, dtype=np.int64) - key.pad) % key.q
    return key.perm.invert(y1)


def subst_decode(spec: CodeSpec, key: PRCKey, y, delta: float | SubstConfig | None = None) -> bool:
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (spec.n,):
        return False
    d = default_delta(spec) if delta is None else (delta.delta if isinstance(delta, SubstConfig) else delta)
    budget = math.floor(d * spec.n + 1e-9)
    if budget > unique_radius(spec):
        raise DeltaTooLarge(f"delta={d} beyond the unique decoding radius")
    y2 = subst_unmask(key, y)
    msg = unique_decode(spec, y2, budget)
    if msg is None:
        return False
    return int(np.count_nonzero(rs_encode(spec, msg) != y2)) <= budget


def subst_worst_case_channel(spec: CodeSpec, key: PRCKey, y, budget: float, c_hat_clean=None) -> np.ndarray:
    """Key-aware adversary: corrupt the lowest-index positions that are still clean.

    Without the pre-noise word the adversary recovers it by decoding, which
    succeeds whenever the encoder noise is within the radius.
    """
    y = np.asarray(y, dtype=np.int64).copy()
    t = math.floor(budget * spec.n + 1e-9)
    if c_hat_clean is None:
        y2 = subst_unmask(key, y)
        msg = unique_decode(spec, y2, unique_radius(spec))
        if msg is None:
            clean = np.ones(spec.n, dtype=bool)
        else:
            clean = rs_encode(spec, msg) == y2
        # clean is indexed by codeword position; map back to transmitted order
        clean_tx = clean[key.sigma]
    else:
        clean_tx = np.asarray(c_hat_clean, dtype=bool)
    targets = np.nonzero(clean_tx)[0][:t]
    y[targets] = (y[targets] + 1) % spec.q
    return y


# -- edit PRC parameters ---------------------------------------------------------

@dataclass(frozen=True)
class EditParams:
    n: int
    q: int
    k: int
    m: int
    C_dec: float
    eta: float
    L_max: int
    eps_dec: float
    p_dec: float
    t_rec: int
    s: int = 1
    eps_edit: float = 0.0
    p_sub: float | None = None
    name: str = ""
    # desk-scale override of the formula-derived values
    desk: bool = False
    # attempts for randomised list recovery when below the algebraic radius
    recover_attempts: int = 40
    recover_pool: int | None = None

    @property
    def N(self) -> int:
        return self.n // self.s

    @property
    def index_bits(self) -> int:
        return max(1, math.ceil(math.log2(self.N)))

    @property
    def symbol_bits(self) -> int:
        return max(1, math.ceil(math.log2(self.q)))

    @property
    def chunk_bits(self) -> int:
        return self.index_bits + self.s * self.symbol_bits

    @property
    def word_bits(self) -> int:
        return self.m * self.chunk_bits

    @property
    def ham_budget(self) -> int:
        return math.floor((0.5 - self.p_dec) * self.chunk_bits + 1e-9)

    @property
    def edit_budget(self) -> int:
        return math.floor(self.eps_dec * self.chunk_bits + 1e-9)

    def spec(self) -> CodeSpec:
        return make_spec(self.q, self.k, self.s)

    def to_dict(self) -> dict:
        return asdict(self)


def edit_params(eps_edit: float, lam: int) -> EditParams:
    """Formula-driven edit preset; n = q - 1 with q the smallest prime >= lam."""
    from .gf import next_prime
    q = next_prime(lam)
    n = q - 1
    k = max(1, round(n ** 0.2))
    L_max = max(1, math.ceil(n ** 0.4))
    C_dec = 16.0
    return EditParams(
        n=n, q=q, k=k, m=math.ceil(4 * n ** 0.8), C_dec=C_dec, eta=1 / 32, L_max=L_max,
        eps_dec=2 * eps_edit * C_dec, p_dec=0.5, t_rec=math.ceil(math.sqrt(k * L_max * n)),
        eps_edit=eps_edit, name="edit-paper")


def hamming_edit_params(p_sub: float, lam: int, c0: float = 1.0) -> EditParams:
    """Formula-driven hamming-edit preset (folded code, s = 8/p_sub^2)."""
    from .gf import next_prime
    s = math.ceil(8 / p_sub ** 2)
    q = next_prime(lam)
    while (q - 1) % s:
        q = next_prime(q + 1)
    n = q - 1
    N = n // s
    k = max(1, round(n ** 0.2))
    L_max = math.ceil(n ** (s - 3))
    C_dec = 16 / p_sub
    eps_edit = c0 * p_sub ** 3 * math.log2(1 / p_sub) if p_sub < 1 else 0.0
    return EditParams(
        n=n, q=q, k=k, m=math.ceil(n ** (s / (s + 1))), C_dec=C_dec, eta=p_sub / 32, L_max=L_max,
        eps_dec=2 * eps_edit * C_dec, p_dec=p_sub / 2,
        t_rec=math.ceil(k * (N * L_max) ** (1 / (s + 1)) + 2), s=s, eps_edit=eps_edit,
        p_sub=p_sub, name="hamedit-paper")


PRESETS: dict[str, EditParams] = {}


def _register(p: EditParams) -> EditParams:
    PRESETS[p.name] = p
    return p


_register(replace(edit_params(0.02, 128), name="edit-paper"))
_register(EditParams(
    n=126, q=127, k=4, m=200, C_dec=16.0, eta=1 / 32, L_max=32, eps_dec=0.05, p_dec=0.5,
    t_rec=58, eps_edit=0.02, name="edit-desk", desk=True, recover_attempts=30, recover_pool=None))
_register(EditParams(
    n=16, q=17, k=2, m=24, C_dec=8.0, eta=1 / 64, L_max=16, eps_dec=0.0, p_dec=0.45, t_rec=6,
    s=2, eps_edit=0.01, p_sub=0.9, name="hamedit-desk", desk=True))


def get_preset(name: str) -> EditParams:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


# -- edit PRC --------------------------------------------------------------------

def _to_bin(v: int, width: int) -> str:
    return format(int(v), f"0{width}b")


def _symbol_to_bits(v: int, params: EditParams) -> str:
    """Folded symbols are s base-q digits, least significant first."""
    if params.s == 1:
        return _to_bin(v, params.symbol_bits)
    out = []
    for _ in range(params.s):
        out.append(_to_bin(v % params.q, params.symbol_bits))
        v //= params.q
    return "".join(out)


def _bits_to_symbol(bits: str, params: EditParams) -> int | None:
    w = params.symbol_bits
    v = 0
    for j in range(params.s - 1, -1, -1):
        d = int(bits[j * w:(j + 1) * w], 2)
        if d >= params.q:
            return None
        v = v * params.q + d
    return v


def _fold_symbols(spec: CodeSpec, c) -> np.ndarray:
    if spec.s == 1:
        return np.asarray(c, dtype=np.int64)
    folded = frs_fold(spec, c)
    return (folded * spec.q ** np.arange(spec.s, dtype=np.int64)).sum(axis=-1)


def edit_encode(spec: CodeSpec, params: EditParams, key: PRCKey, rng, return_trace: bool = False):
    """Binary codeword: m chunks bin(i_j) || bin(z'_j)."""
    N = params.N
    alpha = spec.q ** spec.s
    c = _fold_symbols(spec, sample_codeword(spec, rng))
    c_noisy = subst_channel(c, params.eta, alpha, rng)
    z = (c_noisy + key.pad) % alpha
    idx = rng.integers(0, N, size=params.m)
    seen: set[int] = set()
    zs = np.empty(params.m, dtype=np.int64)
    fresh = rng.integers(0, alpha, size=params.m)
    first = np.zeros(params.m, dtype=bool)
    for j, i in enumerate(idx):
        i = int(i)
        if i not in seen:
            seen.add(i)
            zs[j] = key.pis[i, z[key.sigma[i]]]
            first[j] = True
        else:
            zs[j] = fresh[j]
    bits = "".join(_to_bin(i, params.index_bits) + _symbol_to_bits(v, params) for i, v in zip(idx, zs))
    if return_trace:
        return bits, dict(indices=idx, symbols=zs, first=first, codeword=c, noisy=c_noisy)
    return bits


def parse_chunk(bits: str, params: EditParams) -> tuple[int, int] | None:
    """(i, z) for a chunk-length bit string, or None if either field is out of range."""
    i = int(bits[:params.index_bits], 2)
    if i >= params.N:
        return None
    z = _bits_to_symbol(bits[params.index_bits:], params)
    if z is None:
        return None
    return i, z


def _window_candidates(window: str, params: EditParams, cache: dict) -> list[tuple[int, int]]:
    hit = cache.get(window)
    if hit is not None:
        return hit
    ell = params.chunk_bits
    if params.ham_budget == 0:
        pool = edit_ball_same_length(window, params.edit_budget) if params.edit_budget >= 2 else {window}
        out = []
        for w in sorted(pool):
            pc = parse_chunk(w, params)
            if pc is not None:
                out.append(pc)
    else:
        out = _sed_candidates(window, params)
    cache[window] = out
    return out


def _sed_candidates(window: str, params: EditParams) -> list[tuple[int, int]]:
    """All (i, z) whose encoding lies within the substitution-then-edit ball of the window.

    The edit ball of the window (same length) is dilated by Hamming radius h
    over the full 2^l space.
    """
    ell = params.chunk_bits
    if ell > 22:
        raise ValueError(f"chunk of {ell} bits is too wide for the Hamming dilation")
    pool = edit_ball_same_length(window, params.edit_budget) if params.edit_budget >= 2 else {window}
    mark = np.zeros(1 << ell, dtype=bool)
    mark[[int(w, 2) for w in pool]] = True
    for _ in range(params.ham_budget):
        cur = mark.copy()
        ids = np.nonzero(cur)[0]
        for b in range(ell):
            mark[ids ^ (1 << b)] = True
    out = []
    for v in np.nonzero(mark)[0]:
        pc = parse_chunk(format(int(v), f"0{ell}b"), params)
        if pc is not None:
            out.append(pc)
    return out


def lists_from_candidates(params: EditParams, key: PRCKey, pairs) -> list[list[int]]:
    """Insert pi_i^{-1}(z) into ML[sigma(i)] in order, cap at L_max (earliest kept), remove pads."""
    N = params.N
    alpha = params.q ** params.s
    lists: list[list[int]] = [[] for _ in range(N)]
    members: list[set[int]] = [set() for _ in range(N)]
    for i, z in pairs:
        pos = int(key.sigma[i])
        val = int(key.pinv[i, z])
        if val not in members[pos]:
            members[pos].add(val)
            lists[pos].append(val)
    return [[(v - int(key.pad[p])) % alpha for v in L[:params.L_max]] for p, L in enumerate(lists)]


def window_pairs(params: EditParams, y: str):
    """(i, z) candidates from every length-l window of y, in window order."""
    ell = params.chunk_bits
    cache: dict = {}
    for j in range(0, len(y) - ell + 1):
        yield from _window_candidates(y[j:j + ell], params, cache)


def build_lists(params: EditParams, key: PRCKey, y: str, return_stats: bool = False):
    """Candidate lists ML (pad removed) indexed by codeword position."""
    pairs = list(window_pairs(params, y))
    lists = lists_from_candidates(params, key, pairs)
    if return_stats:
        return lists, dict(raw_total=len(pairs))
    return lists


def recover(spec: CodeSpec, params: EditParams, lists, rng=None) -> RecoveryResult:
    """List recovery at t_rec, choosing the algorithm by regime."""
    ell = max((len(L) for L in lists), default=0)
    if spec.s > 1:
        return list_recover_frs(spec, lists, params.t_rec, check_guarantee=False)
    if params.t_rec >= gs_guarantee(spec.k, ell, spec.N):
        return list_recover_rs(spec, lists, params.t_rec)
    if rng is None:
        rng = make_rng(0)
    return list_recover_sampled(spec, lists, params.t_rec, rng,
                                attempts=params.recover_attempts, pool=params.recover_pool)


def edit_decode(spec: CodeSpec, params: EditParams, key: PRCKey, y: str, rng=None) -> bool:
    lists = build_lists(params, key, y)
    return bool(recover(spec, params, lists, rng))


# -- channels --------------------------------------------------------------------

def _apply_ops(y: str, ops) -> str:
    """ops: list of (position, kind, bit) applied right-to-left on the original string."""
    s = list(y)
    for pos, kind, bit in sorted(ops, key=lambda o: -o[0]):
        if kind == "del":
            del s[pos]
        else:
            s.insert(pos, bit)
    return "".join(s)


def edit_channel_apply(y: str, eps_edit: float, strategy: str = "random", rng=None,
                       params: EditParams | None = None, key: PRCKey | None = None) -> str:
    """Apply at most floor(eps_edit * |y|) insertions/deletions.

    random: uniform mix of single-bit insertions and deletions at random spots.
    boundary-deletions: deletions inside chunk-header (index) fields only.
    burst: one contiguous run of deletions at a random offset.
    """
    if eps_edit < 0:
        raise ValueError("eps_edit must be non-negative")
    budget = math.floor(eps_edit * len(y) + 1e-9)
    if budget == 0 or not y:
        return y
    if rng is None:
        rng = make_rng(0)
    if strategy == "random":
        pos = rng.choice(len(y), size=min(budget, len(y)), replace=False)
        ops = []
        for p in pos:
            if rng.random() < 0.5:
                ops.append((int(p), "del", ""))
            else:
                ops.append((int(p), "ins", "01"[int(rng.integers(0, 2))]))
        return _apply_ops(y, ops)
    if strategy == "boundary-deletions":
        if params is None:
            raise ValueError("boundary-deletions needs the chunk layout (params)")
        cb, ib = params.chunk_bits, params.index_bits
        # spread deletions over distinct chunks, each removing a header bit
        nchunks = len(y) // cb
        chosen = rng.choice(nchunks, size=min(budget, nchunks), replace=False)
        ops = [(int(c) * cb + int(rng.integers(0, ib)), "del", "") for c in chosen]
        return _apply_ops(y, ops)
    if strategy == "burst":
        start = int(rng.integers(0, max(1, len(y) - budget + 1)))
        return y[:start] + y[start + budget:]
    raise ValueError(f"unknown strategy {strategy!r}")
