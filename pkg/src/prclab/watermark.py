"""Watermarking from the edit-robust PRC over a binary toy language model."""
from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .prc import (EditParams, PRCKey, edit_encode, edit_keygen, get_preset, key_from_json, key_to_json,
                  lists_from_candidates, parse_chunk, recover, window_pairs)
from .rng import make_rng


class LengthExceedsImax(ValueError):
    pass


class MissingTrace(ValueError):
    pass


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def entropy_floor_prob(alpha: float) -> float:
    """The p in (0, 1/2] with binary entropy alpha."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1] bits for a binary alphabet")
    if alpha == 0.0:
        return 0.0
    if alpha == 1.0:
        return 0.5
    return brentq(lambda p: binary_entropy(p) - alpha, 1e-300, 0.5, xtol=1e-15)


# -- toy model -------------------------------------------------------------------

CONTEXT_LEN = 8


@dataclass(frozen=True)
class ToyModel:
    """Binary autoregressive model; p_i is the probability that token i is 1.

    fixed-entropy: p_i = p_floor for every i (p_floor = 1/2 when alpha = 1).
    seeded-context-hash: p_i = clamp(crc32(seed, last 8 tokens) / 2^32, p_floor, 1 - p_floor).
    """
    mode: str = "fixed-entropy"
    alpha: float = 1.0
    seed: int = 0
    p_fixed: float | None = None

    def __post_init__(self):
        if self.mode not in ("fixed-entropy", "seeded-context-hash"):
            raise ValueError(f"unknown model mode {self.mode!r}")
        if self.p_fixed is not None and not 0.0 <= self.p_fixed <= 1.0:
            raise ValueError("p_fixed must be a probability")

    @property
    def p_floor(self) -> float:
        return entropy_floor_prob(self.alpha)

    def prob(self, context: str) -> float:
        if self.mode == "fixed-entropy":
            return self.p_floor if self.p_fixed is None else self.p_fixed
        tail = context[-CONTEXT_LEN:]
        h = zlib.crc32(f"{self.seed}:{tail}".encode())
        lo = self.p_floor
        return min(max(h / 2 ** 32, lo), 1.0 - lo)

    def sample(self, length: int, rng) -> "TokenSeq":
        bits = []
        trace = np.empty(length)
        for i in range(length):
            p = self.prob("".join(bits[-CONTEXT_LEN:]))
            trace[i] = p
            bits.append("1" if rng.random() < p else "0")
        return TokenSeq("".join(bits), trace)


@dataclass
class TokenSeq:
    bits: str
    trace: np.ndarray | None = None

    def __post_init__(self):
        if self.trace is not None:
            self.trace = np.asarray(self.trace, dtype=float)
            if self.trace.shape != (len(self.bits),):
                raise ValueError("trace length must equal sequence length")

    def __len__(self) -> int:
        return len(self.bits)


def embed_prob(p: float, x: int) -> float:
    """P(tok = 1) given model probability p and embedded bit x."""
    return p - (-1) ** x * min(p, 1.0 - p)


# -- key -------------------------------------------------------------------------

@dataclass
class WatermarkKey:
    prc_key: PRCKey
    params: EditParams
    pads: np.ndarray  # Imax x word_bits, uint8
    pad_seed: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.pads = np.asarray(self.pads, dtype=np.uint8)
        if self.pads.ndim != 2 or self.pads.shape[1] != self.params.word_bits:
            raise ValueError("pads must be Imax x word_bits")

    @property
    def imax(self) -> int:
        return self.pads.shape[0]

    @property
    def block_bits(self) -> int:
        return self.params.word_bits


def _pads(imax: int, nbits: int, rng) -> np.ndarray:
    return rng.integers(0, 2, size=(imax, nbits), dtype=np.uint8)


def wat_setup(spec, params: EditParams, imax: int, rng=None, seed: int | None = None) -> WatermarkKey:
    if imax < 1:
        raise ValueError("Imax must be at least 1")
    if seed is not None:
        prc_key = edit_keygen(spec, seed=seed)
        pads = _pads(imax, params.word_bits, make_rng(seed, 2))
    else:
        prc_key = edit_keygen(spec, rng=rng)
        pads = _pads(imax, params.word_bits, rng)
    return WatermarkKey(prc_key, params, pads, pad_seed=seed)


def wat_key_to_json(key: WatermarkKey) -> str:
    doc = dict(version=1, kind="watermark", params=key.params.to_dict(), imax=key.imax,
               prc=json.loads(key_to_json(key.prc_key)))
    if key.pad_seed is not None:
        doc["seed"] = key.pad_seed
    else:
        doc["pads"] = ["".join(map(str, row)) for row in key.pads]
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def wat_key_from_json(text: str) -> WatermarkKey:
    doc = json.loads(text)
    if doc.get("kind") != "watermark" or doc.get("version") != 1:
        raise ValueError("not a version-1 watermark key")
    params = EditParams(**doc["params"])
    prc_key = key_from_json(json.dumps(doc["prc"]))
    if "seed" in doc:
        pads = _pads(doc["imax"], params.word_bits, make_rng(doc["seed"], 2))
        return WatermarkKey(prc_key, params, pads, pad_seed=doc["seed"])
    pads = np.array([[int(c) for c in row] for row in doc["pads"]], dtype=np.uint8)
    return WatermarkKey(prc_key, params, pads)


# -- generation ------------------------------------------------------------------

def wat_generate(key: WatermarkKey, model: ToyModel, length: int, rng, return_words: bool = False):
    """Sample `length` tokens; block b embeds pads[b] xor a fresh PRC word."""
    n = key.block_bits
    if length > key.imax * n:
        raise LengthExceedsImax(f"length {length} exceeds Imax * block = {key.imax * n}")
    spec = key.params.spec()
    bits: list[str] = []
    trace = np.empty(length)
    words = []
    x = None
    for i in range(length):
        if i % n == 0:
            word = edit_encode(spec, key.params, key.prc_key, rng)
            words.append(word)
            x = np.frombuffer(word.encode(), dtype=np.uint8) - 48
            x = x ^ key.pads[i // n]
        p = model.prob("".join(bits[-CONTEXT_LEN:]))
        trace[i] = p
        bits.append("1" if rng.random() < embed_prob(p, int(x[i % n])) else "0")
    tok = TokenSeq("".join(bits), trace)
    return (tok, words) if return_words else tok


# -- detection -------------------------------------------------------------------

def _as_array(bits: str) -> np.ndarray:
    return np.frombuffer(bits.encode(), dtype=np.uint8) - 48


def _to_str(arr: np.ndarray) -> str:
    return (arr.astype(np.uint8) + 48).tobytes().decode()


def _unpad_positional(key: WatermarkKey, bits: str) -> str:
    """XOR each position p with pads[p // n][p % n] (positions past Imax blocks left as is)."""
    arr = _as_array(bits).copy()
    n = key.block_bits
    flat = key.pads.reshape(-1)
    upto = min(arr.size, flat.size)
    arr[:upto] ^= flat[:upto]
    return _to_str(arr)


def _decodes(key: WatermarkKey, lists, rng) -> bool:
    return bool(recover(key.params.spec(), key.params, lists, rng))


def detect_aligned(key: WatermarkKey, tok, stride: int | None = None, rng=None) -> bool:
    """Window scan: unpad by absolute position, then run the PRC decoder per window."""
    bits = tok.bits if isinstance(tok, TokenSeq) else tok
    n = key.block_bits
    if stride is None:
        stride = math.ceil(n / 8)
    if stride < 1:
        raise ValueError("stride must be positive")
    plain = _unpad_positional(key, bits)
    last = max(len(plain) - n, 0)
    starts = list(range(0, last + 1, stride))
    if starts[-1] != last:
        starts.append(last)
    rng = make_rng(0) if rng is None else rng
    for s in starts:
        lists = lists_from_candidates(key.params, key.prc_key, window_pairs(key.params, plain[s:s + n]))
        if _decodes(key, lists, rng):
            return True
    return False


def drift_pairs(key: WatermarkKey, bits: str, block: int, drift: int, slope: float = 0.0):
    """(i, z) candidates for one block under bounded drift.

    Chunk t of block b starts at b*n + l*t in the clean stream and at that
    position plus delta after edits.  For each delta within `drift` of the
    linear estimate slope * position, the observed chunk is unpadded with the
    pad bits of its clean offset.  Candidates come out chunk by chunk, nearest
    drift first.
    """
    params = key.params
    n, cb, m = key.block_bits, params.chunk_bits, params.m
    arr = _as_array(bits)
    pad = key.pads[block]
    weights = 1 << np.arange(cb - 1, -1, -1, dtype=np.int64)
    out = []
    for t in range(m):
        orig = block * n + cb * t
        est = int(round(orig * slope))
        deltas = sorted(range(est - drift, est + drift + 1), key=lambda d: (abs(d - est), d))
        for d in deltas:
            p = orig + d
            if p < 0 or p + cb > arr.size:
                continue
            w = arr[p:p + cb] ^ pad[cb * t:cb * (t + 1)]
            if params.s == 1:
                v = int(w @ weights)
                i, z = v >> params.symbol_bits, v & ((1 << params.symbol_bits) - 1)
                if i < params.N and z < params.q:
                    out.append((i, z))
            else:
                pc = parse_chunk(_to_str(w), params)
                if pc is not None:
                    out.append(pc)
    return out


def default_drift(params: EditParams) -> int:
    return 6


def detect_drift(key: WatermarkKey, tok, drift: int | None = None, rng=None) -> bool:
    """Drift-tracking detector: per block, per chunk slot, try a window of alignments."""
    bits = tok.bits if isinstance(tok, TokenSeq) else tok
    n = key.block_bits
    if drift is None:
        drift = default_drift(key.params)
    nblocks = max(1, round(len(bits) / n))
    slope = (len(bits) - nblocks * n) / (nblocks * n)
    # slope 0 covers text with an unwatermarked suffix or prefix of odd length
    slopes = [slope] if abs(slope) * n <= drift else [0.0, slope]
    rng = make_rng(0) if rng is None else rng
    for b in range(min(key.imax, nblocks)):
        for sl in slopes:
            pairs = drift_pairs(key, bits, b, drift, sl)
            lists = lists_from_candidates(key.params, key.prc_key, pairs)
            if _decodes(key, lists, rng):
                return True
    return False


def wat_detect(key: WatermarkKey, tok, mode: str = "drift", stride: int | None = None,
               drift: int | None = None, rng=None) -> bool:
    if mode == "aligned":
        return detect_aligned(key, tok, stride=stride, rng=rng)
    if mode == "drift":
        return detect_drift(key, tok, drift=drift, rng=rng)
    if mode == "both":
        return detect_aligned(key, tok, stride=stride, rng=rng) or detect_drift(key, tok, drift=drift, rng=rng)
    raise ValueError(f"unknown detect mode {mode!r}")


# -- entropy accounting ----------------------------------------------------------

def empirical_entropy(tok: TokenSeq, i: int, j: int) -> float:
    """Sum of -log2 P(observed token a) over 1-indexed a in [i, j]."""
    if tok.trace is None:
        raise MissingTrace("token sequence has no model trace")
    if not 1 <= i <= j <= len(tok):
        raise ValueError("need 1 <= i <= j <= len(tok)")
    obs = _as_array(tok.bits[i - 1:j])
    p = tok.trace[i - 1:j]
    probs = np.where(obs == 1, p, 1.0 - p)
    with np.errstate(divide="ignore"):
        return float(-np.log2(probs).sum()) + 0.0


def beta_threshold(alpha: float, lambda_: float, ell: float) -> float:
    return 8 * alpha * ell + 2 * math.sqrt(2) * lambda_


def load_tokens(path: str, trace_path: str | None = None) -> TokenSeq:
    with open(path) as fh:
        bits = "".join(fh.read().split())
    if set(bits) - {"0", "1"}:
        raise ValueError("token file must contain only 0/1 characters")
    trace = None
    if trace_path is not None:
        trace = np.loadtxt(trace_path, ndmin=1) if bits else np.zeros(0)
    return TokenSeq(bits, trace)


def save_tokens(tok: TokenSeq, path: str, trace_path: str | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(tok.bits + "\n")
    if trace_path is not None and tok.trace is not None:
        with open(trace_path, "w") as fh:
            fh.writelines(f"{p!r}\n" for p in tok.trace.tolist())


def preset_key(preset: str, imax: int, seed: int) -> WatermarkKey:
    params = get_preset(preset)
    return wat_setup(params.spec(), params, imax, seed=seed)
