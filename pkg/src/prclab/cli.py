"""Command-line interface.

Exit codes: 0 success, 1 negative decode/detect, 2 usage or input error,
3 internal error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from . import attacks, permdist, prc, watermark
from .codes import LinearCode, make_spec
from .rng import PRG_NAME, SEED_ENV, child_seed, default_seed, make_rng

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
CODEWORD_HEADER = "# prclab codeword"


class UsageError(Exception):
    pass


# -- file helpers ----------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w") as fh:
        fh.write(text)


def _config_line(cfg: dict) -> str:
    return "# " + json.dumps(cfg, sort_keys=True, separators=(",", ":")) + "\n"


def load_key(path: str):
    """(PRCKey, EditParams or None) from a key file."""
    text = _read(path)
    doc = json.loads(text)
    key = prc.key_from_json(text)
    params = prc.get_preset(doc["preset"]) if key.kind == "edit" else None
    return key, params


def write_codeword(bits: str, kind: str) -> str:
    hexstr, nbits = prc.bits_to_hex(bits)
    return f"{CODEWORD_HEADER} kind={kind} bits={nbits}\n{hexstr}\n"


def read_codeword(text: str) -> str:
    """Bits from a codeword file, a raw 0/1 string or bare hex."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if lines and lines[0].startswith(CODEWORD_HEADER):
        fields = dict(tok.split("=", 1) for tok in lines[0][len(CODEWORD_HEADER):].split() if "=" in tok)
        return prc.hex_to_bits("".join(lines[1:]), int(fields["bits"]))
    body = "".join(lines)
    if set(body) <= {"0", "1"}:
        return body
    try:
        return prc.hex_to_bits(body, 4 * len(body))
    except ValueError as exc:
        raise UsageError(f"cannot parse codeword input: {exc}") from None


def symbols_to_bits(y, q: int) -> str:
    w = max(1, math.ceil(math.log2(q)))
    return "".join(format(int(v), f"0{w}b") for v in y)


def bits_to_symbols(bits: str, q: int) -> np.ndarray | None:
    w = max(1, math.ceil(math.log2(q)))
    if len(bits) % w:
        return None
    return np.array([int(bits[i:i + w], 2) for i in range(0, len(bits), w)], dtype=np.int64)


def _seed(args) -> int:
    return args.seed if args.seed is not None else default_seed()


# -- prc commands ----------------------------------------------------------------

def cmd_keygen(args) -> int:
    seed = _seed(args)
    if args.kind == "edit":
        params = prc.get_preset(args.preset)
        key = prc.edit_keygen(params.spec(), seed=seed)
        doc = json.loads(prc.key_to_json(key, include_arrays=args.include_arrays or None))
        doc["preset"] = params.name
    else:
        key = prc.subst_keygen(make_spec(args.q, args.k), seed=seed)
        doc = json.loads(prc.key_to_json(key, include_arrays=args.include_arrays or None))
    _write(args.output, json.dumps(doc, separators=(",", ":")) + "\n")
    return EXIT_OK


def cmd_encode(args) -> int:
    key, params = load_key(args.key)
    rng = make_rng(_seed(args), 1)
    spec = key.spec()
    if key.kind == "edit":
        bits = prc.edit_encode(spec, params, key, rng)
    else:
        y = prc.subst_encode(spec, key, prc.SubstConfig.default(spec, args.delta), rng)
        bits = symbols_to_bits(y, spec.q)
    _write(args.output, write_codeword(bits, key.kind))
    return EXIT_OK


def cmd_decode(args) -> int:
    key, params = load_key(args.key)
    bits = read_codeword(_read(args.input))
    spec = key.spec()
    if key.kind == "edit":
        ok = prc.edit_decode(spec, params, key, bits)
    else:
        y = bits_to_symbols(bits, spec.q)
        ok = y is not None and y.size == spec.n and bool(np.all(y < spec.q)) and \
            prc.subst_decode(spec, key, y, args.delta)
    print("True" if ok else "False")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_channel(args) -> int:
    bits = read_codeword(_read(args.input))
    rng = make_rng(_seed(args), 2)
    key = params = None
    if args.key:
        key, params = load_key(args.key)
    if args.kind == "edit":
        if args.strategy == "boundary-deletions" and params is None:
            raise UsageError("--strategy boundary-deletions needs --key of an edit key")
        out = prc.edit_channel_apply(bits, args.eps, args.strategy, rng, params=params, key=key)
        kind = "edit"
    else:
        if key is None or key.kind != "subst":
            raise UsageError("--kind subst needs --key of a substitution key")
        spec = key.spec()
        y = bits_to_symbols(bits, spec.q)
        if y is None or y.size != spec.n:
            raise UsageError("input is not a substitution codeword for this key")
        if args.strategy == "worst-case":
            z = prc.subst_worst_case_channel(spec, key, y, args.eps)
        else:
            z = prc.subst_channel(y, args.eps, spec.q, rng)
        out = symbols_to_bits(z, spec.q)
        kind = "subst"
    _write(args.output, write_codeword(out, kind))
    return EXIT_OK


# -- dist commands ---------------------------------------------------------------

def _code(args) -> LinearCode:
    if args.code == "rs":
        return LinearCode.from_spec(make_spec(args.q, args.k))
    if args.code == "even-weight":
        return LinearCode.even_weight(args.n)
    if args.code == "trivial":
        return LinearCode.trivial(args.n, args.q)
    if args.code == "random":
        return LinearCode.random_mds_dual(args.n, args.k, args.q, args.min_dual, make_rng(args.code_seed))
    raise UsageError(f"unknown code {args.code!r}")


def cmd_dist_sample(args) -> int:
    seed = _seed(args)
    rng = make_rng(seed, 3)
    code = _code(args)
    n, q = code.n, code.q
    if args.mode == "permuted":
        key = permdist.PermKey.generate(n, q, child_seed(seed, 4))
        X = permdist.sample_permuted_codes(code, key, args.eta, args.T, rng)
    elif args.mode == "nap":
        sigma = make_rng(seed, 4).permutation(n)
        X = permdist.sample_no_alphabet_perm(code, sigma, args.eta, args.T, rng)
    elif args.mode == "uniform":
        X = permdist.sample_uniform(n, q, args.T, rng)
    else:
        pi = permdist.random_global_perm(n, q, make_rng(seed, 4))
        X = permdist.sample_permuted_puzzles(code, pi, args.T, args.m, rng)
    _write(args.output, permdist.dump_samples(X, n, q, args.eta))
    return EXIT_OK


def cmd_dist_tv(args) -> int:
    code = _code(args)
    tv = permdist.exact_tv_tiny(code, args.eta, args.T)
    d = code.dual_distance()
    bound = permdist.tv_bound(code.n, code.q, args.T, args.eta, d)
    out = dict(n=code.n, q=code.q, T=args.T, eta=args.eta, dual_distance=d, tv=tv, bound=bound)
    _write(args.output, json.dumps(out, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_dist_convert(args) -> int:
    header, X = permdist.load_samples(_read(args.input))
    n, q = header["n"], header["q"]
    eta = args.eta if args.eta is not None else header.get("eta", 0.0)
    rng = make_rng(_seed(args), 5)
    conv, fails = permdist.puzzles_to_codes_convert(X, n, q, eta, rng)
    good = np.array([c for c in conv if c is not None], dtype=np.int64).reshape(-1, n)
    _write(args.output, permdist.dump_samples(good, n, q, eta))
    print(f"converted {len(good)} fails {fails}", file=sys.stderr)
    return EXIT_OK


# -- watermark commands ----------------------------------------------------------

def _model(args) -> watermark.ToyModel:
    return watermark.ToyModel(args.model, args.alpha, args.model_seed)


def cmd_wat_setup(args) -> int:
    key = watermark.preset_key(args.preset, args.imax, _seed(args))
    _write(args.output, watermark.wat_key_to_json(key) + "\n")
    return EXIT_OK


def cmd_wat_embed(args) -> int:
    key = watermark.wat_key_from_json(_read(args.key))
    length = args.length if args.length is not None else args.blocks * key.block_bits
    rng = make_rng(_seed(args), 6)
    tok = watermark.wat_generate(key, _model(args), length, rng)
    watermark.save_tokens(tok, args.output, args.trace)
    return EXIT_OK


def cmd_wat_plain(args) -> int:
    tok = _model(args).sample(args.length, make_rng(_seed(args), 7))
    watermark.save_tokens(tok, args.output, args.trace)
    return EXIT_OK


def cmd_wat_detect(args) -> int:
    key = watermark.wat_key_from_json(_read(args.key))
    tok = watermark.load_tokens(args.input)
    ok = watermark.wat_detect(key, tok, mode=args.mode, stride=args.stride, drift=args.drift)
    print("True" if ok else "False")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_wat_entropy(args) -> int:
    tok = watermark.load_tokens(args.input, args.trace)
    j = args.end if args.end is not None else len(tok)
    h = watermark.empirical_entropy(tok, args.start, j)
    print(repr(h))
    return EXIT_OK


# -- attacks ---------------------------------------------------------------------

def _emit_report(rep: attacks.DistinguisherReport, args) -> None:
    _write(args.output, rep.to_csv())
    if args.summary:
        _write(args.summary, rep.summary_json() + "\n")
    print(f"advantage {rep.advantage:.4f}", file=sys.stderr)


def cmd_attack_rank(args) -> int:
    cfg = attacks.RankAttackConfig(q=args.q, k=args.k, eta=args.eta, T=args.T, r=args.r,
                                   threshold=args.threshold, trials=args.trials,
                                   negative_control=args.negative_control)
    _emit_report(attacks.rank_attack(cfg, _seed(args), jobs=args.jobs), args)
    return EXIT_OK


def cmd_attack_fourier(args) -> int:
    cfg = attacks.FourierAttackConfig(n=args.n, ell=args.ell, f=args.predicate,
                                      support=tuple(args.support), rho=args.rho, count=args.count,
                                      t=args.t, trials=args.trials, threshold=args.threshold)
    _emit_report(attacks.fourier_attack(cfg, _seed(args), jobs=args.jobs), args)
    return EXIT_OK


# -- bench -----------------------------------------------------------------------

BENCH_TASKS = ("subst", "edit-random", "edit-boundary", "edit-sound", "watermark", "watermark-sound")


def bench_trial(task: str, preset: str, eps: float, seed: int, trial: int) -> bool:
    """One trial of a named task, fully determined by (seed, trial)."""
    s = child_seed(seed, trial)
    rng = make_rng(s, 1)
    if task == "subst":
        spec = make_spec(257, 16)
        key = prc.subst_keygen(spec, seed=s)
        cfg = prc.SubstConfig.default(spec)
        y = prc.subst_encode(spec, key, cfg, rng)
        return prc.subst_decode(spec, key, prc.subst_worst_case_channel(spec, key, y, cfg.channel_budget), cfg)
    params = prc.get_preset(preset)
    spec = params.spec()
    if task.startswith("edit"):
        key = prc.edit_keygen(spec, seed=s)
        if task == "edit-sound":
            y = "".join(rng.choice(["0", "1"], size=params.word_bits))
        else:
            strategy = "random" if task == "edit-random" else "boundary-deletions"
            y = prc.edit_channel_apply(prc.edit_encode(spec, params, key, rng), eps, strategy, rng,
                                       params=params, key=key)
        return prc.edit_decode(spec, params, key, y)
    wkey = watermark.wat_setup(spec, params, 4, seed=s)
    model = watermark.ToyModel()
    if task == "watermark":
        tok = watermark.wat_generate(wkey, model, 4 * params.word_bits, rng)
        return watermark.wat_detect(wkey, prc.edit_channel_apply(tok.bits, eps, "random", rng))
    return watermark.wat_detect(wkey, model.sample(4 * params.word_bits, rng))


def _bench_worker(a):
    return bench_trial(*a)


def cmd_bench(args) -> int:
    seed = _seed(args)
    eps = args.eps if args.eps is not None else (0.01 if args.task.startswith("watermark") else
                                                 prc.get_preset(args.preset).eps_edit)
    items = [(args.task, args.preset, eps, seed, t) for t in range(args.trials)]
    results = attacks._map(args.jobs, _bench_worker, items)
    cfg = dict(command="bench", task=args.task, preset=args.preset, eps=eps, seed=seed,
               trials=args.trials, prg=PRG_NAME)
    lines = [_config_line(cfg), "trial,outcome\n"]
    lines += [f"{t},{int(r)}\n" for t, r in enumerate(results)]
    _write(args.output, "".join(lines))
    print(f"{sum(results)}/{len(results)} True", file=sys.stderr)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        kw.setdefault("allow_abbrev", False)
        super().__init__(*a, **kw)


def _common(p, output=True):
    p.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                   help=f"integer seed (falls back to ${SEED_ENV}, then OS entropy)")
    if output:
        p.add_argument("--output", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="prclab", description="Pseudorandom codes laboratory")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("keygen", help="generate a PRC key")
    p.add_argument("--kind", choices=("edit", "subst"), required=True)
    p.add_argument("--preset", default="edit-desk", choices=sorted(prc.PRESETS))
    p.add_argument("--q", type=int, default=257)
    p.add_argument("--k", type=int, default=16)
    p.add_argument("--include-arrays", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encode", help="sample a PRC codeword")
    p.add_argument("--key", required=True)
    p.add_argument("--delta", type=float, default=None)
    _common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode; exit 1 when not a codeword")
    p.add_argument("--key", required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("input")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("channel", help="corrupt a codeword")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", choices=("edit", "subst"), default="edit")
    p.add_argument("--eps", type=float, required=True, help="edit fraction or substitution budget")
    p.add_argument("--strategy", default="random",
                   choices=("random", "boundary-deletions", "burst", "worst-case"))
    p.add_argument("--key", default=None)
    _common(p)
    p.set_defaults(func=cmd_channel)

    d = sub.add_parser("dist", help="permuted-codes distributions")
    dsub = d.add_subparsers(dest="dist_command", required=True, parser_class=_Parser)

    def code_flags(p):
        p.add_argument("--code", choices=("rs", "even-weight", "trivial", "random"), default="rs")
        p.add_argument("--q", type=int, default=5)
        p.add_argument("--k", type=int, default=2)
        p.add_argument("--n", type=int, default=4)
        p.add_argument("--min-dual", type=int, default=3)
        p.add_argument("--code-seed", type=int, default=0)
        p.add_argument("--eta", type=float, default=0.0)
        p.add_argument("--T", type=int, default=1)

    p = dsub.add_parser("sample")
    code_flags(p)
    p.add_argument("--mode", choices=("permuted", "nap", "uniform", "puzzles"), default="permuted")
    p.add_argument("--m", type=int, default=1, help="coordinates per puzzle sample")
    _common(p)
    p.set_defaults(func=cmd_dist_sample)

    p = dsub.add_parser("tv")
    code_flags(p)
    _common(p)
    p.set_defaults(func=cmd_dist_tv)

    p = dsub.add_parser("convert")
    p.add_argument("--input", required=True)
    p.add_argument("--eta", type=float, default=None)
    _common(p)
    p.set_defaults(func=cmd_dist_convert)

    w = sub.add_parser("watermark", help="watermark setup, embedding and detection")
    wsub = w.add_subparsers(dest="wat_command", required=True, parser_class=_Parser)

    def model_flags(p):
        p.add_argument("--model", choices=("fixed-entropy", "seeded-context-hash"), default="fixed-entropy")
        p.add_argument("--alpha", type=float, default=1.0)
        p.add_argument("--model-seed", type=int, default=0)

    p = wsub.add_parser("setup")
    p.add_argument("--preset", default="edit-desk", choices=sorted(prc.PRESETS))
    p.add_argument("--imax", type=int, default=4)
    _common(p)
    p.set_defaults(func=cmd_wat_setup)

    p = wsub.add_parser("embed")
    p.add_argument("--key", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--length", type=int)
    g.add_argument("--blocks", type=int)
    p.add_argument("--trace", default=None)
    model_flags(p)
    _common(p)
    p.set_defaults(func=cmd_wat_embed)

    p = wsub.add_parser("plain", help="unwatermarked model text")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--trace", default=None)
    model_flags(p)
    _common(p)
    p.set_defaults(func=cmd_wat_plain)

    p = wsub.add_parser("detect")
    p.add_argument("--key", required=True)
    p.add_argument("--mode", choices=("drift", "aligned", "both"), default="drift")
    p.add_argument("--stride", type=int, default=None)
    p.add_argument("--drift", type=int, default=None)
    p.add_argument("input")
    p.set_defaults(func=cmd_wat_detect)

    p = wsub.add_parser("entropy")
    p.add_argument("--input", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--start", type=int, default=1)
    p.add_argument("--end", type=int, default=None)
    p.set_defaults(func=cmd_wat_entropy)

    a = sub.add_parser("attack", help="distinguishers")
    asub = a.add_subparsers(dest="attack_command", required=True, parser_class=_Parser)

    def report_flags(p):
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--summary", default=None, help="summary JSON path")
        _common(p)

    p = asub.add_parser("rank")
    p.add_argument("--q", type=int, default=101)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--T", type=int, default=4)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--threshold", type=float, default=60.0)
    p.add_argument("--negative-control", action="store_true")
    report_flags(p)
    p.set_defaults(func=cmd_attack_rank)

    p = asub.add_parser("fourier")
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--ell", type=int, default=16)
    p.add_argument("--predicate", choices=attacks.PREDICATES, default="parity")
    p.add_argument("--support", type=int, nargs="+", default=[0, 1])
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--count", type=int, default=10_000)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--threshold", type=float, default=None)
    report_flags(p)
    p.set_defaults(func=cmd_attack_fourier, trials=20)

    p = sub.add_parser("bench", help="seeded Monte-Carlo trials to CSV")
    p.add_argument("--task", choices=BENCH_TASKS, required=True)
    p.add_argument("--preset", default="edit-desk", choices=sorted(prc.PRESETS))
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("presets", help="print the parameter presets")
    p.set_defaults(func=cmd_presets)
    return ap


def preset_table() -> str:
    cols = ("name", "n", "q", "k", "s", "m", "L_max", "eps_dec", "p_dec", "t_rec", "eps_edit", "desk")
    rows = [cols] + [tuple(str(asdict(p)[c]) for c in cols) for p in prc.PRESETS.values()]
    widths = [max(len(r[i]) for r in rows) for i in range(len(cols))]
    return "\n".join("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows) + "\n"


def cmd_presets(args) -> int:
    sys.stdout.write(preset_table())
    return EXIT_OK


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, FileNotFoundError, KeyError, json.JSONDecodeError, ValueError) as exc:
        print(f"prclab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"prclab: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
