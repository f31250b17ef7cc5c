"""Compare the drift-tracking and aligned watermark detectors under random edits."""
from __future__ import annotations

import argparse
import time

from prclab import prc, watermark
from prclab.rng import make_rng


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="edit-desk")
    ap.add_argument("--blocks", type=int, default=4)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.0, 0.01])
    ap.add_argument("--modes", nargs="+", default=["drift", "aligned"])
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    params = prc.get_preset(args.preset)
    model = watermark.ToyModel()
    print("mode,eps,trials,detected,seconds_per_call")
    for eps in args.eps:
        texts = []
        for t in range(args.trials):
            key = watermark.wat_setup(params.spec(), params, args.blocks, seed=args.seed + t)
            rng = make_rng(args.seed, 1, t)
            tok = watermark.wat_generate(key, model, args.blocks * params.word_bits, rng)
            texts.append((key, prc.edit_channel_apply(tok.bits, eps, "random", rng) if eps else tok.bits))
        for mode in args.modes:
            t0 = time.perf_counter()
            hits = sum(watermark.wat_detect(key, bits, mode=mode) for key, bits in texts)
            dt = (time.perf_counter() - t0) / len(texts)
            print(f"{mode},{eps},{len(texts)},{hits},{dt:.2f}")


if __name__ == "__main__":
    main()
