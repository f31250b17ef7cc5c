"""Edit PRC decode rate vs edit fraction for a preset; writes CSV to stdout."""
from __future__ import annotations

import argparse
import sys

from prclab.cli import bench_trial


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="edit-desk")
    ap.add_argument("--eps", type=float, nargs="+", default=[0.0, 0.01, 0.02, 0.03, 0.05])
    ap.add_argument("--strategy", choices=("edit-random", "edit-boundary"), default="edit-random")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    print("preset,strategy,eps,trials,decoded")
    for eps in args.eps:
        ok = sum(bench_trial(args.strategy, args.preset, eps, args.seed, t) for t in range(args.trials))
        print(f"{args.preset},{args.strategy},{eps},{args.trials},{ok}")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
