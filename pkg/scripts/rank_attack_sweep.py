"""Rank attack advantage over (T, r); shows where C(r+T, r) exceeds n."""
from __future__ import annotations

import argparse
import math

from prclab.attacks import RankAttackConfig, rank_attack, uniform_bound_precondition


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=101)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--eta", type=float, default=0.1)
    ap.add_argument("--T", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--r", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)
    n = args.q - 1
    print("T,r,rows,precondition,threshold,mean_uniform,mean_structured,advantage")
    for T in args.T:
        for r in args.r:
            rows = math.comb(r + T, r)
            # threshold halfway between the structured bound and the row cap
            thr = (min(rows, n) + min(rows, args.k * r + 1 + n * (1 - (1 - args.eta) ** T))) / 2
            cfg = RankAttackConfig(args.q, args.k, args.eta, T, r, thr, args.trials)
            rep = rank_attack(cfg, seed=args.seed, jobs=args.jobs)
            mu = sum(rep.stats0) / len(rep.stats0)
            ms = sum(rep.stats1) / len(rep.stats1)
            print(f"{T},{r},{rows},{uniform_bound_precondition(n, args.q, T, r)},{thr:.1f},"
                  f"{mu:.1f},{ms:.1f},{rep.advantage:.2f}")


if __name__ == "__main__":
    main()
