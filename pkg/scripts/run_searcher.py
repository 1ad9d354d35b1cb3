#!/usr/bin/env python3
"""Search for bijections with f^4 = id minimizing the defect set of the
local law f(x+1) = m f(x), over a grid of (n, m)."""

import argparse

from soficlab.localexp import search_local_exp


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[8, 16, 25, 32])
    ap.add_argument("--m", type=int, default=3)
    ap.add_argument("--budget", type=int, default=50_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for n in args.n:
        try:
            r = search_local_exp(n, args.m, budget=args.budget, seed=args.seed)
        except ValueError as exc:
            print(f"n={n}: skipped ({exc})")
            continue
        print(f"n={n} m={args.m} defect={r.defect_count} "
              f"({r.defect_count / n:.3f}) cycles={dict(sorted(r.cycle_histogram.items()))} "
              f"{'exhaustive' if r.exhaustive else 'annealed'}")


if __name__ == "__main__":
    main()
