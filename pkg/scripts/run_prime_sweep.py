#!/usr/bin/env python3
"""Sweep the cycle census of x -> m^x mod p over a prime range and report
any modulus whose 3-periodic count exceeds 3p/4 + slack."""

import argparse
from pathlib import Path

from soficlab.expcycles import run_sweep, segmented_sieve, sweep_csv


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--lo", type=int, default=1000)
    ap.add_argument("--hi", type=int, default=100_000)
    ap.add_argument("--slack", type=int, default=100)
    ap.add_argument("--workers", type=int, default=8)
    ap.add_argument("--out", default="sweep.csv")
    args = ap.parse_args()

    primes = segmented_sieve(args.lo, args.hi)
    rows = run_sweep(args.m, primes, workers=args.workers)
    Path(args.out).write_text(sweep_csv(rows))
    findings = [r for r in rows if r.fixed[2] > 3 * r.n / 4 + args.slack]
    print(f"{len(rows)} moduli swept, {len(findings)} findings -> {args.out}")
    for r in findings:
        print(f"  n={r.n} fix3={r.fixed[2]} bound={3 * r.n / 4 + args.slack:.1f}")


if __name__ == "__main__":
    main()
