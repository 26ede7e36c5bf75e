"""How often random draws land on degenerate loci, as a function of the prime.

For each p, runs the pairing and triangle suites and reports the rate of
singular Q3, degenerate pairings and singular completion systems.
Usage: python scripts/rejection_rates.py [--trials N] [--primes 11 101 1009 10007]
"""

import argparse
import json

from dvfourfold.exactfield import GF
from dvfourfold.harness import ScenarioConfig, run_suite


def rate(c):
    return c["rejected"] / c["attempted"] if c["attempted"] else 0.0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--primes", type=int, nargs="+", default=[11, 101, 1009, 10007])
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rows = []
    print(f"{'p':>6} {'1/p':>8} {'Q3 sing':>8} {'M degen':>8} {'compl rej':>9} {'failed':>6}")
    for p in args.primes:
        f = GF(p)
        pair = run_suite("pairing", ScenarioConfig("triangle", field=f, seed=args.seed, trials=args.trials))
        tri = run_suite("triangle", ScenarioConfig("pair", field=f, seed=args.seed, trials=args.trials))
        degenerate = pair.stats.get("degenerate", 0) / args.trials
        row = {
            "p": p,
            "q3_singular": rate(pair.counts("reduction_criterion_q3")),
            "pairing_degenerate": degenerate,
            "completion_rejected": rate(tri.counts("completion")),
            "failed_checks": pair.failed + tri.failed,
        }
        rows.append(row)
        print(f"{p:>6} {1 / p:>8.4f} {row['q3_singular']:>8.3f} {degenerate:>8.3f} "
              f"{row['completion_rejected']:>9.3f} {row['failed_checks']:>6}")
    print(json.dumps(rows, indent=2))


if __name__ == "__main__":
    main()
