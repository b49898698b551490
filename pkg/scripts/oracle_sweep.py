#!/usr/bin/env python3
"""Sweep the enumeration oracle against the engine over a small-instance grid
and dump the comparison records as JSON lines.

Usage: python scripts/oracle_sweep.py [--degree-max 3] [--primes 3,5] [--cmax 4]
"""

import argparse
import itertools
import json
import sys
import time

from padicdens import engine, verify


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degree-max", type=int, default=3)
    ap.add_argument("--primes", default="3,5")
    ap.add_argument("--cmax", type=int, default=4)
    ap.add_argument("--bmax", type=int, default=1)
    args = ap.parse_args()
    primes = [int(x) for x in args.primes.split(",")]
    bad = 0
    t0 = time.time()
    for sigma in engine.catalog(args.degree_max):
        for p in primes:
            if not sigma.is_tame_at(p):
                continue
            for b in itertools.product(range(args.bmax + 1), repeat=sigma.m):
                for rec in verify.oracle_records(sigma, b, p, args.cmax):
                    print(json.dumps(rec, sort_keys=True))
                    bad += not rec["match"]
    print(f"# done in {time.time() - t0:.1f}s, mismatches: {bad}", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
