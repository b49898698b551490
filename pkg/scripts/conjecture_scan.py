#!/usr/bin/env python3
"""Scan the two-variable symmetry rho(p,t) = rho(1/p,1/t) across a catalog.

Usage: python scripts/conjecture_scan.py [--degree-max 3] [--bases e1f1,e2f1,e1f2]
"""

import argparse
import sys
import time

from padicdens import engine, verify


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degree-max", type=int, default=3)
    ap.add_argument("--bases", default="e1f1,e2f1,e1f2")
    args = ap.parse_args()
    failures = 0
    t0 = time.time()
    for base in args.bases.split(","):
        eb, fb = (int(x) for x in base.strip("e").split("f"))
        for name, ok, note in verify.bivariate_symmetry_checks(
            engine.catalog(args.degree_max, eb, fb)
        ):
            print(f"{name}: {'PASS' if ok else 'FAIL'} {note}")
            failures += not ok
    print(f"# done in {time.time() - t0:.1f}s, failures: {failures}", file=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
