#!/usr/bin/env python3
"""Emit the density table for every splitting type up to a degree bound.

Usage: python scripts/density_table.py [DEGREE_MAX] [--base eEfF] [--csv out.csv]
"""

import argparse
import sys

from padicdens.cli import JobSpec, run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("degree_max", nargs="?", type=int, default=4)
    ap.add_argument("--base", default="e1f1")
    ap.add_argument("--csv", default=None, help="write CSV here instead of text to stdout")
    args = ap.parse_args()
    e_base = int(args.base.split("f")[0][1:])
    f_base = int(args.base.split("f")[1])
    job = JobSpec(
        command="table",
        degree_max=args.degree_max,
        e_base=e_base,
        f_base=f_base,
        fmt="csv" if args.csv else "text",
        emit=args.csv,
    )
    return run(job)


if __name__ == "__main__":
    sys.exit(main())
