"""Command-line surface: compute densities, emit tables, run verification suites.

Commands:

  compute     exact densities for one splitting type
  table       densities for a whole degree-bounded catalog
  verify      the invariant suite (golden values, partition of unity,
              functional equation, duality, asymptotics, minimal discriminant)
  oracle      enumeration / Monte Carlo cross-check against the engine
  conjecture  the two-variable symmetry report

Exit codes: 0 success, 2 parse error, 3 wild prime, 4 non-integral exponent,
5 verification failure, 6 enumeration too large.

Identical job specifications (including seeds) produce byte-identical
reports; catalog entries are emitted in a canonical order.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import engine, verify
from .errors import (
    DivisibilityError,
    NonIntegralExponentError,
    SigmaParseError,
    TooLargeError,
    WildInputError,
)
from .splitting import SplittingType
from .symbolic import FracPoly, check_inversion_symmetry, to_json_obj

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_WILD = 3
EXIT_NONINTEGRAL = 4
EXIT_VERIFY = 5
EXIT_TOO_LARGE = 6

_ITEM = re.compile(r"e(\d+)f(\d+)")


def parse_sigma(s: str) -> SplittingType:
    """Parse 'e<int>f<int>,...' with an optional '@e<int>f<int>' base suffix.

    Components are absolute invariants; the base must divide every component.
    """
    text = s.strip()
    base = (1, 1)
    if "@" in text:
        text, _, base_text = text.partition("@")
        m = _ITEM.fullmatch(base_text.strip())
        if not m:
            raise SigmaParseError(
                f"bad base {base_text!r} (expected e<int>f<int>)",
                position=s.index("@") + 1,
            )
        base = (int(m.group(1)), int(m.group(2)))
    comps = []
    pos = 0
    for item in text.split(","):
        m = _ITEM.fullmatch(item.strip())
        if not m:
            raise SigmaParseError(
                f"bad component {item!r} (expected e<int>f<int>)", position=pos
            )
        comps.append((int(m.group(1)), int(m.group(2))))
        pos += len(item) + 1
    if not comps:
        raise SigmaParseError("empty splitting type", position=0)
    return SplittingType(tuple(comps), *base)


@dataclass
class JobSpec:
    """One CLI invocation, fully determining the report."""

    command: str
    sigma: Optional[SplittingType] = None
    e_base: int = 1
    f_base: int = 1
    p: Optional[int] = None
    c_max: int = 4
    samples: int = 0
    seed: int = 0
    fmt: str = "text"
    degree_max: int = 5
    emit: Optional[str] = None
    depths: Optional[Tuple[int, ...]] = None
    bases: Tuple[Tuple[int, int], ...] = ((1, 1),)
    bivariate: bool = False


def _frac_str(x: Fraction) -> str:
    return f"{x} ~ {float(x):.6g}"


def _quantity_rows(sigma: SplittingType) -> List[Tuple[str, FracPoly]]:
    return [
        ("rho", engine.splitting_density(sigma)),
        ("alpha", engine.monic_density(sigma)),
        ("beta_monic", engine.centered_monic_density(sigma)),
        ("asymptotic", engine.density_asymptotic(sigma)),
    ]


def _csv_rows(sigma: SplittingType) -> List[List[str]]:
    rows = []
    for name, value in _quantity_rows(sigma):
        num, den = value.as_integer_pair()
        from .symbolic import _render_terms  # canonical text rendering

        rows.append(
            [
                sigma.display_pairs(),
                str(sigma.e_base),
                str(sigma.f_base),
                name,
                _render_terms(num.items(), (value.var,)),
                _render_terms(den.items(), (value.var,)),
            ]
        )
    return rows


def _emit(job: JobSpec, text: str) -> None:
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")
    if job.emit:
        with open(job.emit, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _render_csv(rows: List[List[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["sigma", "e_base", "f_base", "quantity", "value_numerator", "value_denominator"]
    )
    writer.writerows(rows)
    return buf.getvalue()


def _sigma_header(sigma: SplittingType) -> str:
    return (
        f"sigma {sigma.display_pairs()}   "
        f"pairs {list(sigma.components)} over base (e={sigma.e_base}, f={sigma.f_base}); "
        f"superscript display {sigma.display_superscript()}"
    )


def run_compute(job: JobSpec) -> int:
    sigma = job.sigma
    assert sigma is not None
    if job.p is not None:
        sigma.require_tame(job.p)
    if job.bivariate:
        result = engine.density_result(sigma)
    else:
        result = None
    rho = engine.splitting_density(sigma)
    fe_holds, _ = check_inversion_symmetry(rho)
    if job.fmt == "csv":
        _emit(job, _render_csv(_csv_rows(sigma)))
        return EXIT_OK
    if job.fmt == "json":
        payload = {
            "sigma": sigma.display_pairs(),
            "e_base": sigma.e_base,
            "f_base": sigma.f_base,
            "rho": to_json_obj(rho),
            "alpha": to_json_obj(engine.monic_density(sigma)),
            "beta_monic": to_json_obj(engine.centered_monic_density(sigma)),
            "asymptotic": to_json_obj(engine.density_asymptotic(sigma)),
            "functional_eq_holds": fe_holds,
        }
        if result is not None:
            payload["rho_bivariate"] = to_json_obj(result.rho_bivariate)
        if job.p is not None:
            q0 = Fraction(job.p) ** sigma.f_base
            payload["numeric"] = {
                "p": job.p,
                "q": str(q0),
                "rho": str(result.rho_q.evaluate(q0)),
                "alpha": str(result.alpha_q.evaluate(q0)),
                "beta_monic": str(result.beta_q.evaluate(q0)),
            }
        _emit(job, json.dumps(payload, sort_keys=True, indent=2))
        return EXIT_OK
    lines = [_sigma_header(sigma)]
    for name, value in _quantity_rows(sigma):
        lines.append(f"{name:12s} = {value}")
    if result is not None:
        lines.append(f"{'rho(p,t)':12s} = {result.rho_bivariate}")
    lines.append(
        "functional equation rho(q) = rho(1/q): "
        + ("PASS" if fe_holds else "FAIL")
    )
    if job.p is not None:
        q0 = Fraction(job.p) ** sigma.f_base
        lines.append(f"numeric at p={job.p} (q={q0}):")
        for name, value in _quantity_rows(sigma):
            lines.append(f"  {name:12s} = {_frac_str(value.evaluate(q0))}")
    _emit(job, "\n".join(lines))
    return EXIT_OK


def run_table(job: JobSpec) -> int:
    sigmas = engine.catalog(job.degree_max, job.e_base, job.f_base)
    if job.fmt == "csv":
        rows: List[List[str]] = []
        for sigma in sigmas:
            rows.extend(_csv_rows(sigma))
        _emit(job, _render_csv(rows))
        return EXIT_OK
    if job.fmt == "json":
        payload = [
            {
                "sigma": s.display_pairs(),
                "rho": to_json_obj(engine.splitting_density(s)),
                "alpha": to_json_obj(engine.monic_density(s)),
                "beta_monic": to_json_obj(engine.centered_monic_density(s)),
                "asymptotic": to_json_obj(engine.density_asymptotic(s)),
            }
            for s in sigmas
        ]
        _emit(job, json.dumps(payload, sort_keys=True, indent=2))
        return EXIT_OK
    lines = []
    for sigma in sigmas:
        lines.append(_sigma_header(sigma))
        for name, value in _quantity_rows(sigma):
            lines.append(f"  {name:12s} = {value}")
    _emit(job, "\n".join(lines))
    return EXIT_OK


def _render_checks(checks, fmt: str) -> Tuple[str, bool]:
    ok_all = all(ok for _, ok, _ in checks)
    if fmt == "json":
        return (
            json.dumps(
                [dict(name=n, ok=ok, note=note) for n, ok, note in checks],
                sort_keys=True,
                indent=2,
            ),
            ok_all,
        )
    lines = [f"{name}: {'PASS' if ok else 'FAIL'}" + (f"  [{note}]" if note and not ok else "")
             for name, ok, note in checks]
    lines.append(f"overall: {'PASS' if ok_all else 'FAIL'}")
    return "\n".join(lines), ok_all


def run_verify(job: JobSpec) -> int:
    sigmas: List[SplittingType] = []
    for eb, fb in job.bases:
        sigmas.extend(engine.catalog(job.degree_max, eb, fb))
    checks = []
    checks += verify.golden_value_checks()
    checks += verify.partition_of_unity_checks()
    checks += verify.functional_equation_checks(sigmas)
    checks += verify.duality_checks([s for s in sigmas if s.degree <= 3])
    checks += verify.asymptotic_checks(sigmas)
    checks += verify.min_disc_checks(sigmas)
    text, ok = _render_checks(checks, job.fmt)
    _emit(job, text)
    return EXIT_OK if ok else EXIT_VERIFY


def run_oracle(job: JobSpec) -> int:
    sigma = job.sigma
    assert sigma is not None
    if job.p is None:
        raise WildInputError("the oracle needs a concrete prime (-p)")
    sigma.require_tame(job.p)
    b = job.depths if job.depths is not None else (0,) * sigma.m
    records = verify.oracle_records(
        sigma, b, job.p, job.c_max, samples=job.samples, seed=job.seed
    )
    ok = all(r["match"] for r in records)
    if job.fmt == "json":
        _emit(job, json.dumps(records, sort_keys=True, indent=2))
    else:
        lines = [
            " ".join(f"{k}={v}" for k, v in sorted(r.items())) for r in records
        ]
        lines.append(f"overall: {'PASS' if ok else 'FAIL'}")
        _emit(job, "\n".join(lines))
    return EXIT_OK if ok else EXIT_VERIFY


def run_conjecture(job: JobSpec) -> int:
    sigmas: List[SplittingType] = []
    for eb, fb in job.bases:
        sigmas.extend(engine.catalog(job.degree_max, eb, fb))
    checks = verify.bivariate_symmetry_checks(sigmas)
    text, ok = _render_checks(checks, job.fmt)
    _emit(job, text)
    return EXIT_OK if ok else EXIT_VERIFY


def _parse_bases(raw: str) -> Tuple[Tuple[int, int], ...]:
    out = []
    for item in raw.split(","):
        m = _ITEM.fullmatch(item.strip())
        if not m:
            raise SigmaParseError(f"bad base {item!r}")
        out.append((int(m.group(1)), int(m.group(2))))
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="padicdens",
        description="Exact densities of polynomials over local fields by tame splitting type",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, with_sigma=False, with_prime=False):
        if with_sigma:
            sp.add_argument("--sigma", required=True, help="e.g. e1f2 or e2f1,e1f1 or e4f1@e2f1")
        sp.add_argument("--base", default=None, help="base e<int>f<int> (overrides @suffix)")
        if with_prime:
            sp.add_argument("-p", type=int, default=None, help="concrete tame prime")
        sp.add_argument("--format", dest="fmt", choices=("text", "json", "csv"), default="text")
        sp.add_argument("--emit", default=None, help="also write the report to this path")

    sp = sub.add_parser("compute", help="densities for one splitting type")
    common(sp, with_sigma=True, with_prime=True)
    sp.add_argument(
        "--bivariate", action="store_true",
        help="also compute the two-variable density rho(p,t)",
    )

    sp = sub.add_parser("table", help="densities for a degree-bounded catalog")
    common(sp)
    sp.add_argument("--degree-max", type=int, default=5)

    sp = sub.add_parser("verify", help="run the invariant suite")
    common(sp)
    sp.add_argument("--degree-max", type=int, default=3)
    sp.add_argument("--bases", default="e1f1", help="comma list, e.g. e1f1,e2f1,e1f2")

    sp = sub.add_parser("oracle", help="enumeration / Monte Carlo cross-check")
    common(sp, with_sigma=True, with_prime=True)
    sp.add_argument("--cmax", type=int, default=4)
    sp.add_argument("--samples", type=int, default=0, help="0 = exact enumeration")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--depths", default=None, help="comma list of b_i, default all 0")

    sp = sub.add_parser("conjecture", help="two-variable symmetry report")
    common(sp)
    sp.add_argument("--degree-max", type=int, default=3)
    sp.add_argument("--bases", default="e1f1,e2f1,e1f2")
    return ap


def job_from_args(args: argparse.Namespace) -> JobSpec:
    job = JobSpec(command=args.command)
    job.fmt = args.fmt
    job.emit = args.emit
    if getattr(args, "sigma", None):
        sigma = parse_sigma(args.sigma)
        if args.base:
            m = _ITEM.fullmatch(args.base.strip())
            if not m:
                raise SigmaParseError(f"bad base {args.base!r}")
            sigma = SplittingType(
                sigma.components, int(m.group(1)), int(m.group(2))
            )
        job.sigma = sigma
        job.e_base, job.f_base = sigma.e_base, sigma.f_base
    elif getattr(args, "base", None):
        m = _ITEM.fullmatch(args.base.strip())
        if not m:
            raise SigmaParseError(f"bad base {args.base!r}")
        job.e_base, job.f_base = int(m.group(1)), int(m.group(2))
    if getattr(args, "p", None) is not None:
        job.p = args.p
    if getattr(args, "cmax", None) is not None:
        job.c_max = args.cmax
    if getattr(args, "samples", None) is not None:
        job.samples = args.samples
    if getattr(args, "seed", None) is not None:
        job.seed = args.seed
    if getattr(args, "degree_max", None) is not None:
        job.degree_max = args.degree_max
    if getattr(args, "depths", None):
        job.depths = tuple(int(x) for x in args.depths.split(","))
    if getattr(args, "bases", None):
        job.bases = _parse_bases(args.bases)
    if getattr(args, "bivariate", False):
        job.bivariate = True
    return job


def run(job: JobSpec) -> int:
    """Dispatch a job; returns the exit code."""
    try:
        if job.command == "compute":
            return run_compute(job)
        if job.command == "table":
            return run_table(job)
        if job.command == "verify":
            return run_verify(job)
        if job.command == "oracle":
            return run_oracle(job)
        if job.command == "conjecture":
            return run_conjecture(job)
        raise ValueError(f"unknown command {job.command}")
    except (SigmaParseError, DivisibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except WildInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WILD
    except NonIntegralExponentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONINTEGRAL
    except TooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        job = job_from_args(args)
    except (SigmaParseError, DivisibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return run(job)


if __name__ == "__main__":
    sys.exit(main())
