"""Cross-checks tying the engine, the oracle, and the closed-form targets together.

Every function returns plain data (lists of record dicts or (name, ok) pairs)
so the CLI can render them as text, JSON, or CSV; nothing here prints.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

from . import engine, oracle
from .splitting import SplittingType, mobius_orbit_count, perm_factor
from .symbolic import FracPoly, check_inversion_symmetry, series_coefficients

Check = Tuple[str, bool, str]

GOLDEN = (
    (SplittingType(((1, 1), (1, 1))), FracPoly(1, 2)),
    (SplittingType(((1, 2),)), FracPoly({2: 1, 1: -1, 0: 1}, {2: 2, 1: 2, 0: 2})),
    (
        SplittingType(((1, 1), (1, 1), (1, 1))),
        FracPoly({4: 1, 2: 2, 0: 1}, {4: 6, 3: 6, 2: 6, 1: 6, 0: 6}),
    ),
    (
        SplittingType(((1, 1), (1, 2))),
        FracPoly({4: 1, 0: 1}, {4: 2, 3: 2, 2: 2, 1: 2, 0: 2}),
    ),
)

ACCEPTANCE_BASES = ((1, 1), (2, 1), (1, 2))


def acceptance_catalog(degree_max: int = 4) -> Tuple[SplittingType, ...]:
    out: List[SplittingType] = []
    for eb, fb in ACCEPTANCE_BASES:
        out.extend(engine.catalog(degree_max, eb, fb))
    return tuple(out)


def golden_value_checks() -> List[Check]:
    out = []
    for sigma, expected in GOLDEN:
        got = engine.splitting_density(sigma)
        out.append(
            (
                f"golden rho{sigma.display_superscript()}",
                got == expected,
                f"{got}",
            )
        )
    return out


def partition_of_unity_checks(degrees: Sequence[int] = (2, 3)) -> List[Check]:
    out = []
    for d in degrees:
        total = FracPoly(0)
        for sigma in engine.degree_slice(d):
            total = total + engine.splitting_density(sigma)
        out.append((f"sum_rho degree {d} = 1", total == FracPoly(1), f"{total}"))
    for d in (2,):
        ta = FracPoly(0)
        tb = FracPoly(0)
        for sigma in engine.degree_slice(d):
            ta = ta + engine.monic_density(sigma)
            tb = tb + engine.centered_monic_density(sigma)
        out.append((f"sum_alpha degree {d} = 1", ta == FracPoly(1), f"{ta}"))
        out.append((f"sum_beta degree {d} = 1", tb == FracPoly(1), f"{tb}"))
    return out


def functional_equation_checks(
    sigmas: Iterable[SplittingType],
) -> List[Check]:
    out = []
    for sigma in sigmas:
        rho = engine.splitting_density(sigma)
        holds, witness = check_inversion_symmetry(rho)
        out.append(
            (
                f"rho(q)=rho(1/q) {sigma.display_pairs()}",
                holds,
                "0" if holds else f"witness {witness}",
            )
        )
    return out


def duality_checks(sigmas: Iterable[SplittingType]) -> List[Check]:
    out = []
    for sigma in sigmas:
        a = engine.monic_density(sigma)
        b = engine.centered_monic_density(sigma)
        ok = (a.subs_inverse() - b).is_zero
        out.append((f"alpha(1/q)=beta(q) {sigma.display_pairs()}", ok, f"{b}"))
    return out


def asymptotic_checks(
    sigmas: Iterable[SplittingType], q0: int = 10**4, tol_num: int = 10
) -> List[Check]:
    """|rho(q) * perm * prod f_rel * q^(sum (e_rel-1) f_rel) - 1| <= tol_num/q0."""
    out = []
    tol = Fraction(tol_num, q0)
    for sigma in sigmas:
        rho = engine.splitting_density(sigma)
        exp = sum((e - 1) * f for e, f in zip(sigma.e_rel, sigma.f_rel))
        prod_f = 1
        for f in sigma.f_rel:
            prod_f *= f
        dev = abs(
            rho.evaluate(Fraction(q0)) * perm_factor(sigma) * prod_f * Fraction(q0) ** exp
            - 1
        )
        out.append(
            (
                f"asymptotic {sigma.display_pairs()}",
                dev <= tol,
                f"deviation {float(dev):.3e}",
            )
        )
    return out


def min_disc_checks(
    sigmas: Iterable[SplittingType],
    leading_p: int | None = None,
    leading_tol_num: int = 5,
) -> List[Check]:
    """Minimal discriminant valuation vs the generating function's lowest
    exponent; optionally the near-1 bound on the leading coefficient."""
    out = []
    for sigma in sigmas:
        try:
            c0 = engine.min_disc_valuation(sigma)
            ok = True
            note = f"c0={c0}"
        except Exception as exc:  # VerificationError carries the mismatch
            ok = False
            note = str(exc)
        out.append((f"min_disc {sigma.display_pairs()}", ok, note))
        if ok and leading_p is not None:
            g = engine.disc_gen_fun(sigma, (0,) * sigma.m)
            lead = series_coefficients(g, c0)[c0]
            dev = abs(lead.evaluate(leading_p) - 1)
            out.append(
                (
                    f"leading_coeff {sigma.display_pairs()}",
                    dev <= Fraction(leading_tol_num, leading_p),
                    f"|a(c0)-1|={float(dev):.3e} at p={leading_p}",
                )
            )
    return out


def bivariate_symmetry_checks(sigmas: Iterable[SplittingType]) -> List[Check]:
    """The conjectured two-variable symmetry rho(p,t) = rho(1/p, 1/t)."""
    out = []
    for sigma in sigmas:
        biv = engine.density_gen_fun(sigma)
        holds, _ = check_inversion_symmetry(biv)
        out.append((f"rho(p,t)=rho(1/p,1/t) {sigma.display_pairs()}", holds, ""))
    return out


# ---------------------------------------------------------------------------
# oracle vs engine
# ---------------------------------------------------------------------------

def engine_masses_at(
    sigma: SplittingType, b: Tuple[int, ...], c_max: int, p: int
) -> Dict[int, Fraction]:
    """The engine's series coefficients at a concrete tame prime."""
    g = engine.disc_gen_fun(sigma, b)
    out: Dict[int, Fraction] = {}
    for c, coeff in series_coefficients(g, c_max).items():
        if c.denominator != 1:
            raise AssertionError(f"non-integer valuation {c} over an unramified base")
        v = coeff.evaluate(p)
        if v:
            out[int(c)] = v
    return out


def oracle_records(
    sigma: SplittingType,
    b: Tuple[int, ...],
    p: int,
    c_max: int,
    samples: int = 0,
    seed: int = 0,
) -> List[dict]:
    """Comparison records {sigma, b, p, c, exact_mass | estimate, stderr,
    engine_value, match} for every c up to c_max."""
    eng = engine_masses_at(sigma, b, c_max, p)
    records: List[dict] = []
    if samples:
        est = oracle.sampled_disc_masses(sigma, b, c_max, p, samples, seed)
        for c in range(c_max + 1):
            ev = eng.get(c, Fraction(0))
            e = est.get(c)
            point = e.estimate if e else 0.0
            err = e.stderr if e else 0.0
            ok = abs(point - float(ev)) <= 3 * err if err else point == float(ev)
            records.append(
                dict(
                    sigma=sigma.display_pairs(),
                    b=list(b),
                    p=p,
                    c=c,
                    estimate=point,
                    stderr=err,
                    engine_value=str(ev),
                    match=bool(ok),
                )
            )
    else:
        exact = oracle.exact_disc_masses(sigma, b, c_max, p)
        for c in sorted(set(exact) | set(eng)):
            ev = eng.get(c, Fraction(0))
            ov = exact.get(c, Fraction(0))
            records.append(
                dict(
                    sigma=sigma.display_pairs(),
                    b=list(b),
                    p=p,
                    c=c,
                    exact_mass=str(ov),
                    engine_value=str(ev),
                    match=ov == ev,
                )
            )
    return records


def oracle_grid_checks(
    degree_max: int = 3,
    primes: Sequence[int] = (3, 5),
    b_max: int = 1,
    c_max: int = 4,
) -> List[Check]:
    out = []
    for sigma in engine.catalog(degree_max):
        for p in primes:
            if not sigma.is_tame_at(p):
                continue
            for b in itertools.product(range(b_max + 1), repeat=sigma.m):
                recs = oracle_records(sigma, b, p, c_max)
                ok = all(r["match"] for r in recs)
                out.append(
                    (
                        f"oracle {sigma.display_pairs()} b={list(b)} p={p}",
                        ok,
                        f"{len(recs)} masses",
                    )
                )
    return out


def brute_frobenius_orbit_count(f: int, k: int, p: int) -> int:
    """Orbits of exact size k of x -> x^(p^f) on the nonzero elements of the
    field with p^(f*k) elements, counted on discrete-log exponents."""
    modulus = p ** (f * k) - 1
    mult = pow(p, f, modulus)
    seen = [False] * modulus
    count = 0
    for x in range(modulus):
        if seen[x]:
            continue
        size = 0
        y = x
        while not seen[y]:
            seen[y] = True
            size += 1
            y = y * mult % modulus
        if size == k:
            count += 1
    return count


def orbit_count_checks(
    e_max: int = 6,
    f_max: int = 3,
    b_max: int = 3,
    primes: Sequence[int] = (3, 5, 7),
    mobius_limit: int = 5**6,
) -> List[Check]:
    """Brute-forced conjugate-orbit counts against their closed forms, plus
    the Mobius orbit-count polynomial against direct Frobenius-orbit counting."""
    out = []
    bad = []
    total = 0
    for p in primes:
        for e in range(1, e_max + 1):
            if e % p == 0:
                continue
            for f in range(1, f_max + 1):
                for b in range(0, b_max + 1):
                    denom = e // math.gcd(b, e) if b else 1
                    for k in range(1, denom * f + 1):
                        got = oracle.count_orbit_choices(e, f, b, k, p)
                        want = oracle.orbit_choices_closed_form(e, f, b, k, p)
                        total += 1
                        if got != want:
                            bad.append((e, f, b, k, p, got, want))
    out.append(
        (
            f"orbit_choices grid ({total} cases)",
            not bad,
            f"first mismatch {bad[0]}" if bad else "all equal",
        )
    )

    mob_bad = []
    mob_total = 0
    for p in (2, 3, 5):
        for f in range(1, 4):
            for k in range(1, 7):
                if p ** (f * k) > mobius_limit:
                    continue
                val = mobius_orbit_count(f, k).evaluate(p)
                count = brute_frobenius_orbit_count(f, k, p)
                mob_total += 1
                if val != count:
                    mob_bad.append((f, k, p, val, count))
    out.append(
        (
            f"mobius_orbit_count grid ({mob_total} cases)",
            not mob_bad,
            f"first mismatch {mob_bad[0]}" if mob_bad else "all equal",
        )
    )
    return out
