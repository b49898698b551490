"""Memoized generating-function recursion and density assembly.

The central object is the generating function in t attached to a splitting
type sigma and a depth vector b: its t^c coefficient is the (class-averaged)
measure of tuples, one element per component drawn from the b_i-th power of
the maximal ideal, whose minimal-polynomial discriminant has valuation
exactly c.  A single recursion step splits off the minimal-slope Teichmuller
coefficient, branching over partition plans; a rescaling identity closes the
resulting geometric tail in closed form.

From that generating function the module assembles:

  * the density of degree-d polynomials with the given splitting type among
    all polynomials (as an exact rational function of q, and as a bivariate
    rational function of (p, t) with t left free),
  * the corresponding densities among monic polynomials and among monic
    polynomials congruent to x^d,
  * its large-q asymptotic and the minimal discriminant valuation.

The engine is prime-symbolic: tameness cannot be checked symbolically, so the
output is valid at every prime not dividing any relative ramification index;
concrete primes are validated wherever one is supplied.

Concurrency: the memo table is shared; concurrent calls may duplicate a
bounded amount of work on cache races but always produce value-identical
results.  All returned values are immutable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil
from typing import Dict, Iterator, Tuple

from .errors import RecursionGuardError, VerificationError
from .splitting import (
    BVector,
    SplittingType,
    base_ram_factor,
    bump_argmin,
    enumerate_plans,
    head_plan,
    perm_factor,
    plan_weight,
    slope_data,
)
from .symbolic import FracPoly, GenFun, check_inversion_symmetry, rewrite_in_q

_MEMO: Dict[tuple, GenFun] = {}
_ASSEMBLY: Dict[tuple, object] = {}
_MEMO_CAP_ENV = "PADICDENS_MEMO_CAP"


def clear_memo() -> None:
    _MEMO.clear()
    _ASSEMBLY.clear()


def _assembled(kind: str, sigma: SplittingType, build):
    key = (kind, sigma.key())
    hit = _ASSEMBLY.get(key)
    if hit is None:
        hit = build()
        cap = _memo_cap()
        if cap is not None and len(_ASSEMBLY) >= cap:
            _ASSEMBLY.clear()
        _ASSEMBLY[key] = hit
    return hit


def _memo_cap() -> int | None:
    raw = os.environ.get(_MEMO_CAP_ENV)
    if not raw:
        return None
    return int(raw)


def leading_coeff_weight(d: int) -> FracPoly:
    """Weight of the leading-coefficient distribution for degree-d inputs:
    (q^(d+1) - q^d)/(q^(d+1) - 1), with the degree-0 convention of 1."""
    if d == 0:
        return FracPoly(1, var="q")
    return FracPoly({d + 1: 1, d: -1}, {d + 1: 1, 0: -1}, var="q")


def _q_to_genfun(f: FracPoly, f_base: int) -> GenFun:
    """Interpret a rational function of q as one of p via q = p^f_base."""
    conv = lambda terms: {(k[0] * f_base, Fraction(0)): c for k, c in terms.items()}
    return GenFun(conv(f.num_terms), conv(f.den_terms))


def _p_to_genfun(f: FracPoly) -> GenFun:
    conv = lambda terms: {(k[0], Fraction(0)): c for k, c in terms.items()}
    return GenFun(conv(f.num_terms), conv(f.den_terms))


def _recursion_key(sigma: SplittingType, b: BVector) -> tuple:
    parts = tuple(sorted(zip(sigma.components, b)))
    return (sigma.e_base, sigma.f_base, parts)


def disc_gen_fun(
    sigma: SplittingType,
    b: BVector,
    _depth: int = 0,
    _limit: int | None = None,
) -> GenFun:
    """Generating function of discriminant-valuation masses for (sigma, b).

    Memoized on a canonical key, so results are independent of call order and
    of component ordering.
    """
    if len(b) != sigma.m or any(x < 0 for x in b):
        raise ValueError("depth vector must be nonnegative and match sigma")
    key = _recursion_key(sigma, b)
    hit = _MEMO.get(key)
    if hit is not None:
        return hit
    if _limit is None:
        _limit = 10 * max(1, sigma.degree) * sigma.e_base * sigma.f_base
    if _depth > _limit:
        raise RecursionGuardError(
            f"recursion depth exceeded {_limit} at {sigma.display_pairs()} b={b}"
        )

    # canonical component order; the value is symmetric under permutation
    order = sorted(range(sigma.m), key=lambda i: (sigma.components[i], b[i]))
    sigma = sigma.restrict(order)
    b = tuple(b[i] for i in order)

    e_rel = sigma.e_rel
    if sigma.m == 1 and e_rel[0] == 1 and sigma.f_rel[0] == 1:
        # single component equal to the base: degree-1 minimal polynomials
        # have unit discriminant, so all mass sits at t^0
        result = GenFun.monomial(p_exp=-b[0] * sigma.components[0][1])
    else:
        d = sigma.degree
        f_base = sigma.f_base
        t_step = Fraction(d * (d - 1), sigma.e_base)

        k_lim = max(ceil(Fraction(bi, ei)) for bi, ei in zip(b, e_rel))
        target = tuple(k_lim * ei for ei in e_rel)
        chain_sum = GenFun(0)
        cur = b
        steps = 0
        while cur != target:
            chain_sum = chain_sum + branch_sum(sigma, cur, _depth + 1, _limit)
            cur = bump_argmin(sigma, cur)
            steps += 1
            if steps > _limit:
                raise RecursionGuardError("argmin chain failed to terminate")

        zero_b = (0,) * sigma.m
        rel_target = tuple(e_rel)
        head = branch_sum(sigma, zero_b, _depth + 1, _limit)
        tail = GenFun(0)
        cur = bump_argmin(sigma, zero_b)
        steps = 0
        while cur != rel_target:
            tail = tail + branch_sum(sigma, cur, _depth + 1, _limit)
            cur = bump_argmin(sigma, cur)
            steps += 1
            if steps > _limit:
                raise RecursionGuardError("argmin chain failed to terminate")
        closure_den = GenFun(1) - GenFun.monomial(p_exp=f_base * (1 - d), t_exp=t_step)
        g_zero = (head + GenFun.monomial(p_exp=f_base) * tail) / closure_den

        rescale = GenFun.monomial(p_exp=-f_base * d * k_lim, t_exp=t_step * k_lim)
        result = chain_sum + rescale * g_zero

    cap = _memo_cap()
    if cap is not None and len(_MEMO) >= cap:
        _MEMO.clear()
    _MEMO[key] = result
    return result


def branch_sum(
    sigma: SplittingType, b: BVector, _depth: int = 0, _limit: int = 10**6
) -> GenFun:
    """One recursion step: the sum over non-head partition plans of
    weight * t^(pair-separation exponent) * product of rescaled sub-values."""
    m = sigma.m
    sd = slope_data(sigma, b)
    arg = set(sd.argmin)
    degs = sigma.rel_degrees
    d = sigma.degree
    head = head_plan(m)
    terms = []
    parent_degree = sigma.degree
    for plan in enumerate_plans(sigma, b):
        if plan == head:
            continue
        weight = plan_weight(sigma, b, plan)
        if weight.is_zero:
            continue
        sep = d * (d - 1)
        for bl, n in zip(plan.blocks, plan.orbit_sizes):
            block_deg = sum(degs[i] for i in bl)
            sep -= block_deg * (Fraction(block_deg, n) - 1)
        t_exp = Fraction(sep, sigma.e_base) * sd.slope

        prod = GenFun(1)
        for bl, n in zip(plan.blocks, plan.orbit_sizes):
            h = base_ram_factor(sd, n)
            sub_sigma = SplittingType(
                tuple(sigma.components[i] for i in bl),
                sigma.e_base * h,
                sigma.f_base * n // h,
            )
            sub_b = tuple(b[i] + (1 if i in arg else 0) for i in bl)
            assert sub_sigma.degree < parent_degree, "branch must shrink the degree"
            sub = disc_gen_fun(sub_sigma, sub_b, _depth + 1, _limit)
            prod = prod * sub.substitute_t_power(n)
        terms.append(_p_to_genfun(weight) * GenFun.monomial(t_exp=t_exp) * prod)
    return _tree_sum(terms, GenFun(0))


# ---------------------------------------------------------------------------
# density assembly
# ---------------------------------------------------------------------------

def _tree_sum(items, zero):
    """Balanced pairwise summation: keeps intermediate denominators small."""
    items = list(items)
    if not items:
        return zero
    while len(items) > 1:
        items = [
            items[i] + items[i + 1] if i + 1 < len(items) else items[i]
            for i in range(0, len(items), 2)
        ]
    return items[0]


def _subset_products(sigma: SplittingType):
    """G(sigma_A, all-0) * G(sigma_Ac, all-1) for every subset A of components."""
    m = sigma.m
    for r in range(m + 1):
        for picked in combinations(range(m), r):
            rest = tuple(i for i in range(m) if i not in picked)
            ga = (
                disc_gen_fun(sigma.restrict(picked), (0,) * len(picked))
                if picked
                else GenFun(1)
            )
            gb = (
                disc_gen_fun(sigma.restrict(rest), (1,) * len(rest))
                if rest
                else GenFun(1)
            )
            yield ga, gb


def _subset_masses(sigma: SplittingType) -> GenFun:
    """Sum over subsets A of components of G(sigma_A, all-0) * G(sigma_Ac, all-1)."""
    return _tree_sum((ga * gb for ga, gb in _subset_products(sigma)), GenFun(0))


def _half_disc_exponent(sigma: SplittingType) -> Fraction:
    return Fraction(sum((e - 1) * f for e, f in zip(sigma.e_rel, sigma.f_rel)), 2)


def _prod_f_rel(sigma: SplittingType) -> int:
    out = 1
    for f in sigma.f_rel:
        out *= f
    return out


def density_gen_fun(sigma: SplittingType) -> GenFun:
    """Bivariate density rho(p, t): the exact assembly with t left free.

    Specializing t to q^(-e_base/2) recovers the univariate density.  The
    global residue-field prefactor q^(sum (e_rel-1) f_rel / 2) may carry a
    fractional p-exponent; it cancels on the univariate path.
    """
    def build():
        d = sigma.degree
        f_base = sigma.f_base
        w = _q_to_genfun(leading_coeff_weight(d), f_base)
        norm = GenFun.monomial(p_exp=f_base * _half_disc_exponent(sigma))
        scale = Fraction(1, perm_factor(sigma) * _prod_f_rel(sigma))
        return w * _subset_masses(sigma) * scale / norm

    return _assembled("rho_pt", sigma, build)


def splitting_density(sigma: SplittingType) -> FracPoly:
    """Density of degree-d polynomials with this splitting type, in q.

    Assembled after specializing the valuation variable, so all gcd work is
    univariate; agreement with the two-variable assembly is covered by tests.
    """
    def build():
        t_star = Fraction(-sigma.e_base * sigma.f_base, 2)
        total = _tree_sum(
            (
                ga.eval_t_as_p_power(t_star) * gb.eval_t_as_p_power(t_star)
                for ga, gb in _subset_products(sigma)
            ),
            FracPoly(0, var="p"),
        )
        d = sigma.degree
        w = leading_coeff_weight(d)
        w_p = FracPoly(
            {k[0] * sigma.f_base: c for k, c in w.num_terms.items()},
            {k[0] * sigma.f_base: c for k, c in w.den_terms.items()},
            var="p",
        )
        total = w_p * total
        total = total * FracPoly.monomial(
            -sigma.f_base * _half_disc_exponent(sigma), var="p"
        )
        total = total * Fraction(1, perm_factor(sigma) * _prod_f_rel(sigma))
        return rewrite_in_q(total, sigma.f_base)

    return _assembled("rho_q", sigma, build)


def monic_density(sigma: SplittingType) -> FracPoly:
    """Density among monic degree-d polynomials (all roots integral)."""
    def build():
        t_star = Fraction(-sigma.e_base * sigma.f_base, 2)
        g = disc_gen_fun(sigma, (0,) * sigma.m).eval_t_as_p_power(t_star)
        g = g * FracPoly.monomial(
            -sigma.f_base * _half_disc_exponent(sigma), var="p"
        )
        g = g * Fraction(1, perm_factor(sigma) * _prod_f_rel(sigma))
        return rewrite_in_q(g, sigma.f_base)

    return _assembled("alpha_q", sigma, build)


def centered_monic_density(sigma: SplittingType) -> FracPoly:
    """Conditional density among monic polynomials congruent to x^d: all
    roots in the maximal ideal, rescaled by the measure q^d of that slice."""
    def build():
        t_star = Fraction(-sigma.e_base * sigma.f_base, 2)
        g = disc_gen_fun(sigma, (1,) * sigma.m).eval_t_as_p_power(t_star)
        g = g * FracPoly.monomial(
            sigma.f_base * (sigma.degree - _half_disc_exponent(sigma)), var="p"
        )
        g = g * Fraction(1, perm_factor(sigma) * _prod_f_rel(sigma))
        return rewrite_in_q(g, sigma.f_base)

    return _assembled("beta_q", sigma, build)


def density_asymptotic(sigma: SplittingType) -> FracPoly:
    """Large-q limit 1/(perm * prod f_rel * q^(sum (e_rel-1) f_rel))."""
    exp = sum((e - 1) * f for e, f in zip(sigma.e_rel, sigma.f_rel))
    scale = Fraction(1, perm_factor(sigma) * _prod_f_rel(sigma))
    return FracPoly.monomial(-exp, scale, var="q")


def min_disc_valuation(sigma: SplittingType) -> Fraction:
    """Smallest attainable discriminant valuation for integral generators.

    Cross-checked against the least t-exponent of the computed generating
    function; a mismatch means a bug in one of the two routes.
    """
    c0 = Fraction(
        sum(f * (e - 1) for e, f in zip(sigma.e_rel, sigma.f_rel)), sigma.e_base
    )
    lowest = disc_gen_fun(sigma, (0,) * sigma.m).min_t_exponent()
    if lowest != c0:
        raise VerificationError(
            f"minimal discriminant valuation mismatch: formula {c0}, series {lowest}"
        )
    return c0


def smallest_tame_prime(sigma: SplittingType) -> int:
    p = 2
    while not sigma.is_tame_at(p):
        p += 1
        while any(p % d == 0 for d in range(2, p)):
            p += 1
    return p


@dataclass(frozen=True)
class DensityResult:
    """All densities attached to one splitting type, plus the symmetry report."""

    sigma: SplittingType
    rho_q: FracPoly
    alpha_q: FracPoly
    beta_q: FracPoly
    rho_bivariate: GenFun
    asymptotic: FracPoly
    functional_eq_holds: bool


def density_result(sigma: SplittingType, validate: bool = True) -> DensityResult:
    rho = splitting_density(sigma)
    holds, _ = check_inversion_symmetry(rho)
    result = DensityResult(
        sigma=sigma,
        rho_q=rho,
        alpha_q=monic_density(sigma),
        beta_q=centered_monic_density(sigma),
        rho_bivariate=density_gen_fun(sigma),
        asymptotic=density_asymptotic(sigma),
        functional_eq_holds=holds,
    )
    if validate:
        p0 = smallest_tame_prime(sigma)
        val = rho.evaluate(Fraction(p0) ** sigma.f_base)
        if not (0 < val < 1):
            raise VerificationError(
                f"density out of range at p={p0}: {val} for {sigma.display_pairs()}"
            )
    return result


# ---------------------------------------------------------------------------
# catalogs
# ---------------------------------------------------------------------------

def _rel_pair_multisets(d: int) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """Nondecreasing multisets of relative (e, f) pairs with total e*f = d."""
    pairs = sorted(
        (e, f) for e in range(1, d + 1) for f in range(1, d + 1) if e * f <= d
    )

    def rec(remaining: int, start: int, acc: list):
        if remaining == 0:
            yield tuple(acc)
            return
        for idx in range(start, len(pairs)):
            e, f = pairs[idx]
            if e * f <= remaining:
                acc.append((e, f))
                yield from rec(remaining - e * f, idx, acc)
                acc.pop()

    yield from rec(d, 0, [])


def catalog(
    degree_max: int, e_base: int = 1, f_base: int = 1
) -> Tuple[SplittingType, ...]:
    """All splitting types of relative degree up to degree_max over the base,
    in a canonical order."""
    out = []
    for d in range(1, degree_max + 1):
        for ms in sorted(_rel_pair_multisets(d)):
            comps = tuple((e * e_base, f * f_base) for e, f in ms)
            out.append(SplittingType(comps, e_base, f_base))
    return tuple(out)


def degree_slice(d: int, e_base: int = 1, f_base: int = 1) -> Tuple[SplittingType, ...]:
    """All splitting types of relative degree exactly d over the base."""
    return tuple(s for s in catalog(d, e_base, f_base) if s.degree == d)
