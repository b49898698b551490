"""Splitting-type bookkeeping and the combinatorics the density recursion branches on.

A splitting type records, for each field component of an etale extension, the
absolute ramification index and inertia degree (e, f) together with the base
field's (e_base, f_base).  Everything here is pure combinatorics: minimal
slopes, the argmin bump operator, admissible partition plans, Galois-orbit
counts by Mobius inversion, and the partition weight polynomial that counts
leading-coefficient/uniformizer choices realizing a given plan.

All functions are pure and all values immutable; safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence, Tuple

from .errors import DivisibilityError, WildInputError
from .symbolic import FracPoly

BVector = Tuple[int, ...]


@dataclass(frozen=True)
class SplittingType:
    """Ordered list of absolute (e, f) pairs over a base (e_base, f_base)."""

    components: Tuple[Tuple[int, int], ...]
    e_base: int = 1
    f_base: int = 1

    def __post_init__(self):
        comps = tuple((int(e), int(f)) for e, f in self.components)
        object.__setattr__(self, "components", comps)
        if self.e_base < 1 or self.f_base < 1:
            raise ValueError("base invariants must be positive")
        for e, f in comps:
            if e < 1 or f < 1:
                raise ValueError(f"invalid component ({e},{f})")
            if e % self.e_base:
                raise DivisibilityError(
                    f"e_base={self.e_base} does not divide component e={e}"
                )
            if f % self.f_base:
                raise DivisibilityError(
                    f"f_base={self.f_base} does not divide component f={f}"
                )

    # -- derived invariants -------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.components)

    @property
    def e_rel(self) -> Tuple[int, ...]:
        return tuple(e // self.e_base for e, _ in self.components)

    @property
    def f_rel(self) -> Tuple[int, ...]:
        return tuple(f // self.f_base for _, f in self.components)

    @property
    def rel_degrees(self) -> Tuple[int, ...]:
        return tuple(e * f for e, f in zip(self.e_rel, self.f_rel))

    @property
    def degree(self) -> int:
        """Total relative degree over the base field."""
        return sum(self.rel_degrees)

    def key(self) -> tuple:
        return (self.e_base, self.f_base, tuple(sorted(self.components)))

    def sorted(self) -> "SplittingType":
        return SplittingType(tuple(sorted(self.components)), self.e_base, self.f_base)

    def restrict(self, indices: Sequence[int]) -> "SplittingType":
        return SplittingType(
            tuple(self.components[i] for i in indices), self.e_base, self.f_base
        )

    def is_tame_at(self, p: int) -> bool:
        return all(math.gcd(p, e) == 1 for e in self.e_rel)

    def require_tame(self, p: int) -> None:
        if not self.is_tame_at(p):
            raise WildInputError(
                f"p={p} divides a relative ramification index of {self.display_pairs()}"
            )

    # -- display --------------------------------------------------------------

    def display_pairs(self) -> str:
        inner = ",".join(f"e{e}f{f}" for e, f in self.components)
        if (self.e_base, self.f_base) != (1, 1):
            return f"{inner}@e{self.e_base}f{self.f_base}"
        return inner

    def display_superscript(self) -> str:
        """f^e display string, the convention of the sample-value tables."""
        return "(" + " ".join(f"{f}^{e}" for e, f in self.components) + ")"


@dataclass(frozen=True)
class SlopeData:
    """Minimal slope min(b_i / e_rel_i), its argmin set, and denominator."""

    slope: Fraction
    argmin: Tuple[int, ...]
    denom: int


@dataclass(frozen=True)
class PartitionPlan:
    """A set partition of the component indices plus one orbit size per block."""

    blocks: Tuple[Tuple[int, ...], ...]
    orbit_sizes: Tuple[int, ...]

    def is_head(self, m: int) -> bool:
        return len(self.blocks) == 1 and len(self.blocks[0]) == m and self.orbit_sizes == (1,)


def perm_factor(sigma: SplittingType) -> int:
    """Product over distinct (e, f) of factorial(multiplicity)."""
    out = 1
    seen: dict = {}
    for comp in sigma.components:
        seen[comp] = seen.get(comp, 0) + 1
    for mult in seen.values():
        out *= math.factorial(mult)
    return out


def slope_data(sigma: SplittingType, b: BVector) -> SlopeData:
    if len(b) != sigma.m:
        raise ValueError("depth vector length does not match component count")
    e_rel = sigma.e_rel
    slopes = [Fraction(bi, ei) for bi, ei in zip(b, e_rel)]
    beta = min(slopes)
    argmin = tuple(i for i, s in enumerate(slopes) if s == beta)
    return SlopeData(beta, argmin, beta.denominator)


def bump_argmin(sigma: SplittingType, b: BVector) -> BVector:
    """Add 1 to b exactly on the argmin set of the slopes."""
    sd = slope_data(sigma, b)
    hit = set(sd.argmin)
    return tuple(bi + (1 if i in hit else 0) for i, bi in enumerate(b))


def base_ram_factor(sd: SlopeData, orbit_size: int) -> int:
    """Ramification gained by the base field when following an orbit of this size."""
    return sd.denom if orbit_size != 1 else 1


def falling_factorial(x: FracPoly, length: int) -> FracPoly:
    """prod_{j=0}^{length-1} (x - j); evaluates to 0 when the count is exceeded."""
    out = FracPoly(1, var=x.var)
    for j in range(length):
        out = out * (x - j)
    return out


def _prime_factors(n: int) -> Tuple[int, ...]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def mobius_orbit_count(f_base: int, k_prime: int) -> FracPoly:
    """Number of Frobenius orbits of exact size k' among the nonzero elements
    of the field with p^(f_base * k') elements, as a polynomial in p.

    Inclusion-exclusion over squarefree divisors:
    (1/k') * sum_{s | rad(k')} mu(s) (p^(f_base k'/s) - 1).
    """
    if k_prime < 1:
        raise ValueError("orbit size must be positive")
    primes = _prime_factors(k_prime)
    total = FracPoly(0, var="p")
    for bits in range(1 << len(primes)):
        sign = 1
        s = 1
        for idx, ell in enumerate(primes):
            if bits >> idx & 1:
                sign = -sign
                s *= ell
        term = FracPoly.monomial(f_base * (k_prime // s), var="p") - 1
        total = total + (term if sign > 0 else -term)
    return total / k_prime


def set_partitions(n: int) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """All set partitions of {0, ..., n-1} in restricted-growth-string order."""
    if n == 0:
        yield ()
        return

    def rec(i: int, rgs: list, mx: int):
        if i == n:
            nblocks = mx + 1
            blocks: list = [[] for _ in range(nblocks)]
            for idx, lab in enumerate(rgs):
                blocks[lab].append(idx)
            yield tuple(tuple(bl) for bl in blocks)
            return
        for v in range(mx + 2):
            rgs.append(v)
            yield from rec(i + 1, rgs, max(mx, v))
            rgs.pop()

    yield from rec(1, [0], 0)


def _divisors(n: int) -> Tuple[int, ...]:
    out = [d for d in range(1, n + 1) if n % d == 0]
    return tuple(out)


def enumerate_plans(sigma: SplittingType, b: BVector) -> Tuple[PartitionPlan, ...]:
    """All partition plans with potentially nonzero weight, head plan included.

    Blocks with orbit size n != 1 must consist of argmin components, carry an
    orbit size denom * t with t dividing every relative inertia degree in the
    block, and when the argmin set is proper, the single block holding its
    complement is forced to orbit size 1.
    """
    m = sigma.m
    sd = slope_data(sigma, b)
    arg = set(sd.argmin)
    outside = set(range(m)) - arg
    f_rel = sigma.f_rel
    plans = []
    for blocks in set_partitions(m):
        holder = None
        if outside:
            holding = [bi for bi, bl in enumerate(blocks) if any(i in outside for i in bl)]
            if len(holding) != 1 or not outside <= set(blocks[holding[0]]):
                continue
            holder = holding[0]
        options = []
        for bi, bl in enumerate(blocks):
            if holder is not None and bi == holder:
                options.append((1,))
                continue
            g = math.gcd(*(f_rel[i] for i in bl)) if len(bl) > 1 else f_rel[bl[0]]
            ns = [1] + [sd.denom * t for t in _divisors(g) if sd.denom * t != 1]
            options.append(tuple(ns))
        for sizes in product(*options):
            if sd.denom != 1 and sum(1 for n in sizes if n == 1) > 1:
                continue
            plans.append(PartitionPlan(blocks, sizes))
    return tuple(plans)


def plan_weight(sigma: SplittingType, b: BVector, plan: PartitionPlan) -> FracPoly:
    """Normalized count of leading-coefficient/uniformizer choices realizing
    the plan's orbit structure, as a polynomial in p.

    Returns the zero polynomial whenever any admissibility condition fails.
    """
    m = sigma.m
    sd = slope_data(sigma, b)
    arg = set(sd.argmin)
    f_rel = sigma.f_rel

    covered = sorted(i for bl in plan.blocks for i in bl)
    if covered != list(range(m)) or len(plan.orbit_sizes) != len(plan.blocks):
        raise ValueError("plan does not partition the component indices")

    zero = FracPoly(0, var="p")
    ones = [bi for bi, n in enumerate(plan.orbit_sizes) if n == 1]
    if sd.denom != 1 and len(ones) > 1:
        return zero
    outside = set(range(m)) - arg
    if outside:
        holding = [bi for bi, bl in enumerate(plan.blocks) if outside <= set(bl)]
        if not holding or plan.orbit_sizes[holding[0]] != 1:
            return zero
    for bl, n in zip(plan.blocks, plan.orbit_sizes):
        if n == 1:
            continue
        if n % sd.denom:
            return zero
        if not set(bl) <= arg:
            return zero
        if any(f_rel[i] % (n // sd.denom) for i in bl):
            return zero

    by_size: dict = {}
    for bl, n in zip(plan.blocks, plan.orbit_sizes):
        cnt, comps = by_size.get(n, (0, 0))
        by_size[n] = (cnt + 1, comps + len(bl))

    weight = FracPoly(1, var="p")
    for k, (n_blocks, n_comps) in sorted(by_size.items()):
        if k == 1:
            if sd.denom != 1:
                continue
            base_count = FracPoly.monomial(sigma.f_base, var="p")
            if not outside:
                weight = weight * falling_factorial(base_count, n_blocks)
            else:
                weight = weight * falling_factorial(base_count - 1, n_blocks - 1)
        else:
            kk = k // sd.denom
            weight = weight * Fraction(kk) ** n_comps
            weight = weight * falling_factorial(
                mobius_orbit_count(sigma.f_base, kk), n_blocks
            )
    return weight


def head_plan(m: int) -> PartitionPlan:
    return PartitionPlan((tuple(range(m)),), (1,))


@dataclass(frozen=True)
class TameClassCount:
    classes: int
    aut_order: int


def tame_class_count(e0: int, p: int, f0: int = 1) -> TameClassCount:
    """Isomorphism classes of tame (e0, f0) extensions over a base with
    residue field of size p, and the automorphism order of each.

    Raises WildInputError when p divides e0.
    """
    if math.gcd(p, e0) != 1:
        raise WildInputError(f"p={p} divides ramification index {e0}")
    g = math.gcd(p**f0 - 1, e0)
    return TameClassCount(classes=g, aut_order=f0 * g)
