"""Independent verification by direct manipulation of truncated Teichmuller expansions.

Elements of a tame extension are modeled as truncated expansions
sum a_n pi_j^n where each coefficient is zero or a root of unity of order
p^f - 1, encoded purely by its exponent.  In a tame extension the difference
of two distinct stored coefficients is automatically a p-adic unit (both are
prime-to-p roots of unity), so valuations of differences reduce to
first-differing-slot comparisons on exponents; no field arithmetic is needed
and every computed valuation is exact.

The oracle works over the base (e_base, f_base) = (1, 1) only.  Deeper bases
are exercised indirectly: the engine's recursion visits them through its
sub-calls while the oracle pins down the top level for every small splitting
type.

Enumeration is embarrassingly parallel over coefficient patterns; the
implementation vectorizes it with numpy in fixed chunk order, so reports are
byte-stable for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import LengthMismatchError, TooLargeError, WildInputError
from .splitting import BVector, SplittingType, mobius_orbit_count

ZERO = -1  # sentinel for a zero coefficient in exponent arrays


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _require_tame_prime(p: int, es: Sequence[int]) -> None:
    if not _is_prime(p):
        raise WildInputError(f"{p} is not prime")
    for e in es:
        if math.gcd(p, e) != 1:
            raise WildInputError(f"p={p} divides ramification index {e}")


@dataclass(frozen=True)
class TameFieldDesc:
    """A tame extension of Q_p: unramified of degree f, then the e-th root of
    zeta^j * p, with j indexing the isomorphism class."""

    p: int
    e: int
    f: int
    j: int = 0

    def __post_init__(self):
        _require_tame_prime(self.p, (self.e,))
        if not 0 <= self.j < math.gcd(self.p**self.f - 1, self.e):
            raise ValueError("class index j out of range")

    @property
    def root_order(self) -> int:
        return self.p**self.f - 1

    @property
    def lattice(self) -> int:
        """Order of the root-of-unity lattice the slot exponents live in."""
        return self.e * (self.p**self.f - 1)


@dataclass(frozen=True)
class TeichExpansion:
    """Truncated expansion of an element: per-slot coefficient exponent.

    Slot n holds the coefficient of pi_j^n, encoded as an exponent modulo
    e*(p^f - 1) that is a multiple of e (so the coefficient is an honest
    (p^f - 1)-th root of unity), or None for a zero coefficient.  Slots
    before start_slot are zero.
    """

    field: TameFieldDesc
    slots: Tuple[Optional[int], ...]
    start_slot: int = 0

    def __post_init__(self):
        e = self.field.e
        m = self.field.lattice
        cleaned = []
        for n, s in enumerate(self.slots):
            if n < self.start_slot:
                if s is not None:
                    raise ValueError("nonzero slot before start_slot")
                cleaned.append(None)
            elif s is None:
                cleaned.append(None)
            else:
                s = int(s) % m
                if s % e:
                    raise ValueError(f"slot {n} exponent {s} is not a root of unity code")
                cleaned.append(s)
        object.__setattr__(self, "slots", tuple(cleaned))

    @classmethod
    def from_root_exponents(
        cls, field: TameFieldDesc, coeffs: Dict[int, Optional[int]], length: int
    ) -> "TeichExpansion":
        """coeffs maps slot -> exponent of the (p^f - 1)-th root of unity."""
        slots: list = [None] * length
        for n, c in coeffs.items():
            if c is not None:
                slots[n] = (field.e * (c % field.root_order)) % field.lattice
        return cls(field, tuple(slots))


@dataclass(frozen=True)
class CommonExpansion:
    """Expansion over the shared uniformizer p^(1/E) with exponents mod M.

    Slot m holds the coefficient of p^(m/E) as an exponent of the order-M
    root of unity, or None.  Comparable slot-by-slot across components.
    """

    E: int
    M: int
    slots: Tuple[Optional[int], ...]


def _conjugate_common_slots(
    x: TeichExpansion, r: int, s: int, E: int, M: int, depth: int
) -> Tuple[Optional[int], ...]:
    """Common-lattice slot exponents of the (r, s) conjugate of x.

    Frobenius acts r times on every coefficient; the uniformizer root is
    twisted by the s-th e-th root of unity; the class twist j enters through
    pi_j^n = zeta^(nj) p^(n/e).
    """
    fld = x.field
    p, e, f, j = fld.p, fld.e, fld.f, fld.j
    m_local = fld.lattice
    scale = M // m_local
    step = E // e
    pr = pow(p, r, m_local)
    out: list = [None] * depth
    for n, a in enumerate(x.slots):
        mc = n * step
        if mc >= depth:
            break
        if a is None:
            continue
        code = ((a + n * j) * pr + n * s * (p**f - 1)) % m_local
        out[mc] = (code * scale) % M
    return tuple(out)


def conjugates(
    x: TeichExpansion, E: int | None = None, M: int | None = None,
    depth: int | None = None,
) -> list:
    """The e*f formal conjugates of x as common expansions.

    The multiset is indexed by (Frobenius power r, uniformizer twist s);
    duplicates are kept, distinctness is the caller's concern.
    """
    fld = x.field
    if E is None:
        E = fld.e
    if M is None:
        M = fld.lattice
    if E % fld.e or M % fld.lattice:
        raise LengthMismatchError("common lattice does not refine the field lattice")
    if depth is None:
        depth = len(x.slots) * E // fld.e
    return [
        CommonExpansion(E, M, _conjugate_common_slots(x, r, s, E, M, depth))
        for r in range(fld.f)
        for s in range(fld.e)
    ]


def pair_valuation(x: CommonExpansion, y: CommonExpansion) -> Optional[Fraction]:
    """Valuation of the difference: (first differing slot)/E.

    None means unresolved: the stored slots agree, so the difference has
    valuation at least len(slots)/E.
    """
    if (x.E, x.M, len(x.slots)) != (y.E, y.M, len(y.slots)):
        raise LengthMismatchError("expansions live over different lattices")
    for n, (a, b) in enumerate(zip(x.slots, y.slots)):
        if a != b:
            return Fraction(n, x.E)
    return None


def disc_valuation(parts: Sequence[TeichExpansion]) -> Optional[Fraction]:
    """Valuation of the product of pairwise differences of all conjugates.

    A single conjugate gives the empty product, valuation 0.  None when any
    needed pair is unresolved within the stored slots.
    """
    E = math.lcm(*(x.field.e for x in parts))
    M = math.lcm(*(x.field.lattice for x in parts))
    depth = min(len(x.slots) * E // x.field.e for x in parts)
    conj: list = []
    for x in parts:
        conj.extend(conjugates(x, E, M, depth))
    total = Fraction(0)
    for a, b in combinations(conj, 2):
        v = pair_valuation(a, b)
        if v is None:
            return None
        total += 2 * v
    return total


# ---------------------------------------------------------------------------
# exact enumeration / Monte Carlo of discriminant-valuation masses
# ---------------------------------------------------------------------------

def _layout(sigma: SplittingType, b: BVector, c_max: int, p: int):
    """Slot layout shared by the exact and sampled enumerations.

    The common truncation depth N satisfies 2N/E > c_max, so a single
    unresolved ordered pair already pushes the discriminant valuation beyond
    c_max and unresolved patterns can be bucketed wholesale.
    """
    comps = sigma.components
    E = math.lcm(*(e for e, _ in comps))
    M = math.lcm(*(e * (p**f - 1) for e, f in comps))
    n_common = (E * c_max) // 2 + 1
    per = []
    for (e, f), bi in zip(comps, b):
        n_slots = max(-(-n_common * e // E), bi)  # ceil, at least b_i
        per.append(
            dict(
                e=e,
                f=f,
                b=bi,
                n_slots=n_slots,
                radix=p**f,
                scale=M // (e * (p**f - 1)),
                step=E // e,
                gcd_j=math.gcd(p**f - 1, e),
            )
        )
    return E, M, n_common, per


def _slot_codes(dig, n, j, comp, p, M):
    """Vectorized common-lattice exponent for one (slot, conjugate) choice.

    dig is an integer array of Teichmuller digits (0 = zero coefficient,
    v >= 1 encodes the root-of-unity exponent v - 1); j may be scalar or an
    array aligned with dig.
    """
    e, f = comp["e"], comp["f"]
    r, s = comp["_r"], comp["_s"]
    m_local = e * (p**f - 1)
    pr = pow(p, r, m_local)
    code = ((e * (dig - 1) + n * j) * pr + n * s * (p**f - 1)) % m_local
    code = code * comp["scale"] % M
    return np.where(dig == 0, ZERO, code)


def _valuations_for_digits(digit_arrays, jays, sigma, layout, p):
    """Sum of ordered pairwise first-difference slots, in units of 1/E.

    Returns (v_times_E int array, resolved bool array).
    """
    E, M, n_common, per = layout
    n = len(next(iter(digit_arrays.values())))
    conj_rows = []
    for i, comp in enumerate(per):
        for r in range(comp["f"]):
            for s in range(comp["e"]):
                conj_rows.append((i, r, s))
    codes = np.full((n, len(conj_rows), n_common), ZERO, dtype=np.int64)
    for row, (i, r, s) in enumerate(conj_rows):
        comp = dict(per[i])
        comp["_r"], comp["_s"] = r, s
        for slot in range(comp["b"], comp["n_slots"]):
            mc = slot * comp["step"]
            if mc >= n_common:
                continue
            dig = digit_arrays[(i, slot)]
            codes[:, row, mc] = _slot_codes(dig, slot, jays[i], comp, p, M)
    v = np.zeros(n, dtype=np.int64)
    resolved = np.ones(n, dtype=bool)
    for a, bb in combinations(range(len(conj_rows)), 2):
        neq = codes[:, a, :] != codes[:, bb, :]
        any_diff = neq.any(axis=1)
        first = np.argmax(neq, axis=1)
        resolved &= any_diff
        v += np.where(any_diff, 2 * first, 0)
    return v, resolved


def exact_disc_masses(
    sigma: SplittingType,
    b: BVector,
    c_max: int,
    p: int,
    pattern_guard: int = 40_000_000,
    chunk: int = 1 << 18,
) -> Dict[int, Fraction]:
    """Exact masses {c: measure of tuples with discriminant valuation c} for
    all c <= c_max, by exhausting truncated coefficient patterns and averaging
    over the isomorphism classes of each component.

    Base must be (1, 1); the prime must be tame for sigma.
    """
    if (sigma.e_base, sigma.f_base) != (1, 1):
        raise ValueError("the enumeration oracle works over the base (1,1) only")
    if len(b) != sigma.m or any(x < 0 for x in b):
        raise ValueError("bad depth vector")
    _require_tame_prime(p, [e for e, _ in sigma.components])
    layout = _layout(sigma, b, c_max, p)
    E, M, n_common, per = layout

    slots = [(i, slot) for i, comp in enumerate(per) for slot in range(comp["b"], comp["n_slots"])]
    total_patterns = 1
    for i, _ in slots:
        total_patterns *= per[i]["radix"]
    n_jvecs = 1
    for comp in per:
        n_jvecs *= comp["gcd_j"]
    if total_patterns * n_jvecs > pattern_guard:
        raise TooLargeError(
            f"{total_patterns} patterns x {n_jvecs} classes exceeds the guard"
        )

    counts: Dict[int, int] = {}
    for jvec in product(*(range(comp["gcd_j"]) for comp in per)):
        lo = 0
        while lo < total_patterns or (total_patterns == 0 and lo == 0):
            hi = min(lo + chunk, total_patterns)
            idx = np.arange(lo, max(hi, lo + 1), dtype=np.int64)
            if total_patterns == 0:
                idx = np.zeros(1, dtype=np.int64)
            digit_arrays = {}
            stride = 1
            for key in slots:
                radix = per[key[0]]["radix"]
                digit_arrays[key] = (idx // stride) % radix
                stride *= radix
            if not slots:
                digit_arrays = {(-1, -1): np.zeros(len(idx), dtype=np.int64)}
            v, resolved = _valuations_for_digits(digit_arrays, jvec, sigma, layout, p)
            assert (v[resolved] % E == 0).all(), "resolved valuation not integral"
            cs = v[resolved] // E
            keep = cs <= c_max
            vals, tallies = np.unique(cs[keep], return_counts=True)
            for c, tally in zip(vals.tolist(), tallies.tolist()):
                counts[c] = counts.get(c, 0) + tally
            lo = hi
            if total_patterns == 0:
                break

    mass_exp = sum(comp["f"] * comp["n_slots"] for comp in per)
    unit = Fraction(1, p**mass_exp * n_jvecs)
    return {c: counts[c] * unit for c in sorted(counts)}


@dataclass(frozen=True)
class MassEstimate:
    estimate: float
    stderr: float


def sampled_disc_masses(
    sigma: SplittingType,
    b: BVector,
    c_max: int,
    p: int,
    samples: int,
    seed: int,
) -> Dict[int, MassEstimate]:
    """Monte Carlo version of :func:`exact_disc_masses`.

    Unbiased estimates of the same unconditional masses, with standard
    errors; deterministic for a fixed seed.
    """
    if (sigma.e_base, sigma.f_base) != (1, 1):
        raise ValueError("the sampling oracle works over the base (1,1) only")
    _require_tame_prime(p, [e for e, _ in sigma.components])
    layout = _layout(sigma, b, c_max, p)
    E, M, n_common, per = layout
    rng = np.random.default_rng(seed)

    digit_arrays = {}
    for i, comp in enumerate(per):
        for slot in range(comp["b"], comp["n_slots"]):
            digit_arrays[(i, slot)] = rng.integers(
                0, comp["radix"], size=samples, dtype=np.int64
            )
    if not digit_arrays:
        digit_arrays[(-1, -1)] = np.zeros(samples, dtype=np.int64)
    jays = [
        rng.integers(0, comp["gcd_j"], size=samples, dtype=np.int64) for comp in per
    ]
    v, resolved = _valuations_for_digits(digit_arrays, jays, sigma, layout, p)
    cs = v // E

    # conditioning: samples live in the b-cylinder, whose measure rescales
    # the conditional frequencies to unconditional masses
    cond = Fraction(1)
    for comp in per:
        cond /= Fraction(p) ** (comp["f"] * comp["b"])
    out: Dict[int, MassEstimate] = {}
    for c in range(c_max + 1):
        hits = int(np.count_nonzero(resolved & (v == c * E)))
        if not hits:
            continue
        phat = hits / samples
        stderr = math.sqrt(phat * (1 - phat) / samples)
        out[c] = MassEstimate(phat * float(cond), stderr * float(cond))
    return out


# ---------------------------------------------------------------------------
# conjugate-orbit counting and discriminant parity
# ---------------------------------------------------------------------------

def orbit_size(e: int, f: int, b: int, p: int, j: int, a_exp: int) -> int:
    """Number of Galois conjugates of (root of unity a) * pi_j^b, computed on
    exponents modulo e*(p^f - 1)."""
    m = e * (p**f - 1)
    x = (a_exp * e + j * b) % m
    seen = set()
    for r in range(f):
        base = x * pow(p, r, m) % m
        for s in range(e):
            seen.add((base + b * s * (p**f - 1)) % m)
    return len(seen)


def count_orbit_choices(e: int, f: int, b: int, k: int, p: int) -> int:
    """Brute-force count of pairs (nonzero Teichmuller a, class index j) whose
    element a * pi_j^b has exactly k Galois conjugates."""
    _require_tame_prime(p, (e,))
    g = math.gcd(p**f - 1, e)
    total = 0
    for a_exp in range(p**f - 1):
        for j in range(g):
            if orbit_size(e, f, b, p, j, a_exp) == k:
                total += 1
    return total


def orbit_choices_closed_form(e: int, f: int, b: int, k: int, p: int) -> int:
    """The closed-form count: gcd * (k/denom) * (orbit-count polynomial at p),
    vanishing unless denom | k and (k/denom) | f."""
    denom = e // math.gcd(b, e) if b else 1
    if k % denom or f % (k // denom):
        return 0
    g = math.gcd(p**f - 1, e)
    kk = k // denom
    val = mobius_orbit_count(1, kk).evaluate(p)
    assert val.denominator == 1
    return g * kk * int(val)


def check_index_parity(
    field: TameFieldDesc, n_samples: int = 200, seed: int = 0, depth: int | None = None
) -> Dict[str, int]:
    """Sample elements of the extension and assert that the discriminant
    valuation exceeds the field discriminant (e-1)f by a nonnegative even
    integer.  Degenerate samples (not generating, or unresolved at the stored
    depth) are discarded and counted."""
    e, f, p = field.e, field.f, field.p
    depth = depth if depth is not None else 4 * e * f + 4
    rng = np.random.default_rng(seed)
    v_field = (e - 1) * f
    report = {"checked": 0, "discarded": 0, "parity_ok": 0}
    for _ in range(n_samples):
        digits = rng.integers(0, p**f, size=depth)
        slots = tuple(
            None if d == 0 else (e * (int(d) - 1)) % field.lattice for d in digits
        )
        x = TeichExpansion(field, slots)
        conj = conjugates(x)
        distinct = len({c.slots for c in conj}) == e * f
        v = disc_valuation((x,))
        if not distinct or v is None:
            report["discarded"] += 1
            continue
        report["checked"] += 1
        diff = v - v_field
        if diff >= 0 and diff.denominator == 1 and int(diff) % 2 == 0:
            report["parity_ok"] += 1
    return report
