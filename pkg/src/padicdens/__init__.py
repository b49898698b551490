"""Exact densities of polynomials over local fields by tame splitting type.

The package computes, as closed-form rational functions of the residue field
size, the density of polynomials over a local field that generate an etale
extension with a prescribed tame splitting type, together with an independent
combinatorial oracle that re-derives the same masses by direct enumeration of
truncated Teichmuller expansions.
"""

from .errors import (
    DivisibilityError,
    LengthMismatchError,
    NonIntegralExponentError,
    NoSeriesExpansionError,
    PadicDensError,
    RecursionGuardError,
    SigmaParseError,
    TooLargeError,
    VerificationError,
    WildInputError,
)
from .symbolic import (
    FracPoly,
    GenFun,
    Rat,
    check_inversion_symmetry,
    eval_t_as_p_power,
    gf_arith,
    rewrite_in_q,
    series_coefficients,
    substitute_t_power,
)
from .splitting import SplittingType
from .engine import (
    DensityResult,
    catalog,
    centered_monic_density,
    density_asymptotic,
    density_gen_fun,
    density_result,
    disc_gen_fun,
    min_disc_valuation,
    monic_density,
    splitting_density,
)
from .oracle import (
    TameFieldDesc,
    TeichExpansion,
    conjugates,
    count_orbit_choices,
    disc_valuation,
    exact_disc_masses,
    pair_valuation,
    sampled_disc_masses,
)

__version__ = "0.1.0"
