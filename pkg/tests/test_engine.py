"""Engine recursion and density assembly against hand-derived closed forms."""

import itertools
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction as F

import pytest

from padicdens import engine
from padicdens.engine import (
    branch_sum,
    catalog,
    centered_monic_density,
    clear_memo,
    degree_slice,
    density_asymptotic,
    density_gen_fun,
    density_result,
    disc_gen_fun,
    leading_coeff_weight,
    min_disc_valuation,
    monic_density,
    splitting_density,
)
from padicdens.errors import RecursionGuardError
from padicdens.splitting import SplittingType
from padicdens.symbolic import (
    FracPoly,
    GenFun,
    check_inversion_symmetry,
    series_coefficients,
)

P = GenFun.monomial(p_exp=1)
T = GenFun.monomial(t_exp=1)

S11 = SplittingType(((1, 1),))
S11x2 = SplittingType(((1, 1), (1, 1)))
S12 = SplittingType(((1, 2),))
S21 = SplittingType(((2, 1),))


def test_leading_coeff_weight():
    assert leading_coeff_weight(0) == FracPoly(1)
    assert leading_coeff_weight(1) == FracPoly({1: 1}, {1: 1, 0: 1})
    assert leading_coeff_weight(2) == FracPoly({3: 1, 2: -1}, {3: 1, 0: -1})


def test_branch_sum_hand_values():
    assert branch_sum(S11x2, (0, 0)) == (P - 1) / P
    assert branch_sum(S12, (0,)) == (P**2 - P) / P**2
    assert branch_sum(S21, (1,)) == (P - 1) * T / P**2


def test_gen_fun_hand_values():
    assert disc_gen_fun(S11x2, (0, 0)) == (P - 1) / (P - T**2)
    assert disc_gen_fun(S12, (0,)) == (P - 1) / (P - T**2)
    assert disc_gen_fun(S21, (0,)) == (P - 1) * T / (P - T**2)


def test_gen_fun_base_case():
    assert disc_gen_fun(S11, (3,)) == GenFun(1) / P**3
    deep = SplittingType(((2, 3),), 2, 3)
    assert disc_gen_fun(deep, (2,)) == GenFun.monomial(p_exp=-6)


GOLDEN_RHO = [
    (S11x2, FracPoly(F(1, 2))),
    (S12, FracPoly({2: 1, 1: -1, 0: 1}, {2: 2, 1: 2, 0: 2})),
    (
        SplittingType(((1, 1), (1, 1), (1, 1))),
        FracPoly({4: 1, 2: 2, 0: 1}, {4: 6, 3: 6, 2: 6, 1: 6, 0: 6}),
    ),
    (
        SplittingType(((1, 1), (1, 2))),
        FracPoly({4: 1, 0: 1}, {4: 2, 3: 2, 2: 2, 1: 2, 0: 2}),
    ),
    (S21, FracPoly({1: 1}, {2: 1, 1: 1, 0: 1})),
]


@pytest.mark.parametrize("sigma,expected", GOLDEN_RHO)
def test_densities(sigma, expected):
    assert splitting_density(sigma) == expected


def test_monic_density_hand_values():
    assert monic_density(S11) == FracPoly(1)
    assert monic_density(S11x2) == FracPoly({1: 1}, {1: 2, 0: 2})
    assert monic_density(S21) == FracPoly(1, {1: 1, 0: 1})


def test_centered_monic_density_hand_values():
    assert centered_monic_density(S11) == FracPoly(1)
    assert centered_monic_density(S11x2) == FracPoly(1, {1: 2, 0: 2})
    assert centered_monic_density(S21) == FracPoly({1: 1}, {1: 1, 0: 1})


def test_asymptotics():
    assert density_asymptotic(S11x2) == FracPoly(F(1, 2))
    assert density_asymptotic(S12) == FracPoly(F(1, 2))
    assert density_asymptotic(S21) == FracPoly(1, {1: 1})


def test_min_disc_valuation():
    assert min_disc_valuation(S11x2) == 0
    assert min_disc_valuation(S21) == 1
    assert min_disc_valuation(SplittingType(((3, 2),))) == 4


def test_measure_completeness():
    """Total mass over all valuations equals the cylinder measure."""
    for sigma in catalog(3):
        for b in itertools.product(range(3), repeat=sigma.m):
            total = disc_gen_fun(sigma, b).eval_t_as_p_power(0)
            expected = FracPoly.monomial(
                -sum(bi * f for bi, (_, f) in zip(b, sigma.components)), var="p"
            )
            assert total == expected, (sigma, b)


@pytest.mark.parametrize("d", [2, 3])
def test_partition_of_unity_rho(d):
    total = sum((splitting_density(s) for s in degree_slice(d)), FracPoly(0))
    assert total == FracPoly(1)


def test_partition_of_unity_monic():
    ta = sum((monic_density(s) for s in degree_slice(2)), FracPoly(0))
    tb = sum((centered_monic_density(s) for s in degree_slice(2)), FracPoly(0))
    assert ta == FracPoly(1)
    assert tb == FracPoly(1)


def test_functional_equation_small_catalog():
    for eb, fb in ((1, 1), (2, 1), (1, 2)):
        for sigma in catalog(3, eb, fb):
            ok, witness = check_inversion_symmetry(splitting_density(sigma))
            assert ok, (sigma, witness)


def test_duality_small_catalog():
    for sigma in catalog(3):
        a = monic_density(sigma)
        b = centered_monic_density(sigma)
        assert (a.subs_inverse() - b).is_zero, sigma


def test_bivariate_specializes_to_univariate():
    for sigma in (S12, S21, S11x2):
        biv = density_gen_fun(sigma)
        univ = biv.eval_t_as_p_power(F(-sigma.e_base * sigma.f_base, 2))
        from padicdens.symbolic import rewrite_in_q

        assert rewrite_in_q(univ, sigma.f_base) == splitting_density(sigma)


def test_memoization_component_order_independent():
    clear_memo()
    a = disc_gen_fun(SplittingType(((1, 2), (2, 1), (1, 1))), (1, 0, 1))
    clear_memo()
    b = disc_gen_fun(SplittingType(((1, 1), (2, 1), (1, 2))), (1, 0, 1))
    clear_memo()
    c = disc_gen_fun(SplittingType(((2, 1), (1, 1), (1, 2))), (0, 1, 1))
    assert a == b == c


def test_memoization_call_order_independent():
    clear_memo()
    top_first = splitting_density(SplittingType(((1, 1), (2, 1))))
    clear_memo()
    disc_gen_fun(S21, (1,))  # prime the cache bottom-up
    disc_gen_fun(S11, (1,))
    top_second = splitting_density(SplittingType(((1, 1), (2, 1))))
    assert top_first == top_second


def test_concurrent_calls_agree():
    clear_memo()
    sigma = SplittingType(((1, 2), (2, 1)))
    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(lambda _: splitting_density(sigma), range(8)))
    assert all(r == results[0] for r in results)


def test_recursion_guard_trips():
    clear_memo()
    with pytest.raises(RecursionGuardError):
        disc_gen_fun(SplittingType(((2, 1), (3, 1))), (0, 0), _depth=10**7, _limit=1)
    clear_memo()


def test_density_result_bundle():
    res = density_result(S12)
    assert res.functional_eq_holds
    assert res.rho_q == GOLDEN_RHO[1][1]
    assert res.asymptotic == FracPoly(F(1, 2))
    # all q-exponents integral by construction
    assert all(e.denominator == 1 for e in res.rho_q.exponents)


def test_leading_coeff_boundary_at_four_split_factors():
    """The near-1 deficiency of the minimal-valuation mass grows like
    d(d-1)/2 / p; four split linear factors sit just above 5/p."""
    sigma = SplittingType(((1, 1),) * 4)
    g = disc_gen_fun(sigma, (0, 0, 0, 0))
    lead = series_coefficients(g, 0)[F(0)]
    # exact value (p-1)(p-2)(p-3)/p^3 at p = 1000
    dev = abs(lead.evaluate(1000) - 1)
    assert dev == F(5989006, 10**9)
    assert F(5, 1000) < dev <= F(6, 1000)


def test_catalog_counts():
    assert len(degree_slice(2)) == 3
    assert len(degree_slice(3)) == 5
    assert len(degree_slice(4)) == 11
    assert len(degree_slice(5)) == 17
    assert all(s.degree <= 4 for s in catalog(4, 2, 1))


def test_partition_of_unity_degree_five():
    # exercises the univariate assembly on the largest default-catalog slice
    total = sum((splitting_density(s) for s in degree_slice(5)), FracPoly(0))
    assert total == FracPoly(1)


def test_memo_cap_env(monkeypatch):
    monkeypatch.setenv("PADICDENS_MEMO_CAP", "2")
    clear_memo()
    value = splitting_density(SplittingType(((1, 1), (2, 1))))
    assert value == FracPoly({3: 1, 1: 1}, {4: 1, 3: 1, 2: 1, 1: 1, 0: 1})
    assert len(engine._MEMO) <= 3  # cap clears before every insert beyond it
    monkeypatch.delenv("PADICDENS_MEMO_CAP")
    clear_memo()


def test_bivariate_symmetry_degree_four():
    for sigma in degree_slice(4):
        ok, _ = check_inversion_symmetry(density_gen_fun(sigma))
        assert ok, sigma
