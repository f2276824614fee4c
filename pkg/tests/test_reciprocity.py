from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellrecip.cyclotomic import CycNumber
from ellrecip.errors import DomainError
from ellrecip.qseries import QExpansion
from ellrecip.reciprocity import (
    LogElement,
    PmElement,
    TadicElement,
    TowerElement,
    cocycle_delta1,
    corollary_sum,
    delta1,
    derive_d1,
    derive_d2,
    e_u1,
    exp_star_verify,
    generator_grid,
    group_law_check,
    log_theta_tower,
    padic_exp,
    pm_act,
    reciprocity_partial_sum,
    res_k_extract,
    rm_logtheta_check,
    trace_RM,
    weight_sym,
)

p, M, m = 5, 5, 1
one = CycNumber.one


def qM(r=1, T=4, s=0, level=M, prec=2):
    f = QExpansion.monomial(one(level), Fraction(r, level), level, prec, level)
    return TadicElement.monomial(T, f, s)


def t_elem(T=4, level=M, prec=2):
    return TadicElement.monomial(T, QExpansion.constant(1, level, prec, level), 1)


# -- R_M ---------------------------------------------------------------------

def test_trace_keeps_divisible_monomials():
    x = TowerElement(M, p, 1, 2, {(0, p): one(M)})
    assert trace_RM(x) == QExpansion.monomial(one(M), Fraction(1, M), M, 2, M)


def test_trace_kills_nontrivial_roots():
    x = TowerElement(M, p, 1, 2, {(1, p): one(M)})
    assert trace_RM(x).is_zero()


def test_trace_drops_nondivisible_exponents():
    x = TowerElement(M, p, 1, 2, {(0, 3): one(M), (0, 10): one(M)})
    assert trace_RM(x).exponents() == [Fraction(2, M)]


def test_from_terms_folds_roots():
    # zeta_25^(5 + 2) = zeta_5 zeta_25^2
    x = TowerElement.from_terms(M, p, 1, 2, [(7, 0, 1)])
    assert x.data == {(2, 0): CycNumber.zeta(M, 1)}


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("a,b", [(1, 2), (2, 1), (1, 0)])
def test_rm_logtheta(n, a, b):
    assert rm_logtheta_check(M, n, a, b, 2, p)["status"] == "PASS"


def test_rm_logtheta_log_q_bookkeeping():
    lhs = log_theta_tower(M, p, 1, 1, 2, 2).trace()
    assert lhs.uq == Fraction(1, 12) - Fraction(1, 2 * M * p)


def test_rm_logtheta_rejects_p_multiple():
    with pytest.raises(DomainError):
        rm_logtheta_check(M, 1, 5, 5, 2, p)


def test_rm_logtheta_rejects_small_level():
    with pytest.raises(DomainError):
        rm_logtheta_check(3, 1, 1, 2, 2, p)


def test_log_element_scale():
    x = log_theta_tower(M, p, 1, 1, 2, 2)
    assert x.scale(2).scale(Fraction(1, 2)) == x
    assert isinstance(x, LogElement)


# -- derivations ----------------------------------------------------------------

def test_d1_on_q():
    for level, coef in [(5, 1), (10, Fraction(1, 2))]:
        y = derive_d1(qM(level=level), m, p)
        assert y == qM(level=level, s=1).scale(coef)


def test_d2_on_t():
    assert derive_d2(t_elem(), m, p) == t_elem().scale(p**m)


@given(st.integers(1, 9), st.integers(0, 3), st.integers(1, 2))
def test_commutator(r, s, mm):
    x = qM(r=r, s=s)
    lhs = derive_d1(derive_d2(x, mm, p), mm, p) - derive_d2(derive_d1(x, mm, p), mm, p)
    assert lhs == derive_d1(x, mm, p).scale(-(p**mm))


def test_commutator_on_q_value():
    x = qM()
    lhs = derive_d1(derive_d2(x, m, p), m, p) - derive_d2(derive_d1(x, m, p), m, p)
    assert lhs == qM(s=1).scale(Fraction(-(p ** (2 * m)), M))


# -- P_m -----------------------------------------------------------------------

def test_padic_exp():
    assert padic_exp(0, p, 6) == 1
    e = padic_exp(p, p, 6)
    assert (e - 1 - p).numerator % p**2 == 0
    with pytest.raises(DomainError):
        padic_exp(1, p, 4)


def test_pm_element_domain():
    with pytest.raises(DomainError):
        PmElement(1, 0, 1, p)


def test_pm_identity():
    x = qM() + t_elem()
    assert pm_act(PmElement(0, 0, m, p), x, 6) == x


def test_pm_d1_exponential():
    y = pm_act(PmElement(p, 0, m, p), qM(), 6)
    for s in range(4):
        assert y.coeffs[s] == qM().coeffs[0].scale(Fraction(1, factorial(s)))


def test_pm_d2_exponential():
    y = pm_act(PmElement(0, p, m, p), t_elem(), 6)
    assert y == t_elem().scale(padic_exp(p, p, 6))


def test_group_law_grid():
    grid = generator_grid(m, p)
    for g1 in grid:
        for g2 in grid:
            assert group_law_check(g1, g2, M, 4, 2 * m + 2)["status"] == "PASS"


def test_group_law_identity_second_factor():
    g = PmElement(p, p, m, p)
    assert group_law_check(g, PmElement(0, 0, m, p), M, 4, 4)["status"] == "PASS"


def test_left_order_composition_fails():
    g1, g2 = PmElement(p, 0, m, p), PmElement(0, p, m, p)
    g12 = g1.mul(g2, 8)
    x = qM()
    lhs = pm_act(g1, pm_act(g2, x, 8), 8)
    rhs = pm_act(g12, x, 8)
    assert (lhs - rhs).p_order(p) < 2 * m + 2


def test_cocycle_linear_term_is_d1():
    for x in (qM(), qM(r=2, s=1), qM() + t_elem()):
        assert cocycle_delta1(x, m, p, 8) == derive_d1(x, m, p).scale(Fraction(1, p**m))


# -- delta, res_k, the limit ------------------------------------------------------

def test_delta1_vanishes_at_u_one():
    x = delta1(2, 1, M, 1, 1, 2, 2, 3, p)
    assert all(f.is_zero() for f in x.coeffs)


def test_delta1_lives_in_t_degree_one():
    assert delta1(3, 7, M, 1, 1, 2, 2, 3, p).t_degrees() == [1]


def test_res_k_examples():
    f = QExpansion.monomial(one(M), Fraction(1, M), M, 2, M)
    slot = TadicElement.monomial(3, f, 1)
    zero = slot.scale(0)
    got, flags = res_k_extract([slot, zero], 3)
    assert got == f and not flags["offSlotMass"]
    got, flags = res_k_extract([zero, slot], 3)
    assert got.is_zero() and flags["offSlots"] == [[1, 1]]
    with pytest.raises(DomainError):
        res_k_extract([slot], 3)


def test_res_k_of_weighted_delta():
    k, a, b = 3, 2, 1
    d = delta1(k, 7, M, 0, a, b, 2, 3, p)
    got, flags = res_k_extract(weight_sym(k, a, b, d), k)
    assert got == e_u1(7, M, p, 0, a, b, 2).scale(Fraction(a ** (k - 1), M))
    assert flags["offSlotMass"]


def test_lambda0_is_single_term():
    lam = reciprocity_partial_sum(2, 7, M, 1, 2, 0, 2, p)
    assert lam == e_u1(7, M, p, 0, 1, 2, 2)


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("n", [0, 1])
def test_corollary_matches_partial_sum(k, n):
    s, _ = corollary_sum(k, 7, M, 1, 2, n, 2, p)
    lam = reciprocity_partial_sum(k, 7, M, 1, 2, n, 2, p)
    assert s.scale(factorial(k - 2) * M) == lam


def test_exp_star_small():
    rep = exp_star_verify(2, 7, M, 1, 2, 2, 2, 2, p)
    assert rep["status"] == "PASS"
    assert rep["cauchyTable"] == [{"n": 1, "observedS": "2"}]


def test_exp_star_untwisted_probe_fails():
    rep = exp_star_verify(2, 7, M, 1, 2, 2, 2, 2, p, twisted=False)
    assert rep["status"] == "FAIL"
    assert Fraction(rep["finalDefectValuation"]) < 0


def test_exp_star_u_one_is_trivial():
    rep = exp_star_verify(2, 1, M, 1, 2, 2, 2, 2, p)
    assert rep["status"] == "PASS"
    assert rep["finalDefectValuation"] == "inf"


def test_exp_star_domain():
    with pytest.raises(DomainError):
        exp_star_verify(2, 7, M, 5, 10, 2, 2, 2, p)
    with pytest.raises(DomainError):
        exp_star_verify(2, 3, M, 1, 2, 2, 2, 2, p)
