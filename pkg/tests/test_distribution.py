from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellrecip.distribution import (
    CosetBox,
    LCFunction,
    borel_equivariance_check,
    borel_siegel_check,
    distribution_relation_check,
    integrate_eis_dR,
    integrate_eis_dR_u,
    siegel_composition_check,
    siegel_distribution_check,
    siegel_dlog_check,
    siegel_lift_check,
)
from ellrecip.eisenstein import TorsionIndex, eisenstein_F
from ellrecip.errors import DomainError


def ok(rep):
    return rep["status"] == "PASS"


def test_integrate_examples():
    x = integrate_eis_dR(4, CosetBox(1, 0, 0), 3)
    assert x.coeff(0) == Fraction(1, 120)
    y = integrate_eis_dR(1, CosetBox(2, 1, 1), 3)
    assert y == eisenstein_F(1, TorsionIndex(2, 1, 1), 3) * Fraction(1, 2)
    with pytest.raises(DomainError):
        integrate_eis_dR(2, CosetBox(1, 0, 0), 3)


def test_u_twisted_integral_vanishes_at_u_one():
    assert integrate_eis_dR_u(3, 1, CosetBox(5, 1, 2), 2, 5).is_zero()


def test_distribution_examples():
    assert ok(distribution_relation_check(3, CosetBox(1, 0, 0), 2, 3))
    assert ok(distribution_relation_check(1, CosetBox(5, 1, 2), 2, 3))
    assert ok(distribution_relation_check(4, CosetBox(2, 1, 0), 1, 3))


@given(
    st.sampled_from([1, 3, 4]),
    st.sampled_from([1, 2, 5]),
    st.integers(0, 4),
    st.integers(0, 4),
    st.sampled_from([2, 3]),
)
def test_distribution_relation_property(k, r, a, b, D):
    assert ok(distribution_relation_check(k, CosetBox(r, a, b), D, 2))


def test_lc_function_refinement_is_identity():
    box = CosetBox(2, 1, 0)
    assert LCFunction([(1, box)]) == LCFunction([(1, s) for s in box.refine(3)])
    assert LCFunction([(1, box)]) != LCFunction([(1, s) for s in box.refine(3)[1:]])


def test_lc_function_integral_is_refinement_invariant():
    box = CosetBox(1, 0, 0)
    f = LCFunction([(1, box)])
    g = LCFunction([(1, s) for s in box.refine(2)])
    x, y = f.integrate(3, 2), g.integrate(3, 2)
    assert x.embed(y.level) == y


def test_siegel_distribution_examples():
    rep = siegel_distribution_check(5, CosetBox(2, 0, 1), 3)
    assert ok(rep) and rep["strict"]
    assert ok(siegel_distribution_check(5, CosetBox(2, 0, 1), 1))


def test_siegel_distribution_records_root_of_unity():
    # the refinement holds up to a root of unity; for c = 7, D = 2 it is -1
    rep = siegel_distribution_check(7, CosetBox(3, 1, 2), 2)
    assert ok(rep)
    assert rep["epsilon"] == "-1" and not rep["strict"]


def test_siegel_distribution_failure_injection():
    rep = siegel_distribution_check(5, CosetBox(2, 0, 1), 3, perturb=True)
    assert rep["status"] == "FAIL"
    assert rep["firstFailure"]["index"] == [2, 0, 1]


def test_siegel_distribution_excluded_coset():
    rep = siegel_distribution_check(5, CosetBox(1, 0, 0), 2)
    assert "excluded" in rep


def test_siegel_distribution_rejects_bad_c():
    with pytest.raises(DomainError):
        siegel_distribution_check(5, CosetBox(2, 0, 1), 5)


@pytest.mark.parametrize("k", [1, 3, 4])
def test_borel_equivariance_level5(k):
    assert ok(borel_equivariance_check(k, 5, 2))


def test_borel_identity_only():
    assert ok(borel_equivariance_check(3, 5, 2, ds=[1]))


def test_borel_siegel():
    assert ok(borel_siegel_check(5, 3))


@pytest.mark.parametrize("c,L", [(5, 2), (7, 3)])
def test_siegel_lift_and_dlog(c, L):
    assert ok(siegel_lift_check(c, L))
    assert ok(siegel_dlog_check(c, L))


def test_siegel_composition():
    rep = siegel_composition_check(5, 7, 3)
    assert ok(rep) and rep["checkedIndices"] > 0
