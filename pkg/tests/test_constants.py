import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from amtlab import constants
from amtlab.constants import ExactConstant


def test_beta_star_low_dimensions():
    assert constants.build_context(1).beta_star == ExactConstant(Fraction(4), 1)
    # m = 2: 2 * 3! * |S^4| = 12 * 8 pi^2 / 3
    assert constants.build_context(2).beta_star == ExactConstant(Fraction(32), 2)


def test_sphere_measures_match_gamma_function():
    for l in range(1, 17):
        expected = 2 * math.pi ** ((l + 1) / 2) / math.gamma((l + 1) / 2)
        assert constants.sphere_measure(l).float_value == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("m", range(1, 9))
def test_identities_hold_exactly(m):
    ctx = constants.build_context(m)
    assert constants.check_identities(ctx)
    assert ctx.gamma_m == ctx.beta_star / 2 / m
    assert constants.h_constant(ctx, "definition") == constants.h_constant(ctx, "remark")


def test_h_values_small_m():
    # the defining sum runs over 1 <= j <= m-1: empty for m = 1
    assert constants.build_context(1).h_m.rational == 0
    # m = 2: (2/beta*) * (-1)^1 / 1
    h2 = constants.build_context(2).h_m
    assert h2 == ExactConstant(Fraction(-1, 16), -2)


def test_i_1_closed_form(ctx1):
    assert ctx1.i_m == pytest.approx(-1 / (4 * math.pi), rel=1e-10)


@pytest.mark.parametrize("bad", [0, 13, 1.5, -2])
def test_build_context_rejects_bad_m(bad):
    with pytest.raises(ValueError):
        constants.build_context(bad)


def test_i_m_rejects_loose_tolerance():
    with pytest.raises(ValueError):
        constants.compute_i_m(constants.build_context(1), rel_tol=1e-4)


def test_threshold_for_unit_disk(ctx1):
    thr = constants.blowup_threshold(ctx1, 0.0, math.pi)
    assert thr == pytest.approx(math.pi * (1 + math.e), rel=1e-12)


def test_threshold_requires_i_m():
    with pytest.raises(ValueError):
        constants.blowup_threshold(constants.build_context(1), 0.0, 1.0)


def test_sum_of_mixed_pi_powers_rejected():
    with pytest.raises(ValueError):
        ExactConstant(Fraction(1), 1) + ExactConstant(Fraction(1), 2)


def test_float_of_huge_rational():
    c = ExactConstant(Fraction(10**400 + 1, 10**399))
    assert c.float_value == pytest.approx(10.0, rel=1e-15)


fractions_ = st.fractions(min_value=-1000, max_value=1000).filter(lambda q: q != 0)


@given(fractions_, fractions_, st.integers(-4, 4), st.integers(-4, 4))
def test_exact_arithmetic_matches_floats(p, q, a, b):
    x, y = ExactConstant(p, a), ExactConstant(q, b)
    prod = x * y
    assert prod.pi_power == a + b
    assert prod.float_value == pytest.approx(x.float_value * y.float_value, rel=1e-12)
    assert (prod / y) == x


def test_i_2_closed_form(ctx2):
    # constant term of the exact bubble energy on B_R in dimension 4, minus H_2
    assert ctx2.i_m == pytest.approx(-5 / (96 * math.pi**2), rel=1e-12)
