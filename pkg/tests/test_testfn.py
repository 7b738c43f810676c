import math

import numpy as np
import pytest

from amtlab import testfn
from amtlab.extremal import ball_volume
from amtlab.verify import context


@pytest.fixture(scope="module")
def tf1(ctx1, green1):
    return testfn.assemble_test_function(ctx1, 0.0, green1, 1e-4)


def test_matching_is_trivial_for_m1(ctx1):
    A, b = testfn.matching_system(ctx1, 10.0)
    assert A.shape == (0, 0)
    d = testfn.matching_d(ctx1, 10.0)
    # d_0 = -eta_0(R) - (1/2pi) log(R/2)
    expected = math.log1p(25.0) / (4 * math.pi) - math.log(5.0) / (2 * math.pi)
    assert d == pytest.approx((expected,), rel=1e-14)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_matching_residuals(m):
    ctx = context(m)
    for eps in (1e-2, 1e-8):
        p = testfn.build_matching_polynomial(ctx, eps, 16.0, 1.0)
        assert max(p.residuals) < 1e-9
        assert len(p.c_coeffs) == m


def test_matching_d_decay(ctx2):
    for fit in testfn.d_decay_fits(ctx2).values():
        assert fit.exponent == pytest.approx(2.0, abs=0.3)


def test_matching_input_checks(ctx2):
    with pytest.raises(ValueError):
        testfn.build_matching_polynomial(ctx2, 0.0, 10.0, 1.0)
    with pytest.raises(ValueError):
        testfn.build_matching_polynomial(ctx2, 1e-3, 2.0, 1.0)
    with pytest.raises(testfn.MatchingError):
        testfn.build_matching_polynomial(ctx2, 1e-3, 16.0, 1.0, tol=0.0)


def test_remark_constants_stay_bounded(ctx2):
    kv, kr = testfn.remark_bound_constants(ctx2)
    assert max(kv) < 10 * min(kv) + 1e-12
    assert max(kr) < 10 * min(kr) + 1e-12


def test_interface_continuity(tf1):
    assert max(tf1.interface_residuals) < 1e-9
    rho = tf1.interface
    lo, hi = tf1(rho * (1 - 1e-9)), tf1(rho * (1 + 1e-9))
    assert lo == pytest.approx(hi, rel=1e-6)


def test_functional_at_zero_beta_is_volume(tf1, ctx1):
    assert testfn.evaluate_functional(tf1, beta=0.0) == pytest.approx(ball_volume(ctx1, 1.0), rel=1e-10)


def test_certification_m1(tf1):
    gap = testfn.evaluate_threshold_gap(tf1)
    assert gap.threshold == pytest.approx(math.pi * (1 + math.e), rel=1e-12)
    assert gap.gap > 0


def test_certification_m2(ctx2, green2):
    tf = testfn.assemble_test_function(ctx2, 0.0, green2, 1e-4)
    assert testfn.evaluate_threshold_gap(tf).gap > 0


def test_mu_sq_close_to_prediction(tf1):
    assert abs(tf1.mu_eps_sq - tf1.mu_sq_prediction()) < 0.05 * tf1.mu_eps_sq


def test_profile_table(tf1):
    header, table = testfn.profile_table(tf1, np.geomspace(1e-6, 1.0, 5))
    assert header == ["r", "u_eps"]
    assert np.all(np.diff(table[:, 1]) < 0)
