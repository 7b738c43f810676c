import math

import numpy as np
import pytest

from amtlab import bubble, constants
from amtlab.verify import context


def radial_laplacian(f, m, r, h=1e-4):
    d1 = (f(r + h) - f(r - h)) / (2 * h)
    d2 = (f(r + h) - 2 * f(r) + f(r - h)) / h**2
    return d2 + (2 * m - 1) / r * d1


def test_eta0_values(ctx1):
    assert bubble.eta0(ctx1, 0.0) == 0.0
    assert bubble.eta0(ctx1, 2.0) == pytest.approx(-math.log(2) / (4 * math.pi), rel=1e-15)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("order", [1, 2, 3])
def test_eta0_derivative_vs_differences(m, order):
    ctx = constants.build_context(m)
    r, h = 1.3, 1e-3
    f = lambda x: bubble.eta0_derivative(ctx, order - 1, x)
    fd = (f(r + h) - f(r - h)) / (2 * h)
    assert bubble.eta0_derivative(ctx, order, r) == pytest.approx(fd, rel=1e-5)


def test_ladder_m1_closed_forms(ctx1):
    ladder = bubble.build_ladder(ctx1)
    r = np.array([0.1, 1.0, 3.0])
    # d/dr eta_0 = -(1/4pi) 2r/(4+r^2);  Delta eta_0 = -(1/pi)*4/(4+r^2)^2
    np.testing.assert_allclose(bubble.ladder_eval(ladder, 1, r), -r / (2 * math.pi * (4 + r * r)), rtol=1e-14)
    np.testing.assert_allclose(bubble.ladder_eval(ladder, 2, r), -4 / (math.pi * (4 + r * r) ** 2), rtol=1e-14)


@pytest.mark.parametrize("m", [2, 3])
def test_ladder_first_level_vs_derivatives(m):
    ctx = constants.build_context(m)
    ladder = bubble.build_ladder(ctx)
    r = 0.9
    ref = bubble.eta0_derivative(ctx, 2, r) + (2 * m - 1) / r * bubble.eta0_derivative(ctx, 1, r)
    assert bubble.ladder_eval(ladder, 2, r) == pytest.approx(ref, rel=1e-13)


def test_ladder_level_two_by_differences():
    ctx = constants.build_context(3)
    ladder = bubble.build_ladder(ctx)
    r = 1.1
    fd = radial_laplacian(lambda x: bubble.ladder_eval(ladder, 2, x), 3, r)
    assert bubble.ladder_eval(ladder, 4, r) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_exact_tables(m):
    checks = bubble.ladder_exact_checks(bubble.build_ladder(constants.build_context(m)))
    assert all(checks["levels"].values()) and all(checks["halves"].values()) and checks["top"]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_liouville_equation(m):
    ladder = bubble.build_ladder(constants.build_context(m))
    assert bubble.pde_residual(ladder) < 1e-8
    assert bubble.half_step_residual(ladder) < 1e-12


def test_ladder_index_bounds(ctx1):
    with pytest.raises(ValueError):
        bubble.ladder_eval(bubble.build_ladder(ctx1), 3, 1.0)


def test_mass_closed_form_m1(ctx1):
    # int_0^R r/(1+r^2/4)^2 dr normalised: R^2/(4+R^2)
    for R in (1.0, 2.0, 10.0):
        assert bubble.bubble_mass(ctx1, R) == pytest.approx(R * R / (4 + R * R), rel=1e-12)
    assert bubble.bubble_mass_deficit(ctx1, 10.0) == pytest.approx(4 / 104, rel=1e-10)


def test_mass_rejects_nonpositive_radius(ctx1):
    with pytest.raises(ValueError):
        bubble.bubble_mass(ctx1, 0.0)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_mass_deficit_rate(m):
    fit = bubble.mass_decay_fit(context(m))
    assert fit.exponent == pytest.approx(2 * m, abs=0.1)


def test_self_energy_pairing(ctx2):
    assert bubble.self_energy_via_ladder(bubble.build_ladder(ctx2)) == pytest.approx(ctx2.i_m, rel=1e-8)


def test_energy_report(ctx1):
    rep = bubble.bubble_energy(ctx1, bubble.build_ladder(ctx1), 64.0)
    assert abs(rep.energy - rep.energy_prediction) < 1e-2
    with pytest.raises(ValueError):
        bubble.bubble_energy(ctx1, bubble.build_ladder(ctx1), 2.0)


def test_ladder_table_header(ctx2):
    header, table = bubble.ladder_table(bubble.build_ladder(ctx2), [0.0, 1.0])
    assert header[:2] == ["r", "eta0"] and header[2].startswith("laplacian_level")
    assert table.shape == (2, len(header))


@pytest.mark.parametrize("R", [16.0, 64.0])
def test_energy_remainder_m2_is_quartic(ctx2, R):
    # exact: energy - prediction = 1/(pi^2 R^4) + O(R^-6)
    rep = bubble.bubble_energy(ctx2, bubble.build_ladder(ctx2), R)
    assert (rep.energy - rep.energy_prediction) * math.pi**2 * R**4 == pytest.approx(1.0, rel=40 / R**2)
