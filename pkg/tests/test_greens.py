import math

import numpy as np
import pytest

from amtlab import greens
from amtlab.extremal import first_eigenvalue
from amtlab.verify import green


def test_unit_disk_is_pure_logarithm(green1):
    assert green1.C == pytest.approx(0.0, abs=1e-10)
    r = np.array([0.01, 0.3, 0.9])
    np.testing.assert_allclose(green1(r), -np.log(r) / (2 * math.pi), rtol=1e-12)


def test_unit_ball_m2_constant(green2):
    assert green2.C == pytest.approx(-1 / (16 * math.pi**2), abs=1e-8)


def test_radius_scaling_m1():
    # G_R(r) = G_1(r/R), so C_R = log(R) / (2 pi)
    g = greens.solve_green(green(1, 0.0).ctx, 0.0, 2.0)
    assert g.C == pytest.approx(math.log(2) / (2 * math.pi), abs=1e-12)


@pytest.mark.parametrize("m,af", [(1, 0.5), (2, 0.5)])
def test_shifted_dirichlet_and_mass(m, af):
    g = green(m, af)
    assert max(g.dirichlet_residuals) < 1e-8
    flux, expected, err = greens.green_mass_check(g, 1e-3)
    assert err < 1e-6


def test_flux_sign(green2):
    assert greens.flux_through_sphere(green2, 1e-3) == pytest.approx(1.0, abs=1e-9)


def test_shift_increases_regular_part(ctx1):
    lam1 = first_eigenvalue(ctx1, 1.0)
    Cs = [greens.solve_green(ctx1, a * lam1, 1.0).C for a in (0.0, 0.3, 0.6)]
    assert Cs[0] < Cs[1] < Cs[2]


def test_alpha_at_eigenvalue_rejected(ctx1):
    with pytest.raises(greens.SpectralShiftError):
        greens.solve_green(ctx1, first_eigenvalue(ctx1, 1.0), 1.0)
    with pytest.raises(ValueError):
        greens.solve_green(ctx1, -1.0, 1.0)


def test_energy_expansion_exact_for_disk(green1):
    for d in (1e-3, 1e-2, 1e-1):
        assert abs(greens.green_energy_expansion(green1, d).residual) < 1e-10
    with pytest.raises(ValueError):
        greens.green_energy_expansion(green1, 0.7)


def test_l2_norm_disk(green1):
    # int_D (log r / 2pi)^2 = (1/2pi) int_0^1 r log^2 r dr = 1/(8 pi)
    assert green1.l2_norm_sq == pytest.approx(1 / (8 * math.pi), rel=1e-10)
