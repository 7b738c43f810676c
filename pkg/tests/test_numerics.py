import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amtlab.numerics import (
    BallPoly,
    DecayFit,
    PiecewiseBall,
    QuadratureError,
    RadialGrid,
    RadialProfile,
    SingularSystemError,
    adaptive_integrate,
    apply_radial_polyharmonic,
    dirichlet_energy,
    fit_decay,
    improper_integrate,
    integration_by_parts_gap,
    solve_linear_system,
    solve_piecewise_dirichlet,
    solve_polyharmonic_dirichlet,
)


def test_adaptive_integrate_smooth_and_singular():
    assert adaptive_integrate(np.sin, 0.0, math.pi, rel_tol=1e-12) == pytest.approx(2.0, rel=1e-12)
    # integrable log singularity at 0
    val = adaptive_integrate(lambda x: np.log(np.maximum(x, 1e-300)), 0.0, 1.0, rel_tol=1e-10)
    assert val == pytest.approx(-1.0, rel=1e-9)


def test_adaptive_integrate_rejects_bad_interval():
    with pytest.raises(ValueError):
        adaptive_integrate(np.sin, 1.0, 0.0)


def test_improper_integrate_log_tail():
    # int_2^inf log r r^-4 dr = (1 + 3 log 2) / 72
    val = improper_integrate(lambda r: np.log(r) / r**4, 2.0, rel_tol=1e-11, tail_decay_hint=4, log_factor=True)
    assert val == pytest.approx((1 + 3 * math.log(2)) / 72, rel=1e-10)


def test_improper_integrate_slow_tail_raises():
    with pytest.raises((QuadratureError, ValueError)):
        improper_integrate(lambda r: 1.0 / r, 1.0, rel_tol=1e-10, tail_decay_hint=1.0)


def test_linear_system():
    A = np.array([[4.0, 1.0], [2.0, 3.0]])
    x = solve_linear_system(A, np.array([1.0, 2.0]))
    np.testing.assert_allclose(A @ x, [1.0, 2.0], rtol=1e-14)
    with pytest.raises(SingularSystemError):
        solve_linear_system(np.array([[1.0, 2.0], [2.0, 4.0]]), np.array([1.0, 1.0]))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 5.0), st.floats(0.1, 10.0))
def test_fit_decay_recovers_exponent(p, c):
    samples = [(s, c * s**-p) for s in np.geomspace(10, 1000, 6)]
    fit = fit_decay(samples)
    assert isinstance(fit, DecayFit)
    assert fit.exponent == pytest.approx(p, abs=1e-9)


def test_fit_decay_power_log_and_noise_floor():
    samples = [(s, 3 * np.log(s) * s**-2) for s in np.geomspace(10, 1000, 6)]
    assert fit_decay(samples, model="power_log").exponent == pytest.approx(2.0, abs=1e-9)
    flat = fit_decay([(10, 0.0), (100, 0.0), (1000, 0.0)])
    assert flat.below_noise_floor and not flat.within(2.0, 10.0)
    with pytest.raises(ValueError):
        fit_decay([(1, 1.0), (2, 0.5), (3, 0.3)])


@pytest.mark.parametrize("m", [1, 2, 3])
def test_ballpoly_laplacian_of_monomial(m):
    # Delta r^2 = 2 * dim
    R = 1.7
    u = BallPoly.from_function(lambda r: r * r, R, m, 4)
    assert float(u.laplacian()(0.3)) == pytest.approx(4 * m, rel=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_polyharmonic_dirichlet_roundtrip(m):
    R = 1.3
    exact = BallPoly.from_function(lambda r: (R * R - r * r) ** m * (1 + r * r), R, m, 2 * m + 2)
    f = exact.polyharmonic(m) * (-1) ** m
    u = solve_polyharmonic_dirichlet(f)
    r = np.linspace(0, R, 17)
    np.testing.assert_allclose(u(r), exact(r), atol=1e-12)


def test_dirichlet_energy_m1():
    # u = 1 - r^2 on the unit disk: int |grad u|^2 = 2 pi int 4 r^3 = 2 pi
    u = BallPoly.from_function(lambda r: 1 - r * r, 1.0, 1, 4)
    assert dirichlet_energy(u) == pytest.approx(2 * math.pi, rel=1e-13)


@pytest.mark.parametrize("m", [1, 2])
def test_piecewise_matches_global(m):
    R = 1.0
    f = BallPoly.from_function(lambda r: np.exp(-3 * r * r), R, m, 40)
    glob = solve_polyharmonic_dirichlet(f)
    pw = solve_piecewise_dirichlet(PiecewiseBall.from_function(lambda r: np.exp(-3 * r * r), R, m))
    r = np.linspace(0, R, 33)
    np.testing.assert_allclose(pw(r), glob(r), atol=1e-11)


def test_piecewise_integrals():
    u = PiecewiseBall.from_function(lambda r: 1 - r * r, 1.0, 1)
    assert u.integrate_ball(power=1) == pytest.approx(math.pi / 2, rel=1e-13)
    assert u.integrate_function(lambda v: v * v) == pytest.approx(math.pi / 3, rel=1e-13)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_integration_by_parts_on_grid(m):
    R = 1.3
    grid = RadialGrid.graded(R)
    u = RadialProfile.from_function(lambda r: (R * R - r * r) ** m * (1 + r * r), grid, m)
    v = RadialProfile.from_function(lambda r: (R * R - r * r) ** m * (2 - r**4), grid, m)
    lhs, rhs, rel = integration_by_parts_gap(u, v)
    assert rel < 1e-8


@pytest.mark.parametrize("m", [1, 2, 3])
def test_fd_laplacian_of_log_on_annulus(m):
    # Delta log r = (2m - 2) / r^2
    grid = RadialGrid.graded(2.0, n=2048, r_inner=0.5)
    u = RadialProfile(grid, np.log(grid.nodes), m)
    err = np.abs(apply_radial_polyharmonic(u, 1).values - (2 * m - 2) / grid.nodes**2)
    n = grid.size
    assert err[n // 4 : 3 * n // 4].max() < 1e-8
    # one-sided stencils on the thinned end nodes
    assert err.max() < 1e-5


@pytest.mark.parametrize("m", [1, 2])
def test_fd_laplacian_composes(m):
    grid = RadialGrid.graded(1.0, n=2048)
    u = RadialProfile(grid, np.exp(-grid.nodes**2) * np.cos(grid.nodes), m)
    twice = apply_radial_polyharmonic(apply_radial_polyharmonic(u, 1), 1)
    once = apply_radial_polyharmonic(u, 2)
    inner = slice(20, -20)
    assert np.max(np.abs(twice.values[inner] - once.values[inner])) < 1e-6


def test_grid_validation():
    with pytest.raises(ValueError):
        RadialGrid(np.array([0.0, 0.2, 0.1, 0.3, 0.4]))
    with pytest.raises(ValueError):
        RadialGrid.graded(1.0, r_inner=2.0)
