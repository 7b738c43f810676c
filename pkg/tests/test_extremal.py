import math

import numpy as np
import pytest

from amtlab import extremal
from amtlab.extremal import ProblemConfig
from amtlab.verify import context, continuation


@pytest.fixture(scope="module")
def sol05():
    return continuation(1, (0.5,))[0][1]


def test_bessel_zero():
    assert extremal.bessel_j0_zero(1) == pytest.approx(2.404825557695773, rel=1e-13)
    assert extremal.bessel_j0_zero(2) == pytest.approx(5.520078110286311, rel=1e-13)


def test_first_eigenvalue_disk(ctx1):
    assert extremal.first_eigenvalue(ctx1, 1.0) == pytest.approx(extremal.bessel_j0_zero(1) ** 2, abs=1e-4)


@pytest.mark.parametrize("m", [1, 2])
def test_eigenvalue_scaling(m):
    ctx = context(m)
    assert extremal.first_eigenvalue(ctx, 2.0) == pytest.approx(extremal.first_eigenvalue(ctx, 1.0) / 4**m, rel=1e-10)


def test_first_eigenpair_normalised(ctx1):
    lam, phi = extremal.first_eigenpair(ctx1, 1.0)
    assert phi.source.integrate_ball(power=2) == pytest.approx(1.0, rel=1e-12)
    assert extremal.alpha_norm(phi, lam) == pytest.approx(0.0, abs=1e-9)


def test_ball_volume(ctx1, ctx2):
    assert extremal.ball_volume(ctx1, 1.0) == pytest.approx(math.pi)
    assert extremal.ball_volume(ctx2, 1.0) == pytest.approx(math.pi**2 / 2)


def test_solution_is_normalised_critical_point(sol05, ctx1):
    assert sol05.el_residual < 1e-8
    assert extremal.alpha_norm(sol05.u, 0.0) == pytest.approx(1.0, rel=1e-9)
    assert sol05.F_value > extremal.ball_volume(ctx1, 1.0)
    assert sol05.mu == pytest.approx(float(sol05.u(0.0)))


def test_solution_beats_bubble_family(sol05, ctx1):
    best, _ = extremal.brute_force_bubble_family(ctx1, sol05.beta)
    assert sol05.F_value >= best - 1e-6


def test_pohozaev_on_solution(sol05):
    assert extremal.pohozaev_residual(sol05).residual < 1e-6


@pytest.mark.parametrize("m", [1, 2, 3])
def test_manufactured_pohozaev(m):
    assert extremal.manufactured_pohozaev(context(m)).residual < 1e-10


def test_shifted_problem_m2():
    ctx = context(2)
    lam1 = extremal.first_eigenvalue(ctx, 1.0)
    cfg = ProblemConfig(ctx, alpha=0.5 * lam1, beta=0.5 * ctx.beta_star.float_value)
    sol = extremal.maximize_subcritical(cfg)
    assert sol.el_residual < 1e-8
    assert extremal.alpha_norm(sol.u, sol.alpha) == pytest.approx(1.0, rel=1e-8)


def test_config_validation(ctx1):
    with pytest.raises(ValueError):
        extremal.maximize_subcritical(ProblemConfig(ctx1, beta=ctx1.beta_star.float_value))
    with pytest.raises(ValueError):
        extremal.maximize_subcritical(ProblemConfig(ctx1, alpha=10.0))


def test_divergence_demo(ctx1):
    lam1 = extremal.first_eigenvalue(ctx1, 1.0)
    rows, norms = extremal.supercritical_divergence_demo(ctx1, 1.0, 1.1 * lam1, ctx1.beta_star.float_value, [0, 1, 2, 3])
    assert max(norms) <= 1e-9
    assert rows[-1][1] > 10 * math.pi
    with pytest.raises(ValueError):
        extremal.supercritical_divergence_demo(ctx1, 1.0, 0.5 * lam1, 1.0, [1.0])


def test_blowup_scale_identity(sol05, ctx1):
    d = extremal.blowup_diagnostics(sol05, ctx1)
    assert abs(d.scale_identity_residual) < 1e-12
    assert d.pre_asymptotic


@pytest.mark.slow
def test_supremum_monotone_in_alpha_and_beta(ctx1):
    lam1 = extremal.first_eigenvalue(ctx1, 1.0)
    table = []
    for af in (0.0, 0.3, 0.6):
        cfg = ProblemConfig(ctx1, alpha=af * lam1)
        table.append([s.F_value for _, s in extremal.continuation_run(cfg, (0.5, 0.7, 0.9))])
    S = np.array(table)
    assert np.all(np.diff(S, axis=0) >= 0)
    assert np.all(np.diff(S, axis=1) >= 0)
