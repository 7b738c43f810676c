"""Radial Green's function of ``(-Delta)^m - alpha`` on a ball, pole at the center.

The solution is written as

    G(r) = c log r + B(r) log r + A(r),      c = -2m/beta*,

where ``B(r) = sum_{k>=1} b_k r^{2km}`` is the entire series that cancels the
``alpha``-coupling of the logarithmic part exactly, and ``A`` is smooth.  The
regular part is ``A + B log r``; its value at the pole is ``C = A(0)`` and
``psi = A - C + B log r`` vanishes there.  ``A`` solves the Dirichlet problem

    (-Delta)^m A = alpha A - T[B],   d^i A/dr^i (R) = -d^i/dr^i [(c + B) log r](R),

with ``T[B]`` the non-logarithmic part of ``(-Delta)^m (B log r)``; the
``alpha A`` coupling is resolved by damped fixed-point iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics.quadrature import adaptive_integrate
from .numerics.radial import LogPowerSeries, RadialGrid, RadialProfile, SumSource
from .numerics.spectral import BallPoly, solve_polyharmonic_dirichlet, t_nodes

DAMPING = 0.5
MAX_ITERS = 1000
DEFAULT_DEGREE = 48
SPLIT_RADIUS = 1e-6


class GreenDivergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class SpectralShiftError(ValueError):
    """``alpha`` is not below the first Dirichlet eigenvalue."""


@dataclass(frozen=True)
class GreenFunction:
    ctx: object
    alpha: float
    ball_radius: float
    C: float
    psi: RadialProfile
    l2_norm_sq: float
    regular: BallPoly = field(repr=False)
    log_part: LogPowerSeries = field(repr=False)
    iterations: int = 0
    dirichlet_residuals: tuple = ()

    @property
    def m(self):
        return self.ctx.m

    @property
    def source(self):
        """Exact representation of ``G`` supporting the ladder and derivatives."""
        return SumSource([self.log_part, self.regular])

    def __call__(self, r):
        return self.source(r)

    def ladder(self, j, r):
        """``Delta^{j/2} G`` at ``r > 0`` (radial component for odd ``j``)."""
        from fractions import Fraction

        return self.source.polyharmonic(Fraction(j, 2))(r)

    def r_derivative(self, order, r):
        return self.source.r_derivative(order, r)

    def to_dict(self):
        return {
            "m": self.m,
            "alpha": self.alpha,
            "ball_radius": self.ball_radius,
            "C": self.C,
            "l2_norm_sq": self.l2_norm_sq,
            "dirichlet_residuals": list(self.dirichlet_residuals),
            "iterations": self.iterations,
        }

    def profile_table(self, radii):
        r = np.asarray(radii, dtype=float)
        return ["r", "G", "psi"], np.column_stack([r, self(r), self.psi(r)])


def log_coefficients(ctx, alpha, R, rel=1e-18, max_terms=200):
    """Coefficients ``b_0 = c, b_1, ...`` of ``(c + B(r)) log r``.

    ``b_k D_k = alpha b_{k-1}`` where ``(-Delta)^m r^{2km} log r`` has
    logarithmic part ``D_k r^{2(k-1)m} log r``.
    """
    m = ctx.m
    c = -ctx.fundamental.float_value
    coefs = [c]
    if alpha == 0:
        return coefs
    for k in range(1, max_terms):
        q = 2 * k * m
        d = (-1) ** m * math.prod((q - 2 * i) * (q - 2 * i + 2 * m - 2) for i in range(m))
        b = alpha * coefs[-1] / d
        coefs.append(b)
        if abs(b) * R ** (2 * k * m) < rel * abs(c):
            break
    return coefs


def _log_series(m, coefs):
    return LogPowerSeries(m, {2 * k * m: (b, 0.0) for k, b in enumerate(coefs)})


def _check_alpha(ctx, alpha, R):
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0:
        return None
    from .extremal import first_eigenvalue

    lam1 = first_eigenvalue(ctx, R)
    if alpha >= lam1:
        raise SpectralShiftError(f"alpha={alpha} is not below lambda_1={lam1}")
    return lam1


def solve_green(
    ctx,
    alpha,
    ball_radius=1.0,
    tol=1e-13,
    degree=DEFAULT_DEGREE,
    damping=DAMPING,
    max_iters=MAX_ITERS,
    grid=None,
):
    """Green's function with pole at the center of ``B_R``.

    Parameters
    ----------
    alpha : float
        Spectral shift, ``0 <= alpha < lambda_1(B_R)``.
    tol : float
        Stop when the sup-norm change of the regular part, relative to its
        size, falls below ``tol``.
    degree : int
        Spectral degree (in ``(r/R)^2``) kept for the regular part.

    Raises
    ------
    SpectralShiftError
        If ``alpha >= lambda_1``.
    GreenDivergenceError
        If the iteration stalls, grows, or hits ``max_iters``.
    """
    R = float(ball_radius)
    if not R > 0:
        raise ValueError("ball_radius must be positive")
    _check_alpha(ctx, alpha, R)
    m = ctx.m
    coefs = log_coefficients(ctx, alpha, R)
    full_log = _log_series(m, coefs)
    b_only = _log_series(m, [0.0] + coefs[1:])

    top = b_only.polyharmonic(m).scaled((-1) ** m)
    plain = top.plain_part()
    if any(q < 0 for q in plain.terms):
        raise AssertionError("negative power in the smooth forcing")
    forcing = BallPoly.from_function(lambda r: plain(r), R, m, degree)
    boundary = [-float(full_log.r_derivative(i, R)) for i in range(m)]

    def step(a):
        rhs = a * alpha - forcing
        return solve_polyharmonic_dirichlet(rhs, boundary).truncated(degree)

    nodes = t_nodes(degree + 1)
    A = step(BallPoly.constant(0.0, R, m))
    iters = 0
    if alpha > 0:
        prev_change = np.inf
        growth = 0
        change = np.inf
        for iters in range(1, max_iters + 1):
            A_new = (A * (1.0 - damping) + step(A) * damping).truncated(degree)
            change = float(np.max(np.abs(A_new.series(nodes) - A.series(nodes))))
            scale = max(1.0, float(np.max(np.abs(A_new.series(nodes)))))
            A = A_new
            if change <= tol * scale:
                break
            growth = growth + 1 if change > prev_change else 0
            if growth > 20 or not np.isfinite(change):
                raise GreenDivergenceError(f"fixed point diverging, last change {change:.3e}", change)
            prev_change = change
        else:
            raise GreenDivergenceError(f"no convergence in {max_iters} iterations, last change {change:.3e}", change)

    C = float(A(0.0))
    psi_src = SumSource([A - C, b_only])
    grid = grid or RadialGrid.graded(R)
    psi = RadialProfile.from_source(psi_src, grid, m)
    g_src = SumSource([full_log, A])
    residuals = tuple(float(abs(g_src.r_derivative(i, R))) for i in range(m))
    l2 = _l2_norm_sq(ctx, g_src, C, coefs[0], R)
    return GreenFunction(ctx, float(alpha), R, C, psi, l2, A, full_log, iters, residuals)


def _l2_norm_sq(ctx, g_src, C, c, R, split=SPLIT_RADIUS):
    """``int_{B_R} G^2``; the piece ``[0, split]`` uses ``G ~ c log r + C``."""
    m = ctx.m
    n = 2 * m
    d = min(split, 0.5 * R)
    L = math.log(d)
    dn = d**n
    i0 = dn / n
    i1 = dn * (L / n - 1.0 / n**2)
    i2 = dn * (L * L / n - 2 * L / n**2 + 2.0 / n**3)
    inner = c * c * i2 + 2 * c * C * i1 + C * C * i0

    def f(r):
        return g_src(r) ** 2 * r ** (2 * m - 1)

    outer = adaptive_integrate(f, d, R, rel_tol=1e-12, breakpoints=_decades(d, R))
    return ctx.omega(2 * m - 1).float_value * (inner + outer)


def _decades(a, b):
    out = []
    x = a * 10.0
    while x < b:
        out.append(x)
        x *= 10.0
    return out


@dataclass(frozen=True)
class GreenEnergyReport:
    delta: float
    lhs: float
    rhs_prediction: float
    residual: float

    def to_dict(self):
        return {"delta": self.delta, "lhs": self.lhs, "rhs_prediction": self.rhs_prediction, "residual": self.residual}


def exterior_energy(g, delta, rel_tol=1e-12):
    """``int_{B_R minus B_delta} |Delta^{m/2} G|^2``."""
    from fractions import Fraction

    m = g.m
    rung = g.source.polyharmonic(Fraction(m, 2))

    def f(r):
        return rung(r) ** 2 * r ** (2 * m - 1)

    val = adaptive_integrate(f, delta, g.ball_radius, rel_tol=rel_tol, breakpoints=_decades(delta, g.ball_radius))
    return g.ctx.omega(2 * m - 1).float_value * val


def green_energy_expansion(g, delta):
    """Exterior energy of ``G`` against its logarithmic expansion in ``delta``."""
    if not 0 < delta < g.ball_radius / 2:
        raise ValueError("need 0 < delta < ball_radius/2")
    ctx = g.ctx
    lhs = exterior_energy(g, delta)
    rhs = g.alpha * g.l2_norm_sq - ctx.fundamental.float_value * math.log(delta) + g.C + ctx.h_m.float_value
    return GreenEnergyReport(float(delta), lhs, rhs, lhs - rhs)


def flux_through_sphere(g, delta):
    """``int_{dB_delta} nu . Delta^{(2m-1)/2} G``; tends to ``(-1)^m`` as ``delta -> 0``."""
    m = g.m
    return g.ctx.omega(2 * m - 1).float_value * delta ** (2 * m - 1) * float(g.ladder(2 * m - 1, delta))


def green_mass_check(g, delta):
    """Flux of ``Delta^{(2m-1)/2} G`` through ``dB_delta`` against the enclosed mass.

    Integrating ``(-Delta)^m G = delta_0 + alpha G`` over ``B_delta`` gives
    ``flux = (-1)^m (1 + alpha int_{B_delta} G)``.  Returns
    ``(flux, expected, absolute_error)``.
    """
    m = g.m

    def f(r):
        return g(r) * r ** (2 * m - 1)

    inner = 0.0
    if g.alpha:
        # G ~ c log r is integrable against r^{2m-1}; split geometrically toward 0
        lo = delta * 1e-12
        inner = adaptive_integrate(f, lo, delta, rel_tol=1e-12, breakpoints=_decades(lo, delta))
        inner *= g.ctx.omega(2 * m - 1).float_value
    expected = (-1) ** m * (1.0 + g.alpha * inner)
    flux = flux_through_sphere(g, delta)
    return flux, expected, abs(flux - expected)
