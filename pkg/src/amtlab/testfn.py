"""Glued test functions that beat the blow-up threshold.

Inside ``B_{eps R_eps}`` the candidate is a rescaled bubble plus the regular
part of the Green's function plus a correcting polynomial; outside it is the
Green's function itself.  The polynomial ``p`` is the unique radial
polynomial of degree ``m-1`` in ``r^2`` for which the glued function is
``C^{m-1}`` across the interface, so the candidate lies in ``H_0^m``.

With ``R_eps = |log eps|`` and ``mu_eps = ||u~_eps||_alpha`` the normalized
candidate ``u_eps = u~_eps / mu_eps`` satisfies

    mu_eps^2 = -(2m/beta*) log(2 eps) + C + I_m + O(R_eps^-2 log R_eps),

and ``F_{beta*}(u_eps)`` exceeds ``|Omega| + (omega_{2m}/2^{2m}) e^{beta*(C - I_m)}``
for small ``eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bubble import build_ladder, eta0, eta0_derivative, ladder_eval
from .constants import blowup_threshold, compute_i_m
from .extremal import ball_volume
from .greens import exterior_energy
from .numerics.fitting import fit_decay
from .numerics.linalg import solve_linear_system
from .numerics.quadrature import adaptive_integrate
from .numerics.radial import LogPowerSeries, RadialGrid, RadialProfile, SumSource
from .numerics.spectral import BallPoly

MATCH_TOL = 1e-9


class MatchingError(AssertionError):
    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = residuals


@dataclass(frozen=True)
class MatchingPolynomial:
    """``p(r) = -mu^2 + sum_j c_j r^{2j}`` with ``c_j`` built from ``d_j(R)``."""

    ctx: object
    eps: float
    R: float
    mu: float
    d_coeffs: tuple
    c_coeffs: tuple
    residuals: tuple = ()

    @property
    def m(self):
        return self.ctx.m

    @property
    def radius(self):
        return self.eps * self.R

    def shifted(self):
        """``p + mu^2`` as a polynomial in ``(r/(eps R))^2`` on ``B_{eps R}``.

        In that variable the coefficients are ``c_0, d_1, ..., d_{m-1}``.
        """
        coef = [self.c_coeffs[0]] + list(self.d_coeffs[1:])
        poly = np.polynomial.Polynomial(coef, domain=[0, 1], window=[0, 1])
        return BallPoly(poly.convert(kind=np.polynomial.Chebyshev, domain=[0.0, 1.0]), self.radius, self.m)

    def __call__(self, r):
        return self.shifted()(r) - self.mu**2

    def to_dict(self):
        return {
            "m": self.m,
            "eps": self.eps,
            "R": self.R,
            "mu": self.mu,
            "d": list(self.d_coeffs),
            "c": list(self.c_coeffs),
            "matching_residuals": list(self.residuals),
        }


def matching_system(ctx, R):
    """Matrix and right-hand side for ``d_1..d_{m-1}``.

    Row ``i`` (``1 <= i <= m-1``) reads
    ``sum_j (2j)!/(2j-i)! d_j = (2m/beta*) (-1)^i (i-1)! - R^i eta_0^(i)(R)``.
    """
    m = ctx.m
    n = m - 1
    fund = ctx.fundamental.float_value
    A = np.zeros((n, n))
    b = np.zeros(n)
    for i in range(1, m):
        for j in range(1, m):
            if 2 * j >= i:
                A[i - 1, j - 1] = math.factorial(2 * j) / math.factorial(2 * j - i)
        b[i - 1] = fund * (-1) ** i * math.factorial(i - 1) - R**i * float(eta0_derivative(ctx, i, R))
    return A, b


def matching_d(ctx, R):
    """``(d_0(R), ..., d_{m-1}(R))``."""
    m = ctx.m
    if m > 1:
        A, b = matching_system(ctx, R)
        tail = [float(x) for x in solve_linear_system(A, b)]
    else:
        tail = []
    d0 = -float(eta0(ctx, R)) - ctx.fundamental.float_value * math.log(R / 2.0) - math.fsum(tail)
    return tuple([d0] + tail)


def build_matching_polynomial(ctx, eps, R, mu, tol=MATCH_TOL):
    """Correcting polynomial for the bubble of scale ``eps`` cut at ``r = eps R``.

    The matching conditions are re-checked on the assembled polynomial; each
    residual is the scaled derivative ``(eps R)^i d^i/dr^i`` of
    ``p + mu^2 + eta_0(r/eps) + (2m/beta*) log r`` at ``r = eps R`` divided by
    the largest of its terms.

    Raises
    ------
    ValueError
        If ``eps <= 0``, ``R < 4`` or ``m > 12``.
    MatchingError
        If a residual exceeds ``tol``.
    """
    m = ctx.m
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not R >= 4:
        raise ValueError("R must be >= 4")
    if m > 12:
        raise ValueError("m <= 12 required")
    d = matching_d(ctx, R)
    fund = ctx.fundamental.float_value
    c0 = -fund * math.log(2.0 * eps) + d[0]
    c = tuple([c0] + [(eps * R) ** (-2 * j) * d[j] for j in range(1, m)])
    poly = MatchingPolynomial(ctx, float(eps), float(R), float(mu), d, c)
    shifted = poly.shifted()
    rho = eps * R
    res = []
    for i in range(m):
        # (eps R)^i scaling turns every term into an O(1) number
        sp = float(shifted.r_derivative(i, rho)) * rho**i
        if i == 0:
            terms = [sp, float(eta0(ctx, R)), fund * math.log(rho)]
        else:
            terms = [sp, R**i * float(eta0_derivative(ctx, i, R)), fund * (-1) ** (i - 1) * math.factorial(i - 1)]
        scale = max(abs(x) for x in terms)
        res.append(abs(math.fsum(terms)) / scale if scale else 0.0)
    if max(res) > tol:
        raise MatchingError(f"matching residuals {res} exceed {tol}", res)
    return MatchingPolynomial(ctx, float(eps), float(R), float(mu), d, c, tuple(res))


def d_decay_fits(ctx, radii=(8.0, 16.0, 32.0, 64.0, 128.0, 256.0)):
    """Decay fits of ``|d_j(R)|`` for ``j = 0..m-1``."""
    ds = [matching_d(ctx, R) for R in radii]
    return {j: fit_decay([(R, abs(d[j])) for R, d in zip(radii, ds)]) for j in range(ctx.m)}


def remark_bound_constants(ctx, radii=(8.0, 16.0, 32.0, 64.0, 128.0, 256.0), eps=1e-3, samples=201):
    """Scaled sup-norms of ``p + mu^2 + (2m/beta*) log(2 eps)`` and ``Delta^{m/2} p``.

    Returns two lists of ``K`` values, ``sup|...| R^2`` and
    ``sup|Delta^{m/2} p| eps^m R^{m+2}`` over ``B_{eps R}``; both should stay
    bounded as ``R`` grows.
    """
    m = ctx.m
    fund = ctx.fundamental.float_value
    k_value, k_rung = [], []
    for R in radii:
        poly = build_matching_polynomial(ctx, eps, R, 0.0)
        sp = poly.shifted()
        r = np.linspace(0.0, eps * R, samples)
        k_value.append(float(np.max(np.abs(sp(r) + fund * math.log(2 * eps)))) * R**2)
        rung = sp.polyharmonic(Fraction(m, 2))
        k_rung.append(float(np.max(np.abs(rung(r)))) * eps**m * R ** (m + 2))
    return k_value, k_rung


class InnerProfile:
    """``u~ = eta_0(r/eps) + C + psi(r) + p(r) + mu^2`` on ``B_{eps R}``."""

    def __init__(self, ladder, eps, C, psi, poly):
        self.ladder = ladder
        self.ctx = ladder.ctx
        self.m = ladder.m
        self.eps = eps
        self.C = C
        self.psi = psi
        self.poly = poly

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return eta0(self.ctx, r / self.eps) + self.C + self.psi(r) + self.poly(r)

    def r_derivative(self, order, r):
        r = np.asarray(r, dtype=float)
        out = eta0_derivative(self.ctx, order, r / self.eps) * self.eps ** (-order)
        out = out + self.psi.r_derivative(order, r) + self.poly.r_derivative(order, r)
        return out + self.C if order == 0 else out

    def scaled_rung(self, j, y):
        """``eps^j Delta^{j/2} u~ (eps y)``, of order one on ``|y| <= R``."""
        y = np.asarray(y, dtype=float)
        if j == 0:
            return self(self.eps * y)
        k = Fraction(j, 2)
        r = self.eps * y
        tail = self.psi.polyharmonic(k)(r) + self.poly.polyharmonic(k)(r)
        return ladder_eval(self.ladder, j, y) + self.eps**j * tail

    def polyharmonic(self, k):
        j = int(2 * Fraction(k))
        return lambda r: self.scaled_rung(j, np.asarray(r, dtype=float) / self.eps) * self.eps ** (-j)


@dataclass(frozen=True)
class TestFunction:
    ctx: object
    alpha: float
    green: object
    eps: float
    R_eps: float
    mu_eps: float
    inner: RadialProfile = field(repr=False)
    matching: MatchingPolynomial = field(repr=False)
    inner_energy: float = 0.0
    outer_energy: float = 0.0
    inner_l2: float = 0.0
    outer_l2: float = 0.0
    interface_residuals: tuple = ()

    @property
    def m(self):
        return self.ctx.m

    @property
    def interface(self):
        return self.eps * self.R_eps

    @property
    def mu_eps_sq(self):
        return self.mu_eps**2

    def __call__(self, r):
        """Normalized ``u_eps``."""
        r = np.asarray(r, dtype=float)
        src = self.inner.source
        out = np.where(r < self.interface, src(np.minimum(r, self.interface)), self.green(np.maximum(r, self.interface)))
        return out / self.mu_eps

    def mu_sq_prediction(self):
        ctx = self.ctx
        return -ctx.fundamental.float_value * math.log(2 * self.eps) + self.green.C + ctx.i_m

    def to_dict(self):
        return {
            "m": self.m,
            "alpha": self.alpha,
            "eps": self.eps,
            "R_eps": self.R_eps,
            "mu_eps_sq": self.mu_eps_sq,
            "mu_eps_sq_prediction": self.mu_sq_prediction(),
            "inner_energy": self.inner_energy,
            "outer_energy": self.outer_energy,
            "interface_residuals": list(self.interface_residuals),
        }


def _psi_source(green):
    b_only = LogPowerSeries(green.m, {q: v for q, v in green.log_part.terms.items() if q != 0})
    return SumSource([green.regular - green.C, b_only])


def _y_breaks(top):
    out = []
    y = 0.5
    while y < top:
        out.append(y)
        y *= 2.0
    return out


def assemble_test_function(ctx, alpha, green, eps, grid_n=1025):
    """Glue bubble, regular part and correcting polynomial to ``G`` at ``eps |log eps|``.

    ``mu_eps^2`` is the ``alpha``-norm of the unnormalized candidate, split
    into the inner ball (integrated in the bubble variable ``y = r/eps``) and
    the exterior (integrated against ``G``).
    """
    m = ctx.m
    if green.m != m or abs(green.alpha - alpha) > 0:
        raise ValueError("green was solved for a different (m, alpha)")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if ctx.i_m is None:
        ctx = ctx.with_i_m(compute_i_m(ctx, 1e-12))
    R_eps = abs(math.log(eps))
    rho = eps * R_eps
    Rb = green.ball_radius
    if not rho < Rb / 2:
        raise ValueError(f"interface eps*|log eps| = {rho:.3g} is not inside half the ball")
    poly = build_matching_polynomial(ctx, eps, R_eps, 0.0)
    ladder = build_ladder(ctx)
    inner = InnerProfile(ladder, eps, green.C, _psi_source(green), poly.shifted())

    # continuity of u~ and its radial derivatives across the interface
    res = []
    for i in range(m):
        a = float(inner.r_derivative(i, rho))
        b = float(green.r_derivative(i, rho))
        res.append(abs(a - b) / max(abs(a), abs(b), 1e-300))

    om = ctx.omega(2 * m - 1).float_value
    breaks = _y_breaks(R_eps)

    def e_in(y):
        return inner.scaled_rung(m, y) ** 2 * y ** (2 * m - 1)

    inner_energy = om * adaptive_integrate(e_in, 0.0, R_eps, rel_tol=1e-12, breakpoints=breaks)

    def l2_in(y):
        return inner.scaled_rung(0, y) ** 2 * y ** (2 * m - 1)

    inner_l2 = om * eps ** (2 * m) * adaptive_integrate(l2_in, 0.0, R_eps, rel_tol=1e-12, breakpoints=breaks)
    outer_energy = exterior_energy(green, rho)
    outer_l2 = _outer_integral(green, rho, lambda v: v * v)
    mu_sq = inner_energy + outer_energy - alpha * (inner_l2 + outer_l2)
    grid = RadialGrid.graded(rho, n=grid_n)
    prof = RadialProfile.from_source(inner, grid, m)
    return TestFunction(
        ctx,
        float(alpha),
        green,
        float(eps),
        R_eps,
        math.sqrt(mu_sq),
        prof,
        poly,
        inner_energy,
        outer_energy,
        inner_l2,
        outer_l2,
        tuple(res),
    )


def _decades(a, b):
    out = []
    x = a * 10.0
    while x < b:
        out.append(x)
        x *= 10.0
    return out


def _outer_integral(green, rho, func, log_weight=False):
    m = green.m
    om = green.ctx.omega(2 * m - 1).float_value

    def f(r):
        return func(green(r)) * r ** (2 * m - 1)

    return om * adaptive_integrate(f, rho, green.ball_radius, rel_tol=1e-12, breakpoints=_decades(rho, green.ball_radius))


def evaluate_functional(tf, beta=None):
    """``int_{B} exp(beta u_eps^2)``; ``beta`` defaults to ``beta*``.

    The exponent is assembled in log-space together with the volume element
    before exponentiation, node by node.
    """
    ctx = tf.ctx
    m = ctx.m
    beta = ctx.beta_star.float_value if beta is None else float(beta)
    mu2 = tf.mu_eps_sq
    eps = tf.eps
    log_om = math.log(ctx.omega(2 * m - 1).float_value)
    src = tf.inner.source
    # inner part in y = r/eps: dx = eps^{2m} y^{2m-1} dy
    log_scale = 2 * m * math.log(eps)

    def f_in(y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            ly = np.log(y)
        u = src.scaled_rung(0, y)
        return np.exp(beta * u * u / mu2 + (2 * m - 1) * ly + log_om + log_scale)

    inner = adaptive_integrate(f_in, 0.0, tf.R_eps, rel_tol=1e-12, breakpoints=_y_breaks(tf.R_eps))
    g = tf.green
    rho = tf.interface

    def f_out(r):
        r = np.asarray(r, dtype=float)
        v = g(r)
        return np.exp(beta * v * v / mu2 + (2 * m - 1) * np.log(r) + log_om)

    outer = adaptive_integrate(f_out, rho, g.ball_radius, rel_tol=1e-12, breakpoints=_decades(rho, g.ball_radius))
    return inner + outer


@dataclass(frozen=True)
class ThresholdGap:
    F_value: float
    threshold: float
    gap: float
    predicted_gap: float

    def to_dict(self):
        return {
            "F_value": self.F_value,
            "threshold": self.threshold,
            "gap": self.gap,
            "predicted_gap": self.predicted_gap,
        }


def evaluate_threshold_gap(tf):
    """``F_{beta*}(u_eps)`` against the blow-up threshold.

    ``predicted_gap`` is the leading exterior gain ``(beta*/mu_eps^2) ||G||^2``.
    """
    ctx = tf.ctx
    if ctx.i_m is None:
        ctx = ctx.with_i_m(compute_i_m(ctx, 1e-12))
    F = evaluate_functional(tf)
    vol = ball_volume(ctx, tf.green.ball_radius)
    thr = blowup_threshold(ctx, tf.green.C, vol)
    pred = ctx.beta_star.float_value / tf.mu_eps_sq * tf.green.l2_norm_sq
    return ThresholdGap(F, thr, F - thr, pred)


def mu_expansion_fit(ctx, alpha, green, eps_list=(1e-2, 1e-4, 1e-8, 1e-16, 1e-32, 1e-64)):
    """Fit of ``|mu_eps^2 - prediction|`` against ``R_eps`` (power-log model).

    Returns ``(fit, samples)`` with samples ``(R_eps, gap)``.
    """
    samples = []
    for eps in eps_list:
        tf = assemble_test_function(ctx, alpha, green, eps)
        samples.append((tf.R_eps, abs(tf.mu_eps_sq - tf.mu_sq_prediction())))
    return fit_decay(samples, model="power_log"), samples


def profile_table(tf, radii):
    r = np.asarray(radii, dtype=float)
    return ["r", "u_eps"], np.column_stack([r, tf(r)])
