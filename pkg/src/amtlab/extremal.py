"""Radial maximizers of ``F_beta(u) = int e^{beta u^2}`` under ``||u||_alpha <= 1``.

The search runs over radial profiles on a ball, represented spectrally in
``t = (r/R)^2`` (see :mod:`amtlab.numerics.spectral`).  The Euler-Lagrange
system

    (-Delta)^m u = lambda u e^{beta u^2} + alpha u,   lambda = 1 / int u^2 e^{beta u^2},

is solved by a damped fixed point on the Dirichlet inverse of ``(-Delta)^m``,
with continuation in ``beta``.  For ``m >= 2`` radial maximizers are only
certified lower bounds for the unconstrained supremum.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.polynomial import Chebyshev

from .bubble import eta0
from .numerics.quadrature import adaptive_integrate
from .numerics.radial import RadialGrid, RadialProfile, apply_radial_polyharmonic
from .numerics.piecewise import (
    DEFAULT_RATIO,
    PIECE_MODES,
    PiecewiseBall,
    geometric_breaks,
    piecewise_dirichlet_energy,
    solve_piecewise_dirichlet,
)
from .numerics.spectral import BallPoly, dirichlet_energy, solve_polyharmonic_dirichlet

DAMPING = 1.0
MIN_DAMPING = 1e-2
PATIENCE = 5
MAX_ITERS = 2000
RESIDUAL_TOL = 1e-9
CHANGE_TOL = 1e-12
REBREAK_EVERY = 10
MIN_LEVELS = 3
BREAK_FLOOR = 0.0625
EIGEN_DEGREE = 48
CONTINUATION = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.97, 0.99)


class NonConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


def ball_volume(ctx, R):
    m = ctx.m
    return ctx.omega(2 * m - 1).float_value * R ** (2 * m) / (2 * m)


# ---------------------------------------------------------------------------
# functionals


def _source_or_spline(u):
    return u.source if u.source is not None else u


def evaluate_functional(u, beta, ball_radius, rel_tol=1e-11):
    """``int_{B_R} exp(beta u^2) dx`` by radial quadrature in log-space."""
    m = u.m
    R = float(ball_radius)
    f_u = _source_or_spline(u)
    log_w = math.log(_omega_odd(m))

    def f(r):
        with np.errstate(divide="ignore"):
            lr = np.log(r)
        return np.exp(beta * np.asarray(f_u(r)) ** 2 + (2 * m - 1) * lr + log_w)

    return adaptive_integrate(f, 0.0, R, rel_tol=rel_tol, breakpoints=_breaks(R))


def _breaks(R):
    return [R * 2.0**-k for k in range(12, 0, -1)]


def _omega_odd(m):
    return 2.0 * math.pi**m / math.factorial(m - 1)


def alpha_norm(u, alpha):
    """``||u||_alpha^2 = int |Delta^{m/2} u|^2 - alpha int u^2``.

    This is the squared form; it is negative when ``alpha`` exceeds the
    Rayleigh quotient of ``u``.
    """
    src = u.source
    if isinstance(src, BallPoly):
        return dirichlet_energy(src) - alpha * src.integrate_ball(power=2)
    if isinstance(src, PiecewiseBall):
        return piecewise_dirichlet_energy(src) - alpha * src.integrate_ball(power=2)
    m = u.m
    rung = apply_radial_polyharmonic(u, Fraction(m, 2))
    r = u.grid.nodes
    w = _omega_odd(m) * r ** (2 * m - 1)
    from scipy.integrate import simpson

    energy = simpson(rung.values**2 * w, x=r)
    mass = simpson(u.values**2 * w, x=r)
    return float(energy - alpha * mass)


# ---------------------------------------------------------------------------
# first eigenpair


def _inverse_matrix(m, R, degree):
    n = degree + 1
    K = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        K[:, j] = solve_polyharmonic_dirichlet(BallPoly.from_values(e, R, m)).values_at_nodes(n)
    return K


@functools.lru_cache(maxsize=64)
def _eigen(m, R, degree):
    K = _inverse_matrix(m, R, degree)
    vals, vecs = np.linalg.eig(K)
    i = int(np.argmax(vals.real))
    nu = vals[i]
    if abs(nu.imag) > 1e-10 * abs(nu.real) or nu.real <= 0:
        raise np.linalg.LinAlgError("dominant eigenvalue not real positive")
    return 1.0 / nu.real, vecs[:, i].real.copy()


def first_eigenvalue(ctx, ball_radius, degree=EIGEN_DEGREE):
    return _eigen(ctx.m, float(ball_radius), int(degree))[0]


def first_eigenpair(ctx, ball_radius=1.0, grid=None, degree=EIGEN_DEGREE):
    """Smallest radial Dirichlet eigenvalue of ``(-Delta)^m`` on ``B_R``.

    Assumes the first eigenfunction is radial.  The eigenfunction is
    normalized in ``L^2`` with a positive value at the center.
    """
    R = float(ball_radius)
    lam, vec = _eigen(ctx.m, R, int(degree))
    phi = BallPoly.from_values(vec, R, ctx.m)
    phi = phi * (1.0 / math.sqrt(phi.integrate_ball(power=2)))
    if phi(0.0) < 0:
        phi = -phi
    grid = grid or RadialGrid.graded(R, n=513)
    return lam, RadialProfile.from_source(phi, grid, ctx.m)


def bessel_j0_zero(k=1):
    """``k``-th positive zero of ``J_0`` from its power series and bisection."""

    def j0(x):
        term, total, n = 1.0, 1.0, 0
        while abs(term) > 1e-18 * max(1.0, abs(total)):
            n += 1
            term *= -(x * x / 4.0) / (n * n)
            total += term
        return total

    # zeros are separated by about pi; bracket by scanning
    a, found = 0.5, 0
    while True:
        b = a + 0.1
        if j0(a) * j0(b) < 0:
            found += 1
            if found == k:
                break
        a = b
    for _ in range(200):
        c = 0.5 * (a + b)
        if j0(a) * j0(c) <= 0:
            b = c
        else:
            a = c
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# maximization


@dataclass
class ProblemConfig:
    ctx: object
    ball_radius: float = 1.0
    alpha: float = 0.0
    beta: float = None
    grid: RadialGrid = None
    modes: int = PIECE_MODES
    damping: float = DAMPING
    max_iters: int = MAX_ITERS
    residual_tol: float = RESIDUAL_TOL
    continuation: tuple = CONTINUATION

    def __post_init__(self):
        if self.beta is None:
            self.beta = 0.5 * self.ctx.beta_star.float_value
        if self.grid is None:
            self.grid = RadialGrid.graded(self.ball_radius, n=513)


@dataclass(frozen=True)
class ExtremalSolution:
    u: RadialProfile
    beta: float
    alpha: float
    lam: float
    mu: float
    F_value: float
    el_residual: float
    iters: int = 0
    ball_radius: float = 1.0
    poly: PiecewiseBall = field(default=None, repr=False)

    @property
    def m(self):
        return self.u.m

    def to_dict(self):
        return {
            "beta": self.beta,
            "alpha": self.alpha,
            "lambda": self.lam,
            "mu": self.mu,
            "S_value": self.F_value,
            "el_residual": self.el_residual,
            "iters": self.iters,
            "ball_radius": self.ball_radius,
        }


def _exp_moment(u, beta):
    """``int u^2 e^{beta u^2}`` over the ball."""
    return u.integrate_function(lambda v: v * v * np.exp(beta * v * v), extra=8)


def _rhs(u, lam, beta, alpha):
    vals = u.node_values()
    return PiecewiseBall.from_node_values(lam * vals * np.exp(beta * vals**2) + alpha * vals, u.R, u.m, u.breaks)


def _solve_normalized(f, alpha):
    """Dirichlet inverse ``w`` of ``f`` scaled to unit ``alpha``-norm, with its forcing.

    ``||w||_alpha^2 = int w f - alpha int w^2`` needs no derivatives of ``w``.
    Returns ``(w, g)`` with ``(-Delta)^m w = g``.
    """
    w = solve_piecewise_dirichlet(f)
    prod = w._like([p * q for p, q in zip(w.pieces, f.pieces)])
    nrm = prod.integrate_ball() - alpha * w.integrate_ball(power=2)
    if nrm <= 0:
        raise ValueError("profile has non-positive alpha-norm")
    c = 1.0 / math.sqrt(nrm)
    return w * c, f * c


def euler_lagrange_residual(u, lam, beta, alpha, top=None, samples=None):
    """``sup|(-Delta)^m u - f(u)| / sup|(-Delta)^m u|`` on every piece.

    ``top`` is a known representation of ``(-Delta)^m u`` (the forcing the
    iterate was solved from); without it the operator is applied by
    differentiating ``u``, which loses accuracy on very short pieces.
    Sampled at ``samples`` points per piece (twice the piece size by
    default), so the check is not restricted to the collocation set.
    """
    if top is None:
        top = u
        for _ in range(u.m):
            top = top.laplacian()
        top = top * (-1) ** u.m
    t = u.node_t(samples or 2 * u.modes)
    vals = np.array([p(ti) for p, ti in zip(u.pieces, t)])
    lhs = np.array([p(ti) for p, ti in zip(top.pieces, t)])
    f = lam * vals * np.exp(beta * vals**2) + alpha * vals
    return float(np.max(np.abs(lhs - f)) / np.max(np.abs(lhs)))


def concentration_scale(ctx, lam, mu, beta):
    """``r`` solving ``omega_{2m} r^{2m} lambda mu^2 e^{beta mu^2} = 1``."""
    m = ctx.m
    om = ctx.omega(2 * m).float_value
    return math.exp(-(math.log(om) + math.log(lam) + 2 * math.log(mu) + beta * mu * mu) / (2 * m))


def _breaks_for(t_scale, ratio=DEFAULT_RATIO, floor=None):
    """Geometric breakpoints reaching ``floor`` times the concentration scale in ``t``."""
    floor = BREAK_FLOOR if floor is None else floor
    levels = max(MIN_LEVELS, int(math.ceil(-math.log(floor * min(t_scale, 1.0)) / math.log(ratio))))
    return geometric_breaks(levels, ratio)


def truncated_bubble_guess(ctx, R, alpha, modes=PIECE_MODES, scale=0.5, breaks=None):
    """Normalized ``(1 - (r/R)^2)^m / (1 + (r/(scale R))^2)`` start."""
    m = ctx.m
    u = PiecewiseBall.from_function(
        lambda r: (1.0 - (r / R) ** 2) ** m / (1.0 + (r / (scale * R)) ** 2),
        R,
        m,
        breaks if breaks is not None else _breaks_for(scale * scale),
        modes,
    )
    return _normalize(u, alpha)


def _normalize(u, alpha):
    nrm = piecewise_dirichlet_energy(u) - alpha * u.integrate_ball(power=2)
    if nrm <= 0:
        raise ValueError("profile has non-positive alpha-norm")
    return u * (1.0 / math.sqrt(nrm))


def _rebreak(u, ctx, beta):
    """Move the breakpoints so the finest piece sits well inside the concentration scale."""
    lam = 1.0 / _exp_moment(u, beta)
    mu = abs(float(u(0.0)))
    rs = concentration_scale(ctx, lam, mu, beta) / u.R
    breaks = _breaks_for(rs * rs)
    if len(breaks) == len(u.breaks):
        return u
    return PiecewiseBall.from_function(u, u.R, u.m, breaks, u.modes)


def _iterate(ctx, u, beta, alpha, damping, max_iters, tol):
    """Fixed point ``u <- (1 - theta) u + theta w/||w||_alpha``.

    ``theta`` is halved only after the change has grown for ``PATIENCE``
    consecutive steps; the breakpoints follow the concentration scale
    every ``REBREAK_EVERY`` steps.  Returns ``(u, top, lam, residual, iters)``
    with ``top = (-Delta)^m u``.
    """
    theta = damping
    best = np.inf
    growth = 0
    res = np.inf
    top = None
    for it in range(1, max_iters + 1):
        if it % REBREAK_EVERY == 1:
            moved = _rebreak(u, ctx, beta)
            if moved is not u:
                u, top = moved, None
        lam = 1.0 / _exp_moment(u, beta)
        w, g = _solve_normalized(_rhs(u, lam, beta, alpha), alpha)
        if theta == 1.0 or top is None:
            u_new, top_new = w, g
        else:
            mix_u = u * (1.0 - theta) + w * theta
            mix_g = top * (1.0 - theta) + g * theta
            prod = mix_u._like([p * q for p, q in zip(mix_u.pieces, mix_g.pieces)])
            c = 1.0 / math.sqrt(prod.integrate_ball() - alpha * mix_u.integrate_ball(power=2))
            u_new, top_new = mix_u * c, mix_g * c
        change = float(np.max(np.abs(u_new.node_values() - u.node_values())))
        u, top = u_new, top_new
        if change > best:
            growth += 1
            if growth >= PATIENCE:
                theta = max(0.5 * theta, MIN_DAMPING)
                growth = 0
        else:
            growth = 0
            best = change
        if change < CHANGE_TOL * max(1.0, abs(float(u(0.0)))):
            lam = 1.0 / _exp_moment(u, beta)
            res = euler_lagrange_residual(u, lam, beta, alpha, top)
            if res < tol:
                if u(0.0) < 0:
                    u, top = -u, -top
                return u, top, lam, res, it
    lam = 1.0 / _exp_moment(u, beta)
    res = euler_lagrange_residual(u, lam, beta, alpha, top)
    raise NonConvergenceError(f"no convergence in {max_iters} iterations, residual {res:.3e}", res)


def maximize_subcritical(cfg, initial=None):
    """Radial critical point of ``F_beta`` on ``M_alpha`` reached from ``initial``.

    Raises
    ------
    ValueError
        If ``beta >= beta*`` or ``alpha >= lambda_1``.
    NonConvergenceError
        If the residual stays above ``residual_tol`` after ``max_iters``.
    """
    ctx = cfg.ctx
    bstar = ctx.beta_star.float_value
    if not 0 < cfg.beta < bstar:
        raise ValueError(f"beta must lie in (0, beta*), got {cfg.beta}")
    lam1 = first_eigenvalue(ctx, cfg.ball_radius)
    if not 0 <= cfg.alpha < lam1:
        raise ValueError(f"alpha must lie in [0, lambda_1={lam1:.6g})")
    R = cfg.ball_radius
    u0 = initial if initial is not None else truncated_bubble_guess(ctx, R, cfg.alpha, cfg.modes)
    u0 = _normalize(u0, cfg.alpha)
    u, top, lam, res, iters = _iterate(ctx, u0, cfg.beta, cfg.alpha, cfg.damping, cfg.max_iters, cfg.residual_tol)
    prof = RadialProfile.from_source(u, cfg.grid, ctx.m)
    F = u.integrate_function(lambda v: np.exp(cfg.beta * v * v), extra=8)
    return ExtremalSolution(prof, cfg.beta, cfg.alpha, lam, float(u(0.0)), F, res, iters, R, u)


def continuation_run(cfg, fractions=None):
    """Solve along ``beta = f * beta*`` for increasing ``f``, warm-starting each step."""
    bstar = cfg.ctx.beta_star.float_value
    out = []
    prev = None
    for frac in fractions or cfg.continuation:
        step = ProblemConfig(**{**cfg.__dict__, "beta": frac * bstar})
        sol = maximize_subcritical(step, initial=prev.poly if prev else None)
        out.append((frac, sol))
        prev = sol
    return out


# ---------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class BlowupDiagnostics:
    r_scale: float
    lambda_mu_sq: float
    predicted_S: float
    profile_sup_error: float
    scale_identity_residual: float
    pre_asymptotic: bool

    def to_dict(self):
        return {
            "r_scale": self.r_scale,
            "lambda_mu_sq": self.lambda_mu_sq,
            "predicted_S": self.predicted_S,
            "profile_sup_error": self.profile_sup_error,
            "scale_identity_residual": self.scale_identity_residual,
            "pre_asymptotic": self.pre_asymptotic,
        }


def blowup_diagnostics(sol, ctx, y_max=4.0, samples=401):
    """Concentration scale, predicted supremum and distance to the bubble.

    ``r_scale`` solves ``omega_{2m} r^{2m} lambda mu^2 e^{beta mu^2} = 1``.
    The rescaled profile ``mu (u(r_scale y) - mu)`` is compared with
    ``eta_0`` on ``|y| <= y_max`` (clipped to the ball).  Profiles with
    ``mu < 2`` are flagged as pre-asymptotic.
    """
    m = ctx.m
    lam, mu, beta = sol.lam, sol.mu, sol.beta
    om = ctx.omega(2 * m).float_value
    log_r = -(math.log(om) + math.log(lam) + 2 * math.log(mu) + beta * mu * mu) / (2 * m)
    r_scale = math.exp(log_r)
    check = math.exp(math.log(om) + 2 * m * log_r + math.log(lam) + 2 * math.log(mu) + beta * mu * mu) - 1.0
    y_top = min(y_max, sol.ball_radius / r_scale)
    y = np.linspace(0.0, y_top, samples)
    eta = mu * (np.asarray(sol.u(r_scale * y)) - mu)
    err = float(np.max(np.abs(eta - eta0(ctx, y))))
    lmu = lam * mu * mu
    vol = ball_volume(ctx, sol.ball_radius)
    return BlowupDiagnostics(r_scale, lmu, vol + 1.0 / lmu, err, check, mu < 2.0)


@dataclass(frozen=True)
class PohozaevReport:
    lhs_boundary_energy: float
    lhs_f_term: float
    rhs_boundary_H: float
    rhs_volume_H: float
    residual: float

    def to_dict(self):
        return {
            "lhs_boundary_energy": self.lhs_boundary_energy,
            "lhs_f_term": self.lhs_f_term,
            "rhs_boundary_H": self.rhs_boundary_H,
            "rhs_volume_H": self.rhs_volume_H,
            "residual": self.residual,
        }


def _rung_at(u, j, r):
    return float(np.asarray(u.polyharmonic(Fraction(j, 2))(r)))


def _dilation(u):
    """``x . grad u = r u_r = 2 t u_t``, again polynomial in ``t`` on each piece."""
    if isinstance(u, PiecewiseBall):
        pieces = []
        for p, a, b in zip(u.pieces, u.breaks[:-1], u.breaks[1:]):
            t = Chebyshev([0.5 * (a + b), 0.5 * (b - a)], domain=[a, b])
            pieces.append(p.deriv() * t * 2.0)
        return u._like(pieces)
    return BallPoly(u.series.deriv() * BallPoly.monomial(1, u.R, u.m).series * 2.0, u.R, u.m)


def pohozaev_terms(u, H, rel_tol=1e-12):
    """Both sides of the Pohozaev identity on ``B_R`` with center ``y = 0``.

    ``u`` is a :class:`BallPoly` or :class:`PiecewiseBall` solving ``(-Delta)^m u = h(u)`` and ``H`` a
    vectorised primitive of ``h`` along the profile, called as ``H(r)``
    (values of ``H(u(r))``).
    """
    m, R = u.m, u.R
    area = _omega_odd(m) * R ** (2 * m - 1)
    t_poly = _dilation(u)
    top = _rung_at(u, m, R)
    lhs_energy = 0.5 * top * top * R * area
    f = 0.0
    for j in range(m):
        f += (-1) ** (m + j) * _rung_at(t_poly, j, R) * _rung_at(u, 2 * m - j - 1, R)
    lhs_f = f * area
    rhs_boundary = float(H(np.array(R))) * R * area

    def vol(r):
        return H(r) * r ** (2 * m - 1)

    if isinstance(u, PiecewiseBall):
        rhs_volume = -2 * m * u.integrate_radial(H)
    else:
        rhs_volume = -2 * m * _omega_odd(m) * adaptive_integrate(vol, 0.0, R, rel_tol=rel_tol, breakpoints=_breaks(R))
    lhs = lhs_energy + lhs_f
    rhs = rhs_boundary + rhs_volume
    residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
    return PohozaevReport(lhs_energy, lhs_f, rhs_boundary, rhs_volume, residual)


def pohozaev_residual(sol):
    """Pohozaev identity on a converged solution with ``h(u) = lambda u e^{beta u^2} + alpha u``."""
    lam, beta, alpha = sol.lam, sol.beta, sol.alpha
    u = sol.poly

    def H(r):
        v = np.asarray(u(r))
        return lam / (2 * beta) * np.expm1(beta * v * v) + 0.5 * alpha * v * v

    return pohozaev_terms(u, H)


def manufactured_pohozaev(ctx, ball_radius=1.0):
    """Pohozaev check on ``u = (1 - (r/R)^2)^m`` with ``h`` read off ``(-Delta)^m u``.

    ``u`` is decreasing, so ``h`` is a function of ``u`` and
    ``H(u(r)) = int_R^r [(-Delta)^m u](s) u'(s) ds``, integrated exactly in ``t``.
    """
    m, R = ctx.m, float(ball_radius)
    u = BallPoly.from_function(lambda r: (1.0 - (r / R) ** 2) ** m, R, m, m)
    top = u
    for _ in range(m):
        top = top.laplacian()
    top = top * (-1) ** m
    # H(u(r)) = int_R^r h u' ds = int_1^t top(tau) u_t(tau) dtau, a polynomial in t
    prim = (top.series * u.series.deriv()).integ(lbnd=1.0)

    def H(r):
        return prim((np.asarray(r, dtype=float) / R) ** 2)

    return pohozaev_terms(u, H)


# ---------------------------------------------------------------------------
# supercritical shift


def supercritical_divergence_demo(ctx, ball_radius, alpha, beta, t_list, degree=EIGEN_DEGREE):
    """``F_beta(t phi_1)`` along ``t_list`` for ``alpha >= lambda_1``.

    Returns ``(rows, norms)`` where ``rows`` holds ``(t, F)`` pairs and
    ``norms`` the values ``||t phi_1||_alpha^2`` (all ``<= 0``).
    """
    lam1, phi = first_eigenpair(ctx, ball_radius, degree=degree)
    if alpha < lam1:
        raise ValueError(f"alpha={alpha} is below lambda_1={lam1}")
    rows, norms = [], []
    base = phi.source
    for t in t_list:
        prof = RadialProfile.from_source(base * float(t), phi.grid, ctx.m)
        norms.append(alpha_norm(prof, alpha))
        rows.append((float(t), evaluate_functional(prof, beta, ball_radius)))
    return rows, norms


def brute_force_bubble_family(ctx, beta, ball_radius=1.0, scales=None, cuts=None):
    """Best ``F_beta`` over normalized truncated bubbles, ``m = 1`` only.

    Candidates are ``v(r) = log((a^2 + 1)/(a^2 + max(r, rho)^2))`` on the
    unit-scaled disk, flat inside ``rho``; each is normalized in the
    Dirichlet norm by quadrature and evaluated with ``scipy.integrate.quad``,
    independently of the spectral machinery.
    """
    from scipy.integrate import quad

    if ctx.m != 1:
        raise ValueError("the truncated-bubble family is implemented for m = 1")
    R = float(ball_radius)
    scales = np.geomspace(0.02, 3.0, 40) if scales is None else scales
    cuts = np.concatenate([[0.0], np.geomspace(1e-3, 0.5, 25)]) if cuts is None else cuts
    best = (-np.inf, None)
    for a in scales:
        for rho in cuts:
            A2 = (a * R) ** 2

            def v(r):
                x = max(r, rho * R)
                return math.log((A2 + R * R) / (A2 + x * x))

            def dv2(r):
                if r < rho * R:
                    return 0.0
                return (2 * r / (A2 + r * r)) ** 2

            pts = [rho * R] if rho > 0 else None
            energy = 2 * math.pi * quad(lambda r: dv2(r) * r, 0.0, R, points=pts, limit=200)[0]
            c = 1.0 / math.sqrt(energy)
            F = 2 * math.pi * quad(lambda r: math.exp(beta * (c * v(r)) ** 2) * r, 0.0, R, points=pts, limit=200, epsabs=0, epsrel=1e-12)[0]
            if F > best[0]:
                best = (F, (a, rho))
    return best


def pohozaev_refinement(ctx, beta, modes=(8, 16), ball_radius=1.0, alpha=0.0):
    """Pohozaev residuals of solutions computed with increasing modes per piece.

    Low resolutions are used on purpose so the discretization error, not
    roundoff, dominates the residual.
    """
    out = []
    for n in modes:
        cfg = ProblemConfig(ctx, ball_radius=ball_radius, alpha=alpha, beta=beta, modes=n, residual_tol=1e-3)
        out.append((n, pohozaev_residual(maximize_subcritical(cfg)).residual))
    return out
