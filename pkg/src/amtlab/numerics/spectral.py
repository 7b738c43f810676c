"""Spectral representation of smooth radial functions on a ball.

A smooth radial function is even in ``r``, so it is a smooth function of
``t = (r/R)^2``.  :class:`BallPoly` stores a Chebyshev series in ``t`` on
``[0, 1]``.  In that variable the radial Laplacian in dimension ``2m`` is

    Delta u = (4/R^2) (t u_tt + m u_t),

which maps polynomials of degree ``n`` to degree ``n - 1`` with no loss at the
origin.  Its inverse with a zero value at ``r = R`` is

    w_t(t) = (R^2/4) int_0^1 s^(m-1) g(t s) ds,    w(t) = -int_t^1 w_t,

evaluated by Gauss-Legendre quadrature (exact for polynomial ``g``).
Polyharmonic Dirichlet problems are solved by ``m`` such inversions plus a
small dense solve for the coefficients of the regular harmonic-like terms
``1, t, ..., t^(m-1)``.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

import numpy as np
from numpy.polynomial import Chebyshev

from .linalg import solve_linear_system

DEFAULT_DEGREE = 96
CHOP_TOL = 1e-17


def _cheb(coef):
    return Chebyshev(np.atleast_1d(np.asarray(coef, dtype=float)), domain=[0.0, 1.0])


def t_nodes(n):
    """Chebyshev points of the first kind mapped to ``t in (0, 1)``, ascending."""
    x = np.polynomial.chebyshev.chebpts1(n)
    return 0.5 * (x + 1.0)


def gauss_t(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def faa_di_bruno_radial(derivs_t, a, r, order):
    """``d^order/dr^order f(a r^2)`` from ``f^(k)`` at ``t = a r^2``.

    ``derivs_t[k]`` holds ``f^(k)(a r^2)`` for ``k = 0..order``.
    """
    total = 0.0
    for k in range((order + 1) // 2, order + 1):
        coef = math.factorial(order) / (math.factorial(2 * k - order) * math.factorial(order - k))
        total = total + coef * (2 * a * r) ** (2 * k - order) * a ** (order - k) * derivs_t[k]
    return total


class BallPoly:
    """Smooth radial function on ``B_R`` in dimension ``2m`` as a series in ``(r/R)^2``."""

    def __init__(self, series, R, m):
        self.series = series if isinstance(series, Chebyshev) else _cheb(series)
        self.R = float(R)
        self.m = int(m)

    # construction -------------------------------------------------------
    @classmethod
    def from_function(cls, f, R, m, degree=DEFAULT_DEGREE):
        """Interpolate ``f(r)`` at ``degree + 1`` Chebyshev points in ``t``."""
        t = t_nodes(degree + 1)
        return cls.from_values(np.asarray(f(R * np.sqrt(t)), dtype=float), R, m)

    @classmethod
    def from_values(cls, values, R, m):
        """Interpolant of samples taken at :func:`t_nodes` ``(len(values))``."""
        values = np.asarray(values, dtype=float)
        n = values.size
        t = t_nodes(n)
        series = Chebyshev.fit(t, values, n - 1, domain=[0.0, 1.0], window=[-1.0, 1.0])
        return cls(series, R, m)

    @classmethod
    def monomial(cls, k, R, m):
        """The function ``t^k = (r/R)^(2k)``."""
        p = np.polynomial.Polynomial([0] * k + [1], domain=[0, 1], window=[0, 1])
        return cls(p.convert(kind=Chebyshev, domain=[0.0, 1.0]), R, m)

    @classmethod
    def constant(cls, c, R, m):
        return cls(_cheb([c]), R, m)

    # evaluation ---------------------------------------------------------
    @property
    def degree(self):
        return self.series.degree()

    def t_of(self, r):
        r = np.asarray(r, dtype=float)
        return (r / self.R) ** 2

    def __call__(self, r):
        return self.series(self.t_of(r))

    def values_at_nodes(self, n):
        return self.series(t_nodes(n))

    def r_derivative(self, order, r):
        """Exact ``d^order u / dr^order`` at ``r``."""
        t = self.t_of(r)
        derivs = [self.series(t)]
        s = self.series
        for _ in range(order):
            s = s.deriv()
            derivs.append(s(t))
        return faa_di_bruno_radial(derivs, 1.0 / self.R**2, np.asarray(r, dtype=float), order)

    # arithmetic -----------------------------------------------------------
    def _like(self, series):
        return BallPoly(series, self.R, self.m)

    def __add__(self, other):
        if isinstance(other, BallPoly):
            return self._like(self.series + other.series)
        return self._like(self.series + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, BallPoly):
            return self._like(self.series - other.series)
        return self._like(self.series - float(other))

    def __neg__(self):
        return self._like(-self.series)

    def __mul__(self, c):
        if isinstance(c, BallPoly):
            return self._like(self.series * c.series)
        return self._like(self.series * float(c))

    __rmul__ = __mul__

    def truncated(self, degree):
        coef = self.series.coef
        if coef.size > degree + 1:
            coef = coef[: degree + 1]
        return self._like(_cheb(coef))

    def chopped(self, tol=CHOP_TOL):
        coef = self.series.coef
        scale = np.max(np.abs(coef)) if coef.size else 0.0
        keep = np.nonzero(np.abs(coef) > tol * scale)[0]
        n = keep[-1] + 1 if keep.size else 1
        return self._like(_cheb(coef[:n]))

    # operators ------------------------------------------------------------
    def laplacian(self):
        t = _cheb([0.5, 0.5])
        d1 = self.series.deriv()
        d2 = d1.deriv() if self.series.degree() > 1 else _cheb([0.0])
        out = (t * d2 + self.m * d1) * (4.0 / self.R**2)
        return self._like(out.cutdeg(max(self.series.degree() - 1, 0)))

    def gradient(self):
        return RadialGradient(self)

    def polyharmonic(self, k):
        """``Delta^k`` for integer ``k``; ``d/dr Delta^(k-1/2)`` for half-integer ``k``."""
        k2 = int(2 * Fraction(k))
        out = self
        for _ in range(k2 // 2):
            out = out.laplacian()
        return out.gradient() if k2 % 2 else out

    def inverse_laplacian(self):
        """The regular ``w`` with ``Delta w = self`` and ``w(R) = 0``."""
        coef = self.series.coef
        mat = _inverse_laplacian_matrix(self.m, coef.size)
        out = mat[: coef.size + 1, : coef.size] @ coef
        return self._like(_cheb(out * (self.R**2 / 4.0)))

    def integrate_ball(self, power=1):
        """``int_{B_R} u^power dx`` (exact for polynomial integrands)."""
        n = (power * (self.degree + 1) + self.m) // 2 + 2
        t, w = gauss_t(n)
        vol = _sphere_measure_float(2 * self.m - 1)
        return vol * 0.5 * self.R ** (2 * self.m) * float(np.dot(w, self.series(t) ** power * t ** (self.m - 1)))

    def __repr__(self):
        return f"BallPoly(R={self.R}, m={self.m}, degree={self.degree})"


class RadialGradient:
    """``d/dr`` of a :class:`BallPoly`: an odd function ``r * Q(r^2)``."""

    def __init__(self, base):
        self.base = base
        self.R = base.R
        self.m = base.m
        # d/dr u(t) = (2 r / R^2) u_t(t)
        self.q = BallPoly(base.series.deriv() * (2.0 / self.R**2), self.R, self.m)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return r * self.q(r)

    def r_derivative(self, order, r):
        r = np.asarray(r, dtype=float)
        out = r * self.q.r_derivative(order, r)
        if order:
            out = out + order * self.q.r_derivative(order - 1, r)
        return out

    def polyharmonic(self, k):
        if k == 0:
            return self
        raise ValueError("gradient rung cannot be raised further")

    def squared_ball_integral(self):
        """``int_{B_R} |d/dr u|^2 dx``, exact."""
        deg = max(self.q.degree, 0)
        n = (2 * deg + self.m + 2) // 2 + 2
        t, w = gauss_t(n)
        vol = _sphere_measure_float(2 * self.m - 1)
        vals = self.q.series(t) ** 2 * self.R**2 * t
        return vol * 0.5 * self.R ** (2 * self.m) * float(np.dot(w, vals * t ** (self.m - 1)))


@functools.lru_cache(maxsize=32)
def _inverse_laplacian_table(m, size):
    """Column ``k``: Chebyshev coefficients of the unit-radius inverse of ``T_k``.

    ``w_t(t) = int_0^1 s^(m-1) T_k(t s) ds`` is sampled at Chebyshev points
    (Gauss-Legendre in ``s`` is exact here), interpolated, and integrated
    from ``t = 1``.
    """
    nq = (size + m) // 2 + 2
    s, ws = gauss_t(nq)
    t = t_nodes(size)
    weights = ws * s ** (m - 1)
    theta = np.arccos(np.clip(2.0 * np.outer(t, s) - 1.0, -1.0, 1.0))
    vander = np.polynomial.chebyshev.chebvander(2.0 * t - 1.0, size - 1)
    inv_vander = np.linalg.inv(vander)
    table = np.zeros((size + 1, size))
    for k in range(size):
        wt = np.cos(k * theta) @ weights
        slope = inv_vander @ wt
        table[:, k] = np.polynomial.chebyshev.chebint(slope, lbnd=0.0, scl=0.5)
        # shift so the value at t = 1 (x = 1) vanishes
        table[0, k] -= np.polynomial.chebyshev.chebval(1.0, table[:, k])
    table.setflags(write=False)
    return table


def _inverse_laplacian_matrix(m, n):
    size = 32
    while size < n:
        size *= 2
    return _inverse_laplacian_table(m, size)


def _sphere_measure_float(l):
    if l % 2:
        n = (l + 1) // 2
        return 2.0 * math.pi**n / math.factorial(n - 1)
    n = l // 2
    return 2.0 ** (n + 1) * math.pi**n / math.prod(range(1, 2 * n, 2))


def dirichlet_energy(u):
    """``int_{B_R} |Delta^{m/2} u|^2 dx`` for a :class:`BallPoly`."""
    rung = u.polyharmonic(Fraction(u.m, 2))
    if isinstance(rung, RadialGradient):
        return rung.squared_ball_integral()
    return rung.integrate_ball(power=2)


def solve_polyharmonic_dirichlet(f, boundary=None, degree=None):
    """Solve ``(-Delta)^m u = f`` in ``B_R`` with ``d^i u/dr^i (R) = boundary[i]``.

    Parameters
    ----------
    f : BallPoly
        Right-hand side; its ``m`` and ``R`` fix the problem.
    boundary : sequence of float, optional
        Prescribed radial derivatives ``i = 0..m-1`` at ``r = R``; zero by
        default (homogeneous Dirichlet data).
    degree : int, optional
        Truncate the result to this degree.

    Returns
    -------
    BallPoly
    """
    m, R = f.m, f.R
    u = f
    for _ in range(m):
        u = u.inverse_laplacian()
    if m % 2:
        u = -u
    target = np.zeros(m) if boundary is None else np.asarray(boundary, dtype=float)
    if target.shape != (m,):
        raise ValueError(f"need {m} boundary values")
    basis = [BallPoly.monomial(k, R, m) for k in range(m)]
    A = np.array([[b.r_derivative(i, R) for b in basis] for i in range(m)], dtype=float)
    rhs = np.array([target[i] - u.r_derivative(i, R) for i in range(m)], dtype=float)
    c = solve_linear_system(A, rhs)
    for ck, b in zip(c, basis):
        u = u + b * ck
    if degree is not None:
        u = u.truncated(degree)
    return u
