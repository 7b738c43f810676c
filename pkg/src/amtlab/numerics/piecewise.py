"""Piecewise spectral representation for concentrated radial profiles.

Same variable as :mod:`amtlab.numerics.spectral` (``t = (r/R)^2``) but the
interval ``[0, 1]`` is cut at geometric breakpoints ``q^-K, ..., q^-1`` and
each piece carries its own Chebyshev series.  Profiles that concentrate at
scale ``r_s`` near the center then need only a fixed number of modes per
piece instead of a global degree of order ``R/r_s``.

The inverse Laplacian uses the Volterra form

    W(t) = int_0^t s^(m-1) g(s) ds,      w_t = (R^2/4) W(t) / t^m,

accumulated piece by piece from the center, then ``w = -int_t^1 w_t``
accumulated from the boundary.  On the first piece the quotient is taken in
the scaled form ``int_0^1 s^(m-1) g(t s) ds`` to avoid cancellation.
"""

from __future__ import annotations

import functools
from fractions import Fraction

import numpy as np
from numpy.polynomial import Chebyshev

from .spectral import _sphere_measure_float, faa_di_bruno_radial

PIECE_MODES = 32
DEFAULT_LEVELS = 14
DEFAULT_RATIO = 4.0


def geometric_breaks(levels=DEFAULT_LEVELS, ratio=DEFAULT_RATIO):
    """Breakpoints ``0, ratio^-levels, ..., ratio^-1, 1`` in ``t``."""
    inner = [ratio ** (-k) for k in range(levels, 0, -1)]
    return np.array([0.0] + inner + [1.0])


@functools.lru_cache(maxsize=16)
def _ref_nodes(n):
    x = np.polynomial.chebyshev.chebpts1(n)
    return x


@functools.lru_cache(maxsize=16)
def _gauss(n):
    return np.polynomial.legendre.leggauss(n)


def _map(x, a, b):
    return a + 0.5 * (b - a) * (x + 1.0)


def _interp(values, a, b):
    n = len(values)
    x = _ref_nodes(n)
    coef = np.polynomial.chebyshev.chebfit(x, values, n - 1)
    return Chebyshev(coef, domain=[a, b])


class PiecewiseBall:
    """Radial function on ``B_R`` in dimension ``2m``, piecewise Chebyshev in ``(r/R)^2``."""

    def __init__(self, pieces, breaks, R, m):
        self.pieces = list(pieces)
        self.breaks = np.asarray(breaks, dtype=float)
        self.R = float(R)
        self.m = int(m)

    # construction -------------------------------------------------------
    @classmethod
    def from_function(cls, f, R, m, breaks=None, modes=PIECE_MODES):
        """Interpolate ``f(r)`` on every piece."""
        breaks = geometric_breaks() if breaks is None else np.asarray(breaks, dtype=float)
        x = _ref_nodes(modes)
        pieces = []
        for a, b in zip(breaks[:-1], breaks[1:]):
            t = _map(x, a, b)
            pieces.append(_interp(np.asarray(f(R * np.sqrt(t)), dtype=float), a, b))
        return cls(pieces, breaks, R, m)

    @classmethod
    def from_node_values(cls, values, R, m, breaks):
        values = np.asarray(values, dtype=float)
        pieces = [_interp(v, a, b) for v, a, b in zip(values, breaks[:-1], breaks[1:])]
        return cls(pieces, breaks, R, m)

    def monomial(self, k):
        pieces = []
        for a, b in zip(self.breaks[:-1], self.breaks[1:]):
            p = np.polynomial.Polynomial([0] * k + [1])
            pieces.append(p.convert(kind=Chebyshev, domain=[a, b]))
        return PiecewiseBall(pieces, self.breaks, self.R, self.m)

    @property
    def modes(self):
        return max(len(p.coef) for p in self.pieces)

    @property
    def degree(self):
        return self.modes - 1

    def node_t(self, n=None):
        n = n or self.modes
        x = _ref_nodes(n)
        return np.array([_map(x, a, b) for a, b in zip(self.breaks[:-1], self.breaks[1:])])

    def node_values(self, n=None):
        t = self.node_t(n)
        return np.array([p(ti) for p, ti in zip(self.pieces, t)])

    # evaluation ---------------------------------------------------------
    def _piece_index(self, t):
        idx = np.searchsorted(self.breaks, t, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def eval_t(self, t):
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        out = np.empty_like(flat)
        idx = self._piece_index(flat)
        for i in np.unique(idx):
            sel = idx == i
            out[sel] = self.pieces[i](flat[sel])
        return out.reshape(t.shape) if t.shape else float(out[0])

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.eval_t((r / self.R) ** 2)

    def r_derivative(self, order, r):
        r = np.asarray(r, dtype=float)
        flat = np.atleast_1d(r).ravel()
        t = (flat / self.R) ** 2
        idx = self._piece_index(t)
        out = np.empty_like(flat)
        for i in np.unique(idx):
            sel = idx == i
            s = self.pieces[i]
            derivs = [s(t[sel])]
            for _ in range(order):
                s = s.deriv()
                derivs.append(s(t[sel]))
            out[sel] = faa_di_bruno_radial(derivs, 1.0 / self.R**2, flat[sel], order)
        return out.reshape(r.shape) if r.shape else float(out[0])

    # arithmetic -----------------------------------------------------------
    def _like(self, pieces):
        return PiecewiseBall(pieces, self.breaks, self.R, self.m)

    def __add__(self, other):
        if isinstance(other, PiecewiseBall):
            return self._like([p + q for p, q in zip(self.pieces, other.pieces)])
        return self._like([p + float(other) for p in self.pieces])

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, PiecewiseBall):
            return self._like([p - q for p, q in zip(self.pieces, other.pieces)])
        return self._like([p - float(other) for p in self.pieces])

    def __neg__(self):
        return self._like([-p for p in self.pieces])

    def __mul__(self, c):
        return self._like([p * float(c) for p in self.pieces])

    __rmul__ = __mul__

    def resampled(self, modes=None):
        """Re-interpolate every piece with ``modes`` coefficients."""
        modes = modes or self.modes
        t = self.node_t(modes)
        return PiecewiseBall.from_node_values(
            [p(ti) for p, ti in zip(self.pieces, t)], self.R, self.m, self.breaks
        )

    def truncated(self, degree):
        return self._like([p.cutdeg(degree) if p.degree() > degree else p for p in self.pieces])

    # operators ------------------------------------------------------------
    def laplacian(self):
        out = []
        for p, a, b in zip(self.pieces, self.breaks[:-1], self.breaks[1:]):
            t = Chebyshev([0.5 * (a + b), 0.5 * (b - a)], domain=[a, b])
            d1 = p.deriv()
            d2 = d1.deriv() if p.degree() > 1 else Chebyshev([0.0], domain=[a, b])
            q = (t * d2 + self.m * d1) * (4.0 / self.R**2)
            out.append(q.cutdeg(max(p.degree(), 0)))
        return self._like(out)

    def gradient(self):
        return PiecewiseGradient(self)

    def polyharmonic(self, k):
        k2 = int(2 * Fraction(k))
        out = self
        for _ in range(k2 // 2):
            out = out.laplacian()
        return out.gradient() if k2 % 2 else out

    def inverse_laplacian(self):
        """The regular ``w`` with ``Delta w = self`` and ``w(R) = 0``."""
        m = self.m
        n = self.modes
        x = _ref_nodes(n)
        scale = self.R**2 / 4.0
        slopes = []
        W = 0.0
        for i, (p, a, b) in enumerate(zip(self.pieces, self.breaks[:-1], self.breaks[1:])):
            t = _map(x, a, b)
            if i == 0 and a == 0.0:
                # w_t(t) = scale * int_0^1 s^(m-1) g(t s) ds, exact on this piece
                gx, gw = _gauss((n + m) // 2 + 2)
                s = 0.5 * (gx + 1.0)
                ws = 0.5 * gw * s ** (m - 1)
                vals = scale * (p(np.outer(t, s)) @ ws)
                W = b**m * float(p(b * s) @ ws)
            else:
                integrand = _interp(p(_map(_ref_nodes(n + m), a, b)) * _map(_ref_nodes(n + m), a, b) ** (m - 1), a, b)
                cum = integrand.integ(lbnd=a)
                vals = scale * (W + cum(t)) / t**m
                W = W + float(cum(b))
            slopes.append(_interp(vals, a, b))
        pieces = [None] * len(slopes)
        tail = 0.0
        for i in range(len(slopes) - 1, -1, -1):
            b = self.breaks[i + 1]
            prim = slopes[i].integ(lbnd=b)
            pieces[i] = prim - tail
            tail = tail + float(slopes[i].integ(lbnd=self.breaks[i])(b))
        return self._like(pieces)

    def integrate_ball(self, power=1):
        """``int_{B_R} u^power dx`` by Gauss-Legendre on each piece."""
        n = (power * self.modes + self.m) // 2 + 2
        gx, gw = _gauss(n)
        total = 0.0
        for p, a, b in zip(self.pieces, self.breaks[:-1], self.breaks[1:]):
            t = _map(gx, a, b)
            total += 0.5 * (b - a) * float(np.dot(gw, p(t) ** power * t ** (self.m - 1)))
        return _sphere_measure_float(2 * self.m - 1) * 0.5 * self.R ** (2 * self.m) * total

    def integrate_function(self, func, extra=0):
        """``int_{B_R} func(u(x)) dx`` by Gauss-Legendre on each piece."""
        n = self.modes + self.m + extra
        gx, gw = _gauss(n)
        total = 0.0
        for p, a, b in zip(self.pieces, self.breaks[:-1], self.breaks[1:]):
            t = _map(gx, a, b)
            total += 0.5 * (b - a) * float(np.dot(gw, func(p(t)) * t ** (self.m - 1)))
        return _sphere_measure_float(2 * self.m - 1) * 0.5 * self.R ** (2 * self.m) * total

    def __repr__(self):
        return f"PiecewiseBall(R={self.R}, m={self.m}, pieces={len(self.pieces)}, modes={self.modes})"


class PiecewiseGradient:
    """``d/dr`` of a :class:`PiecewiseBall`, the odd function ``r Q(r^2)``."""

    def __init__(self, base):
        self.base = base
        self.R = base.R
        self.m = base.m
        self.q = base._like([p.deriv() * (2.0 / self.R**2) for p in base.pieces])

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
        q = self.q
        n = q.modes + q.m + 4
        gx, gw = _gauss(n)
        total = 0.0
        for p, a, b in zip(q.pieces, q.breaks[:-1], q.breaks[1:]):
            t = _map(gx, a, b)
            total += 0.5 * (b - a) * float(np.dot(gw, p(t) ** 2 * self.R**2 * t * t ** (self.m - 1)))
        return _sphere_measure_float(2 * self.m - 1) * 0.5 * self.R ** (2 * self.m) * total


def _radial_integral(self, func, extra=8):
    """``int_{B_R} func(r) dx`` for a vectorised ``func`` of the radius."""
    n = self.modes + self.m + extra
    gx, gw = _gauss(n)
    total = 0.0
    for a, b in zip(self.breaks[:-1], self.breaks[1:]):
        t = _map(gx, a, b)
        total += 0.5 * (b - a) * float(np.dot(gw, func(self.R * np.sqrt(t)) * t ** (self.m - 1)))
    return _sphere_measure_float(2 * self.m - 1) * 0.5 * self.R ** (2 * self.m) * total


PiecewiseBall.integrate_radial = _radial_integral


def piecewise_dirichlet_energy(u):
    rung = u.polyharmonic(Fraction(u.m, 2))
    if isinstance(rung, PiecewiseGradient):
        return rung.squared_ball_integral()
    return rung.integrate_ball(power=2)


def solve_piecewise_dirichlet(f, boundary=None):
    """``(-Delta)^m u = f`` with radial derivatives ``boundary`` at ``r = R``."""
    from .linalg import solve_linear_system

    m, R = f.m, f.R
    u = f
    for _ in range(m):
        u = u.inverse_laplacian()
    if m % 2:
        u = -u
    target = np.zeros(m) if boundary is None else np.asarray(boundary, dtype=float)
    basis = [f.monomial(k) for k in range(m)]
    A = np.array([[float(b.r_derivative(i, R)) for b in basis] for i in range(m)])
    rhs = np.array([target[i] - float(u.r_derivative(i, R)) for i in range(m)])
    c = solve_linear_system(A, rhs)
    for ck, b in zip(c, basis):
        u = u + b * ck
    return u.resampled(f.modes)


