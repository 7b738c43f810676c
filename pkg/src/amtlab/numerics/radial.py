"""Radial grids, sampled radial profiles and the radial polyharmonic ladder.

Radial functions live on ``[0, R]`` (or an annulus ``[r_in, R]``) in
dimension ``2m``, where the Laplacian reads ``u'' + (2m - 1) u'/r``.  The
operator ``Delta^{k}`` is applied with ``k`` an integer or half-integer; the
half-integer rungs return the scalar radial derivative of the integer rung
below.

Profiles that carry an exact representation (``source``) are differentiated
exactly.  Bare samples use local polynomial fits: an even fit in ``s = r^2``
near the origin and a centered polynomial fit elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.interpolate import make_interp_spline

DEFAULT_NODES = 2048
DEFAULT_GRADING = 2.0
FD_ORDER = 10


class GridTooCoarseError(ValueError):
    pass


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing radii from ``r_inner`` (normally 0) to ``outer``."""

    nodes: np.ndarray
    kind: str = "graded"
    grading: float = DEFAULT_GRADING

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 5:
            raise ValueError("grid needs at least 5 nodes")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        if nodes[0] < 0 or nodes[-1] <= 0:
            raise ValueError("grid must lie in [0, R] with R > 0")

    @classmethod
    def graded(cls, outer, n=DEFAULT_NODES, grading=DEFAULT_GRADING, r_inner=0.0):
        """Nodes clustered algebraically toward both ends.

        Uses ``r = r_in + (R - r_in) g(x)`` with ``g(x) = x^p / (x^p + (1-x)^p)``
        on a uniform ``x`` grid; ``p`` is the grading exponent.
        """
        if not outer > r_inner >= 0:
            raise ValueError(f"need 0 <= r_inner < outer, got {r_inner}, {outer}")
        x = np.linspace(0.0, 1.0, n)
        g = x**grading / (x**grading + (1.0 - x) ** grading)
        nodes = r_inner + (outer - r_inner) * g
        nodes[0], nodes[-1] = r_inner, outer
        return cls(nodes, "graded", grading)

    @classmethod
    def chebyshev(cls, outer, n=DEFAULT_NODES, r_inner=0.0):
        x = 0.5 * (1.0 - np.cos(np.pi * np.arange(n) / (n - 1)))
        nodes = r_inner + (outer - r_inner) * x
        nodes[0], nodes[-1] = r_inner, outer
        return cls(nodes, "chebyshev", 0.0)

    @property
    def outer(self):
        return float(self.nodes[-1])

    @property
    def inner(self):
        return float(self.nodes[0])

    @property
    def size(self):
        return self.nodes.size

    def require_order(self, m):
        if self.size < 4 * m + 1:
            raise GridTooCoarseError(f"grid has {self.size} nodes, order {2 * m} needs {4 * m + 1}")


@dataclass(frozen=True)
class RadialProfile:
    """Samples of a radial function on a grid in dimension ``2m``.

    ``source``, when present, is an exact representation supporting
    ``source(r)``, ``source.polyharmonic(k)`` and ``source.r_derivative(order, r)``;
    the samples are then only a convenience.
    """

    grid: RadialGrid
    values: np.ndarray
    m: int
    source: object = field(default=None, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise ValueError("values must match grid nodes")
        if not np.all(np.isfinite(values)):
            raise ValueError("profile values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.m < 1:
            raise ValueError("m must be >= 1")

    @classmethod
    def from_function(cls, f, grid, m):
        return cls(grid, np.asarray(f(grid.nodes), dtype=float), m)

    @classmethod
    def from_source(cls, source, grid, m):
        return cls(grid, np.asarray(source(grid.nodes), dtype=float), m, source)

    @property
    def r(self):
        return self.grid.nodes

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.source is not None:
            return np.asarray(self.source(r), dtype=float)
        spline = make_interp_spline(self.grid.nodes, self.values, k=5)
        return spline(r)

    def at_boundary(self):
        return float(self.values[-1])


# ---------------------------------------------------------------------------
# operator expansion


def laplacian_expansion(k, m):
    """Coefficients of ``Delta^k`` (or ``d/dr Delta^{k-1/2}``) as
    ``sum c * r^{-p} * D^j`` in dimension ``2m``.

    Returns a dict ``{(p, j): c}`` with exact rational coefficients.
    """
    k2 = _half_steps(k)
    ops = {(0, 0): Fraction(1)}
    n1 = 2 * m - 1
    for _ in range(k2 // 2):
        new = {}
        for (p, j), c in ops.items():
            # D^2 (r^-p D^j)
            _acc(new, (p + 2, j), c * p * (p + 1))
            _acc(new, (p + 1, j + 1), -2 * c * p)
            _acc(new, (p, j + 2), c)
            # (2m-1)/r D (r^-p D^j)
            _acc(new, (p + 2, j), -n1 * c * p)
            _acc(new, (p + 1, j + 1), n1 * c)
        ops = {key: v for key, v in new.items() if v != 0}
    if k2 % 2:
        new = {}
        for (p, j), c in ops.items():
            _acc(new, (p + 1, j), -c * p)
            _acc(new, (p, j + 1), c)
        ops = {key: v for key, v in new.items() if v != 0}
    return ops


def _acc(d, key, v):
    d[key] = d.get(key, 0) + v


def _half_steps(k):
    k2 = 2 * Fraction(k).limit_denominator(2)
    if k2.denominator != 1 or k2 < 0 or Fraction(k) * 2 != k2:
        raise ValueError(f"k must be a non-negative integer or half-integer, got {k}")
    return int(k2)


# ---------------------------------------------------------------------------
# finite differences by local polynomial fitting


def _thin(nodes, h_min):
    keep = [0]
    for i in range(1, nodes.size - 1):
        if nodes[i] - nodes[keep[-1]] >= h_min and nodes[-1] - nodes[i] >= 0.5 * h_min:
            keep.append(i)
    keep.append(nodes.size - 1)
    return nodes[np.array(keep)], np.array(keep)


def _even_rung(coef_s, k2, m):
    """Apply the ladder rung ``k2/2`` to an even polynomial sum a_i s^i."""
    c = np.array(coef_s, dtype=float)
    for _ in range(k2 // 2):
        i = np.arange(1, c.size)
        c = 2 * i * (2 * i + 2 * m - 2) * c[1:] if c.size > 1 else np.zeros(1)
    odd = bool(k2 % 2)
    if odd:
        i = np.arange(1, c.size)
        # d/dr sum a_i s^i = r * sum 2 i a_i s^{i-1}
        c = 2 * i * c[1:] if c.size > 1 else np.zeros(1)
    return c, odd


def apply_radial_polyharmonic(u, k):
    """Return ``Delta^{k} u`` as a new :class:`RadialProfile`.

    For half-integer ``k`` the result is ``d/dr Delta^{k - 1/2} u``.  At
    ``r = 0`` the limits are taken through the even extension, so for example
    ``Delta u(0) = 2m u''(0)``.

    Raises
    ------
    GridTooCoarseError
        If the grid cannot support the stencil for order ``2k``.
    """
    k2 = _half_steps(k)
    if k2 == 0:
        return u
    if u.source is not None:
        src = u.source.polyharmonic(Fraction(k2, 2))
        return RadialProfile.from_source(src, u.grid, u.m)
    return RadialProfile(u.grid, _fd_rung(u.grid.nodes, u.values, k2, u.m), u.m)


def integration_by_parts_gap(u, v):
    """Both sides of ``int Delta^{m/2} u Delta^{m/2} v = int u (-Delta)^m v``.

    Valid when ``u`` and ``v`` vanish to order ``m - 1`` at the outer
    radius, so no boundary terms survive.  Integrals use Simpson's rule on
    the grid nodes.  Returns ``(lhs, rhs, relative_gap)``.
    """
    from scipy.integrate import simpson

    m = u.m
    if v.m != m or v.grid is not u.grid and not np.array_equal(v.grid.nodes, u.grid.nodes):
        raise ValueError("profiles must share m and grid")
    half = Fraction(m, 2)
    a = apply_radial_polyharmonic(u, half).values
    b = apply_radial_polyharmonic(v, half).values
    top = apply_radial_polyharmonic(v, m).values * (-1) ** m
    r = u.grid.nodes
    w = r ** (2 * m - 1)
    lhs = float(simpson(a * b * w, x=r))
    rhs = float(simpson(u.values * top * w, x=r))
    return lhs, rhs, abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def _fd_rung(nodes, values, k2, m):
    order = k2  # highest derivative in r
    npts = order + FD_ORDER + (order % 2 == 0)
    span = nodes[-1] - nodes[0]
    h_min = 0.5 * span * np.finfo(float).eps ** (1.0 / (order + FD_ORDER))
    tn, idx = _thin(nodes, h_min)
    tv = values[idx]
    if tn.size < npts + 2:
        raise GridTooCoarseError(f"{tn.size} usable nodes, need {npts + 2} for order {order}")

    ops = laplacian_expansion(Fraction(k2, 2), m)
    jmax = max(j for _, j in ops)
    origin = nodes[0] == 0.0
    n_even = (k2 + 1) // 2 + FD_ORDER // 2 + 2
    even_limit = tn[min(n_even, tn.size - 1)] * 0.5 if origin else -1.0
    out = np.empty_like(nodes)

    for i, r in enumerate(nodes):
        if origin and r <= even_limit:
            sel = tn[: n_even + 1]
            vals = tv[: n_even + 1]
            scale = sel[-1] ** 2
            x = sel**2 / scale
            coef = np.linalg.solve(np.vander(x, n_even + 1, increasing=True), vals)
            coef = coef / scale ** np.arange(coef.size)
            c, odd = _even_rung(coef, k2, m)
            val = np.polynomial.polynomial.polyval(r * r, c)
            out[i] = val * r if odd else val
            continue
        j0 = int(np.searchsorted(tn, r))
        lo = max(0, min(j0 - npts // 2, tn.size - npts))
        sel = tn[lo : lo + npts]
        vals = tv[lo : lo + npts]
        h = sel[-1] - sel[0]
        x = (sel - r) / h
        coef = np.linalg.solve(np.vander(x, npts, increasing=True), vals)
        derivs = [math.factorial(j) * coef[j] / h**j if j < npts else 0.0 for j in range(jmax + 1)]
        out[i] = sum(float(c) * r ** (-p) * derivs[j] for (p, j), c in ops.items())
    return out


# ---------------------------------------------------------------------------
# exact log-power series


class LogPowerSeries:
    """Finite sum ``sum_q (x_q log r + y_q) r^q`` in dimension ``2m``.

    Radial Laplacians and radial derivatives are exact on this class, which
    makes it the reference differentiator for logarithmic profiles.
    """

    def __init__(self, m, terms=None):
        self.m = int(m)
        self.terms = {}
        for q, (x, y) in (terms or {}).items():
            if x != 0 or y != 0:
                self.terms[q] = (x, y)

    @classmethod
    def log(cls, m, coef=1):
        return cls(m, {0: (coef, 0)})

    def laplacian(self):
        m = self.m
        out = {}
        for q, (x, y) in self.terms.items():
            a = q * (q + 2 * m - 2)
            lx = x * a
            ly = x * (2 * q + 2 * m - 2) + y * a
            px, py = out.get(q - 2, (0, 0))
            out[q - 2] = (px + lx, py + ly)
        return LogPowerSeries(m, out)

    def derivative(self):
        out = {}
        for q, (x, y) in self.terms.items():
            px, py = out.get(q - 1, (0, 0))
            out[q - 1] = (px + x * q, py + x + y * q)
        return LogPowerSeries(self.m, out)

    def polyharmonic(self, k):
        k2 = _half_steps(k)
        s = self
        for _ in range(k2 // 2):
            s = s.laplacian()
        if k2 % 2:
            s = s.derivative()
        return s

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        pos = r > 0
        # r^q log r -> 0 at the origin for q > 0
        lr = np.log(np.where(pos, r, 1.0))
        total = np.zeros_like(r)
        for q, (x, y) in sorted(self.terms.items()):
            rq = r ** float(q) if q >= 0 else np.where(pos, r, np.nan) ** float(q)
            log_term = float(x) * lr * rq
            if x != 0 and q <= 0:
                log_term = np.where(pos, log_term, -np.sign(float(x)) * np.inf if q == 0 else np.nan)
            total = total + log_term + float(y) * rq
        return total

    def r_derivative(self, order, r):
        s = self
        for _ in range(order):
            s = s.derivative()
        return s(r)

    def __add__(self, other):
        out = dict(self.terms)
        for q, (x, y) in other.terms.items():
            px, py = out.get(q, (0, 0))
            out[q] = (px + x, py + y)
        return LogPowerSeries(self.m, out)

    def scaled(self, c):
        return LogPowerSeries(self.m, {q: (c * x, c * y) for q, (x, y) in self.terms.items()})

    def log_part(self):
        return LogPowerSeries(self.m, {q: (x, 0) for q, (x, _) in self.terms.items()})

    def plain_part(self):
        return LogPowerSeries(self.m, {q: (0, y) for q, (_, y) in self.terms.items()})


class SumSource:
    """Sum of exact radial representations, closed under the ladder."""

    def __init__(self, parts):
        self.parts = list(parts)

    def __call__(self, r):
        return sum(np.asarray(p(r), dtype=float) for p in self.parts)

    def polyharmonic(self, k):
        return SumSource([p.polyharmonic(k) for p in self.parts])

    def r_derivative(self, order, r):
        return sum(np.asarray(p.r_derivative(order, r), dtype=float) for p in self.parts)
