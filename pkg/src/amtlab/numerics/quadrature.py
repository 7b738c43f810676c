"""Adaptive quadrature on finite and semi-infinite intervals.

Integrands are called with numpy arrays of abscissae and must return arrays
of the same shape.  Panels are refined globally by largest error estimate,
where the estimate compares a 15-point Gauss-Legendre rule on a panel with
the same rule applied to both halves.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)

MAX_PANELS = 6000


class QuadratureError(RuntimeError):
    """Raised when refinement stops before reaching the requested tolerance.

    ``estimate`` and ``error`` carry the best partial answer.
    """

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


def _eval(f, x):
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape)
    if np.isnan(y).any():
        raise ValueError("integrand returned NaN")
    return y


def _panel(f, a, b):
    # whole panel and its two halves in one call
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    h2 = 0.5 * h
    x = np.concatenate([c + h * _GL_NODES, 0.5 * (a + c) + h2 * _GL_NODES, 0.5 * (c + b) + h2 * _GL_NODES])
    y = _eval(f, x)
    n = _GL_NODES.size
    coarse = h * np.dot(_GL_WEIGHTS, y[:n])
    left = h2 * np.dot(_GL_WEIGHTS, y[n : 2 * n])
    right = h2 * np.dot(_GL_WEIGHTS, y[2 * n :])
    fine = left + right
    return fine, abs(fine - coarse)


def adaptive_integrate(f, a, b, rel_tol=1e-10, abs_tol=0.0, breakpoints=(), max_panels=MAX_PANELS):
    """Integrate ``f`` over ``[a, b]`` to relative tolerance ``rel_tol``.

    Parameters
    ----------
    f : callable
        Vectorised integrand.
    a, b : float
        Finite limits with ``a < b``.
    rel_tol : float
        Requested relative accuracy, in ``(0, 1e-2]``.
    abs_tol : float
        Absolute floor below which the estimate is accepted regardless of
        ``rel_tol`` (useful when the integral is zero).
    breakpoints : sequence of float
        Interior points where the integrand is not smooth; panels never
        straddle them.

    Returns
    -------
    float
    """
    if not (a < b):
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if not (0.0 < rel_tol <= 1e-2):
        raise ValueError(f"rel_tol must lie in (0, 1e-2], got {rel_tol}")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("limits must be finite; use improper_integrate")

    edges = [a] + sorted(p for p in breakpoints if a < p < b) + [b]
    heap = []
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _panel(f, lo, hi)
        total += val
        total_err += err
        heapq.heappush(heap, (-err, lo, hi, val))

    panels = len(heap)
    while total_err > max(rel_tol * abs(total), abs_tol):
        if panels >= max_panels:
            raise QuadratureError(
                f"no convergence after {panels} panels (estimate {total:.16g}, error {total_err:.3g})",
                total,
                total_err,
            )
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            raise QuadratureError("panel width underflow", total, total_err)
        v1, e1 = _panel(f, lo, mid)
        v2, e2 = _panel(f, mid, hi)
        total += v1 + v2 - val
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        panels += 1

    # re-sum to shed accumulated cancellation from the running updates
    total = math.fsum(item[3] for item in heap)
    return total


def improper_integrate(f, a, rel_tol=1e-10, tail_decay_hint=2.0, log_factor=False, max_cutoff=1e150):
    """Integrate ``f`` over ``[a, inf)``.

    The range ``[a, X]`` is compactified by ``r = a + s/(1-s)`` and handed to
    :func:`adaptive_integrate`; the cutoff ``X`` grows by decades until the
    analytic tail bound for ``|f| <= C r**-p`` (optionally times ``log r``)
    drops below a tenth of the tolerance budget.

    Parameters
    ----------
    tail_decay_hint : float
        Decay exponent ``p > 1`` of the integrand.
    log_factor : bool
        Whether the decay carries an extra ``log r`` factor.
    """
    p = float(tail_decay_hint)
    if not p > 1.0:
        raise ValueError(f"tail_decay_hint must exceed 1, got {p}")

    def mapped(s):
        one_minus = 1.0 - s
        r = a + s / one_minus
        return f(r) / (one_minus * one_minus)

    cutoff = max(16.0, 16.0 * abs(a) + 16.0)
    while True:
        s_max = (cutoff - a) / (1.0 + cutoff - a)
        value = adaptive_integrate(mapped, 0.0, s_max, rel_tol=0.05 * rel_tol)
        tail = _tail_bound(f, cutoff, p, log_factor)
        if tail <= 0.1 * rel_tol * abs(value):
            return value
        if cutoff > max_cutoff:
            raise QuadratureError(
                f"tail bound {tail:.3g} still exceeds budget at cutoff {cutoff:.3g}", value, tail
            )
        cutoff *= 10.0


def _tail_bound(f, x, p, log_factor):
    samples = x * np.array([1.0, 1.25, 1.5, 2.0])
    fx = np.abs(_eval(f, samples))
    # largest envelope constant C with |f| = C r^-p (log r) over the samples
    if log_factor:
        logs = np.log(samples)
        c = np.max(fx * samples**p / logs)
        lx = math.log(x)
        return c * x ** (1.0 - p) * (lx / (p - 1.0) + 1.0 / (p - 1.0) ** 2)
    c = np.max(fx * samples**p)
    return c * x ** (1.0 - p) / (p - 1.0)
