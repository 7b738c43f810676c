"""Exact dimensional constants of the critical exponential problem in R^{2m}.

Every constant here has the form ``rational * pi**k``, so it is stored that
way and identities between constants are checked with zero tolerance.  The
one transcendental exception, the bubble self-energy ``I_m``, is computed by
quadrature.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .numerics.quadrature import adaptive_integrate, improper_integrate

M_MAX = 12


@dataclass(frozen=True)
class ExactConstant:
    """The number ``rational * pi**pi_power``."""

    rational: Fraction
    pi_power: int = 0
    float_value: float = field(default=None, compare=False)

    def __post_init__(self):
        q = Fraction(self.rational)
        object.__setattr__(self, "rational", q)
        if q == 0:
            object.__setattr__(self, "pi_power", 0)
        object.__setattr__(self, "float_value", _to_float(q, self.pi_power))

    def __float__(self):
        return self.float_value

    def __mul__(self, other):
        if isinstance(other, ExactConstant):
            return ExactConstant(self.rational * other.rational, self.pi_power + other.pi_power)
        return ExactConstant(self.rational * Fraction(other), self.pi_power)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ExactConstant):
            return ExactConstant(self.rational / other.rational, self.pi_power - other.pi_power)
        return ExactConstant(self.rational / Fraction(other), self.pi_power)

    def __neg__(self):
        return ExactConstant(-self.rational, self.pi_power)

    def __pow__(self, n):
        return ExactConstant(self.rational**n, self.pi_power * n)

    def __add__(self, other):
        if self.rational == 0:
            return other
        if other.rational == 0:
            return self
        if self.pi_power != other.pi_power:
            raise ValueError("sum of different powers of pi is not of the form q*pi^k")
        return ExactConstant(self.rational + other.rational, self.pi_power)

    def to_dict(self):
        return {
            "num": self.rational.numerator,
            "den": self.rational.denominator,
            "pi_pow": self.pi_power,
            "float": self.float_value,
        }

    def __str__(self):
        q = str(self.rational)
        if self.pi_power == 0 or self.rational == 0:
            return q
        return f"({q})*pi^{self.pi_power}"


def _to_float(q, k):
    # numerator and denominator may exceed float range separately
    num, den = q.numerator, q.denominator
    if num == 0:
        return 0.0
    shift = num.bit_length() - den.bit_length()
    mant = Fraction(num, den) / Fraction(2) ** shift
    return math.ldexp(float(mant), shift) * math.pi**k


ZERO = ExactConstant(Fraction(0))


def sphere_measure(l):
    """Surface measure of the unit sphere ``S^l`` in ``R^{l+1}``.

    Odd ``l = 2n - 1`` gives ``2 pi^n / (n-1)!``; even ``l = 2n`` gives
    ``2^{n+1} pi^n / (2n-1)!!``.
    """
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    if l % 2:
        n = (l + 1) // 2
        return ExactConstant(Fraction(2, math.factorial(n - 1)), n)
    n = l // 2
    return ExactConstant(Fraction(2 ** (n + 1), _double_factorial(2 * n - 1)), n)


def _double_factorial(n):
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def k_tilde(m, l):
    """Coefficient of ``|x|^{-2l}`` in ``Delta^l log|x|`` in dimension ``2m``."""
    if not 1 <= l <= m - 1:
        raise ValueError(f"need 1 <= l <= m-1, got l={l}, m={m}")
    val = (-1) ** (l + 1) * 2 ** (2 * l - 1) * math.factorial(l - 1) * math.factorial(m - 1)
    return ExactConstant(Fraction(val, math.factorial(m - l - 1)))


def k_half(m, j):
    """Radial coefficient of the rung ``j/2`` of the ladder applied to ``log|x|``.

    ``Delta^{j/2} log|x| = K_{m,j/2} e_j / |x|^j`` for ``1 <= j <= 2m - 1``.
    """
    if not 1 <= j <= 2 * m - 1:
        raise ValueError(f"need 1 <= j <= 2m-1, got j={j}, m={m}")
    if j == 1:
        return ExactConstant(Fraction(1))
    if j % 2 == 0:
        return k_tilde(m, j // 2)
    return k_tilde(m, (j - 1) // 2) * (-(j - 1))


@dataclass(frozen=True)
class DimensionContext:
    """Exact constants for dimension ``2m``; immutable once built."""

    m: int
    dim: int
    beta_star: ExactConstant
    gamma_m: ExactConstant
    omega_table: dict
    k_tilde_table: dict
    k_table: dict
    h_m: ExactConstant
    i_m: float | None = None

    def omega(self, l):
        return self.omega_table[l]

    def k(self, j):
        return self.k_table[j]

    @property
    def fundamental(self):
        """``2m/beta*``, the coefficient of ``-log|x|`` in the fundamental solution."""
        return ExactConstant(Fraction(2 * self.m)) / self.beta_star

    def with_i_m(self, value):
        return dataclasses.replace(self, i_m=float(value))

    def to_dict(self):
        out = {
            "m": self.m,
            "dim": self.dim,
            "beta_star": self.beta_star.to_dict(),
            "gamma_m": self.gamma_m.to_dict(),
            "omega": {str(l): c.to_dict() for l, c in sorted(self.omega_table.items())},
            "k_tilde": {str(l): c.to_dict() for l, c in sorted(self.k_tilde_table.items())},
            "k_half": {f"{j}/2": c.to_dict() for j, c in sorted(self.k_table.items())},
            "h_m": self.h_m.to_dict(),
            "i_m": self.i_m,
        }
        return out


class IdentityError(AssertionError):
    pass


def build_context(m):
    """All exact constants for dimension ``2m``, with identity checks.

    Raises
    ------
    ValueError
        If ``m`` is outside ``1..12``.
    IdentityError
        If one of the exact identities between the constants fails.
    """
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= M_MAX:
        raise ValueError(f"m must be an integer in 1..{M_MAX}, got {m!r}")
    m = int(m)
    omegas = {l: sphere_measure(l) for l in range(1, 2 * m + 1)}
    beta_star = omegas[2 * m] * (m * math.factorial(2 * m - 1))
    gamma_m = omegas[2 * m - 1] * (2 ** (2 * m - 2) * math.factorial(m - 1) ** 2)
    kt = {l: k_tilde(m, l) for l in range(1, m)}
    kh = {j: k_half(m, j) for j in range(1, 2 * m)}
    h_def = _h_definition(m, beta_star, omegas, kh)
    ctx = DimensionContext(m, 2 * m, beta_star, gamma_m, omegas, kt, kh, h_def)
    check_identities(ctx)
    h_constant(ctx, "definition")
    return ctx


def check_identities(ctx):
    m = ctx.m
    two_m = ExactConstant(Fraction(2 * m))
    if ctx.gamma_m != ctx.beta_star / two_m:
        raise IdentityError(f"gamma_m != beta*/(2m) for m={m}")
    lhs = ctx.fundamental * ctx.k(2 * m - 1)
    rhs = ExactConstant(Fraction((-1) ** (m - 1))) / ctx.omega(2 * m - 1)
    if lhs != rhs:
        raise IdentityError(f"flux identity fails for m={m}: {lhs} != {rhs}")
    pair = ctx.omega(2 * m - 1) * ctx.fundamental * ctx.k(m) ** 2
    if pair != ExactConstant(Fraction(1)):
        raise IdentityError(f"middle-rung identity fails for m={m}: {pair}")
    return True


def _h_definition(m, beta_star, omegas, kh):
    if m == 1:
        return ZERO
    total = ZERO
    for j in range(1, m):
        total = total + kh[j] * kh[2 * m - j - 1] * (-1) ** (j + m)
    fund = ExactConstant(Fraction(2 * m)) / beta_star
    return fund**2 * omegas[2 * m - 1] * total


def _h_remark(m, beta_star):
    if m == 1:
        return ZERO
    s = sum((Fraction((-1) ** ((2 * j) // m), j) for j in range(1, m)), Fraction(0))
    return ExactConstant(Fraction(m)) / beta_star * s


def h_constant(ctx, method="definition"):
    """The boundary-pairing constant ``H_m``.

    ``method="definition"`` sums the products of ladder coefficients of the
    logarithm; ``method="remark"`` uses the harmonic-type sum
    ``(m/beta*) sum_j (-1)^{floor(2j/m)}/j``.  Both are computed and must
    agree exactly.
    """
    if method not in ("definition", "remark"):
        raise ValueError(f"unknown method {method!r}")
    a = _h_definition(ctx.m, ctx.beta_star, ctx.omega_table, ctx.k_table)
    b = _h_remark(ctx.m, ctx.beta_star)
    if a != b:
        raise IdentityError(f"H_m definitions disagree for m={ctx.m}: {a} vs {b}")
    return a if method == "definition" else b


def i_m_integrand(ctx):
    """Radial integrand ``r -> log(1+r^2/4) r^{2m-1} / (4+r^2)^{2m}``."""
    m = ctx.m

    def f(r):
        r = np.asarray(r, dtype=float)
        # r^{2m-1}/(4+r^2)^{2m} written to avoid overflow at huge r
        return np.log1p(r * r / 4.0) * r ** (2 * m - 1) / (4.0 + r * r) ** (2 * m)

    return f


def i_m_prefactor(ctx):
    m = ctx.m
    return -(m * 4.0 ** (2 * m)) / (ctx.beta_star.float_value * ctx.omega(2 * m).float_value)


def compute_i_m(ctx, rel_tol=1e-10):
    """Bubble self-energy ``I_m`` by radial quadrature.

    The integrand decays like ``log r * r^{-2m-1}``, which is the tail model
    handed to the improper integrator.
    """
    if not rel_tol <= 1e-8:
        raise ValueError("rel_tol must be <= 1e-8")
    m = ctx.m
    f = i_m_integrand(ctx)
    # split at r = 2 so the bulk sits on a finite panel set
    head = adaptive_integrate(f, 0.0, 2.0, rel_tol=rel_tol)
    tail = improper_integrate(f, 2.0, rel_tol=rel_tol, tail_decay_hint=2 * m + 1, log_factor=True)
    return i_m_prefactor(ctx) * ctx.omega(2 * m - 1).float_value * (head + tail)


def blowup_threshold(ctx, C, volume):
    """``|Omega| + (omega_{2m}/2^{2m}) exp(beta* (C - I_m))``."""
    if ctx.i_m is None:
        raise ValueError("context has no I_m; call compute_i_m first")
    m = ctx.m
    return volume + ctx.omega(2 * m).float_value / 2 ** (2 * m) * math.exp(ctx.beta_star.float_value * (C - ctx.i_m))
