"""The standard bubble ``eta_0(r) = -(m/beta*) log(1 + r^2/4)`` and its ladder.

Writing ``s = r^2``, every integer rung ``Delta^l eta_0`` for ``1 <= l <= m-1``
is ``(m/beta*) N_l(s) / (4+s)^{2l}`` with a polynomial ``N_l`` of degree ``l``
and closed-form rational coefficients ``a_{k,l}``; every half rung
``d/dr Delta^l eta_0`` is ``(m/beta*) r M_l(s) / (4+s)^{2l+1}`` with
coefficients ``b_{k,l}``.  Those tables are validated here in exact rational
arithmetic by applying the radial Laplacian to the rational functions.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .constants import compute_i_m
from .numerics.fitting import fit_decay
from .numerics.quadrature import adaptive_integrate, improper_integrate

PDE_SAMPLE_RADII = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0)


def eta0(ctx, r):
    """Bubble profile; vectorised in ``r``."""
    r = np.asarray(r, dtype=float)
    return -(ctx.m / ctx.beta_star.float_value) * np.log1p(0.25 * r * r)


def eta0_derivative(ctx, order, r):
    """``d^order/dr^order eta_0`` at ``r``, exact for every order.

    Uses ``log(4 + r^2) = 2 Re log(r + 2i)``.
    """
    r = np.asarray(r, dtype=float)
    if order == 0:
        return eta0(ctx, r)
    pref = -(ctx.m / ctx.beta_star.float_value)
    z = (r + 2j) ** (-order)
    return pref * 2.0 * (-1) ** (order - 1) * math.factorial(order - 1) * z.real


def a_coefficient(m, k, l):
    if not 0 <= k <= l <= m - 1 or l < 1:
        raise ValueError(f"a_(k,l) needs 0 <= k <= l, 1 <= l <= m-1; got k={k}, l={l}, m={m}")
    f = math.factorial
    val = Fraction(
        (-1) ** l * f(l - 1) * math.comb(l, k) * f(m + l - 1) * f(m - l + k - 1) * 2 ** (4 * l - 2 * k),
        f(m + k - 1) * f(m - l - 1),
    )
    return val


def b_coefficient(m, k, l, a=None):
    if l == 0:
        if k != 0:
            raise ValueError("b_(k,0) only exists for k = 0")
        return Fraction(-2)
    a = a or (lambda kk, ll: a_coefficient(m, kk, ll))
    if k == l:
        return -2 * l * a(l, l)
    return 8 * (k + 1) * a(k + 1, l) + (2 * k - 4 * l) * a(k, l)


# ---------------------------------------------------------------------------
# exact rational-function arithmetic in s = r^2


def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _pscale(p, c):
    return [c * x for x in p]


def _pmul_linear(p, c0, c1):
    # p(s) * (c0 + c1 s)
    out = [Fraction(0)] * (len(p) + 1)
    for i, x in enumerate(p):
        out[i] += c0 * x
        out[i + 1] += c1 * x
    return out


def _pderiv(p):
    return [i * p[i] for i in range(1, len(p))] or [Fraction(0)]


def _ptrim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def exact_laplacian(num, power, m):
    """``Delta`` of ``num(s)/(4+s)^power`` in dimension ``2m``.

    Returns ``(num', power + 2)``, using ``Delta f = 4 (s f_ss + m f_s)``.
    """
    d = _pderiv(num)
    # f_s = n1 / (4+s)^{p+1},  n1 = N'(4+s) - p N
    n1 = _padd(_pmul_linear(d, 4, 1), _pscale(num, -power))
    d1 = _pderiv(n1)
    # f_ss = n2 / (4+s)^{p+2},  n2 = n1'(4+s) - (p+1) n1
    n2 = _padd(_pmul_linear(d1, 4, 1), _pscale(n1, -(power + 1)))
    out = _padd(_pmul_linear(n2, 0, 4), _pscale(_pmul_linear(n1, 4, 1), 4 * m))
    return _ptrim(out), power + 2


def exact_radial_derivative(num, power):
    """``d/dr`` of ``num(s)/(4+s)^power`` as ``r * num'(s) / (4+s)^(power+1)``."""
    d = _pderiv(num)
    n1 = _padd(_pmul_linear(d, 4, 1), _pscale(num, -power))
    return _ptrim(_pscale(n1, 2)), power + 1


def _peval(p, s):
    out = np.zeros_like(s, dtype=float)
    for c in reversed(p):
        out = out * s + float(c)
    return out


@dataclass(frozen=True)
class BubbleLadder:
    """Coefficient tables ``a_{k,l}`` and ``b_{k,l}`` of the bubble ladder."""

    ctx: object
    a_coeffs: dict
    b_coeffs: dict

    @property
    def m(self):
        return self.ctx.m

    def level_numerator(self, l):
        """``N_l`` so that ``Delta^l eta_0 = (m/beta*) N_l(s)/(4+s)^{2l}``."""
        return [self.a_coeffs[(k, l)] for k in range(l + 1)]

    def half_numerator(self, l):
        return [self.b_coeffs[(k, l)] for k in range(l + 1)]


def build_ladder(ctx):
    """Tabulate and check the closed-form ladder coefficients.

    Raises
    ------
    AssertionError
        If a table entry violates ``a_{l,l} = -2 K~_{m,l}``.
    """
    m = ctx.m
    a = {(k, l): a_coefficient(m, k, l) for l in range(1, m) for k in range(l + 1)}
    b = {(0, 0): Fraction(-2)}
    for l in range(1, m):
        for k in range(l + 1):
            b[(k, l)] = b_coefficient(m, k, l, lambda kk, ll: a[(kk, ll)])
    for l in range(1, m):
        if a[(l, l)] != -2 * ctx.k_tilde_table[l].rational:
            raise AssertionError(f"a_(l,l) != -2 K~ at l={l}")
    return BubbleLadder(ctx, a, b)


def ladder_eval(ladder, j, r):
    """``Delta^{j/2} eta_0`` at radius ``r`` (radial component for odd ``j``).

    ``j = 2m`` returns ``(-1)^m omega_{2m}^{-1} (1 + r^2/4)^{-2m}``.
    """
    ctx = ladder.ctx
    m = ctx.m
    if not 1 <= j <= 2 * m:
        raise ValueError(f"j must lie in 1..{2 * m}, got {j}")
    r = np.asarray(r, dtype=float)
    s = r * r
    pref = m / ctx.beta_star.float_value
    if j == 2 * m:
        return (-1) ** m / ctx.omega(2 * m).float_value * (1.0 + 0.25 * s) ** (-2 * m)
    l = j // 2
    if j % 2 == 0:
        return pref * _peval(ladder.level_numerator(l), s) / (4.0 + s) ** (2 * l)
    return pref * r * _peval(ladder.half_numerator(l), s) / (4.0 + s) ** (2 * l + 1)


def ladder_exact_checks(ladder):
    """Exact residuals of the ladder tables.

    Returns a dict with

    - ``levels``: each closed-form ``N_{l+1}`` equals ``Delta`` of ``N_l``;
    - ``halves``: each ``b`` row equals ``d/dr`` of the matching ``a`` row;
    - ``top``: ``(-Delta)^m eta_0`` from the table equals the constant
      numerator of ``omega_{2m}^{-1} e^{2 beta* eta_0}``.

    All comparisons are in rational arithmetic.
    """
    m = ladder.m
    eta_num_level1 = [Fraction(-16 * m), Fraction(4 * (1 - m))]
    levels = {}
    halves = {}
    prev = eta_num_level1
    for l in range(1, m):
        levels[l] = _ptrim(ladder.level_numerator(l)) == _ptrim(prev)
        num, _ = exact_laplacian(ladder.level_numerator(l), 2 * l, m)
        prev = num
        halves[l] = _ptrim(ladder.half_numerator(l)) == exact_radial_derivative(ladder.level_numerator(l), 2 * l)[0]
    halves[0] = ladder.half_numerator(0) == [Fraction(-2)]
    # top rung: (m/beta*) prev / (4+s)^{2m} should equal (-1)^m 4^{2m} / (omega_{2m} (4+s)^{2m})
    # and beta*/(m omega_{2m}) = (2m-1)! exactly
    top_const = [Fraction((-1) ** m * 4 ** (2 * m) * math.factorial(2 * m - 1))]
    top = _ptrim(prev) == top_const
    return {"levels": levels, "halves": halves, "top": top, "top_numerator": prev}


def pde_residual(ladder, radii=PDE_SAMPLE_RADII):
    """Max relative gap between ``Delta`` of level ``m-1`` and the Liouville right side.

    The left side is the rational Laplacian of the tabulated level ``m-1``
    (``eta_0`` itself for ``m = 1``) evaluated in floating point.
    """
    ctx = ladder.ctx
    m = ctx.m
    checks = ladder_exact_checks(ladder)
    num = checks["top_numerator"]
    s = np.asarray(radii, dtype=float) ** 2
    lhs = (m / ctx.beta_star.float_value) * _peval(num, s) / (4.0 + s) ** (2 * m)
    rhs = (-1) ** m / ctx.omega(2 * m).float_value * np.exp(2 * ctx.beta_star.float_value * eta0(ctx, np.sqrt(s)))
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))


def half_step_residual(ladder, radii=PDE_SAMPLE_RADII):
    """Max relative gap between the ``b`` table and ``d/dr`` of the ``a`` table."""
    ctx = ladder.ctx
    m = ctx.m
    pref = m / ctx.beta_star.float_value
    r = np.asarray(radii, dtype=float)
    s = r * r
    worst = 0.0
    for l in range(0, m):
        if l == 0:
            num, power = [Fraction(-2)], 1
        else:
            num, power = exact_radial_derivative(ladder.level_numerator(l), 2 * l)
        ref = pref * r * _peval(num, s) / (4.0 + s) ** power
        got = ladder_eval(ladder, 2 * l + 1, r)
        scale = np.maximum(np.abs(ref), 1e-300)
        mask = r > 0
        if mask.any():
            worst = max(worst, float(np.max(np.abs(got - ref)[mask] / scale[mask])))
    return worst


def asymptotic_residual(ladder, j, r):
    """``|Delta^{j/2} eta_0 (r) r^j + (2m/beta*) K_{m,j/2}|``."""
    ctx = ladder.ctx
    target = ctx.fundamental.float_value * ctx.k(j).float_value
    return np.abs(ladder_eval(ladder, j, r) * np.asarray(r, dtype=float) ** j + target)


def bubble_mass(ctx, R, rel_tol=1e-12):
    """``omega_{2m}^{-1} int_{B_R} e^{2 beta* eta_0}``, by quadrature."""
    if not R > 0:
        raise ValueError("R must be positive")
    m = ctx.m
    f = _mass_integrand(m)
    val = adaptive_integrate(f, 0.0, R, rel_tol=rel_tol, breakpoints=_geometric_breaks(R))
    return ctx.omega(2 * m - 1).float_value / ctx.omega(2 * m).float_value * val


def bubble_mass_deficit(ctx, R, rel_tol=1e-12):
    """``1 - bubble_mass(R)`` computed directly as the exterior integral.

    Subtracting from one loses all digits once the deficit nears machine
    epsilon, so decay fits use this form.
    """
    m = ctx.m
    val = improper_integrate(_mass_integrand(m), R, rel_tol=rel_tol, tail_decay_hint=2 * m + 1)
    return ctx.omega(2 * m - 1).float_value / ctx.omega(2 * m).float_value * val


def _mass_integrand(m):
    def f(r):
        return r ** (2 * m - 1) * (1.0 + 0.25 * r * r) ** (-2 * m)

    return f


def _geometric_breaks(R, start=1.0):
    out = []
    x = start
    while x < R:
        out.append(x)
        x *= 2.0
    return out


@dataclass(frozen=True)
class BubbleReport:
    R: float
    mass: float
    energy: float
    energy_prediction: float
    pde_max_residual: float
    asymptotic_max_residual: float

    def to_dict(self):
        return asdict(self)


def bubble_energy_integral(ladder, R, rel_tol=1e-13):
    """``int_{B_R} |Delta^{m/2} eta_0|^2`` from the closed-form rung ``j = m``."""
    ctx = ladder.ctx
    m = ctx.m

    def f(r):
        return ladder_eval(ladder, m, r) ** 2 * r ** (2 * m - 1)

    val = adaptive_integrate(f, 0.0, R, rel_tol=rel_tol, breakpoints=_geometric_breaks(R))
    return ctx.omega(2 * m - 1).float_value * val


def energy_prediction(ctx, R):
    if ctx.i_m is None:
        raise ValueError("context has no I_m; call compute_i_m first")
    return ctx.fundamental.float_value * math.log(R / 2.0) + ctx.i_m - ctx.h_m.float_value


def bubble_energy(ctx, ladder, R):
    """Energy of the bubble on ``B_R`` against its logarithmic expansion."""
    if not R >= 4:
        raise ValueError("R must be >= 4")
    if ctx.i_m is None:
        ctx = ctx.with_i_m(compute_i_m(ctx))
    energy = bubble_energy_integral(ladder, R)
    pred = energy_prediction(ctx, R)
    asym = max(float(asymptotic_residual(ladder, j, R)) * R**2 for j in range(1, 2 * ctx.m))
    return BubbleReport(
        R=float(R),
        mass=bubble_mass(ctx, R),
        energy=energy,
        energy_prediction=pred,
        pde_max_residual=pde_residual(ladder),
        asymptotic_max_residual=asym,
    )


def self_energy_via_ladder(ladder, rel_tol=1e-12):
    """``int eta_0 (-Delta)^m eta_0`` over ``R^{2m}`` using the ladder's top rung.

    ``(-Delta)^m eta_0`` is taken as ``(-1)^m Delta`` of level ``m-1`` in
    exact arithmetic, so this is independent of the closed-form integrand.
    """
    ctx = ladder.ctx
    m = ctx.m
    num = ladder_exact_checks(ladder)["top_numerator"]
    pref = m / ctx.beta_star.float_value

    def f(r):
        s = r * r
        top = (-1) ** m * pref * _peval(num, s) / (4.0 + s) ** (2 * m)
        return eta0(ctx, r) * top * r ** (2 * m - 1)

    head = adaptive_integrate(f, 0.0, 2.0, rel_tol=rel_tol)
    tail = improper_integrate(f, 2.0, rel_tol=rel_tol, tail_decay_hint=2 * m + 1, log_factor=True)
    return ctx.omega(2 * m - 1).float_value * (head + tail)


def mass_decay_fit(ctx, radii=(10.0, 31.6227766, 100.0, 316.227766, 1000.0)):
    return fit_decay([(R, bubble_mass_deficit(ctx, R)) for R in radii])


def energy_decay_fit(ctx, ladder, radii=(16.0, 32.0, 64.0, 128.0, 256.0, 512.0)):
    if ctx.i_m is None:
        ctx = ctx.with_i_m(compute_i_m(ctx, 1e-12))
    samples = [(R, bubble_energy_integral(ladder, R) - energy_prediction(ctx, R)) for R in radii]
    return fit_decay(samples, model="power_log"), samples


def asymptotic_decay_fits(ladder, radii=(10.0, 31.6227766, 100.0, 316.227766, 1000.0)):
    m = ladder.m
    return {j: fit_decay([(r, float(asymptotic_residual(ladder, j, r))) for r in radii]) for j in range(1, 2 * m)}


def ladder_table(ladder, radii):
    """Rows ``(r, eta_0, Delta^{1/2} eta_0, ..., Delta^{m} eta_0)`` for CSV output."""
    m = ladder.m
    r = np.asarray(radii, dtype=float)
    cols = [r, eta0(ladder.ctx, r)] + [ladder_eval(ladder, j, r) for j in range(1, 2 * m + 1)]
    header = ["r", "eta0"] + [f"laplacian_level_{j}_2" for j in range(1, 2 * m + 1)]
    return header, np.column_stack(cols)
