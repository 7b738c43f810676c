"""Registry of the acceptance checks.

Each criterion returns a :class:`CriterionResult` made of named sub-checks
with the value found, the target and the tolerance used.  ``quick=True``
restricts a criterion to its cheap ``m = 1`` parts (criteria with nothing
cheap to offer are skipped), which is what ``verify-all --quick`` runs.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import bubble, constants, extremal, greens, testfn
from .numerics.fitting import fit_decay
from .numerics.radial import RadialGrid, RadialProfile, integration_by_parts_gap


@dataclass
class SubCheck:
    label: str
    value: object
    target: object
    tol: object
    passed: bool

    def to_dict(self):
        return {"label": self.label, "value": _plain(self.value), "target": _plain(self.target), "tol": _plain(self.tol), "passed": bool(self.passed)}


@dataclass
class CriterionResult:
    number: int
    title: str
    anchor: str
    checks: list = field(default_factory=list)
    skipped: bool = False
    elapsed: float = 0.0

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "criterion": self.number,
            "title": self.title,
            "anchor": self.anchor,
            "passed": self.passed,
            "skipped": self.skipped,
            "checks": [c.to_dict() for c in self.checks],
        }

    def line(self):
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        failed = [c.label for c in self.checks if not c.passed]
        tail = f"  failing: {', '.join(failed)}" if failed else ""
        return f"[{status}] criterion {self.number:2d}: {self.title}{tail}"


def _plain(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def close(label, value, target, tol, relative=False):
    value, target = float(value), float(target)
    err = abs(value - target)
    if relative:
        err /= abs(target)
    return SubCheck(label, value, target, tol, bool(err <= tol))


def below(label, value, bound):
    return SubCheck(label, float(value), f"< {bound}", bound, bool(float(value) < bound))


def holds(label, ok, value=None, target=True):
    return SubCheck(label, value if value is not None else bool(ok), target, None, bool(ok))


# ---------------------------------------------------------------------------
# shared, cached computations


@functools.lru_cache(maxsize=None)
def context(m):
    ctx = constants.build_context(m)
    return ctx.with_i_m(constants.compute_i_m(ctx, 1e-12))


@functools.lru_cache(maxsize=None)
def green(m, alpha_frac, ball_radius=1.0):
    ctx = context(m)
    alpha = alpha_frac * extremal.first_eigenvalue(ctx, ball_radius) if alpha_frac else 0.0
    return greens.solve_green(ctx, alpha, ball_radius)


@functools.lru_cache(maxsize=None)
def continuation(m, fractions, alpha_frac=0.0):
    ctx = context(m)
    alpha = alpha_frac * extremal.first_eigenvalue(ctx, 1.0) if alpha_frac else 0.0
    cfg = extremal.ProblemConfig(ctx, alpha=alpha)
    return tuple(extremal.continuation_run(cfg, fractions))


SOUNDNESS_FRACS = (0.5, 0.7, 0.9)
BLOWUP_FRACS = (0.5, 0.7, 0.9, 0.95, 0.99)


# ---------------------------------------------------------------------------
# criteria


def c01_exact_constants(quick=False):
    checks = []
    t0 = time.perf_counter()
    ms = (1,) if quick else tuple(range(1, 9))
    for m in ms:
        try:
            ctx = constants.build_context(m)
            constants.check_identities(ctx)
            same = constants.h_constant(ctx, "definition") == constants.h_constant(ctx, "remark")
            gamma = ctx.gamma_m == ctx.beta_star / constants.ExactConstant(Fraction(2 * m))
            checks.append(holds(f"m={m} gamma, K identities, H_m two ways", same and gamma))
        except constants.IdentityError as exc:
            checks.append(holds(f"m={m} identities", False, str(exc)))
    checks.append(below("runtime seconds", time.perf_counter() - t0, 1.0))
    return checks


def c02_bubble_self_energy(quick=False):
    checks = []
    t0 = time.perf_counter()
    ctx1 = constants.build_context(1)
    checks.append(close("I_1 vs -1/(4 pi)", constants.compute_i_m(ctx1, 1e-12), -1 / (4 * math.pi), 1e-10, relative=True))
    for m in (1,) if quick else (1, 2, 3, 4):
        ctx = constants.build_context(m)
        quad = constants.compute_i_m(ctx, 1e-12)
        ladder = bubble.self_energy_via_ladder(bubble.build_ladder(ctx))
        checks.append(close(f"m={m} I_m quadrature vs ladder pairing", quad, ladder, 1e-8))
    checks.append(below("runtime seconds", time.perf_counter() - t0, 10.0))
    return checks


def c03_bubble_pde(quick=False):
    checks = []
    for m in (1,) if quick else (1, 2, 3):
        ladder = bubble.build_ladder(constants.build_context(m))
        checks.append(below(f"m={m} max relative PDE residual", bubble.pde_residual(ladder), 1e-8))
    return checks


def c04_bubble_mass(quick=False):
    checks = [close("m=1 mass(2)", bubble.bubble_mass(constants.build_context(1), 2.0), 0.5, 1e-10)]
    for m in (1,) if quick else (1, 2, 3):
        fit = bubble.mass_decay_fit(constants.build_context(m))
        checks.append(close(f"m={m} mass deficit decay exponent", fit.exponent, 2 * m, 0.1))
    return checks


def c05_bubble_energy(quick=False):
    checks = []
    for m in (1,) if quick else (1, 2):
        ctx = context(m)
        fit, _ = bubble.energy_decay_fit(ctx, bubble.build_ladder(ctx))
        checks.append(close(f"m={m} energy remainder exponent (power-log)", fit.exponent, 2.0, 0.3))
    return checks


def c06_green(quick=False):
    checks = []
    g1 = green(1, 0.0)
    checks.append(close("m=1 alpha=0 C", g1.C, 0.0, 1e-10))
    cases = [(1, 0.0)] if quick else [(1, 0.0), (2, 0.0), (1, 0.5), (2, 0.5)]
    if not quick:
        checks.append(close("m=2 alpha=0 C vs -1/(16 pi^2)", green(2, 0.0).C, -1 / (16 * math.pi**2), 1e-8))
    for m, af in cases:
        g = green(m, af)
        checks.append(below(f"m={m} alpha={af}l1 Dirichlet residual", max(g.dirichlet_residuals), 1e-8))
        flux, expected, err = greens.green_mass_check(g, 1e-3)
        checks.append(SubCheck(f"m={m} alpha={af}l1 enclosed mass at delta=1e-3", flux, expected, 1e-6, err <= 1e-6))
    return checks


EXPANSION_DELTAS = tuple(float(d) for d in np.geomspace(1e-3, 1e-1, 7))


def c07_green_energy(quick=False):
    checks = []
    g1 = green(1, 0.0)
    worst = max(abs(greens.green_energy_expansion(g1, d).residual) for d in EXPANSION_DELTAS)
    checks.append(below("m=1 alpha=0 max residual", worst, 1e-10))
    if quick:
        return checks
    for m, af in ((1, 0.5), (2, 0.3)):
        g = green(m, af)
        samples = [(1.0 / d, abs(greens.green_energy_expansion(g, d).residual)) for d in EXPANSION_DELTAS]
        fit = fit_decay(samples, model="power_log")
        checks.append(close(f"m={m} alpha={af}l1 residual rate (delta |log delta|)", fit.exponent, 1.0, 0.3))
    return checks


def c08_matching(quick=False):
    checks = []
    for m in (1,) if quick else (1, 2, 3, 4):
        ctx = context(m)
        worst = 0.0
        for eps in (1e-2, 1e-4, 1e-8):
            for R in (abs(math.log(eps)), 8.0, 64.0):
                p = testfn.build_matching_polynomial(ctx, eps, max(R, 4.0), 1.0, tol=1.0)
                worst = max(worst, max(p.residuals))
        checks.append(below(f"m={m} worst matching residual", worst, 1e-9))
        if m >= 2:
            for j, fit in testfn.d_decay_fits(ctx).items():
                checks.append(close(f"m={m} |d_{j}(R)| decay exponent", fit.exponent, 2.0, 0.3))
    return checks


def _certify(m, quick):
    ctx = context(m)
    g = green(m, 0.0)
    tf = testfn.assemble_test_function(ctx, 0.0, g, 1e-4)
    gap = testfn.evaluate_threshold_gap(tf)
    out = [holds(f"m={m} F(u_eps) > threshold at eps=1e-4", gap.gap > 0, [gap.F_value, gap.threshold])]
    if m == 1:
        out.append(close("m=1 threshold vs pi(1+e)", gap.threshold, math.pi * (1 + math.e), 1e-12, relative=True))
    if quick:
        return out
    ratio = gap.gap / gap.predicted_gap
    out.append(SubCheck(f"m={m} gap / ((beta*/mu^2)||G||^2)", ratio, "[0.5, 2]", 2.0, 0.5 <= ratio <= 2.0))
    fit, _ = testfn.mu_expansion_fit(ctx, 0.0, g)
    out.append(close(f"m={m} mu_eps^2 remainder exponent (power-log in R_eps)", fit.exponent, 2.0, 0.5))
    return out


def c09_certification(quick=False):
    t0 = time.perf_counter()
    checks = _certify(1, quick)
    if not quick:
        checks += _certify(2, quick)
    checks.append(below("runtime seconds", time.perf_counter() - t0, 60.0))
    return checks


def c10_solver(quick=False):
    checks = []
    ctx = context(1)
    lam1 = extremal.first_eigenvalue(ctx, 1.0)
    checks.append(close("lambda_1 vs j_{0,1}^2", lam1, extremal.bessel_j0_zero(1) ** 2, 1e-4))
    fracs = (0.5,) if quick else SOUNDNESS_FRACS
    run = continuation(1, fracs)
    for f, sol in run:
        checks.append(below(f"beta={f}beta* EL residual", sol.el_residual, 1e-8))
    values = [sol.F_value for _, sol in run]
    if len(values) > 1:
        checks.append(holds("S non-decreasing in beta", all(b >= a for a, b in zip(values, values[1:])), values))
    best, _ = extremal.brute_force_bubble_family(ctx, 0.5 * ctx.beta_star.float_value)
    f05 = run[0][1].F_value
    checks.append(SubCheck("S(0.5 beta*) >= truncated-bubble search - 1e-6", f05, best, 1e-6, f05 >= best - 1e-6))
    return checks


def c11_blowup(quick=False):
    if quick:
        return None
    ctx = context(1)
    run = continuation(1, BLOWUP_FRACS)
    mus = [sol.mu for _, sol in run]
    checks = [holds("mu increasing along continuation", all(b > a for a, b in zip(mus, mus[1:])), mus)]
    diags = {f: extremal.blowup_diagnostics(sol, ctx) for f, sol in run}
    errs = [diags[f].profile_sup_error for f in (0.9, 0.95, 0.99)]
    checks.append(holds("profile error decreasing over 0.9, 0.95, 0.99", errs[0] > errs[1] > errs[2], errs))
    last = run[-1][1]
    d = diags[0.99]
    rel = abs(d.predicted_S - last.F_value) / last.F_value
    checks.append(SubCheck("|(|Omega| + 1/(lambda mu^2)) - F| / F at 0.99 beta*", rel, "< 0.15", 0.15, rel < 0.15))
    return checks


def c12_pohozaev(quick=False):
    checks = []
    fracs = (0.5,) if quick else BLOWUP_FRACS
    for f, sol in continuation(1, fracs):
        checks.append(below(f"beta={f}beta* residual", extremal.pohozaev_residual(sol).residual, 1e-6))
    for m in (1,) if quick else (1, 2, 3):
        checks.append(below(f"m={m} manufactured pair residual", extremal.manufactured_pohozaev(context(m)).residual, 1e-6))
    ctx = context(1)
    (n0, r0), (n1, r1) = extremal.pohozaev_refinement(ctx, 0.5 * ctx.beta_star.float_value, (8, 16))
    checks.append(SubCheck(f"residual reduction {n0}->{n1} modes per piece", r0 / r1, ">= 4", 4.0, r0 >= 4 * r1))
    return checks


def c13_divergence(quick=False):
    ctx = context(1)
    lam1 = extremal.first_eigenvalue(ctx, 1.0)
    ts = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
    rows, norms = extremal.supercritical_divergence_demo(ctx, 1.0, 1.1 * lam1, ctx.beta_star.float_value, ts)
    vol = extremal.ball_volume(ctx, 1.0)
    checks = [below("max ||t phi_1||_alpha^2", max(norms), 1e-9)]
    checks.append(close("F(0 phi_1) vs |Omega|", rows[0][1], vol, 1e-10, relative=True))
    Fs = [F for _, F in rows]
    checks.append(holds("F increasing in t", all(b > a for a, b in zip(Fs, Fs[1:])), Fs))
    checks.append(holds("some F > 10 |Omega|", max(Fs) > 10 * vol, max(Fs)))
    return checks


def _ibp_pair(m, R=1.3):
    grid = RadialGrid.graded(R)
    u = RadialProfile.from_function(lambda r: (R * R - r * r) ** m * (1 + r * r), grid, m)
    v = RadialProfile.from_function(lambda r: (R * R - r * r) ** m * (2 - r**4), grid, m)
    return integration_by_parts_gap(u, v)


def c14_selftest_and_determinism(quick=False, cli_runner=None):
    checks = []
    for m in (1,) if quick else (1, 2, 3):
        checks.append(below(f"m={m} integration by parts relative gap", _ibp_pair(m)[2], 1e-8))
    if not quick:
        runner = cli_runner or _cli_determinism
        for name, same in runner():
            checks.append(holds(f"byte-identical rerun: {name}", same))
    return checks


DETERMINISM_RUNS = (
    ("constants", ["constants", "--m", "2"]),
    ("bubble", ["bubble", "--m", "2", "--R", "32"]),
    ("bubble-csv", ["bubble", "--m", "2", "--format", "csv"]),
    ("green", ["green", "--m", "1", "--alpha", "1.0"]),
    ("testfn", ["testfn", "--m", "1", "--eps", "1e-3"]),
    ("extremal", ["extremal", "--m", "1", "--beta-frac", "0.5"]),
    ("demo-divergence", ["demo-divergence", "--m", "1"]),
)


def _cli_determinism():
    import tempfile
    from pathlib import Path

    from .cli import main

    out = []
    with tempfile.TemporaryDirectory() as tmp:
        for name, argv in DETERMINISM_RUNS:
            blobs = []
            for k in range(2):
                path = Path(tmp) / f"{name}-{k}.out"
                code = main(argv + ["--out", str(path)])
                blobs.append(path.read_bytes() if code == 0 and path.exists() else None)
            out.append((name, blobs[0] is not None and blobs[0] == blobs[1]))
    return out


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    anchor: str
    fn: object


CRITERIA = (
    Criterion(1, "exact constants and identities", "dimensional constants", c01_exact_constants),
    Criterion(2, "bubble self-energy I_m", "bubble self-energy", c02_bubble_self_energy),
    Criterion(3, "bubble Liouville equation", "bubble equation", c03_bubble_pde),
    Criterion(4, "bubble mass and its decay", "bubble mass", c04_bubble_mass),
    Criterion(5, "bubble energy expansion", "bubble energy expansion", c05_bubble_energy),
    Criterion(6, "Green's function decomposition", "Green decomposition on balls", c06_green),
    Criterion(7, "Green exterior energy expansion", "Green energy expansion", c07_green_energy),
    Criterion(8, "matching polynomial", "matching polynomial", c08_matching),
    Criterion(9, "test-function certification", "test-function lower bound", c09_certification),
    Criterion(10, "subcritical solver soundness", "subcritical maximizer", c10_solver),
    Criterion(11, "blow-up trends along continuation", "concentration limit", c11_blowup),
    Criterion(12, "Pohozaev identity", "Pohozaev identity", c12_pohozaev),
    Criterion(13, "supercritical shift divergence", "divergence above lambda_1", c13_divergence),
    Criterion(14, "integration by parts and CLI determinism", "integration by parts", c14_selftest_and_determinism),
)


def run_criterion(crit, quick=False):
    t0 = time.perf_counter()
    checks = crit.fn(quick=quick)
    res = CriterionResult(crit.number, crit.title, crit.anchor)
    if checks is None:
        res.skipped = True
    else:
        res.checks = list(checks)
    res.elapsed = time.perf_counter() - t0
    return res


def run_all(numbers=None, quick=False, echo=None):
    """Run the selected criteria in order; ``echo`` receives one line per criterion."""
    out = []
    for crit in CRITERIA:
        if numbers and crit.number not in numbers:
            continue
        res = run_criterion(crit, quick)
        if echo:
            echo(res.line())
        out.append(res)
    return out
