"""Command-line front end.

Every subcommand writes one report (JSON or CSV) to ``--out`` (``-`` for
standard output) plus a run manifest.  Reports are deterministic: they
contain the materialized parameters but no timings, so identical argv gives
byte-identical output.  Wall-clock duration and output paths go to the
manifest sidecar ``<out>.manifest.json``, or to standard error as one JSON
line when writing to standard output.

Exit codes: 0 success, 1 failed check or I/O error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from importlib.metadata import PackageNotFoundError, version

import numpy as np

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


def tool_version():
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


@dataclass
class RunManifest:
    command: str
    parameters: dict
    tool_version: str
    duration_s: float = 0.0
    outputs: list = field(default_factory=list)

    def report_block(self):
        """The deterministic part embedded in every JSON report."""
        return {"command": self.command, "parameters": self.parameters, "tool_version": self.tool_version}


class Report:
    """A JSON payload plus an optional CSV table."""

    def __init__(self, payload, header=None, rows=None, ok=True):
        self.payload = payload
        self.header = header
        self.rows = rows
        self.ok = ok


# ---------------------------------------------------------------------------
# argument types


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if not 1 <= v <= 12:
        raise argparse.ArgumentTypeError(f"m must lie in 1..12, got {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _nonneg_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text!r}")
    return v


def _fraction(text):
    v = _positive_float(text)
    if not v < 1:
        raise argparse.ArgumentTypeError(f"beta fraction must lie in (0, 1), got {v}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=_positive_int, default=1, help="order m (dimension 2m)")
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol", type=_positive_float, default=None, help="main tolerance of the subcommand")

    p = argparse.ArgumentParser(prog="amtlab", description="Adams-type exponential inequality laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("constants", parents=[common], help="exact dimensional constants")

    b = sub.add_parser("bubble", parents=[common], help="bubble ladder, mass and energy")
    b.add_argument("--R", type=_positive_float, default=16.0, help="radius for the energy report (>= 4)")
    b.add_argument("--grid-n", type=int, default=65, help="rows of the CSV ladder table")

    g = sub.add_parser("green", parents=[common], help="Green's function on a ball")
    g.add_argument("--alpha", type=_nonneg_float, default=0.0)
    g.add_argument("--ball-radius", type=_positive_float, default=1.0)
    g.add_argument("--delta", type=_positive_float, default=1e-2)
    g.add_argument("--grid-n", type=int, default=257)

    t = sub.add_parser("testfn", parents=[common], help="glued test function and threshold gap")
    t.add_argument("--alpha", type=_nonneg_float, default=0.0)
    t.add_argument("--ball-radius", type=_positive_float, default=1.0)
    t.add_argument("--eps", type=_positive_float, default=1e-4)
    t.add_argument("--grid-n", type=int, default=257)

    e = sub.add_parser("extremal", parents=[common], help="subcritical radial maximizer")
    e.add_argument("--alpha", type=_nonneg_float, default=0.0)
    e.add_argument("--beta-frac", type=_fraction, default=0.5)
    e.add_argument("--ball-radius", type=_positive_float, default=1.0)
    e.add_argument("--grid-n", type=int, default=257)

    d = sub.add_parser("demo-divergence", parents=[common], help="F_beta(t phi_1) for alpha above lambda_1")
    d.add_argument("--alpha", type=_nonneg_float, default=None, help="shift; default 1.1 lambda_1")
    d.add_argument("--beta-frac", type=_positive_float, default=1.0)
    d.add_argument("--ball-radius", type=_positive_float, default=1.0)
    d.add_argument("--grid-n", type=int, default=13, help="number of t values in [0, 3]")

    v = sub.add_parser("verify-all", parents=[common], help="run the acceptance criteria")
    v.add_argument("--quick", action="store_true", help="cheap m = 1 subset only")
    v.add_argument("--only", type=int, nargs="*", default=None, help="criterion numbers to run")
    return p


# ---------------------------------------------------------------------------
# subcommands


def _ctx(m, with_i_m=False):
    from .constants import build_context, compute_i_m

    ctx = build_context(m)
    return ctx.with_i_m(compute_i_m(ctx, 1e-12)) if with_i_m else ctx


def _claim(label, value, tol, anchor):
    return {"claim": label, "value": value, "tol": tol, "anchor": anchor}


def cmd_constants(args):
    from .constants import check_identities, h_constant

    ctx = _ctx(args.m, with_i_m=True)
    ok = bool(check_identities(ctx)) and h_constant(ctx, "definition") == h_constant(ctx, "remark")
    payload = ctx.to_dict()
    payload["checks"] = [
        _claim("gamma_m = beta*/(2m), K identities, H_m two ways (exact)", ok, 0, "dimensional constants"),
        _claim("I_m by quadrature", ctx.i_m, args.tol or 1e-12, "bubble self-energy"),
    ]
    rows = []
    for name in ("beta_star", "gamma_m", "h_m"):
        c = getattr(ctx, name)
        rows.append([name, c.rational.numerator, c.rational.denominator, c.pi_power, repr(c.float_value)])
    for l, c in sorted(ctx.omega_table.items()):
        rows.append([f"omega_{l}", c.rational.numerator, c.rational.denominator, c.pi_power, repr(c.float_value)])
    rows.append(["i_m", "", "", "", repr(ctx.i_m)])
    return Report(payload, ["name", "num", "den", "pi_pow", "float"], rows, ok)


def cmd_bubble(args):
    from . import bubble

    if args.R < 4:
        raise _Usage("--R must be >= 4")
    ctx = _ctx(args.m, with_i_m=True)
    ladder = bubble.build_ladder(ctx)
    exact = bubble.ladder_exact_checks(ladder)
    rep = bubble.bubble_energy(ctx, ladder, args.R)
    tol = args.tol or 1e-8
    ok = rep.pde_max_residual < tol and all(exact["levels"].values()) and all(exact["halves"].values()) and exact["top"]
    payload = {
        "m": args.m,
        "report": rep.to_dict(),
        "checks": [
            _claim("bubble equation, max relative residual", rep.pde_max_residual, tol, "bubble equation"),
            _claim("ladder tables exact", bool(ok), 0, "half-Laplacian ladder"),
            _claim("bubble energy expansion remainder", rep.energy - rep.energy_prediction, None, "bubble energy expansion"),
        ],
    }
    radii = np.concatenate([[0.0], np.geomspace(1e-2, args.R, max(args.grid_n - 1, 1))])
    header, table = bubble.ladder_table(ladder, radii)
    return Report(payload, header, table.tolist(), bool(ok))


def cmd_green(args):
    from . import greens
    from .extremal import first_eigenvalue

    ctx = _ctx(args.m, with_i_m=True)
    tol = args.tol or 1e-13
    try:
        g = greens.solve_green(ctx, args.alpha, args.ball_radius, tol=tol)
    except greens.SpectralShiftError as exc:
        raise _Usage(str(exc))
    flux, expected, err = greens.green_mass_check(g, 1e-3)
    energy = greens.green_energy_expansion(g, args.delta)
    payload = g.to_dict()
    payload["lambda_1"] = first_eigenvalue(ctx, args.ball_radius)
    payload["energy_expansion"] = energy.to_dict()
    payload["checks"] = [
        _claim("Dirichlet residuals", max(g.dirichlet_residuals), 1e-8, "Green decomposition on balls"),
        _claim("enclosed mass at delta=1e-3", err, 1e-6, "Green decomposition on balls"),
    ]
    ok = max(g.dirichlet_residuals) < 1e-8 and err < 1e-6
    r = np.geomspace(1e-4 * args.ball_radius, args.ball_radius, args.grid_n)
    header, table = g.profile_table(r)
    return Report(payload, header, table.tolist(), ok)


def cmd_testfn(args):
    from . import greens, testfn

    ctx = _ctx(args.m, with_i_m=True)
    try:
        g = greens.solve_green(ctx, args.alpha, args.ball_radius)
    except greens.SpectralShiftError as exc:
        raise _Usage(str(exc))
    try:
        tf = testfn.assemble_test_function(ctx, args.alpha, g, args.eps)
    except ValueError as exc:
        raise _Usage(str(exc))
    gap = testfn.evaluate_threshold_gap(tf)
    payload = tf.to_dict()
    payload.update(gap.to_dict())
    tol = args.tol or 1e-9
    payload["checks"] = [
        _claim("interface continuity, max relative jump", max(tf.interface_residuals), tol, "matching polynomial"),
        _claim("threshold gap positive", gap.gap, 0, "test-function lower bound"),
    ]
    ok = max(tf.interface_residuals) < tol
    r = np.geomspace(tf.eps * 1e-2, args.ball_radius, args.grid_n)
    header, table = testfn.profile_table(tf, r)
    return Report(payload, header, table.tolist(), ok)


def cmd_extremal(args):
    from . import extremal

    ctx = _ctx(args.m, with_i_m=True)
    lam1 = extremal.first_eigenvalue(ctx, args.ball_radius)
    if args.alpha >= lam1:
        raise _Usage(f"--alpha must be below lambda_1 = {lam1:.10g}")
    beta = args.beta_frac * ctx.beta_star.float_value
    cfg = extremal.ProblemConfig(ctx, ball_radius=args.ball_radius, alpha=args.alpha, beta=beta, residual_tol=args.tol or extremal.RESIDUAL_TOL)
    steps = [f for f in extremal.CONTINUATION if f < args.beta_frac] + [args.beta_frac]
    run = extremal.continuation_run(cfg, steps)
    sol = run[-1][1]
    diag = extremal.blowup_diagnostics(sol, ctx)
    poh = extremal.pohozaev_residual(sol)
    payload = sol.to_dict()
    payload["m"] = args.m
    payload["lambda_1"] = lam1
    payload["continuation"] = [{"beta_frac": f, "mu": s.mu, "S_value": s.F_value} for f, s in run]
    payload["blowup"] = diag.to_dict()
    payload["pohozaev"] = poh.to_dict()
    payload["checks"] = [
        _claim("Euler-Lagrange residual", sol.el_residual, cfg.residual_tol, "subcritical maximizer"),
        _claim("Pohozaev residual", poh.residual, 1e-6, "Pohozaev identity"),
    ]
    if ctx.m >= 2:
        payload["note"] = "radial-constrained maximizer: a certified lower bound only"
    ok = poh.residual < 1e-6
    r = np.linspace(0.0, args.ball_radius, args.grid_n)
    return Report(payload, ["r", "u"], np.column_stack([r, sol.poly(r)]).tolist(), ok)


def cmd_divergence(args):
    from . import extremal

    ctx = _ctx(args.m)
    lam1 = extremal.first_eigenvalue(ctx, args.ball_radius)
    alpha = 1.1 * lam1 if args.alpha is None else args.alpha
    if alpha < lam1:
        raise _Usage(f"--alpha must be >= lambda_1 = {lam1:.10g}")
    ts = np.linspace(0.0, 3.0, args.grid_n)
    beta = args.beta_frac * ctx.beta_star.float_value
    rows, norms = extremal.supercritical_divergence_demo(ctx, args.ball_radius, alpha, beta, ts)
    vol = extremal.ball_volume(ctx, args.ball_radius)
    Fs = [F for _, F in rows]
    ok = max(norms) <= 1e-9 and all(b > a for a, b in zip(Fs, Fs[1:]))
    payload = {
        "m": args.m,
        "alpha": alpha,
        "lambda_1": lam1,
        "beta": beta,
        "volume": vol,
        "rows": [{"t": t, "F": F, "alpha_norm_sq": n} for (t, F), n in zip(rows, norms)],
        "checks": [_claim("max ||t phi_1||_alpha^2", max(norms), 1e-9, "divergence above lambda_1"), _claim("max F / |Omega|", max(Fs) / vol, None, "divergence above lambda_1")],
    }
    table = [[t, F, n] for (t, F), n in zip(rows, norms)]
    return Report(payload, ["t", "F", "alpha_norm_sq"], table, ok)


def cmd_verify(args):
    from . import verify

    numbers = set(args.only) if args.only else None
    results = verify.run_all(numbers, quick=args.quick, echo=lambda line: print(line, file=sys.stderr))
    ok = all(r.passed for r in results)
    payload = {"quick": args.quick, "all_passed": ok, "criteria": [r.to_dict() for r in results]}
    rows = []
    for r in results:
        for c in r.checks:
            rows.append([r.number, c.label, _cell(c.value), _cell(c.target), _cell(c.tol), c.passed])
    return Report(payload, ["criterion", "check", "value", "target", "tol", "passed"], rows, ok)


def _cell(x):
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (list, tuple)):
        return json.dumps(x)
    return "" if x is None else x


COMMANDS = {
    "constants": cmd_constants,
    "bubble": cmd_bubble,
    "green": cmd_green,
    "testfn": cmd_testfn,
    "extremal": cmd_extremal,
    "demo-divergence": cmd_divergence,
    "verify-all": cmd_verify,
}


class _Usage(Exception):
    pass


# ---------------------------------------------------------------------------
# output


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x).__name__}")


def render(report, fmt, manifest):
    if fmt == "json":
        body = {"schema_version": SCHEMA_VERSION, "manifest": manifest.report_block(), "result": report.payload}
        return json.dumps(body, indent=2, sort_keys=True, default=_json_default, allow_nan=True) + "\n"
    if report.header is None:
        raise ValueError("this report has no tabular form")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.header)
    for row in report.rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def emit_report(report, fmt, path, manifest):
    """Write the report and its manifest; returns the list of files written."""
    text = render(report, fmt, manifest)
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return []
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return [path]


def _write_manifest(manifest, path):
    blob = json.dumps(asdict(manifest), sort_keys=True, default=_json_default)
    if path == "-":
        print(blob, file=sys.stderr)
        return
    with open(path + ".manifest.json", "w", encoding="utf-8") as fh:
        fh.write(blob + "\n")


def parse_and_dispatch(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "command")}
    manifest = RunManifest(args.command, params, tool_version())
    t0 = time.perf_counter()
    try:
        report = COMMANDS[args.command](args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"amtlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        manifest.outputs = emit_report(report, args.format, args.out, manifest)
        manifest.duration_s = time.perf_counter() - t0
        _write_manifest(manifest, args.out)
    except OSError as exc:
        print(f"amtlab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK if report.ok else EXIT_CHECK


def main(argv=None):
    return parse_and_dispatch(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
