"""Command-line front end.

One binary, five subcommands: ``integrate`` applies one of the three
operators to a function on a grid, ``dimension`` estimates the box
dimension of a graph, ``variation`` measures grid variation, ``construct``
materializes catalog functions to CSV/JSON, and ``verify`` runs a named
assertion suite.

Contract: every run prints exactly one human-readable summary line to
stdout; file artifacts are requested explicitly via ``--out`` (and
``--fit-out``).  Failures print a machine-readable JSON object
``{code, message, parameter?}`` to stderr and exit nonzero: 2 for
usage/parameter/domain errors, 3 for resolution/size/numeric errors,
4 for verification failures.  Identical invocations produce byte-identical
artifacts regardless of FRACDIM2D_THREADS.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .boxdim import (
    boxcount_bruteforce_3d,
    default_deltas,
    dimension_fit,
    fit_loglog,
    oscillation_counts,
)
from .constructions import default_box, make_source
from .core import (
    Box,
    CatalogError,
    DomainError,
    FracOrder,
    FunctionSource,
    GridSamples,
    GridSpec,
    NumericError,
    ParameterError,
    ResolutionError,
    SampledSource,
    ShiftedSource,
    SizeError,
    VerificationError,
    read_samples_csv,
    read_samples_json,
    sample,
    write_samples_csv,
    write_samples_json,
)
from .fracint import (
    QuadratureSpec,
    boundedness_certificate,
    hadamard_2d,
    katugampola_2d_grid,
    riemann_liouville_2d,
)
from .variation import arzela_variation, variation_trend
from .verify import run_suite

__all__ = ["main"]


class _UsageError(Exception):
    """Raised in place of argparse's sys.exit so errors share one format."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fail(code: int, message: str, parameter: str | None = None) -> int:
    payload: dict = {"code": code, "message": message}
    if parameter:
        payload["parameter"] = parameter
    print(json.dumps(payload), file=sys.stderr)
    return code


def _parse_floats(text: str, count: int, flag: str) -> list[float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        raise ParameterError(f"{flag} needs {count} comma-separated numbers, got {text!r}", parameter=flag.lstrip("-"))
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ParameterError(f"{flag} has a non-numeric entry in {text!r}", parameter=flag.lstrip("-"))


def _parse_rect(text: str) -> Box:
    a, b, c, d = _parse_floats(text, 4, "--rect")
    return Box(a, b, c, d)


def _parse_grid(text: str) -> tuple[int, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(p.lstrip("+").isdigit() for p in parts):
        raise ParameterError(f"--grid needs two positive integers m,n, got {text!r}", parameter="grid")
    return int(parts[0]), int(parts[1])


def _require(args: argparse.Namespace, name: str) -> float:
    v = getattr(args, name)
    if v is None:
        raise ParameterError(f"--{name} is required", parameter=name)
    return float(v)


def _resolve_source(args: argparse.Namespace) -> tuple[FunctionSource, Box, GridSamples | None]:
    """Source, working box, and (for CSV input) the raw ingested grid.

    CSV/JSON sample files become bilinear interpolants; their own grid is
    returned so commands can reuse the exact node values when neither
    --rect nor --grid overrides them.  Catalog specs fall back to their
    default rectangle.  --shift translates source and default box together.
    """
    spec_text = args.fn
    if spec_text is None:
        raise ParameterError("--fn is required", parameter="fn")
    raw = None
    if spec_text.startswith("csv:"):
        raw = read_samples_csv(spec_text[4:])
        src: FunctionSource = SampledSource(raw, name=spec_text)
        box = raw.spec.rect
    elif spec_text.startswith("json:"):
        raw = read_samples_json(spec_text[5:])
        src = SampledSource(raw, name=spec_text)
        box = raw.spec.rect
    else:
        src = make_source(spec_text)
        box = src.domain if src.domain is not None else default_box(spec_text)
    shift = getattr(args, "shift", None)
    if shift:
        dx, dy = _parse_floats(shift, 2, "--shift")
        src = ShiftedSource(src, dx, dy)
        box = box.shifted(dx, dy)
        raw = None  # the shifted function no longer matches the file's nodes
    if getattr(args, "rect", None):
        box = _parse_rect(args.rect)
    return src, box, raw


def _grid_of(args: argparse.Namespace, src: FunctionSource, box: Box, raw: GridSamples | None, default: int) -> GridSamples:
    """Sampled grid for commands that start from node values."""
    if raw is not None and args.grid is None and not getattr(args, "rect", None):
        return raw
    if args.grid is None:
        m = n = default
    else:
        m, n = _parse_grid(args.grid)
    return sample(src, GridSpec(box, m, n), threads=args.threads)


def _quad_of(args: argparse.Namespace) -> QuadratureSpec:
    return QuadratureSpec(panels=args.panels, grading=args.grading)


def _write_grid(gs: GridSamples, path: str, fmt: str) -> None:
    if fmt == "json":
        write_samples_json(gs, path)
    else:
        write_samples_csv(gs, path)


def _write_json(doc: dict, path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_integrate(args: argparse.Namespace) -> int:
    alpha = _require(args, "alpha")
    beta = _require(args, "beta")
    p, q = float(args.p), float(args.q)
    if args.op == "katugampola":
        if p <= -1.0 or q <= -1.0:
            bad = "p" if p <= -1.0 else "q"
            raise ParameterError(
                f"{bad} must exceed -1; the p = q = -1 logarithmic kernel is a separate operator (--op hadamard)",
                parameter=bad,
            )
    elif p != 0.0 or q != 0.0:
        raise ParameterError(f"--op {args.op} takes no power weights; drop --p/--q", parameter="p" if p else "q")

    src, box, _ = _resolve_source(args)
    m, n = _parse_grid(args.grid) if args.grid else (17, 17)
    spec = GridSpec(box, m, n)
    quad = _quad_of(args)

    if args.op == "katugampola":
        order = FracOrder(alpha, beta, p, q)
        gs = katugampola_2d_grid(src, spec, order, quad, method=args.method, threads=args.threads)
    else:
        op = riemann_liouville_2d if args.op == "riemann-liouville" else hadamard_2d
        if not src.covers(box):
            raise DomainError(f"grid box {box} is not inside the domain of source {src.name!r}")
        vals = np.empty((m, n), dtype=np.float64)
        for i in range(m):
            for j in range(n):
                x, y = spec.node(i, j)
                vals[i, j] = op(src, box, x, y, alpha, beta, quad)
        gs = GridSamples.from_matrix(spec, vals)

    if args.out:
        _write_grid(gs, args.out, args.format)

    corner = gs.value(m - 1, n - 1)
    note = ""
    if args.op == "katugampola" and src.sup_bound is not None:
        cert = boundedness_certificate(src, spec, order, quad, threads=args.threads)
        note = f"; bound ok: sup|I f| = {cert.sup_abs_observed:.6g} <= {cert.bound:.6g}"
    wrote = f" -> {args.out}" if args.out else ""
    print(
        f"integrate {args.op} {src.name} on {box} grid {m}x{n}: "
        f"value({box.b:g},{box.d:g}) = {corner:.17g}{note}{wrote}"
    )
    return 0


def cmd_dimension(args: argparse.Namespace) -> int:
    if args.counts_from:
        if args.fn:
            raise ParameterError("--counts-from replaces --fn; give one or the other", parameter="counts-from")
        rows = np.loadtxt(args.counts_from, delimiter=",", skiprows=1, dtype=np.float64, ndmin=2)
        if rows.ndim != 2 or rows.shape[1] < 2:
            raise ParameterError(f"{args.counts_from}: expected rows of delta,count", parameter="counts-from")
        pts = sorted(((float(d), int(c)) for d, c in rows[:, :2]), key=lambda t: -t[0])
        fit = fit_loglog(pts, which=args.which)
        if args.fit_out:
            _write_json(_fit_doc(fit), args.fit_out)
        print(_fit_line(fit, source=args.counts_from))
        return 0

    src, box, raw = _resolve_source(args)
    gs = _grid_of(args, src, box, raw, default=257)

    if args.integral:
        order = FracOrder(float(args.alpha or 0.5), float(args.beta or 0.5), float(args.p), float(args.q))
        gs = katugampola_2d_grid(src, gs.spec, order, _quad_of(args), method=args.method, threads=args.threads)

    deltas = (
        [float(t) for t in args.deltas.split(",")] if args.deltas else default_deltas(gs.spec)
    )
    if not deltas:
        raise ResolutionError("no usable deltas for this grid; refine the grid or pass --deltas")
    fit = dimension_fit(gs, deltas, which=args.which)

    counts = {d: oscillation_counts(gs, d) for d, _ in fit.points}
    oracle = {}
    if args.oracle:
        oracle = {d: boxcount_bruteforce_3d(gs, d) for d, _ in fit.points}
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write("delta,count_lower,count_upper" + (",count_oracle\n" if oracle else "\n"))
            for d, _ in fit.points:
                bc = counts[d]
                tail = f",{oracle[d]}" if oracle else ""
                fh.write(f"{d:.17g},{bc.n_lower},{bc.n_upper}{tail}\n")
    if args.fit_out:
        _write_json(_fit_doc(fit), args.fit_out)
    print(_fit_line(fit, source=src.name))
    return 0


def _fit_doc(fit) -> dict:
    return {
        "which": fit.which,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "points": [[d, c] for d, c in fit.points],
        "dropped": list(fit.dropped),
    }


def _fit_line(fit, source: str) -> str:
    extra = f", dropped {len(fit.dropped)}" if fit.dropped else ""
    return (
        f"dimension {source} ({fit.which}): slope = {fit.slope:.6f}, "
        f"r^2 = {fit.r_squared:.6f} over {len(fit.points)} deltas{extra}"
    )


def cmd_variation(args: argparse.Namespace) -> int:
    src, box, raw = _resolve_source(args)
    if args.trend:
        if not args.levels:
            raise ParameterError("--trend needs --levels n1,n2,...", parameter="levels")
        try:
            levels = [int(t) for t in args.levels.split(",")]
        except ValueError:
            raise ParameterError(f"--levels has a non-integer entry in {args.levels!r}", parameter="levels")
        series = variation_trend(src, box, levels, threads=args.threads)
        if args.out:
            _write_json({"rect": [box.a, box.b, box.c, box.d], "levels": [[k, v] for k, v in series]}, args.out)
        path = " -> ".join(f"{k}:{v:.6g}" for k, v in series)
        print(f"variation trend {src.name}: {path}")
        return 0
    gs = _grid_of(args, src, box, raw, default=33)
    res = arzela_variation(gs, pinned=args.pinned)
    if args.out:
        _write_json({"value": res.value, "path": [[i, j] for i, j in res.argpath]}, args.out)
    print(
        f"variation {src.name} on {gs.spec.m}x{gs.spec.n} grid: {res.value:.17g} "
        f"(path of {len(res.argpath)} nodes{', pinned' if args.pinned else ''})"
    )
    return 0


def cmd_construct(args: argparse.Namespace) -> int:
    src, box, raw = _resolve_source(args)
    gs = _grid_of(args, src, box, raw, default=257)
    if args.out:
        _write_grid(gs, args.out, args.format)
    lo, hi = float(np.min(gs.values)), float(np.max(gs.values))
    wrote = f" -> {args.out}" if args.out else ""
    print(
        f"construct {src.name}: {gs.spec.m}x{gs.spec.n} grid on {box}, "
        f"values in [{lo:.6g}, {hi:.6g}]{wrote}"
    )
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_suite(args.suite, scale=args.scale, fn=args.fn, g=args.g, threads=args.threads)
    if args.out:
        _write_json(report.to_json(), args.out)
    done = sum(1 for c in report.checks if c.passed)
    line = f"verify {report.suite} ({report.scale}): {done}/{len(report.checks)} checks passed"
    if not report.passed:
        line += "; failed: " + ", ".join(c.name for c in report.checks if not c.passed)
    print(line)
    if not report.passed:
        raise VerificationError(f"suite {report.suite} failed {len(report.checks) - done} checks")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(sub: argparse.ArgumentParser, with_shift: bool = True) -> None:
    sub.add_argument("--fn", help="catalog spec (name[:params], t:<spec>) or csv:/json: sample file")
    sub.add_argument("--rect", help="rectangle a,b,c,d")
    sub.add_argument("--grid", help="grid sizes m,n")
    sub.add_argument("--threads", type=int, default=None, help="worker threads (default: FRACDIM2D_THREADS or 1)")
    if with_shift:
        sub.add_argument("--shift", help="translate the function by dx,dy before use")


def _add_quadrature(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--alpha", type=float, default=None, help="fractional order along x")
    sub.add_argument("--beta", type=float, default=None, help="fractional order along y")
    sub.add_argument("--p", type=float, default=0.0, help="power weight along x (katugampola only)")
    sub.add_argument("--q", type=float, default=0.0, help="power weight along y (katugampola only)")
    sub.add_argument("--panels", type=int, default=64, help="quadrature panels per axis")
    sub.add_argument("--grading", type=float, default=None, help="panel grading exponent in [1,8]")
    sub.add_argument("--method", default="auto", help="grid evaluation route: auto, tensor, separable")


def build_parser() -> _Parser:
    parser = _Parser(prog="fracdim2d", description="fractional integrals, grid variation, box dimension")
    subs = parser.add_subparsers(dest="subcommand", metavar="subcommand")

    p_int = subs.add_parser("integrate", help="apply a fractional operator on a grid", parents=[])
    _add_common(p_int)
    _add_quadrature(p_int)
    p_int.add_argument("--op", default="katugampola", choices=["katugampola", "riemann-liouville", "hadamard"])
    p_int.add_argument("--out", help="write the result grid here")
    p_int.add_argument("--format", default="csv", choices=["csv", "json"])
    p_int.set_defaults(run=cmd_integrate)

    p_dim = subs.add_parser("dimension", help="box-dimension estimate of a function graph")
    _add_common(p_dim)
    _add_quadrature(p_dim)
    p_dim.add_argument("--integral", action="store_true", help="fit the graph of the integral, not of f")
    p_dim.add_argument("--deltas", help="comma-separated box sizes (default: halving ladder)")
    p_dim.add_argument("--which", default="lower", choices=["lower", "upper"])
    p_dim.add_argument("--oracle", action="store_true", help="add direct 3-d box counts (small grids)")
    p_dim.add_argument("--counts-from", dest="counts_from", help="fit pre-computed delta,count rows instead")
    p_dim.add_argument("--out", help="write per-delta counts CSV here")
    p_dim.add_argument("--fit-out", dest="fit_out", help="write the fit JSON here")
    p_dim.set_defaults(run=cmd_dimension)

    p_var = subs.add_parser("variation", help="grid variation (largest monotone-path sum)")
    _add_common(p_var)
    p_var.add_argument("--pinned", action="store_true", help="pin the path endpoint to the far corner")
    p_var.add_argument("--trend", action="store_true", help="variation across refining grids")
    p_var.add_argument("--levels", help="grid levels for --trend, e.g. 64,128,256")
    p_var.add_argument("--out", help="write the value/path (or trend) JSON here")
    p_var.set_defaults(run=cmd_variation)

    p_con = subs.add_parser("construct", help="materialize a catalog function on a grid")
    _add_common(p_con)
    p_con.add_argument("--out", help="write the sample grid here")
    p_con.add_argument("--format", default="csv", choices=["csv", "json"])
    p_con.set_defaults(run=cmd_construct)

    p_ver = subs.add_parser("verify", help="run a named verification suite")
    p_ver.add_argument("suite", help="semigroup, special-cases, separable, boundedness, bv-preservation, dimension-bounds, sandwich")
    p_ver.add_argument("--scale", default="quick", choices=["quick", "full"])
    p_ver.add_argument("--fn", default=None, help="restrict the suite to one catalog function")
    p_ver.add_argument("--g", default=None, help="univariate factor for the separable suite")
    p_ver.add_argument("--threads", type=int, default=None)
    p_ver.add_argument("--out", help="write the JSON report here")
    p_ver.set_defaults(run=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "subcommand", None):
            raise _UsageError("a subcommand is required (integrate, dimension, variation, construct, verify)")
        return args.run(args)
    except _UsageError as exc:
        return _fail(2, str(exc))
    except ParameterError as exc:
        return _fail(2, exc.args[0] if exc.args else str(exc), getattr(exc, "parameter", None))
    except CatalogError as exc:
        return _fail(2, str(exc))
    except DomainError as exc:
        return _fail(2, str(exc))
    except (ResolutionError, SizeError, NumericError) as exc:
        return _fail(3, str(exc))
    except VerificationError as exc:
        return _fail(4, str(exc))
    except OSError as exc:
        return _fail(2, f"{exc.__class__.__name__}: {exc}")
