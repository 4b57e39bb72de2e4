"""Command line front end.

Subcommands:

    spec1d    derivative quadruple and spectral intervals of a 1-D builtin
    spec2d    eigenvalue curve, growth rates, and radius bound (planar)
    classify  winding-based region labeling over a plane grid, SVG figure
    shift     analytic shift-model report plus truncation residuals
    mnc       compactness-rate bounds for an operator expression
    bifurcate bifurcation candidate scan (planar builtin or shift model)

All commands accept --seed (fixes low-discrepancy and restart sequences),
--out PATH (JSON to PATH; CSV/SVG artifacts next to it), and --config FILE
with `key = value` lines overridden by explicit flags.  Identical argv and
seed produce byte-identical outputs.

Exit codes: 0 success, 2 usage error, 3 precondition violated, 4 numeric or
solver failure, 5 result dominated by undecided cells (band violations).

Expression grammar for `mnc --expr` (composition `o` binds tighter than `+`):

    expr    := term ('+' term)*
    term    := factor (('o' | '.') factor)*
    factor  := atom | scale(NUMBER, expr) | '(' expr ')'
    atom    := Identity | ScalarMultiple(c) | IsometryOntoCodim(k)
             | CompactLinear | FiniteRank(r) | LocallyCompactNonlinear
             | KnownRates(alpha=V, omega=V [, d=V, q=V])
    V       := NUMBER | NUMBER..NUMBER | inf
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import dini as dini_mod
from . import estimators, homog2d, structured, svgfig
from .core import (
    EvaluationError,
    NumericError,
    PreconditionError,
    SolverError,
    SpecpointError,
    UnsupportedError,
    UsageError,
)
from .maps import BUILTIN_NAMES, builtin

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_NUMERIC = 4
EXIT_UNDECIDED = 5


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"bad numeric list {text!r}: {exc}") from None


def _parse_pair(text: str) -> complex:
    vals = _parse_floats(text)
    if len(vals) == 1:
        return complex(vals[0], 0.0)
    if len(vals) == 2:
        return complex(vals[0], vals[1])
    raise UsageError(f"expected `a` or `a,b`, got {text!r}")


def _load_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"bad config line {line!r} (expected key = value)")
        key, val = line.split("=", 1)
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _effective(args, config: dict, key: str, default, cast):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in config:
        try:
            return cast(config[key])
        except (ValueError, UsageError) as exc:
            raise UsageError(f"bad config value for {key}: {exc}") from None
    return default


def _build_map(args, config):
    name = _effective(args, config, "fn", None, str)
    if not name:
        raise UsageError("--fn NAME is required")
    params_text = _effective(args, config, "params", "", str)
    params = _parse_floats(params_text) if params_text else []
    try:
        if name == "real_linear":
            if len(params) != 4:
                raise UsageError("real_linear needs --params s,t,u,v")
            return builtin(name, s=params[0], t=params[1], u=params[2], v=params[3])
        if name == "norm_plus_i_im_pow":
            n = int(params[0]) if params else 2
            return builtin(name, n=n)
        if name == "norm_times_x":
            d = int(params[0]) if params else 2
            return builtin(name, dim=d)
        if params:
            raise UsageError(f"builtin {name} takes no parameters")
        return builtin(name)
    except UnsupportedError as exc:
        raise UsageError(str(exc)) from None


def _emit(payload: dict, out_path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out_path:
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _curve_csv(curve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta", "re", "im"])
    for t, v in zip(curve.thetas, curve.values):
        writer.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def _grid_csv(spectrum) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["re", "im", "label"])
    names = {0: "in_spectrum", 1: "regular", 2: "band"}
    for j, y in enumerate(spectrum.ys):
        for i, x in enumerate(spectrum.xs):
            writer.writerow([repr(float(x)), repr(float(y)), names[int(spectrum.labels[j, i])]])
    return buf.getvalue()


def _curve_json(curve, limit: int | None = None) -> dict:
    vals = curve.values
    step = 1 if limit is None or vals.size <= limit else math.ceil(vals.size / limit)
    return {
        "samples": int(vals.size),
        "chord_bound": None if math.isnan(curve.chord_bound) else curve.chord_bound,
        "chord_met": curve.chord_met,
        "label": curve.label,
        "points": [[float(v.real), float(v.imag)] for v in vals[::step]],
        "thinned_by": step,
    }


# ---------------------------------------------------------------------------
# subcommands


def _cmd_spec1d(args, config) -> int:
    f = _build_map(args, config)
    if f.dim != 1:
        raise PreconditionError(f"{f.name} is not one dimensional")
    point = _effective(args, config, "point", 0.0, float)
    h0 = _effective(args, config, "h0", 0.1, float)
    ratio = _effective(args, config, "ratio", 0.6, float)
    steps = int(_effective(args, config, "steps", 60, int))
    threshold = _effective(args, config, "threshold", 1e6, float)

    mode = "numeric" if args.numeric else "exact"
    if not args.numeric and not args.exact:
        mode = "exact" if f.dini_exact is not None else "numeric"
    if mode == "exact":
        quad = dini_mod.dini_exact(f, point)
        flags = tuple(math.isinf(v) for v in quad.as_tuple())
    else:
        est = dini_mod.dini_estimate(
            f, point, h0=h0, ratio=ratio, steps=steps, divergence_threshold=threshold
        )
        quad, flags = est.quad, est.flagged
    payload = {
        "command": "spec1d",
        "fn": f.name,
        "point": point,
        "mode": mode,
        "dini": quad.to_json(),
        "divergence_flags": list(flags),
        "sigma": dini_mod.spectrum_1d(quad).to_json(),
        "Sigma": dini_mod.point_spectrum_1d(quad).to_json(),
    }
    _emit(payload, args.out)
    return EXIT_OK


def _cmd_spec2d(args, config) -> int:
    f = _build_map(args, config)
    samples = int(_effective(args, config, "samples", 4096, int))
    curve = homog2d.sigma_curve(f, samples=samples)
    d, q = homog2d.d_and_quasinorm(f, samples=samples)
    payload = {
        "command": "spec2d",
        "fn": f.name,
        "curve": _curve_json(curve, limit=512),
        "curve_is_point": curve.is_point(1e-9),
        "d": d,
        "q": q,
        "radius_bound": homog2d.spectral_radius_bound(f, samples=samples),
    }
    _emit(payload, args.out)
    if args.out:
        _write_text(Path(args.out).with_suffix(".csv"), _curve_csv(curve))
    return EXIT_OK


def _cmd_classify(args, config) -> int:
    f = _build_map(args, config)
    xmin = _effective(args, config, "xmin", -2.0, float)
    xmax = _effective(args, config, "xmax", 2.0, float)
    ymin = _effective(args, config, "ymin", -2.0, float)
    ymax = _effective(args, config, "ymax", 2.0, float)
    res = int(_effective(args, config, "res", 200, int))
    band = _effective(args, config, "band", None, float)
    spectrum = homog2d.classify_plane(
        f, bounds=(xmin, xmax, ymin, ymax), resolution=res, band_radius=band
    )
    summary = spectrum.summary()
    payload = {
        "command": "classify",
        "fn": f.name,
        "bounds": [xmin, xmax, ymin, ymax],
        "res": res,
        "radius_bound": homog2d.spectral_radius_bound(f),
        **summary,
    }
    _emit(payload, args.out)
    if args.out:
        base = Path(args.out)
        _write_text(base.with_suffix(".csv"), _grid_csv(spectrum))
        _write_text(base.with_suffix(".svg"), svgfig.classify_svg(spectrum, title=f.name))
    if spectrum.violations:
        return EXIT_UNDECIDED
    return EXIT_OK


def _cmd_shift(args, config) -> int:
    n = int(_effective(args, config, "truncate", 60, int))
    eps = _effective(args, config, "xi_eps", 0.1, float)
    report = structured.shift_model_report()
    payload = {
        "command": "shift",
        "report": report.to_json(),
        "truncate": n,
        "eigvec_norm_sq_example": {
            "abs_lambda": math.sqrt(3.0),
            "value": report.eigvec_norm_sq(math.sqrt(3.0)),
        },
        "truncation_residuals": {
            "sqrt2": structured.truncated_shift_min(structured.SQRT2, n),
            "zero": structured.truncated_shift_min(0.0, n),
            "two": structured.truncated_shift_min(2.0, n),
        },
        "truncation_note": "sphere minima are reliable probes only for |lambda| > 1",
    }
    if args.lam:
        lam = _parse_pair(args.lam)
        entry = {
            "lambda": [lam.real, lam.imag],
            "truncated_min": structured.truncated_shift_min(lam, n),
            "index": report.index(lam),
        }
        if abs(lam) > 1.0:
            entry["eigvec_norm_sq"] = report.eigvec_norm_sq(lam)
            solvable, witness = structured.xi_equation_solvable(lam, eps)
            entry["xi_eps"] = eps
            entry["xi_solvable"] = solvable
            entry["xi_witness"] = witness
        payload["lambda_query"] = entry
    _emit(payload, args.out)
    if args.out:
        fig = svgfig.annuli_svg(
            disk_radius=report.spectrum_radius,
            circle_radii=(report.omega_part_radius, report.point_spectrum_radius),
            title="shift model spectrum",
        )
        _write_text(Path(args.out).with_suffix(".svg"), fig)
    return EXIT_OK


def _cmd_mnc(args, config) -> int:
    expr_text = _effective(args, config, "expr", None, str)
    if not expr_text:
        raise UsageError("--expr EXPRESSION is required")
    expr = structured.parse_expr(expr_text)
    bounds = structured.mnc_bounds(expr)
    payload = {"command": "mnc", "expr": expr_text, **bounds.to_json()}
    _emit(payload, args.out)
    return EXIT_OK


def _cmd_bifurcate(args, config) -> int:
    radii_text = _effective(args, config, "radii", "0.1,0.01,0.001", str)
    radii = _parse_floats(radii_text)
    tol = _effective(args, config, "tol", 0.02, float)
    seed = int(_effective(args, config, "seed", 0, int))

    if args.shift:
        n = int(_effective(args, config, "truncate", 40, int))
        angles = int(_effective(args, config, "angles", 16, int))
        thetas = np.linspace(0.0, 2.0 * math.pi, angles, endpoint=False)
        lams = [structured.SQRT2 * complex(math.cos(t), math.sin(t)) for t in thetas]
        for extra in args.extra_lambda or []:
            lams.append(_parse_pair(extra))
        perturb = _effective(args, config, "perturb", "none", str)
        h_const = None
        if perturb == "normsq_e1":
            def h_const(r, _n=n):
                v = np.zeros(_n, dtype=complex)
                v[0] = r * r
                return v
        elif perturb != "none":
            raise UsageError(f"unknown perturbation {perturb!r}")
        scan = structured.shift_bifurcation_scan(
            lams, N=n, radii=radii, tol=tol, h_sphere_const=h_const, seed=seed
        )
        payload = {
            "command": "bifurcate",
            "model": "shift",
            "truncate": n,
            "perturb": perturb,
            "tol": tol,
            "radii": list(scan.radii),
            "lambdas": [[l.real, l.imag] for l in scan.lams],
            "normalized_residuals": [[float(v) for v in row] for row in scan.normalized],
            "candidates": [[c.real, c.imag] for c in scan.candidates],
            "verdicts": list(scan.verdicts),
        }
        _emit(payload, args.out)
        return EXIT_OK

    f = _build_map(args, config)
    grid_text = _effective(args, config, "grid", "-1.5,1.5,-1.5,1.5,24,30", str)
    g = _parse_floats(grid_text)
    if len(g) != 6:
        raise UsageError("--grid needs x0,x1,y0,y1,nx,ny")
    x0, x1, y0, y1, nx, ny = g
    xs = np.linspace(x0, x1, int(nx))
    ys = np.linspace(y0, y1, int(ny))
    lams = [complex(x, y) for y in ys for x in xs]
    scan = estimators.bifurcation_scan(f, lams, radii=radii, tol=tol, seed=seed)
    undecided = [v for v in scan.verdicts if v == "undecided"]
    payload = {
        "command": "bifurcate",
        "fn": f.name,
        "grid": [x0, x1, y0, y1, int(nx), int(ny)],
        "tol": tol,
        "radii": list(scan.radii),
        "candidates": [[c.real, c.imag] for c in scan.candidates],
        "n_candidates": len(scan.candidates),
        "contained_in_sigma": scan.contained_in_sigma,
        "verdicts_summary": {
            "candidate": sum(1 for v in scan.verdicts if v == "candidate"),
            "rejected": sum(1 for v in scan.verdicts if v == "rejected"),
            "undecided": len(undecided),
        },
    }
    _emit(payload, args.out)
    if len(undecided) > len(scan.verdicts) / 2:
        return EXIT_UNDECIDED
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=None, help="fix sampling/restart sequences")
    p.add_argument("--out", type=str, default=None, help="write JSON here (CSV/SVG alongside)")
    p.add_argument("--config", type=str, default=None, help="key = value defaults file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specpoint",
        description="local spectra of continuous nonlinear maps",
        epilog=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p1 = sub.add_parser("spec1d", help="one dimensional spectral intervals")
    p1.add_argument("--fn", type=str, default=None, help=f"one of {', '.join(BUILTIN_NAMES)}")
    p1.add_argument("--point", type=float, default=None)
    mode = p1.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--numeric", action="store_true")
    p1.add_argument("--h0", type=float, default=None)
    p1.add_argument("--ratio", type=float, default=None)
    p1.add_argument("--steps", type=int, default=None)
    p1.add_argument("--threshold", type=float, default=None)
    p1.add_argument("--params", type=str, default=None)
    _add_common(p1)
    p1.set_defaults(run=_cmd_spec1d)

    p2 = sub.add_parser("spec2d", help="planar eigenvalue curve and rates")
    p2.add_argument("--fn", type=str, default=None)
    p2.add_argument("--params", type=str, default=None)
    p2.add_argument("--samples", type=int, default=None)
    _add_common(p2)
    p2.set_defaults(run=_cmd_spec2d)

    p3 = sub.add_parser("classify", help="region labeling over a plane grid")
    p3.add_argument("--fn", type=str, default=None)
    p3.add_argument("--params", type=str, default=None)
    p3.add_argument("--xmin", type=float, default=None)
    p3.add_argument("--xmax", type=float, default=None)
    p3.add_argument("--ymin", type=float, default=None)
    p3.add_argument("--ymax", type=float, default=None)
    p3.add_argument("--res", type=int, default=None)
    p3.add_argument("--band", type=float, default=None)
    _add_common(p3)
    p3.set_defaults(run=_cmd_classify)

    p4 = sub.add_parser("shift", help="sequence-space shift model report")
    p4.add_argument("--truncate", type=int, default=None)
    p4.add_argument("--lambda", dest="lam", type=str, default=None, help="a,b")
    p4.add_argument("--xi-eps", dest="xi_eps", type=float, default=None)
    _add_common(p4)
    p4.set_defaults(run=_cmd_shift)

    p5 = sub.add_parser("mnc", help="compactness-rate bounds for an expression")
    p5.add_argument("--expr", type=str, default=None)
    _add_common(p5)
    p5.set_defaults(run=_cmd_mnc)

    p6 = sub.add_parser("bifurcate", help="bifurcation candidate scan")
    p6.add_argument("--fn", type=str, default=None)
    p6.add_argument("--params", type=str, default=None)
    p6.add_argument("--shift", action="store_true", help="scan the shift model instead")
    p6.add_argument("--perturb", type=str, default=None, help="none | normsq_e1")
    p6.add_argument("--truncate", type=int, default=None)
    p6.add_argument("--angles", type=int, default=None)
    p6.add_argument("--extra-lambda", action="append", default=None, help="a,b (repeatable)")
    p6.add_argument("--grid", type=str, default=None, help="x0,x1,y0,y1,nx,ny")
    p6.add_argument("--radii", type=str, default=None)
    p6.add_argument("--tol", type=float, default=None)
    _add_common(p6)
    p6.set_defaults(run=_cmd_bifurcate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        config = _load_config(args.config)
        return args.run(args, config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError,) as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (SolverError, NumericError, EvaluationError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SpecpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
