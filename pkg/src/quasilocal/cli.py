"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error.  Output goes
to ``--output`` if given, else into ``$QUASILOCAL_OUTPUT_DIR`` when set, else
to stdout.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from .band import FLOAT, RATIONAL, NotPositiveDefinite, quasi_hermiticity_residual
from .dyson import (
    BoundaryCaseWarning,
    factor_diagonal,
    hermitize,
    paper_tridiagonal_omega,
    triangular_factor,
)
from .fixtures import verify_fixtures
from .lattice import multiparam, point_defect, two_center
from .metric import (
    closed_form_theta,
    diagonal_multiparam_metric,
    positivity_check,
    solve_band_metric,
    superpose,
)
from .scalars import QuadraticSurd, format_scalar, parse_scalar
from .scattering import default_kappa_grid, solve_scattering

OUTPUT_DIR_ENV = "QUASILOCAL_OUTPUT_DIR"
SCATTER_THRESHOLD = 1e-10


class UsageError(Exception):
    pass


# -- formatting ---------------------------------------------------------------

def _fmt_float(x: float) -> float:
    """Round through ``%.15e`` so output is stable across platforms."""
    return float(f"{float(x):.15e}")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (Fraction, QuadraticSurd)):
        return format_scalar(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1) + "\n"


def _emit(args, text: str, default_name: str):
    path = args.output
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        path = os.path.join(os.environ[OUTPUT_DIR_ENV], default_name)
    if path is None:
        sys.stdout.write(text)
        return None
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)
    return path


# -- argument handling --------------------------------------------------------

def _coupling(text: str, scalar: str | None):
    """Parse ``g``; decimals promote to float mode with a notice."""
    try:
        value = parse_scalar(text)
    except ValueError as exc:
        raise UsageError(f"cannot parse coupling {text!r}") from exc
    if isinstance(value, float) and scalar == RATIONAL:
        raise UsageError(f"exact mode needs a rational coupling like 1/2, got {text!r}")
    if isinstance(value, float) and scalar is None:
        print(f"note: decimal value {text} switches to float mode", file=sys.stderr)
    if scalar == FLOAT:
        value = float(value)
    return value


def _scalar_arg(args):
    return {"exact": RATIONAL, "float": FLOAT, None: None}[args.scalar]


def _mode_of(value):
    return FLOAT if isinstance(value, float) else RATIONAL


def _grid(text: str, scalar):
    try:
        lo, hi, step = (parse_scalar(p) for p in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"grid must look like a:b:step, got {text!r}") from exc
    if step <= 0 or hi < lo:
        raise UsageError("grid needs step > 0 and a <= b")
    values = []
    n = int((Fraction(str(hi)) - Fraction(str(lo))) / Fraction(str(step)) + Fraction(1, 10**9))
    for k in range(n + 1):
        v = Fraction(str(lo)) + k * Fraction(str(step))
        values.append(float(v) if scalar == FLOAT else v)
    return values


def _residual_report(res, exact):
    value = res.interior_max_abs
    return {"interior_max_abs": value if exact else float(value), "margin": res.margin,
            "vanishes": bool(res.vanishes if exact else float(value) <= 1e-10)}


# -- commands -----------------------------------------------------------------

def cmd_metric(args) -> int:
    scalar = _scalar_arg(args)
    if args.model == "multiparam":
        if not args.params:
            raise UsageError("multiparam needs --params p1,p2,...")
        params = [_coupling(p, scalar) for p in args.params.split(",")]
        mode = scalar or (_mode_of(params[0]) if all(
            _mode_of(p) == _mode_of(params[0]) for p in params) else FLOAT)
        N = args.N or 2 * len(params) + 10
        H = multiparam(params, N, mode)
        spec = diagonal_multiparam_metric(params, N, mode)
    else:
        if args.R < 1:
            raise UsageError("R must be positive")
        g = _coupling(args.g, scalar)
        mode = scalar or _mode_of(g)
        N = args.N or 2 * args.R + 10
        if N < 2 * args.R + 4:
            raise UsageError(f"N={N} too small; need N >= 2R+4 = {2 * args.R + 4}")
        H = point_defect(g, N, mode)
        if args.method == "solve":
            if mode != RATIONAL:
                raise UsageError("the linear-system solver runs in exact mode only")
            spec = solve_band_metric(H, args.R)
        else:
            spec = closed_form_theta(args.R, g, N, mode)
    res = quasi_hermiticity_residual(H.matrix, spec.matrix)
    report = {"metric": spec.to_json(), "residual": _residual_report(res, mode == RATIONAL)}
    _emit(args, _dump_json(report), "metric.json")
    return 0 if report["residual"]["vanishes"] else 1


def _scatter_model(args, g):
    N = args.N
    if args.model == "two-center":
        if args.M is None:
            raise UsageError("two-center needs --M")
        return two_center(g, args.M, N or args.M + 12)
    return point_defect(g, N or 20)


def cmd_scatter(args) -> int:
    if args.scalar == "exact":
        raise UsageError("scattering amplitudes are complex floats; use --scalar float")
    g = float(parse_scalar(args.g))
    if args.grid < 1:
        raise UsageError("grid needs at least one point")
    H = _scatter_model(args, g)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["kappa", "E", "Re(R)", "Im(R)", "Re(T)", "Im(T)", "deficit"])
    worst = 0.0
    for k in default_kappa_grid(args.grid):
        r = solve_scattering(H, float(k), args.incidence)
        worst = max(worst, r.unitarity_deficit)
        writer.writerow([f"{v:.15e}" for v in (
            r.kappa, r.energy, r.reflection.real, r.reflection.imag,
            r.transmission.real, r.transmission.imag, r.unitarity_deficit)])
    summary = {"model": args.model, "g": g, "M": args.M, "points": args.grid,
               "incidence": args.incidence, "max_deficit": worst,
               "threshold": args.threshold, "unitary": worst <= args.threshold}
    path = _emit(args, buf.getvalue(), "scatter.csv")
    text = _dump_json(summary)
    if path is None:
        sys.stderr.write(text)
    else:
        Path(path).with_suffix(".summary.json").write_text(text)
    return 0 if summary["unitary"] else 1


def cmd_hermitize(args) -> int:
    scalar = _scalar_arg(args)
    g = _coupling(args.g, scalar)
    mode = scalar or _mode_of(g)
    N = args.N
    H = point_defect(g, N, mode)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BoundaryCaseWarning)
        if args.omega == "diagonal":
            dmap = factor_diagonal(closed_form_theta(1, g, N, mode))
        elif args.omega == "tridiagonal":
            dmap = paper_tridiagonal_omega(g, N, mode)
        else:
            gamma = _coupling(args.gamma, scalar if scalar else mode)
            theta = superpose([(2, closed_form_theta(1, g, N, mode)),
                               (gamma, closed_form_theta(2, g, N, mode))])
            dmap = triangular_factor(theta)
    if mode == RATIONAL and dmap.omega.scalar != RATIONAL:
        raise UsageError("this factor leaves a single quadratic field; rerun with --scalar float")
    h = hermitize(H, dmap)
    margin = 2 * (H.matrix.bandwidth + dmap.omega.bandwidth)
    skew = (h - h.T).max_abs(margin)
    report = {"omega": dmap.to_json(), "partner": h.to_json(),
              "hermiticity": {"interior_max_abs_skew": skew if mode == RATIONAL else float(skew),
                              "margin": margin},
              "notes": [str(w.message) for w in caught]}
    _emit(args, _dump_json(report), "hermitize.json")
    return 0


def _positivity(g, gamma, N, mode):
    theta = superpose([(2, closed_form_theta(1, g, N, mode)),
                       (gamma, closed_form_theta(2, g, N, mode))])
    return positivity_check(theta)


def cmd_positivity(args) -> int:
    scalar = _scalar_arg(args)
    g = _coupling(args.g, scalar)
    mode = scalar or _mode_of(g)
    grid = _grid(args.gamma_grid, mode)
    rows = []
    for gamma in grid:
        rep = _positivity(g, gamma, args.N, mode)
        rows.append({"gamma": gamma, "positive": rep.positive, "pivot": rep.pivot})
    transitions = []
    for left, right in zip(rows, rows[1:]):
        if left["positive"] != right["positive"]:
            lo, hi = left["gamma"], right["gamma"]
            lo_pos = left["positive"]
            for _ in range(args.bisect):
                mid = (lo + hi) / 2
                if _positivity(g, mid, args.N, mode).positive == lo_pos:
                    lo = mid
                else:
                    hi = mid
            transitions.append({"bracket": [lo, hi]})
    report = {"g": g, "N": args.N, "metric": "2*Theta_1 + gamma*Theta_2",
              "scan": rows, "transitions": transitions}
    _emit(args, _dump_json(report), "positivity.json")
    return 0


def cmd_verify_fixtures(args) -> int:
    scalar = _scalar_arg(args)
    couplings = [_coupling(x, scalar) for x in (args.g or ["1/3", "1/2", "9/10"])]
    out, failed = [], False
    for g in couplings:
        for c in verify_fixtures(g):
            failed |= not c.ok
            out.append({"g": g, "fixture": c.name, "ok": c.ok, "compared": c.compared,
                        "mismatches": [[list(ij), want, got] for ij, want, got in c.mismatches],
                        "note": c.note})
    _emit(args, _dump_json({"checks": out, "all_ok": not failed}), "fixtures.json")
    return 1 if failed else 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quasilocal",
                                description="Band metrics, Dyson maps and lattice scattering.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, g_default="1/2"):
        sp.add_argument("--scalar", choices=["exact", "float"], default=None)
        sp.add_argument("--output", "-o", default=None, help="output file")
        if g_default is not None:
            sp.add_argument("--g", default=g_default, help='coupling, e.g. "1/2" or 0.5')

    m = sub.add_parser("metric", help="build a metric and its residual report")
    common(m)
    m.add_argument("--model", choices=["point-defect", "multiparam"], default="point-defect")
    m.add_argument("--R", type=int, default=1)
    m.add_argument("--N", type=int, default=None)
    m.add_argument("--method", choices=["closed-form", "solve"], default="closed-form")
    m.add_argument("--params", default=None, help="multiparam couplings p1,p2,...")
    m.set_defaults(func=cmd_metric)

    s = sub.add_parser("scatter", help="reflection/transmission on a kappa grid (CSV)")
    common(s)
    s.add_argument("--model", choices=["point-defect", "two-center"], default="point-defect")
    s.add_argument("--M", type=int, default=None)
    s.add_argument("--N", type=int, default=None)
    s.add_argument("--grid", type=int, default=50)
    s.add_argument("--incidence", choices=["left", "right"], default="left")
    s.add_argument("--threshold", type=float, default=SCATTER_THRESHOLD)
    s.set_defaults(func=cmd_scatter)

    h = sub.add_parser("hermitize", help="Hermitian partner of the point-defect H")
    common(h)
    h.add_argument("--omega", choices=["diagonal", "tridiagonal", "triangular"],
                   default="diagonal")
    h.add_argument("--gamma", default="0", help="for --omega triangular: 2*Theta_1 + gamma*Theta_2")
    h.add_argument("--N", type=int, default=10)
    h.set_defaults(func=cmd_hermitize)

    q = sub.add_parser("positivity", help="scan positivity of 2*Theta_1 + gamma*Theta_2")
    common(q)
    q.add_argument("--gamma-grid", default="-3/2:3/2:1/4")
    q.add_argument("--N", type=int, default=20)
    q.add_argument("--bisect", type=int, default=8, help="bisection steps per transition")
    q.set_defaults(func=cmd_positivity)

    v = sub.add_parser("verify-fixtures", help="replay the published matrices")
    common(v, g_default=None)
    v.add_argument("--g", action="append", default=None,
                   help="coupling (repeatable); default 1/3, 1/2, 9/10")
    v.set_defaults(func=cmd_verify_fixtures)
    return p


# flags whose values may start with "-" (negative couplings, grids)
_SIGNED_FLAGS = ("--g", "--gamma", "--gamma-grid", "--params")


def _join_signed_values(argv):
    out, it = [], iter(argv)
    for tok in it:
        if tok in _SIGNED_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_signed_values(argv))
    try:
        return args.func(args)
    except (UsageError, ValueError, NotPositiveDefinite) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
