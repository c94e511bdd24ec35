"""Command-line front end with machine-readable output.

Every command emits a single JSON document on stdout (the grid command
writes CSV to --out).  Exit codes: 0 success, 1 numeric failure,
2 invalid arguments, 3 branch proximity.  Randomized commands are
deterministic for a fixed --seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import asymptotics, ellipsoidal, harmonic, lawlor, twistor
from .errors import (BranchProximityError, ContinuationError, NumericFailure,
                     PreconditionError)

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2
EXIT_BRANCH = 3


def _floats(text):
    try:
        vals = [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError as exc:
        raise PreconditionError(f"could not parse float list {text!r}") from exc
    if not vals:
        raise PreconditionError(f"empty float list {text!r}")
    return np.asarray(vals)


def _ints(text):
    return [int(tok) for tok in text.split(",") if tok != ""]


def _emit(doc, path=None):
    payload = json.dumps(doc, indent=2)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        sys.stdout.write(payload + "\n")


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def cmd_eval(args):
    h = _floats(args.h)
    x = _floats(args.x)
    axes = ellipsoidal.HalfAxes(h=h)
    if x.size != axes.n:
        raise PreconditionError(f"--x must have length {axes.n}")
    sheet = {"plus": "+", "minus": "-"}[args.sheet]
    fam = harmonic.harmonic_family(axes)
    sp = ellipsoidal.from_cartesian(axes, x, sheet=sheet)
    value = harmonic.evaluate(fam, sp, rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    grad = harmonic.gradient(fam, x, sheet=sheet)
    _emit({
        "command": "eval",
        "h": _jsonable(h),
        "x": _jsonable(x),
        "sheet": sheet,
        "value": value,
        "grad": _jsonable(grad),
        "mu": _jsonable(sp.mu),
        "diagnostics": {"quadrature_error": args.abs_tol,
                        "signs": _jsonable(sp.signs)},
    })
    return EXIT_OK


def cmd_asym(args):
    h = _floats(args.h)
    asym = asymptotics.coefficients(h, rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    _emit({
        "command": "asym",
        "inputs": {"h": _jsonable(h), "rel_tol": args.rel_tol, "abs_tol": args.abs_tol},
        "outputs": {"a0": asym.a0, "a": _jsonable(asym.a)},
        "diagnostics": {"trace_residual": abs(asym.a[-1] - asym.an_integral),
                        "an_integral_route": asym.an_integral},
    })
    return EXIT_OK


def cmd_invert(args):
    target = _floats(args.a)
    try:
        result = asymptotics.invert(target, c0=args.c0, tol=args.tol)
    except NumericFailure as exc:
        best = exc.best_value
        _emit({
            "command": "invert",
            "inputs": {"a": _jsonable(target), "c0": args.c0, "tol": args.tol},
            "outputs": {"h": _jsonable(best) if best is not None else None,
                        "converged": False},
            "diagnostics": {"residual": exc.best_error, "error": str(exc)},
        })
        return EXIT_NUMERIC
    _emit({
        "command": "invert",
        "inputs": {"a": _jsonable(target), "c0": args.c0, "tol": args.tol},
        "outputs": {"h": _jsonable(result.h), "scale": result.scale,
                    "converged": True},
        "diagnostics": {"iterations": result.iterations, "residual": result.residual},
    })
    return EXIT_OK


def cmd_laplace_check(args):
    h = _floats(args.h)
    shell = _floats(args.shell)
    if shell.size != 2 or not 0 < shell[0] < shell[1]:
        raise PreconditionError("--shell expects r_inner,r_outer with 0 < r_inner < r_outer")
    fam = harmonic.harmonic_family(ellipsoidal.HalfAxes(h=h))
    rep = harmonic.harmonicity_report(fam, shell[0], shell[1], count=args.n,
                                      seed=args.seed, delta=args.delta)
    _emit({
        "command": "laplace-check",
        "inputs": {"h": _jsonable(h), "shell": _jsonable(shell), "n": args.n,
                   "seed": args.seed, "delta": args.delta},
        "outputs": rep.to_dict(),
        "diagnostics": {},
    })
    return EXIT_OK


def cmd_monodromy(args):
    h = _floats(args.h)
    axes = ellipsoidal.HalfAxes(h=h)
    fam = harmonic.harmonic_family(axes)
    i = args.center
    if not 1 <= i <= axes.n - 1:
        raise PreconditionError(f"--center must index a semi-axis in 1..{axes.n - 1}")
    radius = args.radius if args.radius is not None else 0.3 * h[0]
    taus = np.linspace(0.0, 2.0 * np.pi, args.steps + 1)
    path = np.zeros((taus.size, axes.n))
    path[:, i - 1] = h[i - 1] + radius * np.cos(taus)
    path[:, -1] = radius * np.sin(taus)
    values = harmonic.continue_along_path(fam, path, start_sheet="+")
    start, end = values[0][0], values[-1][0]
    _emit({
        "command": "monodromy",
        "inputs": {"h": _jsonable(h), "center": i, "radius": radius,
                   "steps": args.steps},
        "outputs": {"start_value": start, "end_value": end,
                    "start_sheet": values[0][1], "end_sheet": values[-1][1],
                    "monodromy_minus_one": bool(abs(end + start) <= 1e-8 * max(1.0, abs(start)))},
        "diagnostics": {"defect": abs(end + start)},
    })
    return EXIT_OK


def cmd_donaldson(args):
    params = twistor.TwistorParams(eps=args.eps)
    c = twistor.coefficients(params)
    doc = {
        "command": "donaldson",
        "inputs": {"eps": args.eps, "compare": args.compare, "seed": args.seed},
        "outputs": {"c0": c[0], "c1": c[1], "c2": c[2], "c3": c[3]},
        "diagnostics": {},
    }
    if args.compare:
        rep = twistor.compare_to_harmonic(params, samples=args.compare, seed=args.seed)
        doc["outputs"]["comparison"] = rep.to_dict()
    _emit(doc)
    return EXIT_OK


def cmd_lawlor(args):
    h = _floats(args.h)
    t_list = _floats(args.t)
    if args.angles_only:
        rep = lawlor.angle_match(h, t_list)
    else:
        rep = lawlor.convergence_harness(h, t_list, count=args.samples, seed=args.seed)
    _emit({
        "command": "lawlor",
        "inputs": {"h": _jsonable(h), "t": _jsonable(t_list),
                   "samples": args.samples, "seed": args.seed,
                   "angles_only": bool(args.angles_only)},
        "outputs": rep.to_dict(),
        "diagnostics": {},
    })
    return EXIT_OK


def cmd_grid(args):
    h = _floats(args.h)
    axes = ellipsoidal.HalfAxes(h=h)
    fam = harmonic.harmonic_family(axes)
    plane = _ints(args.plane)
    if len(plane) != 2 or not all(1 <= p <= axes.n for p in plane) or plane[0] == plane[1]:
        raise PreconditionError(f"--plane expects two distinct 1-based indices <= {axes.n}")
    lo, hi = _floats(args.range)
    if not lo < hi:
        raise PreconditionError("--range expects lo,hi with lo < hi")
    ticks = np.linspace(lo, hi, args.n)
    i, j = plane[0] - 1, plane[1] - 1
    rows = []
    for u in ticks:
        for v in ticks:
            x = np.zeros(axes.n)
            x[i] = u
            x[j] = v
            try:
                val = harmonic.evaluate_at(fam, x, "+")
            except BranchProximityError:
                val = float("nan")
            rows.append((x, val))
    header = ",".join(f"x{k + 1}" for k in range(axes.n)) + ",f_plus"
    lines = [header]
    for x, val in rows:
        lines.append(",".join(repr(float(c)) for c in x) + "," + repr(float(val)))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="z2harmonic",
        description="Two-valued harmonic functions branching along ellipsoids")
    parser.add_argument("--log-level", default="WARNING",
                        help="logging level (DEBUG/INFO/WARNING/ERROR)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_tols(p):
        p.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-12)
        p.add_argument("--abs-tol", dest="abs_tol", type=float, default=1e-14)

    p = sub.add_parser("eval", help="evaluate the function and gradient at a point")
    p.add_argument("--h", required=True, help="comma list of semi-axes, strictly decreasing")
    p.add_argument("--x", required=True, help="comma list of Cartesian coordinates")
    p.add_argument("--sheet", choices=["plus", "minus"], default="plus")
    common_tols(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("asym", help="far-field quadric coefficients")
    p.add_argument("--h", required=True, help="comma list of positive semi-axes (equal allowed)")
    common_tols(p)
    p.set_defaults(func=cmd_asym)

    p = sub.add_parser("invert", help="solve for axes matching target coefficients")
    p.add_argument("--a", required=True, help="comma list of target a_1..a_{n-1} > 0")
    p.add_argument("--c0", type=float, default=None, help="optional constant term")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("laplace-check", help="finite-difference harmonicity report")
    p.add_argument("--h", required=True)
    p.add_argument("--shell", required=True, help="r_inner,r_outer")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=1e-3)
    p.set_defaults(func=cmd_laplace_check)

    p = sub.add_parser("monodromy", help="continuation around a loop linking the branch set")
    p.add_argument("--h", required=True)
    p.add_argument("--center", type=int, default=1,
                   help="1-based semi-axis index; loop circles (h_i, 0, ..) in the (x_i, x_n) plane")
    p.add_argument("--radius", type=float, default=None, help="loop radius (default 0.3 h_1)")
    p.add_argument("--steps", type=int, default=200)
    p.set_defaults(func=cmd_monodromy)

    p = sub.add_parser("donaldson", help="n=3 contour-integral coefficients and comparison")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--compare", type=int, default=0,
                   help="number of pointwise comparison samples (0 to skip)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_donaldson)

    p = sub.add_parser("lawlor", help="neck angle match or potential convergence")
    p.add_argument("--h", required=True)
    p.add_argument("--t", required=True, help="comma list of scale parameters")
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--angles-only", action="store_true")
    p.set_defaults(func=cmd_lawlor)

    p = sub.add_parser("grid", help="sample the plus-sheet on a coordinate plane, CSV output")
    p.add_argument("--h", required=True)
    p.add_argument("--plane", required=True, help="two 1-based coordinate indices, e.g. 1,3")
    p.add_argument("--range", required=True, help="lo,hi for both plane coordinates")
    p.add_argument("--n", type=int, default=21)
    p.add_argument("--out", default=None, help="output CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_grid)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.WARNING))
    try:
        return args.func(args)
    except (PreconditionError, KeyError) as exc:
        print(f"error: invalid arguments: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BranchProximityError as exc:
        print(f"error: branch proximity: {exc}", file=sys.stderr)
        return EXIT_BRANCH
    except (NumericFailure, ContinuationError) as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
