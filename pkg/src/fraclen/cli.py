"""Command-line driver: runs the estimators and verification suites on curve
spec files and writes self-describing CSV reports.

Every output starts with '#' header lines carrying the tool version, the full
configuration, the seed and the curve digest, so a report alone suffices to
reproduce the run.  No timestamps are written; identical configurations give
byte-identical output.  Exit codes: 0 success, 1 configuration error,
2 numerical failure.
"""

import argparse
import hashlib
import sys
from importlib import resources

import numpy as np

from . import __version__
from .curvature import el_residual, kappa_sigma
from .curves import load_curve, make_curve
from .discs import Disc, Window, classify_disc
from .errors import ConfigError, CurveSpecError, PreconditionError, QuadratureError
from .length import len_sigma, limit_constant, limit_sweep
from .verify import lemma_int_target, verify_lemma_int, verify_map

BUNDLED = ("segment", "circle", "helix")
DEFAULT_SEED = 20260801


class _Parser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting, so all configuration
    problems funnel through one exit path."""

    def error(self, message):
        raise ConfigError(message)


def _fmt(x):
    return "%.17g" % float(x)


def _parse_vec(text):
    try:
        return np.array([float(v) for v in text.replace(",", " ").split()])
    except ValueError as exc:
        raise ConfigError(f"cannot parse vector '{text}'") from exc


def _resolve_curve(name_or_path):
    if name_or_path in BUNDLED:
        path = resources.files("fraclen").joinpath("specs", name_or_path + ".curve")
        with resources.as_file(path) as p:
            return load_curve(str(p))
    return load_curve(name_or_path)


def _header(command, args, curve=None):
    lines = [f"# fraclen {__version__}", f"# command: {command}"]
    cfg = " ".join(f"{k}={v}" for k, v in sorted(vars(args).items()) if k != "func")
    lines.append(f"# config: {cfg}")
    if curve is not None:
        lines.append(f"# curve-digest: {curve.digest()}")
    return lines


def _emit(out_path, lines):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_finite(*values):
    if not all(np.all(np.isfinite(v)) for v in values):
        raise QuadratureError("non-finite estimate", estimate=None)


def _cmd_length(args):
    curve = _resolve_curve(args.curve)
    center = _parse_vec(args.window_center) if args.window_center else np.zeros(curve.dim)
    window = Window(center=center, radius=args.window_radius)
    res = len_sigma(
        curve,
        window,
        args.sigma,
        args.samples,
        args.seed,
        grid=args.grid,
        workers=args.workers,
        estimator=args.estimator,
    )
    _check_finite(res.estimate, res.std_error)
    lines = _header("length", args, curve)
    lines.append("sigma,estimate,std_error,n_samples,seed,n_rejected_degenerate")
    lines.append(
        ",".join(
            [
                _fmt(args.sigma),
                _fmt(res.estimate),
                _fmt(res.std_error),
                str(res.n_samples),
                str(res.seed),
                str(res.n_rejected_degenerate),
            ]
        )
    )
    lines.append(f"# summary: estimate {_fmt(res.estimate)} +/- {_fmt(res.std_error)}")
    for w in res.warnings:
        lines.append(f"# warning: {w}")
    _emit(args.out, lines)
    return 0


def _cmd_limit_sweep(args):
    curve = _resolve_curve(args.curve)
    center = _parse_vec(args.window_center) if args.window_center else np.zeros(curve.dim)
    window = Window(center=center, radius=args.window_radius)
    sigmas = [float(v) for v in args.sigmas.split(",")]
    rows, extra = limit_sweep(
        curve, window, sigmas, args.samples, args.seed, grid=args.grid, workers=args.workers
    )
    _check_finite(extra["value"], extra["std_error"])
    target = limit_constant(curve.dim) * curve.arclength()
    dev = (extra["value"] - target) / extra["std_error"] if extra["std_error"] > 0 else float("inf")
    lines = _header("limit-sweep", args, curve)
    lines.append("sigma,scaled_estimate,std_error")
    for row in rows:
        lines.append(",".join([_fmt(row.sigma), _fmt(row.scaled_estimate), _fmt(row.std_error)]))
    lines.append(",".join([_fmt(1.0), _fmt(extra["value"]), _fmt(extra["std_error"])]))
    lines.append(
        "# summary: extrapolated value "
        f"{_fmt(extra['value'])} +/- {_fmt(extra['std_error'])}; "
        f"target 4*a(n-1)*a(n-2)/(n-1) * arclength = {_fmt(target)} "
        f"(4*pi per unit length at n=3); deviation {_fmt(dev)} std errors"
    )
    lines.append(f"# summary: slope {_fmt(extra['slope'])}, residual rms {_fmt(extra['residual_rms'])}")
    _emit(args.out, lines)
    return 0


def _curvature_common(args, variational):
    curve = _resolve_curve(args.curve)
    fn = el_residual if variational else kappa_sigma
    kwargs = dict(r_min=args.r_min, r_max=args.r_max, grid=args.grid)
    res = fn(curve, args.s, args.sigma, args.samples, args.seed, **kwargs)
    _check_finite(res.kappa_vector, res.std_error_vector)
    n = curve.dim
    comp = ",".join(f"kappa_{d + 1}" for d in range(n))
    secomp = ",".join(f"std_error_{d + 1}" for d in range(n))
    name = "el-residual" if variational else "curvature"
    lines = _header(name, args, curve)
    lines.append(f"row,s,sigma,r_min,{comp},kappa_scalar,{secomp}")
    main = [
        "main",
        _fmt(res.s),
        _fmt(res.sigma),
        _fmt(res.r_min),
        *[_fmt(v) for v in res.kappa_vector],
        _fmt(res.kappa_scalar),
        *[_fmt(v) for v in res.std_error_vector],
    ]
    lines.append(",".join(main))
    for cut, vec in res.sweep:
        row = [
            "sweep",
            _fmt(res.s),
            _fmt(res.sigma),
            _fmt(cut),
            *[_fmt(v) for v in vec],
            _fmt(float(np.linalg.norm(vec))),
            *["nan"] * n,
        ]
        lines.append(",".join(row))
    lines.append(
        f"# summary: |kappa| {_fmt(res.kappa_scalar)}; rejected degenerate "
        f"{res.n_rejected_degenerate} of {res.n_samples}"
    )
    for w in res.warnings:
        lines.append(f"# warning: {w}")
    _emit(args.out, lines)
    return 0


def _cmd_classify(args):
    curve = _resolve_curve(args.curve)
    disc = Disc(center=_parse_vec(args.center), normal=_parse_vec(args.normal), radius=args.radius)
    dc = classify_disc(curve, disc, grid=args.grid)
    lines = _header("classify", args, curve)
    lines.append("s,distance")
    for hit in dc.interior_hits:
        lines.append(",".join([_fmt(hit.s), _fmt(hit.distance)]))
    lines.append(f"# summary: label {dc.label}, interior hits {dc.count}")
    _emit(args.out, lines)
    return 0


def _cmd_verify_jacobians(args):
    curve = _resolve_curve(args.curve)
    lines = _header("verify-jacobians", args, curve)
    lines.append("map_id,point_digest,fd_value,closed_value,rel_error")
    worst = 0.0
    for map_id in ("frame", "frame-radius", "contact"):
        for rep in verify_map(map_id, curve, args.points, args.h, args.seed):
            digest = hashlib.sha256(
                np.concatenate(
                    [[rep.point.s], rep.point.a, rep.point.b, [rep.point.xi, rep.point.r]]
                ).tobytes()
            ).hexdigest()[:16]
            worst = max(worst, rep.rel_error)
            lines.append(
                ",".join(
                    [map_id, digest, _fmt(rep.fd_value), _fmt(rep.closed_value), _fmt(rep.rel_error)]
                )
            )
    lines.append(f"# summary: worst rel_error {_fmt(worst)}")
    _emit(args.out, lines)
    return 0


def _cmd_verify_lemma_int(args):
    c = _parse_vec(args.c) if args.c else np.eye(args.n)[0]
    res = verify_lemma_int(args.n, c, args.samples, args.seed)
    target = lemma_int_target(args.n)
    z = (res.estimate - target) / res.std_error if res.std_error > 0 else float("inf")
    lines = _header("verify-lemma-int", args)
    lines.append("n,estimate,std_error,target,z_score")
    lines.append(
        ",".join([str(args.n), _fmt(res.estimate), _fmt(res.std_error), _fmt(target), _fmt(z)])
    )
    lines.append(
        f"# summary: estimate {_fmt(res.estimate)} vs target {_fmt(target)} "
        f"(8*pi at n=3); z-score {_fmt(z)}"
    )
    _emit(args.out, lines)
    return 0


def _add_common(sp, curve=True, window=False):
    if curve:
        sp.add_argument("--curve", required=True, help="curve spec file or bundled name " + "/".join(BUNDLED))
    if window:
        sp.add_argument("--window-radius", type=float, required=True)
        sp.add_argument("--window-center", default=None, help="window center, e.g. '0 0 0'")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--grid", type=int, default=2048)
    sp.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser():
    p = _Parser(prog="fraclen", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("length", help="fractional length at one sigma")
    _add_common(sp, window=True)
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--samples", type=int, default=100000)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--estimator", choices=("canonical", "multiplicity"), default="canonical")
    sp.set_defaults(func=_cmd_length)

    sp = sub.add_parser("limit-sweep", help="scaled lengths across a sigma grid plus extrapolation")
    _add_common(sp, window=True)
    sp.add_argument("--sigmas", default="0.5,0.7,0.9,0.95,0.99")
    sp.add_argument("--samples", type=int, default=100000)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=_cmd_limit_sweep)

    for name, variational in (("curvature", False), ("el-residual", True)):
        sp = sub.add_parser(name, help=f"{name} vector at a curve point")
        _add_common(sp)
        sp.add_argument("--s", type=float, required=True)
        sp.add_argument("--sigma", type=float, required=True)
        sp.add_argument("--samples", type=int, default=100000)
        sp.add_argument("--r-min", type=float, default=None)
        sp.add_argument("--r-max", type=float, default=None)
        sp.set_defaults(func=lambda a, v=variational: _curvature_common(a, v))

    sp = sub.add_parser("classify", help="classify one disc against a curve")
    _add_common(sp)
    sp.add_argument("--center", required=True)
    sp.add_argument("--normal", required=True)
    sp.add_argument("--radius", type=float, required=True)
    sp.set_defaults(func=_cmd_classify)

    sp = sub.add_parser("verify-jacobians", help="finite-difference Jacobian checks")
    _add_common(sp)
    sp.add_argument("--points", type=int, default=100)
    sp.add_argument("--h", type=float, default=1e-5)
    sp.set_defaults(func=_cmd_verify_jacobians)

    sp = sub.add_parser("verify-lemma-int", help="direction-pair mass identity check")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--c", default=None, help="unit reference vector (default e1)")
    sp.add_argument("--samples", type=int, default=1000000)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_verify_lemma_int)

    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, CurveSpecError, PreconditionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (QuadratureError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def console_main():
    raise SystemExit(main())
