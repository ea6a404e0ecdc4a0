"""Command-line interface.

Subcommands: ``run`` (registered experiments), ``catalog`` (list function
specs), ``classify`` and ``radius`` (single-point shortcuts). Exit codes:
0 success, 1 usage error, 2 numeric cap/precision failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from . import catalog, diagnostics, experiments
from .errors import NumericError, UsageError
from .precision import format_real, make_context, parse_scalar


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_numeric_flags(p, with_delta):
    p.add_argument("--order", type=int, help="jet order N")
    p.add_argument("--bits", type=int, help="mantissa precision in bits")
    p.add_argument("--guard", type=int, help="extra summation bits")
    if with_delta:
        p.add_argument("--delta", help="classification dead band (relative)")


def build_parser():
    parser = _Parser(prog="hatlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a registered experiment")
    run.add_argument("--experiment", help="experiment id (EXP-A .. EXP-H)")
    run.add_argument("--f", help="function spec override where supported")
    run.add_argument("--t", help="scalar or a:b:n grid override")
    _add_numeric_flags(run, with_delta=True)
    run.add_argument("--format", choices=("csv", "json"), help="output format")
    run.add_argument("--out", help="output path ('-' for stdout)")
    run.add_argument("--config", help="flat key = value config file")

    sub.add_parser("catalog", help="list function specs")

    classify = sub.add_parser("classify", help="classify one point")
    classify.add_argument("--f", required=True)
    classify.add_argument("--t", required=True)
    _add_numeric_flags(classify, with_delta=True)

    radius = sub.add_parser("radius", help="radius estimate at one point")
    radius.add_argument("--f", required=True)
    radius.add_argument("--t", required=True)
    _add_numeric_flags(radius, with_delta=False)
    return parser


def _cmd_run(args):
    file_values = experiments.parse_config_file(args.config) if args.config else {}
    flag_values = {
        "experiment": args.experiment,
        "f": args.f,
        "t": args.t,
        "order": None if args.order is None else str(args.order),
        "bits": None if args.bits is None else str(args.bits),
        "guard": None if args.guard is None else str(args.guard),
        "delta": args.delta,
        "format": args.format,
        "out": args.out,
    }
    cfg = experiments.build_config(file_values, flag_values)
    result = experiments.run_experiment(cfg)
    experiments.emit(result, cfg.format, cfg.out)
    print(f"# wall_time_s = {result.wall_time_s:.3f}", file=sys.stderr)
    return 0


def _cmd_catalog(_args):
    for text, description in catalog.catalog_entries():
        print(f"{text}\n    {description}")
    return 0


def _point_context(args, default_order):
    bits = args.bits if args.bits is not None else experiments.CONFIG_DEFAULTS["bits"]
    guard = args.guard if args.guard is not None else experiments.CONFIG_DEFAULTS["guard"]
    order = args.order if args.order is not None else default_order
    ctx = make_context(bits, guard)
    spec = catalog.parse_spec(args.f)
    t = parse_scalar(args.t, ctx)
    return ctx, spec, t, order


def _cmd_classify(args):
    ctx, spec, t, order = _point_context(args, default_order=60)
    delta = ctx.mp.mpf(args.delta if args.delta is not None else experiments.CONFIG_DEFAULTS["delta"])
    cls = diagnostics.classify_point(spec, t, order, delta, ctx)
    print(",".join(experiments.CLASSIFICATION_HEADER))
    r_hat = format_real(cls.r_hat, ctx) if cls.r_hat is not None else "none"
    print(
        ",".join(
            (
                args.t,
                r_hat,
                format_real(cls.abs_t, ctx),
                format_real(cls.delta, ctx),
                cls.case,
            )
        )
    )
    return 0


def _cmd_radius(args):
    ctx, spec, t, order = _point_context(args, default_order=60)
    est = diagnostics.radius_estimate(spec, t, order, ctx)
    print(",".join(experiments.RADIUS_HEADER))
    print(
        ",".join(
            (
                args.t,
                str(est.window[0]),
                str(est.window[1]),
                format_real(est.r_hat, ctx),
                est.trend,
            )
        )
    )
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "catalog": _cmd_catalog,
    "classify": _cmd_classify,
    "radius": _cmd_radius,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"hatlab: usage error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"hatlab: numeric failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        path = getattr(exc, "filename", None)
        where = f" ({path})" if path else ""
        print(f"hatlab: i/o failure{where}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
