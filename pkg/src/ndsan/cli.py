"""Command-line front end.

Subcommands: ``validate``, ``plan``, ``simulate``, ``analyze``, ``compare``
and ``report``.  Failures print one line ``error: <Kind>: <message>`` to
stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import os
import secrets
import sys

from . import netspec, numeric, sampler, stats
from .errors import (
    NdsanError,
    NetworkSyntaxError,
    NotReducibleError,
    SchemaError,
    ValidationError,
)
from .model import activity_count, validate

EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_INVALID = 5
EXIT_NOT_REDUCIBLE = 6

QUANTILES = (0.05, 0.25, 0.50, 0.75, 0.95)


class CliError(Exception):
    def __init__(self, kind, message, code=EXIT_ERROR):
        super().__init__(message)
        self.kind = kind
        self.code = code


def _load(path):
    try:
        with open(path, "rb") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError("IoError", f"{path}: {exc.strerror or exc}", EXIT_IO) from None
    return netspec.parse_document(text)


def _write(path, data):
    try:
        netspec.export_results(data, path)
    except OSError as exc:
        raise CliError("IoError", f"{path}: {exc.strerror or exc}", EXIT_IO) from None


def _seed(args):
    if args.seed is not None:
        return args.seed
    if sys.stdin.isatty() and sys.stdout.isatty():
        seed = secrets.randbits(63)
        print(f"seed={seed}")
        return seed
    raise CliError("UsageError", "--seed is required in non-interactive mode", EXIT_USAGE)


def _fmt(x):
    return netspec.format_time(x)


def cmd_validate(args):
    doc = _load(args.network)
    report = validate(doc.root)
    if not report.ok:
        raise ValidationError(report)
    print(f"OK, {activity_count(doc.root)} activities")


def cmd_plan(args):
    plan = stats.plan_sample_size(args.max_error, args.confidence)
    print(f"N={plan.N} K={_fmt(plan.critical_value)} epsilon={_fmt(plan.epsilon)}")


def _replications(args):
    if args.replications is not None:
        if args.max_error is not None or args.confidence is not None:
            raise CliError(
                "UsageError", "give --replications or --max-error/--confidence, not both", EXIT_USAGE
            )
        if args.replications < 1:
            raise CliError("UsageError", "--replications must be >= 1", EXIT_USAGE)
        return args.replications
    if args.max_error is None or args.confidence is None:
        raise CliError(
            "UsageError", "need --replications or both --max-error and --confidence", EXIT_USAGE
        )
    return stats.plan_sample_size(args.max_error, args.confidence).N


def cmd_simulate(args):
    doc = _load(args.network)
    n = _replications(args)
    seed = _seed(args)
    batch = sampler.run_batch(
        doc.root, n, seed, name=doc.name, threads=sampler.threads_from_env()
    )
    emp = stats.ecdf(batch)
    out = args.out
    _write(os.path.join(out, "samples.csv"), netspec.samples_csv(batch))
    _write(os.path.join(out, "ecdf.csv"), netspec.ecdf_csv(emp))
    _write(os.path.join(out, "histogram.csv"), netspec.histogram_csv(stats.histogram(batch, args.bin_width)))
    if n > args.delta:
        density = stats.approximate_density(emp, args.delta)
        _write(os.path.join(out, "density.csv"), netspec.density_csv(density))
    times = batch.times
    print(f"network={doc.name} N={n} seed={seed}")
    print(f"min={_fmt(times.min())} max={_fmt(times.max())} mean={_fmt(times.mean())}")
    print(" ".join(f"q{int(round(p * 100)):02d}={_fmt(emp.quantile(p))}" for p in QUANTILES))


def _oracle(doc, h):
    try:
        return numeric.analyze(doc.root, h)
    except NotReducibleError as exc:
        raise CliError(
            "NotReducible", f"{exc}; run 'ndsan simulate' instead", EXIT_NOT_REDUCIBLE
        ) from None


def cmd_analyze(args):
    doc = _load(args.network)
    dist = _oracle(doc, args.grid_step)
    out = args.out
    if not out.endswith(".csv"):
        out = os.path.join(out, "oracle_cdf.csv")
    _write(out, netspec.oracle_cdf_csv(dist, args.decimate))
    print(
        f"network={doc.name} grid_step={_fmt(args.grid_step)} points={dist.size} "
        f"mean={_fmt(dist.mean())} mass={_fmt(dist.total_mass)}"
    )


def cmd_compare(args):
    doc = _load(args.network)
    dist = _oracle(doc, args.grid_step)
    seed = _seed(args)
    batch = sampler.run_batch(
        doc.root, args.replications, seed, name=doc.name, threads=sampler.threads_from_env()
    )
    d = stats.ks_statistic(stats.ecdf(batch), dist.cdf_at)
    print(f"network={doc.name} N={args.replications} seed={seed} ks={_fmt(d)}")
    for eps in stats.EPSILONS:
        k = stats.critical_value(args.replications, eps)
        verdict = "pass" if d <= k else "fail"
        print(f"epsilon={_fmt(eps)} critical={_fmt(k)} {verdict}")


def cmd_report(args):
    try:
        times = netspec.read_samples(args.samples)
    except OSError as exc:
        raise CliError("IoError", f"{args.samples}: {exc.strerror or exc}", EXIT_IO) from None
    out = args.out or os.path.dirname(os.path.abspath(args.samples))
    emp = stats.ecdf(times)
    _write(os.path.join(out, "histogram.csv"), netspec.histogram_csv(stats.histogram(times, args.bin_width)))
    density = stats.approximate_density(emp, args.delta)
    _write(os.path.join(out, "density.csv"), netspec.density_csv(density))
    print(f"N={emp.N} bins={len(stats.histogram(times, args.bin_width))} density_points={len(density.points)}")
    if density.skipped:
        print(f"skipped tied order statistics at k={','.join(map(str, density.skipped))}")


def build_parser():
    parser = argparse.ArgumentParser(prog="ndsan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network document")
    p.add_argument("network")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plan", help="replications needed for a KS error bound")
    p.add_argument("--max-error", type=float, required=True)
    p.add_argument("--confidence", type=float, required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="sample completion times")
    p.add_argument("network")
    p.add_argument("--replications", type=int)
    p.add_argument("--max-error", type=float)
    p.add_argument("--confidence", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default=".")
    p.add_argument("--bin-width", type=float, default=1.0)
    p.add_argument("--delta", type=int, default=stats.DEFAULT_DELTA)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="exact grid CDF of a reducible network")
    p.add_argument("network")
    p.add_argument("--grid-step", type=float, default=numeric.DEFAULT_STEP)
    p.add_argument("--out", default="oracle_cdf.csv")
    p.add_argument("--decimate", type=int, default=1)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="KS distance between simulation and exact CDF")
    p.add_argument("network")
    p.add_argument("--replications", type=int, default=10_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-step", type=float, default=numeric.DEFAULT_STEP)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="histogram and density tables from a samples file")
    p.add_argument("samples")
    p.add_argument("--bin-width", type=float, default=1.0)
    p.add_argument("--delta", type=int, default=stats.DEFAULT_DELTA)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def _fail(kind, message, code):
    print(f"error: {kind}: {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CliError as exc:
        return _fail(exc.kind, str(exc), exc.code)
    except ValidationError as exc:
        for v in exc.report.violations:
            print(f"error: ValidationError: {v.path}: {v.message}", file=sys.stderr)
        return EXIT_INVALID
    except (NetworkSyntaxError, SchemaError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_PARSE)
    except NdsanError as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_ERROR)
    except ValueError as exc:
        return _fail("ValueError", str(exc), EXIT_USAGE)
    return 0
