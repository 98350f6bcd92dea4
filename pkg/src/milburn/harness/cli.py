"""Command line entry point: ``milburn {run,validate,figures}``.

Exit codes: 0 success, 1 a method-pair comparison failed, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from ..errors import ConfigError, TruncationError
from .config import load_config
from .experiment import DEFAULT_TOLERANCE, ValidationReport, run_experiment
from .figures import TITLES, figure_configs
from .output import emit_csv, emit_plot_script, emit_report

log = logging.getLogger("milburn")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory (default ./out)")
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                        help="max allowed deviation between methods (default 1e-6)")
    common.add_argument("--quiet", action="store_true", help="only print errors")

    parser = argparse.ArgumentParser(
        prog="milburn",
        description="Intrinsic decoherence of a displaced harmonic oscillator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", parents=[common], help="run a config and write CSV, plot script, report")
    p.add_argument("config")
    p = sub.add_parser("validate", parents=[common], help="run method comparisons and print the report")
    p.add_argument("config")
    sub.add_parser("figures", parents=[common], help="regenerate the four figure datasets")
    return parser


def _write_outputs(result, out_dir, stem, title=""):
    csv_name = f"{stem}.csv"
    emit_csv(result.cases, os.path.join(out_dir, csv_name))
    emit_plot_script(result.cases, result.report, os.path.join(out_dir, f"{stem}.gp"), csv_name, title)


def _cmd_run(args) -> int:
    config = load_config(args.config)
    result = run_experiment(config, args.tolerance)
    os.makedirs(args.out, exist_ok=True)
    _write_outputs(result, args.out, config.name)
    emit_report(result.report, os.path.join(args.out, f"{config.name}_report.txt"))
    log.info("wrote %s outputs to %s", config.name, args.out)
    if not args.quiet:
        sys.stdout.write(result.report.to_text())
    return 0 if result.report.passed else 1


def _cmd_validate(args) -> int:
    config = load_config(args.config)
    result = run_experiment(config, args.tolerance)
    if not args.quiet:
        sys.stdout.write(result.report.to_text())
    return 0 if result.report.passed else 1


def _cmd_figures(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    combined = ValidationReport(args.tolerance)
    for name, config in figure_configs().items():
        log.info("generating %s", name)
        result = run_experiment(config, args.tolerance)
        _write_outputs(result, args.out, name, TITLES[name])
        for c in result.report.comparisons:
            combined.comparisons.append(type(c)(f"{name}:{c.case}", c.pair, c.max_dev,
                                                c.per_observable, c.passed))
        for case, diag in result.report.diagnostics.items():
            combined.diagnostics[f"{name}:{case}"] = diag
    emit_report(combined, os.path.join(args.out, "report.txt"))
    if not args.quiet:
        sys.stdout.write(combined.to_text())
    return 0 if combined.passed else 1


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    handlers = {"run": _cmd_run, "validate": _cmd_validate, "figures": _cmd_figures}
    try:
        return handlers[args.command](args)
    except (ConfigError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
