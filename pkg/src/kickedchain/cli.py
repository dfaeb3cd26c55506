"""Command-line entry point.

    kickedchain <experiment> [--config FILE] [--set key=value ...] [--out DIR]

Exit codes: 0 success, 1 configuration error, 2 capacity error,
3 validation-suite failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import EXPERIMENTS, apply_overrides, parse_config, with_experiment, with_output_dir
from .errors import CapacityError, ConfigError, MemoryBudgetError
from .experiments import run_experiment


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is reserved for
    # capacity errors here, and a bad command line is a config problem.
    def error(self, message: str):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="kickedchain",
        description="Run one kicked-chain experiment and write its artifacts.",
    )
    parser.add_argument("experiment", help=f"one of: {', '.join(EXPERIMENTS)}")
    parser.add_argument("--config", metavar="FILE", help="key = value configuration file")
    parser.add_argument(
        "--set",
        metavar="KEY=VALUE",
        action="append",
        default=[],
        dest="overrides",
        help="override one configuration key (repeatable)",
    )
    parser.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text = ""
        if args.config is not None:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config file {args.config!r}: {exc}") from exc
        cfg = parse_config(text)
        cfg = apply_overrides(cfg, args.overrides)
        cfg = with_experiment(cfg, args.experiment)
        if args.out is not None:
            cfg = with_output_dir(cfg, args.out)
        manifest = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (CapacityError, MemoryBudgetError) as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 2

    for filename, digest in manifest.files.items():
        print(f"wrote {os.path.join(manifest.output_dir, filename)}  sha256={digest[:12]}")
    print(f"wrote {os.path.join(manifest.output_dir, 'manifest.json')}")

    if cfg.experiment == "validate":
        with open(os.path.join(cfg.output_dir, "validation.json"), encoding="utf-8") as fh:
            report = json.load(fh)
        for check in report["checks"]:
            status = "pass" if check["passed"] else "FAIL"
            print(
                f"  {status}  {check['name']}: deviation {check['deviation']:.3e}"
                f" (tolerance {check['tolerance']:.0e})"
            )
        if not report["passed"]:
            return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
