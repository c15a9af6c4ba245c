"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import parse_config
from .errors import ConfigError, ConvergenceError, GaugeError, NumericalError
from .experiment import run_experiment

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dressed-doublets",
        description="Driven quartic double well: dressed four-level model vs exact propagation.",
    )
    ap.add_argument("--config", type=Path, help="key=value configuration file")
    ap.add_argument("--out", type=Path, help="output directory (overrides 'outputs')")
    ap.add_argument("--ratio", type=float, help="override |rabi_12|/omega")
    ap.add_argument("--levels", type=int, help="override n_levels")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        text = args.config.read_text() if args.config else ""
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text, ratio=args.ratio, n_levels=args.levels, outputs=args.out)
        result = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, NumericalError, GaugeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not result.regime.within_validity:
        print("warning: parameters outside the validity regime, see report.txt", file=sys.stderr)
    print(f"wrote {len(result.files)} files to {cfg.outputs}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
