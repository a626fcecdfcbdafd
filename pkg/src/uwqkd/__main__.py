"""Command-line interface.

Usage:
    uwqkd run CONFIG [--out PATH] [--workers W]
    uwqkd preset NAME [--photons N] [--seed S] [--workers W] [--out PATH]
    uwqkd validate CONFIG
    uwqkd version

Exit codes: 0 on success, 1 for configuration errors, 2 for any other
failure. The default worker count comes from ``UWQKD_WORKERS``.
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import scipy

from uwqkd import __version__
from uwqkd.base.errors import ConfigError, UwqkdError
from uwqkd.config import default_workers, load_config
from uwqkd.experiment import run_experiment
from uwqkd.presets import PRESETS, run_preset

logger = logging.getLogger("uwqkd")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

LOG_FORMAT = "%(asctime)s [%(levelname)s] [%(name)s] %(message)s"


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def cmd_run(args: argparse.Namespace) -> int:
    """Run an experiment configuration file."""
    cfg = load_config(args.config).with_overrides(workers=args.workers)
    path = run_experiment(cfg, args.out)
    print(path)
    return EXIT_OK


def cmd_preset(args: argparse.Namespace) -> int:
    """Run a built-in preset."""
    path = run_preset(
        args.name,
        photons=args.photons,
        seed=args.seed,
        workers=args.workers or default_workers(),
        output=args.out,
    )
    print(path)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    """Check a configuration file without running it."""
    cfg = load_config(args.config)
    points = len(cfg.points())
    sweep = cfg.sweep.value if cfg.sweep else "none"
    print(f"{args.config}: ok ({points} point(s), sweep: {sweep}, config hash {cfg.config_hash()})")
    return EXIT_OK


def cmd_version(args: argparse.Namespace) -> int:
    """Print version information."""
    print(f"uwqkd version: {__version__}")
    print(f"numpy version: {np.__version__}")
    print(f"scipy version: {scipy.__version__}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser."""
    parser = argparse.ArgumentParser(
        prog="uwqkd",
        description="Polarized-photon Monte Carlo and BB84 link budgets for underwater QKD",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log progress (-v) or debug detail (-vv) to stderr",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run an experiment configuration file")
    run.add_argument("config", type=Path, help="TOML configuration file")
    run.add_argument("--out", type=Path, default=None, help="Output CSV path")
    run.add_argument("--workers", type=_positive_int, default=None, help="Worker processes")
    run.set_defaults(handler=cmd_run)

    preset = commands.add_parser("preset", help="Run a built-in preset")
    preset.add_argument("name", choices=sorted(PRESETS), help="Preset name")
    preset.add_argument("--photons", type=_positive_int, default=None, help="Photons per point")
    preset.add_argument("--seed", type=_seed, default=None, help="Run seed")
    preset.add_argument("--workers", type=_positive_int, default=None, help="Worker processes")
    preset.add_argument("--out", type=Path, default=None, help="Output CSV path")
    preset.set_defaults(handler=cmd_preset)

    validate = commands.add_parser("validate", help="Check a configuration file")
    validate.add_argument("config", type=Path, help="TOML configuration file")
    validate.set_defaults(handler=cmd_validate)

    version = commands.add_parser("version", help="Print version information")
    version.set_defaults(handler=cmd_version)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Main CLI entry point."""
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format=LOG_FORMAT)

    try:
        return int(args.handler(args))
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UwqkdError, OSError, ValueError) as exc:
        logger.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
