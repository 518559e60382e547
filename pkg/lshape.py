#!/usr/bin/env python3
"""
L-shaped 3-punctured disc toolkit
Schwarz-Christoffel parameters, degenerating paths, collar twists and the
checks built on them, emitted as plot-ready tables
"""

import argparse
import logging
import sys
from typing import List, Optional

from config import load_run_config, settings
from core.errors import ConfigError
from handlers import (
    cmd_annulus_check,
    cmd_cover_table,
    cmd_polygon,
    cmd_solve,
    cmd_sweep,
    cmd_verify,
)
from handlers.common import EXIT_CONFIG, EXIT_FAILED
from utils.helpers import parse_int, parse_triple

# Configure logging
logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
)
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="KEY=VALUE file overriding the environment")
    common.add_argument("--format", choices=("csv", "json"), help="output table format")
    common.add_argument("--out", help="output directory")
    common.add_argument("--jobs", type=int, help="worker processes for sweeps")
    common.add_argument("--tol", type=float, help="parameter solver tolerance")

    parser = argparse.ArgumentParser(prog="lshape", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    polygon = sub.add_parser("polygon", parents=[common], help="polygon, annuli and twist data")
    polygon.add_argument("--target", help="a,b,q as rationals (default: the base point)")
    polygon.add_argument("--twist", action="store_true", help="require twist data (fails for b = 0)")

    solve = sub.add_parser("solve", parents=[common], help="Schwarz-Christoffel parameter problem")
    solve.add_argument("--target", help="a,b,q (default: the base point)")
    solve.add_argument("--initial", help="lambda,zeta,r initial guess")

    sweep = sub.add_parser("sweep", parents=[common], help="paths, r(t) and the collar twist over the t-grid")
    sweep.add_argument("--t-min", type=float)
    sweep.add_argument("--t-max", type=float)
    sweep.add_argument("--t-count", type=int)
    sweep.add_argument("--linear", action="store_true", help="equispaced instead of log-spaced grid")

    verify = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    verify.add_argument("--quick", action="store_true", help="coarser grids and fewer random samples")

    annulus = sub.add_parser("annulus-check", parents=[common], help="round-annulus pairing checks")
    annulus.add_argument("--r0", type=float, default=2.0)
    annulus.add_argument("--count", type=int, default=20)

    covers = sub.add_parser("cover-table", parents=[common], help="fully ramified double-cover types")
    covers.add_argument("--spec", help="l,k1,k2,a1,a2,q for a single cover")
    return parser


def overrides_from(args: argparse.Namespace) -> dict:
    overrides = {
        "LSHAPE_OUTPUT_FORMAT": args.format,
        "LSHAPE_OUTPUT_DIR": args.out,
        "LSHAPE_JOBS": args.jobs,
        "LSHAPE_SOLVER_TOL": args.tol,
    }
    if args.command == "sweep":
        overrides.update(
            {
                "LSHAPE_T_MIN": args.t_min,
                "LSHAPE_T_MAX": args.t_max,
                "LSHAPE_T_COUNT": args.t_count,
                "LSHAPE_T_LOG": "false" if args.linear else None,
            }
        )
    return overrides


def dispatch(args: argparse.Namespace) -> int:
    config = load_run_config(args.config, overrides_from(args))
    logger.info(f"Running {args.command} (config {config.config_hash[:12]})")
    if args.command == "polygon":
        target = parse_triple(args.target, "--target") if args.target else None
        return cmd_polygon(config, target, twist=args.twist)
    if args.command == "solve":
        target = parse_triple(args.target, "--target") if args.target else None
        initial = parse_triple(args.initial, "--initial") if args.initial else None
        return cmd_solve(config, target, initial)
    if args.command == "sweep":
        return cmd_sweep(config)
    if args.command == "verify":
        return cmd_verify(config, quick=args.quick)
    if args.command == "annulus-check":
        if not args.r0 > 1 or args.count < 1:
            raise ConfigError("--r0 must exceed 1 and --count must be positive")
        return cmd_annulus_check(config, r0=args.r0, count=args.count)
    if args.command == "cover-table":
        spec = None
        if args.spec:
            spec = [parse_int(v, "--spec") for v in args.spec.split(",")]
            if len(spec) != 6:
                raise ConfigError(f"--spec needs six integers, got {args.spec!r}")
        return cmd_cover_table(config, spec)
    raise ConfigError(f"unknown command {args.command!r}")


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code"""
    args = build_parser().parse_args(argv)
    try:
        code = dispatch(args)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG
    except Exception:
        logger.exception(f"Command {args.command} failed")
        return EXIT_FAILED
    if code:
        logger.error(f"{args.command} finished with exit code {code}")
    else:
        logger.info(f"{args.command} finished")
    return code


if __name__ == "__main__":
    sys.exit(main())
