"""
Main Application Entry Point
Command-line front door: argument parsing, logging setup and exit codes
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pythonjsonlogger.json import JsonFormatter
from threadpoolctl import threadpool_limits

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config import Config
from src.core.errors import ClassViolationError, LabError
from src.core.orchestrator import LabOrchestrator

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(level: str = "INFO", log_file: Optional[str] = None, json_format: bool = False) -> None:
    """Configure root logging to stderr, plus an optional file"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    formatter: logging.Formatter = logging.Formatter(LOG_FORMAT)
    if json_format:
        formatter = JsonFormatter("%(asctime)s %(name)s %(levelname)s %(message)s")
    for handler in handlers:
        handler.setFormatter(formatter)
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), handlers=handlers, force=True)


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the validation status"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or TOML configuration overrides")
    common.add_argument("--out", default="out", help="Output directory")
    common.add_argument("--threads", type=int, help="Worker and BLAS thread count")
    common.add_argument("--seed", type=int, help="Seed for Hausdorff refinement start points")
    common.add_argument("--tolerance", type=float, help="Forward solver residual tolerance")

    parser = _ArgumentParser(prog="scatter-lab", description="Inverse obstacle scattering lab")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    forward = sub.add_parser("forward", parents=[common], help="Surface file to far-field matrix")
    forward.add_argument("surface")

    cont = sub.add_parser("continue", parents=[common], help="Continue a far-field file to complex directions")
    cont.add_argument("far_field")
    cont.add_argument("--lambda", dest="lam", type=float, nargs=3, required=True, metavar=("L1", "L2", "L3"))
    cont.add_argument("--t", type=float, default=0.0)

    recon = sub.add_parser("reconstruct", parents=[common], help="Spectrum scan and indicator inversion")
    recon.add_argument("surface")
    recon.add_argument("--scan", help="Scan configuration (JSON or TOML)")

    stab = sub.add_parser("stability", parents=[common], help="Pair-family experiment and rate fit")
    stab.add_argument("spec")

    ex1 = sub.add_parser("example1", parents=[common], help="Hankel counterexample table")
    ex1.add_argument("--degrees", type=int, nargs="+", default=[10, 20, 40])
    ex1.add_argument("--a2", type=float, default=1.5)
    ex1.add_argument("--b", type=float, default=3.0)

    sub.add_parser("check", parents=[common], help="Identity and series self-tests")
    return parser


def _load_config(args: argparse.Namespace) -> Config:
    config = Config.from_file(args.config) if args.config else Config()
    config.with_runtime(threads=args.threads, seed=args.seed)
    if args.tolerance is not None:
        config.with_tolerance(args.tolerance)
    config.validate()
    return config


def _dispatch(orchestrator: LabOrchestrator, args: argparse.Namespace):
    if args.command == "forward":
        return orchestrator.forward(args.surface)
    if args.command == "continue":
        return orchestrator.continue_far_field(args.far_field, args.lam, args.t)
    if args.command == "reconstruct":
        return orchestrator.reconstruct(args.surface, args.scan)
    if args.command == "stability":
        return orchestrator.stability(args.spec)
    if args.command == "example1":
        return orchestrator.example1(args.degrees, args.a2, args.b)
    return orchestrator.check()


def cli_main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; 0 on success, 1 on validation errors, 2 on numerical failures"""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = _load_config(args)
    except LabError as e:
        setup_logging()
        logger.error(f"Configuration error: {e}")
        return e.exit_code

    runtime = config.runtime
    setup_logging(runtime.log_level, runtime.log_file, json_format=runtime.log_format == "json")
    logger.info(f"Running '{args.command}' with {runtime.threads} thread(s), output in {args.out}")

    try:
        with threadpool_limits(limits=runtime.threads):
            summary = _dispatch(LabOrchestrator(config, args.out), args)
    except ClassViolationError as e:
        logger.error(f"Inadmissible surface: {e}")
        report = e.report.to_dict() if e.report is not None else None
        print(json.dumps({"error": str(e), "report": report}, indent=2, sort_keys=True, default=str))
        return e.exit_code
    except LabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(json.dumps({"error": str(e), "details": e.details}, indent=2, sort_keys=True, default=str))
        return e.exit_code
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return 2

    print(json.dumps(summary, indent=2, sort_keys=True, default=str))
    return 0


def main():
    """Console script entry point"""
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
