#!/usr/bin/env python3
"""
Command-line front end: run theorem suites, evaluate relations on state
files, audit relations and sample witnesses over random states.

Exit codes: 0 when the evaluation completed (verify also needs every check
to pass), 1 when a verify suite failed, 2 for usage, configuration and file
errors.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from .config import OUTPUT_FORMATS, LatticeConfig, RunConfig, SpinConfig, Tolerance
from .exceptions import DiscernibilityError
from .manager import DiscernmentManager
from .models import RelationKind, SectorLabel
from .theorems import normalize_theorem_id
from .utils import Report, display_report, write_csv

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

logger = logging.getLogger(__name__)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lattice-sites", type=int, help="Lattice size L (default: DISCERN_LATTICE_SITES)")
    common.add_argument("--spacing", type=float, default=1.0, help="Lattice spacing")
    common.add_argument("--hbar", type=float, help="Reduced Planck constant (default: DISCERN_HBAR)")
    common.add_argument("--spin", type=float, default=0.5, help="Single-particle spin s")
    common.add_argument("--particles", type=int, default=2, help="Number of particles for D relations")
    common.add_argument("--dimension", type=int, help="Factor dimension for Rt")
    common.add_argument("--sector", choices=[s.value for s in SectorLabel], default=SectorLabel.FULL.value)
    common.add_argument("--trials", type=int, default=100, help="Number of random states")
    common.add_argument("--seed", type=int, help="Seed for all randomness (default: DISCERN_SEED)")
    common.add_argument("--abs-tol", type=float, help="Absolute tolerance (default: DISCERN_ABS_TOL)")
    common.add_argument("--rel-tol", type=float, help="Relative tolerance (default: DISCERN_REL_TOL)")
    common.add_argument("--format", choices=OUTPUT_FORMATS, default="text", dest="output_format")
    common.add_argument("--output", type=Path, help="Write the report here instead of stdout")
    return common


def _relation_options() -> argparse.ArgumentParser:
    relation = argparse.ArgumentParser(add_help=False)
    relation.add_argument("--relation", choices=[k.value for k in RelationKind], required=True)
    relation.add_argument("--quantity", help="Q, P, Sx, Sy or Sz")
    relation.add_argument("--t", type=float, help="Eigenvalue parameter of Rt (default: -2)")
    relation.add_argument("--threshold", type=float, help="Norm threshold of C (default: 1e-6*hbar)")
    return relation


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discernibility",
        description="Weak-discernibility checks for assemblies of indistinguishable quantum particles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common, relation = _common_options(), _relation_options()

    verify = sub.add_parser("verify", parents=[common], help="Run a theorem's scripted check")
    verify.add_argument("--theorem", required=True, help="1-6 or SMS1-SMS3")
    verify.add_argument("--threshold", type=float, help="Norm threshold of C for SMS2")

    discern = sub.add_parser("discern", parents=[common, relation], help="Evaluate a relation on a state file")
    discern.add_argument("--state", type=Path, required=True, help="State file (JSON)")

    sub.add_parser("audit", parents=[common, relation], help="Audit a relation's building blocks")
    sub.add_parser("sample", parents=[common, relation], help="Sample witnesses over random states")
    return parser


def run_config(args: argparse.Namespace, manager: DiscernmentManager) -> RunConfig:
    """Layer parsed flags over the manager's environment defaults."""
    settings = manager.settings
    hbar = settings.hbar if args.hbar is None else args.hbar
    sites = settings.lattice_sites if args.lattice_sites is None else args.lattice_sites
    tolerance = Tolerance(
        settings.abs_tol if args.abs_tol is None else args.abs_tol,
        settings.rel_tol if args.rel_tol is None else args.rel_tol,
    )
    theorem = getattr(args, "theorem", None)
    return manager.run_config(
        args.command,
        theorem=normalize_theorem_id(theorem) if theorem is not None else None,
        relation=getattr(args, "relation", None),
        quantity=getattr(args, "quantity", None),
        t=getattr(args, "t", None),
        threshold=getattr(args, "threshold", None),
        state_path=getattr(args, "state", None),
        lattice=LatticeConfig(sites, spacing=args.spacing, hbar=hbar),
        spin=SpinConfig(args.spin, hbar=hbar),
        n_particles=args.particles,
        dimension=args.dimension,
        sector=SectorLabel(args.sector),
        trials=args.trials,
        seed=settings.seed if args.seed is None else args.seed,
        tolerance=tolerance,
        output_format=args.output_format,
        output_path=args.output,
    )


def emit(report: Report, cfg: RunConfig) -> None:
    """Write a report in the requested format to stdout or ``cfg.output_path``."""
    out = sys.stdout if cfg.output_path is None else open(cfg.output_path, "w", encoding="utf-8", newline="")
    try:
        if cfg.output_format == "json":
            out.write(report.model_dump_json(indent=2) + "\n")
        elif cfg.output_format == "csv":
            write_csv(report, out)
        else:
            display_report(report, out)
    finally:
        if out is not sys.stdout:
            out.close()
            logger.info(f"Report written to {cfg.output_path}")


def cmd_verify(cfg: RunConfig, manager: DiscernmentManager) -> int:
    report = manager.verify(cfg)
    emit(report, cfg)
    if not report.passed:
        logger.error(f"Theorem {report.theorem} failed: {', '.join(report.failures()[:20])}")
        return EXIT_FAILED
    return EXIT_OK


def cmd_discern(cfg: RunConfig, manager: DiscernmentManager) -> int:
    emit(manager.discern(cfg), cfg)
    return EXIT_OK


def cmd_audit(cfg: RunConfig, manager: DiscernmentManager) -> int:
    emit(manager.audit(cfg), cfg)
    return EXIT_OK


def cmd_sample(cfg: RunConfig, manager: DiscernmentManager) -> int:
    emit(manager.sample(cfg), cfg)
    return EXIT_OK


COMMAND_HANDLERS: Dict[str, Callable[[RunConfig, DiscernmentManager], int]] = {
    "verify": cmd_verify,
    "discern": cmd_discern,
    "audit": cmd_audit,
    "sample": cmd_sample,
}


def main(argv: Optional[List[str]] = None, manager: Optional[DiscernmentManager] = None) -> int:
    """
    Parse ``argv`` and run one command.

    Returns:
        The process exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        manager = manager or DiscernmentManager()
        cfg = run_config(args, manager)
        return COMMAND_HANDLERS[cfg.command](cfg, manager)
    except DiscernibilityError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"Cannot write output: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
