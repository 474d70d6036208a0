#!/usr/bin/env python3
"""
Utility functions for displaying and exporting reports.
"""

import csv
import sys
from typing import Dict, List, TextIO, Union

from .models import DiscernmentReport, PairResult, PhysicalityAudit, SampleReport, TheoremReport

CSV_COLUMNS = ["trial", "pair_x", "pair_y", "relation", "witness", "verdict"]
AUDIT_COLUMNS = ["description", "permutation_invariant", "assembled", "multiple_of_identity"]

Report = Union[TheoremReport, DiscernmentReport, PhysicalityAudit, SampleReport]


def format_float(value: float, digits: int = 6) -> str:
    """Human-readable rounding; machine formats keep full precision."""
    return f"{value:.{digits}g}"


def _banner(title: str, out: TextIO):
    print(f"\n{'='*60}", file=out)
    print(f" {title}", file=out)
    print(f"{'='*60}", file=out)


def _display_table(table: List[PairResult], out: TextIO):
    for entry in table:
        mark = "T" if entry.holds else "F"
        print(f"   ({entry.x},{entry.y})  {mark}   witness {format_float(entry.witness)}", file=out)


def display_audit(audit: PhysicalityAudit, out: TextIO = sys.stdout):
    """
    Display a physicality audit as a per-block invariance table.

    Args:
        audit: The audit to display
        out: Stream to print to
    """
    _banner(f"Physicality audit: {audit.relation.value}", out)
    for block in audit.blocks:
        invariant = "invariant" if block.permutation_invariant else "NOT invariant"
        line = f"   {block.description:<40} {invariant}"
        if block.assembled:
            line += f", multiple of identity on {audit.sector.value}: {block.multiple_of_identity}"
        print(line, file=out)
    print("-" * 60, file=out)
    print(f"Overall: {audit.overall.value}", file=out)
    print(f"Verdicts: {' + '.join(v.value for v in audit.verdicts)}", file=out)
    print(f"Trivial multiple of identity: {audit.trivial}", file=out)


def display_discernment(report: DiscernmentReport, out: TextIO = sys.stdout):
    """
    Display a discernment report.

    Args:
        report: The report to display
        out: Stream to print to
    """
    _banner(f"Relation {report.relation.value} on {report.n_particles} particles", out)
    print(f"Mode: {report.mode.value} ({report.postulate.value})", file=out)
    _display_table(report.truth_table, out)
    print(f"\nVerdict: {report.verdict.value}", file=out)
    for note in report.notes:
        print(f"Note: {note}", file=out)
    if report.audit is not None:
        display_audit(report.audit, out)


def display_theorem(report: TheoremReport, out: TextIO = sys.stdout):
    """
    Display a theorem report with its checks and failed trials.

    Args:
        report: The report to display
        out: Stream to print to
    """
    _banner(f"Theorem {report.theorem}: {'PASSED' if report.passed else 'FAILED'}", out)
    meta = report.metadata
    print(f"Seed {meta.seed} ({meta.rng}), hbar {meta.hbar}, tolerances {meta.abs_tol}/{meta.rel_tol}", file=out)
    print(f"States checked: {len(report.trials)}", file=out)
    for name, ok in report.checks.items():
        print(f"   {'ok  ' if ok else 'FAIL'} {name}", file=out)
    for name, value in report.values.items():
        print(f"   {name}: {format_float(value)}", file=out)

    branches: Dict[str, int] = {}
    for trial in report.trials:
        if trial.branch:
            branches[trial.branch] = branches.get(trial.branch, 0) + 1
    if branches:
        print(f"Branches: {', '.join(f'{k}={v}' for k, v in sorted(branches.items()))}", file=out)

    failed = [trial for trial in report.trials if not trial.passed]
    for trial in failed[:10]:
        print(f"\n{trial.index}. {trial.label} ({trial.verdict.value}), witness {format_float(trial.witness)}",
              file=out)
        _display_table(trial.table, out)
        print("-" * 60, file=out)
    for note in meta.notes:
        print(f"Note: {note}", file=out)
    for audit in report.audits:
        print(f"Audit {audit.relation.value}: {audit.overall.value}, trivial={audit.trivial}", file=out)


def display_sample(report: SampleReport, out: TextIO = sys.stdout):
    _banner(f"Sample of {report.relation.value}", out)
    summary = report.summary
    print(f"Rows: {summary.count}", file=out)
    print(f"Witness min {format_float(summary.min)}, mean {format_float(summary.mean)}, "
          f"max {format_float(summary.max)}", file=out)
    print(f"Seed {report.metadata.seed} ({report.metadata.rng})", file=out)


def display_report(report: Report, out: TextIO = sys.stdout):
    """Display any report in the human-readable format."""
    if isinstance(report, TheoremReport):
        display_theorem(report, out)
    elif isinstance(report, DiscernmentReport):
        display_discernment(report, out)
    elif isinstance(report, PhysicalityAudit):
        display_audit(report, out)
    else:
        display_sample(report, out)


def _pair_rows(trial: int, table: List[PairResult], relation: str, verdict: str) -> List[Dict[str, str]]:
    return [
        {
            "trial": str(trial),
            "pair_x": str(entry.x),
            "pair_y": str(entry.y),
            "relation": relation,
            "witness": repr(float(entry.witness)),
            "verdict": verdict,
        }
        for entry in table
    ]


def csv_rows(report: Report) -> List[Dict[str, str]]:
    """
    Flatten a report into CSV rows.

    Pair-based reports use the columns trial, pair_x, pair_y, relation,
    witness and verdict with witnesses at full precision; audits list their
    building blocks instead.
    """
    if isinstance(report, SampleReport):
        return [
            {
                "trial": str(row.trial),
                "pair_x": str(row.pair_x),
                "pair_y": str(row.pair_y),
                "relation": row.relation.value,
                "witness": repr(float(row.witness)),
                "verdict": row.verdict.value,
            }
            for row in report.rows
        ]
    if isinstance(report, DiscernmentReport):
        return _pair_rows(0, report.truth_table, report.relation.value, report.verdict.value)
    if isinstance(report, TheoremReport):
        rows = []
        for trial in report.trials:
            relation = trial.relation.value if trial.relation else ""
            rows.extend(_pair_rows(trial.index, trial.table, relation, trial.verdict.value))
        return rows
    return [
        {
            "description": block.description,
            "permutation_invariant": str(block.permutation_invariant),
            "assembled": str(block.assembled),
            "multiple_of_identity": "" if block.multiple_of_identity is None else str(block.multiple_of_identity),
        }
        for block in report.blocks
    ]


def write_csv(report: Report, out: TextIO):
    columns = AUDIT_COLUMNS if isinstance(report, PhysicalityAudit) else CSV_COLUMNS
    writer = csv.DictWriter(out, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(csv_rows(report))
