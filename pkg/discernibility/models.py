#!/usr/bin/env python3
"""
Data models for the discernibility toolkit.

Enumerations are plain ``str`` enums so they serialize as their values; the
report models are pydantic models so every report round-trips through JSON.
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field


class SectorLabel(str, Enum):
    """Symmetry sector of an assembly state."""

    FULL = "full"
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"


class RelationKind(str, Enum):
    """Discernibility relations the toolkit evaluates."""

    RT = "Rt"
    C = "C"
    T = "T"
    TPRIME = "Tprime"
    R = "R"
    RPRIME = "Rprime"
    D = "D"
    DPRIME = "Dprime"
    DPRIME_P = "DprimeP"


class Mode(str, Enum):
    CATEGORICAL = "categorical"
    PROBABILISTIC = "probabilistic"


class Postulate(str, Enum):
    """Interpretive assumption a verdict rests on."""

    STRONG_PROPERTY = "strong-property"
    BORN_RULE = "born-rule"


class Verdict(str, Enum):
    WEAKLY_DISCERNED = "weakly-discerned"
    NOT_DISCERNED = "not-discerned"


class AuditVerdict(str, Enum):
    PHYSICAL = "physical"
    UNPHYSICAL = "unphysical-building-blocks"
    TRIVIAL = "trivial-multiple-of-identity"


CATEGORICAL_KINDS = frozenset({RelationKind.RT, RelationKind.C, RelationKind.T, RelationKind.R, RelationKind.D})


def mode_of(kind: RelationKind) -> Mode:
    """Categorical relations test eigenstates, the rest use expectations."""
    return Mode.CATEGORICAL if kind in CATEGORICAL_KINDS else Mode.PROBABILISTIC


def postulate_of(kind: RelationKind) -> Postulate:
    if mode_of(kind) is Mode.CATEGORICAL:
        return Postulate.STRONG_PROPERTY
    return Postulate.BORN_RULE


class PairResult(BaseModel):
    """One truth-table entry with the number backing it."""

    x: int
    y: int
    holds: bool
    witness: float


class BuildingBlock(BaseModel):
    """An operator referenced by a relation's definition."""

    description: str
    permutation_invariant: bool
    assembled: bool = False
    multiple_of_identity: Optional[bool] = None


class PhysicalityAudit(BaseModel):
    """Permutation-invariance audit of a relation's building blocks."""

    relation: RelationKind
    sector: SectorLabel
    blocks: List[BuildingBlock] = Field(default_factory=list)
    overall: AuditVerdict
    trivial: bool = False

    @property
    def verdicts(self) -> List[AuditVerdict]:
        """The overall verdict, followed by the trivial-multiple-of-identity label when it applies."""
        return [self.overall, AuditVerdict.TRIVIAL] if self.trivial else [self.overall]


class DiscernmentReport(BaseModel):
    """Truth table, verdict and audit for one relation on one state."""

    relation: RelationKind
    mode: Mode
    postulate: Postulate
    n_particles: int
    truth_table: List[PairResult] = Field(default_factory=list)
    verdict: Verdict
    audit: Optional[PhysicalityAudit] = None
    notes: List[str] = Field(default_factory=list)

    def table(self) -> Dict[Tuple[int, int], bool]:
        """Truth table keyed by ordered particle pair."""
        return {(entry.x, entry.y): entry.holds for entry in self.truth_table}

    def witness(self, x: int, y: int) -> float:
        for entry in self.truth_table:
            if entry.x == x and entry.y == y:
                return entry.witness
        raise KeyError((x, y))


class RunMetadata(BaseModel):
    """Everything needed to reproduce a run from its own report."""

    seed: Optional[int] = None
    rng: str = "PCG64/SeedSequence"
    abs_tol: float
    rel_tol: float
    hbar: float
    lattice_sites: Optional[int] = None
    spin: Optional[float] = None
    n_particles: Optional[int] = None
    notes: List[str] = Field(default_factory=list)


class TrialRecord(BaseModel):
    """One state checked by a theorem script."""

    index: int
    label: str
    relation: Optional[RelationKind] = None
    sector: Optional[SectorLabel] = None
    branch: Optional[str] = None
    table: List[PairResult] = Field(default_factory=list)
    verdict: Verdict
    witness: float
    passed: bool


class TheoremReport(BaseModel):
    theorem: str
    passed: bool
    trials: List[TrialRecord] = Field(default_factory=list)
    checks: Dict[str, bool] = Field(default_factory=dict)
    values: Dict[str, float] = Field(default_factory=dict)
    audits: List[PhysicalityAudit] = Field(default_factory=list)
    metadata: RunMetadata

    def failures(self) -> List[str]:
        """Names of failed scalar checks and indices of failed trials."""
        failed = [name for name, ok in self.checks.items() if not ok]
        failed.extend(f"trial {trial.index}" for trial in self.trials if not trial.passed)
        return failed


class SampleRow(BaseModel):
    trial: int
    pair_x: int
    pair_y: int
    relation: RelationKind
    witness: float
    verdict: Verdict


class SampleSummary(BaseModel):
    count: int
    min: float
    mean: float
    max: float


class SampleReport(BaseModel):
    """Per-trial witnesses of a relation over random states."""

    relation: RelationKind
    rows: List[SampleRow] = Field(default_factory=list)
    summary: SampleSummary
    metadata: RunMetadata
