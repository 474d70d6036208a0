#!/usr/bin/env python3
"""
Evaluation of the discernibility relations on assembly states.

Every evaluator returns an :class:`Evaluation` carrying the truth value and
the number that decided it (an eigenvalue residual for categorical relations,
an expectation value for probabilistic ones). Particle labels are 1-based
factor positions; no identity of particles across states is implied.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Mapping, Optional, Tuple

import numpy as np

from .config import LatticeConfig, SpinConfig, Tolerance
from .exceptions import ContractError, DegenerateSpinError, ShapeError, SlotIndexError
from .hilbert import AssemblyState, Operator, commutator, eigen_residual, embed_single, expectation
from .models import (
    AuditVerdict,
    BuildingBlock,
    DiscernmentReport,
    Mode,
    PairResult,
    PhysicalityAudit,
    Postulate,
    RelationKind,
    SectorLabel,
    Verdict,
    mode_of,
    postulate_of,
)
from .observables import (
    ProjectorFamily,
    lattice_momenta,
    lattice_momentum,
    lattice_position,
    pair_excluded_operator,
    pij_blocks,
    pij_sum_operator,
    total_spin_squared,
    variance_operator,
)
from .states import fourier_transform_state
from .symmetry import is_multiple_of_identity, is_permutation_invariant

logger = logging.getLogger(__name__)

C_THRESHOLD = 1e-6
LATTICE_QUANTITY_NAMES = ("Q", "P", "K")
LATTICE_NOTE = "lattice analogue: a norm threshold on [P(x), Q(y)]ρ replaces the exact eigenstate condition"
LABEL_NOTE = "particle labels are factor positions; no cross-state identity is implied"


@dataclass(frozen=True)
class Evaluation:
    """Truth value of a relation instance and the number backing it."""

    holds: bool
    witness: float

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True, eq=False)
class RelationSpec:
    """
    A discernibility relation with its parameters.

    Args:
        kind: Which relation.
        family: Projector family (Rt).
        t: Eigenvalue parameter (Rt).
        spin: Spin configuration (T, Tprime).
        quantity: Single-particle quantity A (R, Rprime).
        lattice: Lattice configuration (C, D, Dprime, DprimeP).
        n_particles: Assembly size used by the audit of D, Dprime, DprimeP.
        threshold: Norm threshold for C (defaults to 1e-6·ħ).
        quantity_name: ``Q`` or ``P`` for the lattice relations D and Dprime.
        sector: Sector on which the audit looks for trivial multiples of the identity.
        tol: Numeric tolerances.
    """

    kind: RelationKind
    family: Optional[ProjectorFamily] = None
    t: Optional[float] = None
    spin: Optional[SpinConfig] = None
    quantity: Optional[Operator] = None
    lattice: Optional[LatticeConfig] = None
    n_particles: int = 2
    threshold: Optional[float] = None
    quantity_name: str = "Q"
    sector: SectorLabel = SectorLabel.FULL
    tol: Tolerance = field(default_factory=Tolerance)

    def __post_init__(self):
        kind = RelationKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is RelationKind.RT and (self.family is None or self.t is None):
            raise ContractError("Rt needs a projector family and t")
        if kind in (RelationKind.T, RelationKind.TPRIME):
            if self.spin is None:
                raise ContractError(f"{kind.value} needs a spin configuration")
            if self.spin.s == 0:
                raise DegenerateSpinError(f"{kind.value} is undefined for spin 0")
        if kind in (RelationKind.R, RelationKind.RPRIME):
            if self.quantity is None:
                raise ContractError(f"{kind.value} needs a single-particle quantity")
            if self.quantity.n_factors != 1 or not self.quantity.is_hermitian():
                raise ContractError(f"{kind.value} needs a hermitian single-particle quantity")
        if kind in (RelationKind.C, RelationKind.D, RelationKind.DPRIME, RelationKind.DPRIME_P):
            if self.lattice is None:
                raise ContractError(f"{kind.value} needs a lattice configuration")
        if kind in (RelationKind.D, RelationKind.DPRIME, RelationKind.DPRIME_P) and self.n_particles < 2:
            raise ContractError(f"{kind.value} needs at least two particles")
        if self.quantity_name not in ("Q", "P"):
            raise ContractError("Lattice quantity must be Q or P")

    @property
    def mode(self) -> Mode:
        return mode_of(self.kind)

    @property
    def postulate(self) -> Postulate:
        return postulate_of(self.kind)


def _check_labels(n: int, x: int, y: int) -> None:
    for label in (x, y):
        if not 1 <= label <= n:
            raise SlotIndexError(f"Particle label {label} out of range 1..{n}")


def _check_lattice_state(cfg: LatticeConfig, rho: AssemblyState) -> None:
    if any(d != cfg.sites for d in rho.dims):
        raise ShapeError(f"State dims {rho.dims} are not {cfg.sites}-site lattice factors")


def _categorical_threshold(o: Operator, tol: Tolerance) -> float:
    return tol.abs_tol * (1 + o.norm_estimate())


@lru_cache(maxsize=64)
def _lattice_quantity(cfg: LatticeConfig, name: str) -> Operator:
    if name == "Q":
        return lattice_position(cfg)
    if name == "P":
        return lattice_momentum(cfg)
    if name == "K":
        # momentum in its own eigenbasis
        return Operator(np.diag(lattice_momenta(cfg)), (cfg.sites,), True, "K")
    raise ContractError(f"Unknown lattice quantity '{name}'; expected one of {LATTICE_QUANTITY_NAMES}")


@lru_cache(maxsize=8)
def _lattice_variance(cfg: LatticeConfig, n: int, name: str) -> Operator:
    return variance_operator(_lattice_quantity(cfg, name), n)


def _lattice_pair_excluded(cfg: LatticeConfig, n: int, x: int, y: int, name: str) -> Operator:
    return _pair_excluded_cached(cfg, n, min(x, y), max(x, y), name)


@lru_cache(maxsize=16)
def _pair_excluded_cached(cfg: LatticeConfig, n: int, x: int, y: int, name: str) -> Operator:
    return pair_excluded_operator(_lattice_quantity(cfg, name), n, x, y)


@lru_cache(maxsize=64)
def _lattice_commutator(cfg: LatticeConfig, x: int, y: int) -> Operator:
    p = embed_single(_lattice_quantity(cfg, "P"), x - 1, 2)
    q = embed_single(_lattice_quantity(cfg, "Q"), y - 1, 2)
    return commutator(p, q)


@lru_cache(maxsize=64)
def _total_spin(cfg: SpinConfig, x: int, y: int) -> Operator:
    return total_spin_squared(cfg, x, y)


@lru_cache(maxsize=64)
def _pij_sum(f: ProjectorFamily, x: int, y: int) -> Operator:
    return pij_sum_operator(f, x, y)


def _pair_difference_square(a: Operator, n: int, x: int, y: int) -> Operator:
    """(1/4)(A⁽ˣ⁾ − A⁽ʸ⁾)², which is Δ_A² for two particles."""
    return _pair_difference_cached(a, n, min(x, y), max(x, y))


@lru_cache(maxsize=16)
def _pair_difference_cached(a: Operator, n: int, x: int, y: int) -> Operator:
    diff = embed_single(a, x - 1, n).matrix - embed_single(a, y - 1, n).matrix
    return Operator(diff @ diff / 4, (a.side,) * n, label=f"(Δ{a.label})²({x},{y})").hermitized()


def eval_relation_Rt(f: ProjectorFamily, t: float, rho: AssemblyState, x: int, y: int,
                     tol: Optional[Tolerance] = None) -> Evaluation:
    """R_t(x, y): ρ is an eigenstate of Σᵢⱼ P⁽ˣ⁾ᵢⱼP⁽ʸ⁾ᵢⱼ with eigenvalue t."""
    tol = tol or Tolerance()
    if rho.dims != (f.d, f.d):
        raise ShapeError(f"Rt needs a two-particle state on C^{f.d}, got dims {rho.dims}")
    _check_labels(2, x, y)
    residual = eigen_residual(_pij_sum(f, x, y), rho, t)
    return Evaluation(residual <= tol.bound(t), residual)


def eval_relation_C(cfg: LatticeConfig, rho: AssemblyState, x: int, y: int,
                    threshold: Optional[float] = None) -> Evaluation:
    """
    Lattice analogue of C(x, y): ‖[P⁽ˣ⁾, Q⁽ʸ⁾]ρ‖ > threshold·‖ρ‖.

    On a finite lattice [P, Q] is not −iħ·I, so the exact eigenstate
    condition is replaced by a norm threshold (default 1e-6·ħ).
    """
    if rho.n_factors != 2:
        raise ShapeError("C is defined on two-particle assemblies")
    _check_lattice_state(cfg, rho)
    _check_labels(2, x, y)
    threshold = C_THRESHOLD * cfg.hbar if threshold is None else threshold
    comm = _lattice_commutator(cfg, x, y).matrix
    if rho.is_pure:
        ratio = float(np.linalg.norm(comm @ rho.vector))
    else:
        density = rho.density_matrix()
        ratio = float(np.linalg.norm(comm @ density) / np.linalg.norm(density))
    return Evaluation(ratio > threshold, ratio)


def eval_relation_T(cfg: SpinConfig, x: int, y: int, tol: Optional[Tolerance] = None) -> Evaluation:
    """
    T(x, y) for all states: |S⁽ˣ⁾ + S⁽ʸ⁾|² = 4s(s+1)ħ²·I as a matrix identity.

    The witness is the largest entrywise deviation from that multiple of the identity.
    """
    tol = tol or Tolerance()
    if cfg.s == 0:
        raise DegenerateSpinError("T is undefined for spin 0")
    _check_labels(2, x, y)
    target = 4 * cfg.casimir
    total = _total_spin(cfg, x, y)
    deviation = float(np.max(np.abs(total.matrix - target * np.eye(total.side))))
    return Evaluation(deviation <= tol.bound(target), deviation)


def eval_relation_T_state(cfg: SpinConfig, rho: AssemblyState, x: int, y: int,
                          tol: Optional[Tolerance] = None) -> Evaluation:
    """De-modalized T: ρ is an eigenstate of |S⁽ˣ⁾ + S⁽ʸ⁾|² with eigenvalue 4s(s+1)ħ²."""
    tol = tol or Tolerance()
    if cfg.s == 0:
        raise DegenerateSpinError("T is undefined for spin 0")
    _check_labels(2, x, y)
    target = 4 * cfg.casimir
    residual = eigen_residual(_total_spin(cfg, x, y), rho, target)
    return Evaluation(residual <= tol.bound(target), residual)


def eval_relation_Tprime(cfg: SpinConfig, rho: AssemblyState, x: int, y: int,
                         tol: Optional[Tolerance] = None) -> Evaluation:
    """T′(x, y): ⟨|S⁽ˣ⁾ + S⁽ʸ⁾|²⟩ = 4s(s+1)ħ²."""
    tol = tol or Tolerance()
    if cfg.s == 0:
        raise DegenerateSpinError("T′ is undefined for spin 0")
    _check_labels(2, x, y)
    target = 4 * cfg.casimir
    value = expectation(rho, _total_spin(cfg, x, y))
    return Evaluation(abs(value - target) <= tol.bound(target), value)


def _check_quantity_state(a: Operator, rho: AssemblyState, x: int, y: int) -> None:
    if rho.dims != (a.side,) * rho.n_factors:
        raise ShapeError(f"Quantity {a.label} acts on C^{a.side}, state dims are {rho.dims}")
    _check_labels(rho.n_factors, x, y)


def eval_relation_R(a: Operator, rho: AssemblyState, x: int, y: int,
                    tol: Optional[Tolerance] = None) -> Evaluation:
    """
    R(A, x, y): ρ is not an eigenstate of (1/4)(A⁽ˣ⁾ − A⁽ʸ⁾)² with eigenvalue 0.

    Always false for x = y, where the operator vanishes identically.
    """
    tol = tol or Tolerance()
    _check_quantity_state(a, rho, x, y)
    o = _pair_difference_square(a, rho.n_factors, x, y)
    residual = eigen_residual(o, rho, 0.0)
    return Evaluation(residual > _categorical_threshold(o, tol), residual)


def eval_relation_Rprime(a: Operator, rho: AssemblyState, x: int, y: int,
                         tol: Optional[Tolerance] = None) -> Evaluation:
    """R′(A, x, y): ⟨(1/4)(A⁽ˣ⁾ − A⁽ʸ⁾)²⟩ ≠ 0."""
    tol = tol or Tolerance()
    _check_quantity_state(a, rho, x, y)
    value = expectation(rho, _pair_difference_square(a, rho.n_factors, x, y))
    return Evaluation(value > tol.abs_tol, value)


def eval_relation_D(cfg: LatticeConfig, rho: AssemblyState, x: int, y: int, quantity: str = "Q",
                    tol: Optional[Tolerance] = None) -> Evaluation:
    """
    D(x, y): the n-particle variance operator does not send ρ to the
    pair-excluded sum applied to ρ.
    """
    tol = tol or Tolerance()
    n = rho.n_factors
    if n < 2:
        raise ContractError("D needs at least two particles")
    _check_lattice_state(cfg, rho)
    _check_labels(n, x, y)
    gap = _lattice_variance(cfg, n, quantity) - _lattice_pair_excluded(cfg, n, x, y, quantity)
    residual = eigen_residual(gap, rho, 0.0)
    return Evaluation(residual > _categorical_threshold(gap, tol), residual)


def eval_relation_Dprime(cfg: LatticeConfig, rho: AssemblyState, x: int, y: int, quantity: str = "Q",
                         tol: Optional[Tolerance] = None) -> Evaluation:
    """
    D′(x, y): ⟨(Δ⁽ⁿ⁾)²⟩ differs from the expectation of the pair-excluded sum.

    The witness is the difference, equal to (1/n²)⟨(A⁽ˣ⁾ − A⁽ʸ⁾)²⟩; with
    ``quantity="P"`` this is the momentum variant evaluated with P directly.
    """
    tol = tol or Tolerance()
    n = rho.n_factors
    if n < 2:
        raise ContractError("D′ needs at least two particles")
    _check_lattice_state(cfg, rho)
    _check_labels(n, x, y)
    lhs = expectation(rho, _lattice_variance(cfg, n, quantity))
    rhs = expectation(rho, _lattice_pair_excluded(cfg, n, x, y, quantity))
    difference = lhs - rhs
    return Evaluation(abs(difference) > tol.abs_tol, difference)


def eval_relation_DprimeP(cfg: LatticeConfig, rho: AssemblyState, x: int, y: int,
                          tol: Optional[Tolerance] = None) -> Evaluation:
    """Momentum D′: the position formula applied after a per-factor Fourier transform."""
    _check_lattice_state(cfg, rho)
    return eval_relation_Dprime(cfg, fourier_transform_state(rho, cfg), x, y, quantity="K", tol=tol)


def evaluate(spec: RelationSpec, rho: AssemblyState, x: int, y: int) -> Evaluation:
    """Dispatch one relation instance to its evaluator."""
    kind, tol = spec.kind, spec.tol
    if kind is RelationKind.RT:
        return eval_relation_Rt(spec.family, spec.t, rho, x, y, tol)
    if kind is RelationKind.C:
        return eval_relation_C(spec.lattice, rho, x, y, spec.threshold)
    if kind is RelationKind.T:
        if rho.n_factors != 2:
            raise ShapeError("T is defined on two-particle assemblies")
        return eval_relation_T(spec.spin, x, y, tol)
    if kind is RelationKind.TPRIME:
        return eval_relation_Tprime(spec.spin, rho, x, y, tol)
    if kind is RelationKind.R:
        return eval_relation_R(spec.quantity, rho, x, y, tol)
    if kind is RelationKind.RPRIME:
        return eval_relation_Rprime(spec.quantity, rho, x, y, tol)
    if kind is RelationKind.D:
        return eval_relation_D(spec.lattice, rho, x, y, spec.quantity_name, tol)
    if kind is RelationKind.DPRIME:
        return eval_relation_Dprime(spec.lattice, rho, x, y, spec.quantity_name, tol)
    return eval_relation_DprimeP(spec.lattice, rho, x, y, tol)


def classify(table: Mapping[Tuple[int, int], bool]) -> Verdict:
    """
    Weak-discernment verdict of a truth table over ordered particle pairs.

    A pair x ≠ y is weakly discerned if the relation holds both ways between
    them and of neither reflexively, or the dual: it holds reflexively of
    both and between them in neither direction.

    Raises:
        ContractError: If the table is not total over its labels.
    """
    labels = sorted({label for pair in table for label in pair})
    missing = [(x, y) for x in labels for y in labels if (x, y) not in table]
    if missing:
        raise ContractError(f"Truth table is missing pairs {missing}")
    for i, x in enumerate(labels):
        for y in labels[i + 1:]:
            between = table[(x, y)] and table[(y, x)]
            neither = not table[(x, y)] and not table[(y, x)]
            reflexive = table[(x, x)] and table[(y, y)]
            irreflexive = not table[(x, x)] and not table[(y, y)]
            if (between and irreflexive) or (neither and reflexive):
                return Verdict.WEAKLY_DISCERNED
    return Verdict.NOT_DISCERNED


def truth_table(spec: RelationSpec, rho: AssemblyState) -> List[PairResult]:
    n = rho.n_factors
    results = []
    for x in range(1, n + 1):
        for y in range(1, n + 1):
            outcome = evaluate(spec, rho, x, y)
            results.append(PairResult(x=x, y=y, holds=bool(outcome.holds), witness=float(outcome.witness)))
    return results


def _block(o: Operator, tol: Tolerance, sector: Optional[SectorLabel] = None) -> BuildingBlock:
    invariant = is_permutation_invariant(o, tol)
    multiple = None if sector is None else is_multiple_of_identity(o, sector, tol)
    return BuildingBlock(
        description=o.label,
        permutation_invariant=invariant,
        assembled=sector is not None,
        multiple_of_identity=multiple,
    )


def _audit_blocks(spec: RelationSpec, sector: SectorLabel) -> List[BuildingBlock]:
    kind, tol = spec.kind, spec.tol
    blocks: List[BuildingBlock] = []
    if kind is RelationKind.RT:
        for x in (1, 2):
            blocks.extend(_block(o, tol) for o in pij_blocks(spec.family, x))
        for x, y in ((1, 1), (2, 2), (1, 2)):
            blocks.append(_block(_pij_sum(spec.family, x, y), tol, sector))
    elif kind is RelationKind.C:
        for x in (1, 2):
            blocks.append(_block(embed_single(_lattice_quantity(spec.lattice, "Q"), x - 1, 2), tol))
            blocks.append(_block(embed_single(_lattice_quantity(spec.lattice, "P"), x - 1, 2), tol))
        for x, y in ((1, 1), (2, 2), (1, 2), (2, 1)):
            blocks.append(_block(_lattice_commutator(spec.lattice, x, y), tol, sector))
    elif kind in (RelationKind.T, RelationKind.TPRIME):
        for x, y in ((1, 1), (2, 2), (1, 2)):
            blocks.append(_block(_total_spin(spec.spin, x, y), tol, sector))
    elif kind in (RelationKind.R, RelationKind.RPRIME):
        blocks.append(_block(variance_operator(spec.quantity, 2), tol, sector))
    else:
        name = "P" if kind is RelationKind.DPRIME_P else spec.quantity_name
        n = spec.n_particles
        blocks.append(_block(_lattice_variance(spec.lattice, n, name), tol, sector))
        if kind is RelationKind.D:
            for x in range(1, n + 1):
                for y in range(x + 1, n + 1):
                    blocks.append(_block(_lattice_pair_excluded(spec.lattice, n, x, y, name), tol, sector))
    return blocks


def physicality_audit(spec: RelationSpec) -> PhysicalityAudit:
    """
    Run the permutation-invariance test on every operator a relation's
    definition refers to.

    Single-slot operators (P⁽ˣ⁾ᵢⱼ, Q⁽ˣ⁾, P⁽ˣ⁾) are listed on their own; the
    assembled operators the relation actually tests against are also checked
    for being a multiple of the identity on the relevant sector (the
    antisymmetric sector for Rt, ``spec.sector`` otherwise). The trivial flag
    annotates the audit; it does not decide the relation.
    """
    sector = SectorLabel.ANTISYMMETRIC if spec.kind is RelationKind.RT else spec.sector
    blocks = _audit_blocks(spec, sector)
    assembled = [b for b in blocks if b.assembled]
    trivial = bool(assembled) and all(b.multiple_of_identity for b in assembled)
    if all(b.permutation_invariant for b in blocks):
        overall = AuditVerdict.PHYSICAL
    else:
        overall = AuditVerdict.UNPHYSICAL
    logger.debug(f"Audit of {spec.kind.value}: {overall.value}, trivial={trivial}")
    return PhysicalityAudit(relation=spec.kind, sector=sector, blocks=blocks, overall=overall, trivial=trivial)


def discern(spec: RelationSpec, rho: AssemblyState, audit: bool = True) -> DiscernmentReport:
    """Evaluate a relation on every ordered pair of particles and classify the result."""
    table = truth_table(spec, rho)
    verdict = classify({(entry.x, entry.y): entry.holds for entry in table})
    notes = [LABEL_NOTE]
    if spec.kind is RelationKind.C:
        notes.append(LATTICE_NOTE)
    return DiscernmentReport(
        relation=spec.kind,
        mode=spec.mode,
        postulate=spec.postulate,
        n_particles=rho.n_factors,
        truth_table=table,
        verdict=verdict,
        audit=physicality_audit(spec) if audit else None,
        notes=notes,
    )
