#!/usr/bin/env python3
"""
Scripted checks of the weak-discernibility theorems over constructed and
sampled states.

Each script returns a :class:`TheoremReport` with one record per state,
named scalar checks, the physicality audits of the relations it used, and
the metadata needed to reproduce the run. Trials draw from independent
sub-seeds, so reports do not depend on evaluation order.
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .config import LatticeConfig, TheoremConfig
from .exceptions import CapacityError, ContractError, UnknownTheoremError
from .hilbert import AssemblyState
from .models import (
    AuditVerdict,
    PairResult,
    RelationKind,
    RunMetadata,
    SectorLabel,
    TheoremReport,
    TrialRecord,
    Verdict,
)
from .discernment import (
    LATTICE_NOTE,
    RelationSpec,
    classify,
    eval_relation_Rt,
    eval_relation_T_state,
    physicality_audit,
    truth_table,
)
from .observables import (
    lattice_coordinates,
    lattice_momenta,
    lattice_momentum,
    lattice_position,
    random_projector_family,
    total_spin_squared,
)
from .states import (
    RNG_ALGORITHM,
    STREAM_FAMILIES,
    STREAM_PROFILES,
    RandomSpec,
    diagonal_pointmass,
    fourier_transform_state,
    random_profile,
    random_states,
    trial_rng,
)

logger = logging.getLogger(__name__)

THEOREM_IDS = ("1", "2", "3", "4", "5", "6", "SMS1", "SMS2", "SMS3")
SECTOR_CYCLE = (SectorLabel.FULL, SectorLabel.SYMMETRIC, SectorLabel.ANTISYMMETRIC)
POSITIVE_WITNESS = 1e-12
EXACT_ZERO = 1e-12
MOMENTUM_SPREAD = 1e-8
SPECTRUM_ATOL = 1e-9
IDENTITY_ATOL = 1e-10

Table = List[PairResult]


def normalize_theorem_id(theorem_id: Union[int, str]) -> str:
    """
    Canonical theorem id: ``"1"`` to ``"6"`` or ``"SMS1"`` to ``"SMS3"``.

    ``"T3"``, ``3`` and ``"sms2"`` are accepted spellings.

    Raises:
        UnknownTheoremError: For anything else.
    """
    text = str(theorem_id).strip().upper()
    if text.startswith("T") and text[1:].isdigit():
        text = text[1:]
    if text not in THEOREM_IDS:
        raise UnknownTheoremError(f"Unknown theorem '{theorem_id}'; expected one of {', '.join(THEOREM_IDS)}")
    return text


def _lookup(table: Table) -> Dict[Tuple[int, int], PairResult]:
    return {(entry.x, entry.y): entry for entry in table}


def _verdict(table: Table) -> Verdict:
    return classify({(entry.x, entry.y): entry.holds for entry in table})


def _is_symmetric(table: Table) -> bool:
    entries = _lookup(table)
    return all(entry.holds == entries[(entry.y, entry.x)].holds for entry in table)


def _off_diagonal_min(table: Table) -> float:
    return min(entry.witness for entry in table if entry.x != entry.y)


def _diagonal_pattern(table: Table, diagonal: bool) -> bool:
    """Diagonal entries all equal ``diagonal`` and off-diagonal ones its negation."""
    return all(entry.holds == (diagonal if entry.x == entry.y else not diagonal) for entry in table)


def _random_state(config: TheoremConfig, trial: int, dims: Tuple[int, ...],
                  sector: Optional[SectorLabel] = None) -> AssemblyState:
    sector = SECTOR_CYCLE[trial % len(SECTOR_CYCLE)] if sector is None else sector
    return random_states(RandomSpec(config.seed, sector, dims, count=1, start=trial))[0]


def _pointmass(config: TheoremConfig, index: int, n: int) -> AssemblyState:
    cfg = config.lattice
    profile = random_profile(cfg.sites, trial_rng(config.seed, index, STREAM_PROFILES))
    return diagonal_pointmass(profile, cfg, n)


def _metadata(config: TheoremConfig, lattice: bool = True, spin: bool = False,
              n_particles: Optional[int] = None, notes: Sequence[str] = ()) -> RunMetadata:
    return RunMetadata(
        seed=config.seed,
        rng=RNG_ALGORITHM,
        abs_tol=config.tolerance.abs_tol,
        rel_tol=config.tolerance.rel_tol,
        hbar=config.hbar,
        lattice_sites=config.lattice_sites if lattice else None,
        spin=config.spin if spin else None,
        n_particles=n_particles,
        notes=list(notes),
    )


def _require_three_sites(config: TheoremConfig, name: str) -> None:
    if config.lattice_sites < 3:
        raise ContractError(
            f"Theorem {name} needs at least 3 lattice sites; on 2 sites a uniform point mass "
            f"is annihilated by both position and momentum spreads"
        )


def _largest_dimension(name: str, config: TheoremConfig) -> int:
    """Side of the biggest assembly space a theorem script builds."""
    if name in ("5", "6"):
        return config.lattice_sites ** max(config.particle_counts)
    if name == "SMS1":
        return max(config.dimensions) ** 2
    if name == "SMS3":
        return config.spin_config.dimension ** 2
    return config.lattice_sites ** 2


def _require_capacity(name: str, config: TheoremConfig) -> None:
    total, limit = _largest_dimension(name, config), config.capacity
    if total > limit:
        raise CapacityError(f"Theorem {name} needs dimension {total}, above the maximum of {limit}")


def _finish(name: str, trials: List[TrialRecord], checks: Dict[str, bool], values: Dict[str, float],
            audits, metadata: RunMetadata) -> TheoremReport:
    checks = {key: bool(ok) for key, ok in checks.items()}
    passed = all(checks.values()) and all(trial.passed for trial in trials)
    logger.info(f"Theorem {name}: {'passed' if passed else 'FAILED'} over {len(trials)} states")
    return TheoremReport(
        theorem=name,
        passed=passed,
        trials=trials,
        checks=checks,
        values={key: float(value) for key, value in values.items()},
        audits=list(audits),
        metadata=metadata,
    )


def _verify_variance(config: TheoremConfig, name: str, kind: RelationKind) -> TheoremReport:
    """Theorems 1 and 2: R or R′ with position over random two-particle lattice states."""
    cfg = config.lattice
    spec = RelationSpec(kind, quantity=lattice_position(cfg), tol=config.tolerance)
    trials = []
    symmetric = True
    for i in range(config.trials):
        state = _random_state(config, i, (cfg.sites, cfg.sites))
        table = truth_table(spec, state)
        verdict = _verdict(table)
        witness = _lookup(table)[(1, 2)].witness
        symmetric = symmetric and _is_symmetric(table)
        logger.debug(f"Theorem {name} trial {i} ({state.sector.value}): witness {witness:.6e}")
        trials.append(TrialRecord(
            index=i, label="random", relation=kind, sector=state.sector, table=table,
            verdict=verdict, witness=witness,
            passed=verdict is Verdict.WEAKLY_DISCERNED and witness > POSITIVE_WITNESS,
        ))
    checks = {"all_weakly_discerned": all(t.passed for t in trials), "symmetric_tables": symmetric}
    values = {"min_witness": min(t.witness for t in trials)}
    return _finish(name, trials, checks, values, [physicality_audit(spec)],
                   _metadata(config, n_particles=2))


def _verify_disjunction(config: TheoremConfig, name: str, kind: RelationKind) -> TheoremReport:
    """Theorems 3 and 4: R or R′ with position, falling back to momentum."""
    _require_three_sites(config, name)
    cfg = config.lattice
    q_spec = RelationSpec(kind, quantity=lattice_position(cfg), tol=config.tolerance)
    p_spec = RelationSpec(kind, quantity=lattice_momentum(cfg), tol=config.tolerance)
    spread = {
        "Q": RelationSpec(RelationKind.RPRIME, quantity=q_spec.quantity, tol=config.tolerance),
        "P": RelationSpec(RelationKind.RPRIME, quantity=p_spec.quantity, tol=config.tolerance),
    }

    states = [("random", _random_state(config, i, (cfg.sites, cfg.sites))) for i in range(config.trials)]
    states += [("pointmass", _pointmass(config, j, 2)) for j in range(config.pointmass_trials)]

    trials = []
    pointmass_q, pointmass_p = [], []
    for index, (label, state) in enumerate(states):
        table = truth_table(q_spec, state)
        branch = "Q" if _verdict(table) is Verdict.WEAKLY_DISCERNED else None
        if branch is None:
            table = truth_table(p_spec, state)
            branch = "P" if _verdict(table) is Verdict.WEAKLY_DISCERNED else None
        if label == "pointmass":
            pointmass_q.append(_lookup(truth_table(spread["Q"], state))[(1, 2)].witness)
            pointmass_p.append(_lookup(truth_table(spread["P"], state))[(1, 2)].witness)
        verdict = _verdict(table)
        witness = _lookup(table)[(1, 2)].witness
        logger.debug(f"Theorem {name} state {index} ({label}): branch {branch}, witness {witness:.6e}")
        trials.append(TrialRecord(
            index=index, label=label, relation=kind, sector=state.sector, branch=branch, table=table,
            verdict=verdict, witness=witness, passed=branch is not None,
        ))

    checks = {"disjunction_holds": all(t.passed for t in trials)}
    values = {"min_witness": min(t.witness for t in trials)}
    if pointmass_q:
        checks["pointmass_annihilated_by_position_spread"] = max(pointmass_q) <= EXACT_ZERO
        checks["pointmass_momentum_spread_positive"] = min(pointmass_p) > MOMENTUM_SPREAD
        checks["pointmass_take_momentum_branch"] = all(
            t.branch == "P" for t in trials if t.label == "pointmass"
        )
        values["max_pointmass_position_spread"] = max(pointmass_q)
        values["min_pointmass_momentum_spread"] = min(pointmass_p)
    return _finish(name, trials, checks, values, [physicality_audit(q_spec), physicality_audit(p_spec)],
                   _metadata(config, n_particles=2))


def _pair_spread(values: np.ndarray, state: AssemblyState, x: int, y: int) -> float:
    """(1/n²)⟨(A⁽ˣ⁾ − A⁽ʸ⁾)²⟩ for A diagonal with entries ``values``."""
    n = state.n_factors
    grid = np.indices(state.dims).reshape(n, -1)
    gaps = (values[grid[x - 1]] - values[grid[y - 1]]) ** 2
    total = sum(weight * float(np.sum(np.abs(vec) ** 2 * gaps)) for weight, vec in state.components)
    return total / n**2


def _witness_identity(cfg: LatticeConfig, state: AssemblyState, table: Table, momentum: bool) -> bool:
    if momentum:
        values, state = lattice_momenta(cfg), fourier_transform_state(state, cfg)
    else:
        values = lattice_coordinates(cfg)
    return all(
        abs(entry.witness - _pair_spread(values, state, entry.x, entry.y)) <= IDENTITY_ATOL
        for entry in table if entry.x != entry.y
    )


def _verify_assembly_variance(config: TheoremConfig, name: str, momentum_fallback: bool) -> TheoremReport:
    """Theorems 5 and 6: D′ (and D′ with momentum) over n-particle assemblies."""
    if momentum_fallback:
        _require_three_sites(config, name)
    cfg = config.lattice
    tol = config.tolerance
    trials, audits = [], []
    identity_ok, n2_agrees = True, True
    pointmass_dprime_false, pointmass_dprime_p_true = True, True
    index = 0

    for n in config.particle_counts:
        dims = (cfg.sites,) * n
        q_spec = RelationSpec(RelationKind.DPRIME, lattice=cfg, n_particles=n, tol=tol)
        p_spec = RelationSpec(RelationKind.DPRIME_P, lattice=cfg, n_particles=n, tol=tol)
        r_spec = RelationSpec(RelationKind.RPRIME, quantity=lattice_position(cfg), tol=tol) if n == 2 else None
        audits.append(physicality_audit(q_spec))
        if momentum_fallback:
            audits.append(physicality_audit(p_spec))

        states = [(f"random n={n}", _random_state(config, i, dims)) for i in range(config.trials)]
        if momentum_fallback:
            states += [(f"pointmass n={n}", _pointmass(config, j, n)) for j in range(config.pointmass_trials)]

        for label, state in states:
            table = truth_table(q_spec, state)
            identity_ok = identity_ok and _witness_identity(cfg, state, table, momentum=False)
            if r_spec is not None:
                r_table = truth_table(r_spec, state)
                n2_agrees = n2_agrees and [e.holds for e in table] == [e.holds for e in r_table]

            branch = "Q" if _diagonal_pattern(table, diagonal=False) else None
            if label.startswith("pointmass"):
                pointmass_dprime_false = pointmass_dprime_false and not any(e.holds for e in table)
            if branch is None and momentum_fallback:
                table = truth_table(p_spec, state)
                identity_ok = identity_ok and _witness_identity(cfg, state, table, momentum=True)
                branch = "P" if _diagonal_pattern(table, diagonal=False) else None
                if label.startswith("pointmass"):
                    pointmass_dprime_p_true = pointmass_dprime_p_true and branch == "P"

            diagonal_zero = all(abs(e.witness) <= EXACT_ZERO for e in table if e.x == e.y)
            verdict = _verdict(table)
            witness = _off_diagonal_min(table)
            logger.debug(f"Theorem {name} state {index} ({label}): branch {branch}, witness {witness:.6e}")
            relation = RelationKind.DPRIME_P if branch == "P" else RelationKind.DPRIME
            trials.append(TrialRecord(
                index=index, label=label, relation=relation, sector=state.sector, branch=branch, table=table,
                verdict=verdict, witness=witness,
                passed=branch is not None and diagonal_zero and verdict is Verdict.WEAKLY_DISCERNED,
            ))
            index += 1

    checks = {"all_pairs_discerned": all(t.passed for t in trials), "witness_identity": identity_ok}
    if 2 in config.particle_counts:
        checks["two_particles_match_rprime"] = n2_agrees
    if momentum_fallback and config.pointmass_trials:
        checks["pointmass_fail_position"] = pointmass_dprime_false
        checks["pointmass_pass_momentum"] = pointmass_dprime_p_true
    values = {"min_witness": min(t.witness for t in trials)}
    return _finish(name, trials, checks, values, audits, _metadata(config))


def _verify_fermions(config: TheoremConfig) -> TheoremReport:
    """Rt with t = −2 on antisymmetric two-particle states, over several dimensions."""
    tol = config.tolerance
    trials, audits = [], []
    diagonal_ok = True
    index = 0
    for d in config.dimensions:
        family = random_projector_family(d, trial_rng(config.seed, d, STREAM_FAMILIES))
        spec = RelationSpec(RelationKind.RT, family=family, t=-2.0, tol=tol)
        audits.append(physicality_audit(spec))
        for i in range(config.trials):
            state = _random_state(config, i, (d, d), SectorLabel.ANTISYMMETRIC)
            table = truth_table(spec, state)
            diagonal_ok = diagonal_ok and eval_relation_Rt(family, 2.0 * (d - 1), state, 1, 1, tol).holds
            verdict = _verdict(table)
            trials.append(TrialRecord(
                index=index, label=f"d={d}", relation=RelationKind.RT, sector=state.sector, table=table,
                verdict=verdict, witness=_lookup(table)[(1, 2)].witness,
                passed=verdict is Verdict.WEAKLY_DISCERNED and _diagonal_pattern(table, diagonal=False),
            ))
            index += 1

    checks = {
        "all_weakly_discerned": all(t.passed for t in trials),
        "diagonal_eigenvalue": diagonal_ok,
        "audit_unphysical_and_trivial": all(
            a.overall is AuditVerdict.UNPHYSICAL and a.trivial for a in audits
        ),
    }
    values = {"t": -2.0, "max_residual": max(t.witness for t in trials)}
    return _finish("SMS1", trials, checks, values, audits, _metadata(config, lattice=False, n_particles=2))


def _verify_commutator(config: TheoremConfig) -> TheoremReport:
    """Lattice analogue of the position/momentum commutator relation."""
    cfg = config.lattice
    spec = RelationSpec(RelationKind.C, lattice=cfg, threshold=config.c_threshold * cfg.hbar, tol=config.tolerance)
    audit = physicality_audit(spec)
    trials = []
    for i in range(config.trials):
        state = _random_state(config, i, (cfg.sites, cfg.sites), SectorLabel.FULL)
        table = truth_table(spec, state)
        verdict = _verdict(table)
        cross = _lookup(table)[(1, 2)].witness
        trials.append(TrialRecord(
            index=i, label="random", relation=RelationKind.C, sector=state.sector, table=table,
            verdict=verdict, witness=cross,
            passed=verdict is Verdict.WEAKLY_DISCERNED and _diagonal_pattern(table, diagonal=True)
            and cross <= EXACT_ZERO,
        ))
    checks = {
        "all_weakly_discerned": all(t.passed for t in trials),
        "audit_unphysical": audit.overall is AuditVerdict.UNPHYSICAL,
    }
    values = {
        "max_cross_witness": max(t.witness for t in trials),
        "min_same_particle_witness": min(_lookup(t.table)[(1, 1)].witness for t in trials),
    }
    return _finish("SMS2", trials, checks, values, [audit],
                   _metadata(config, n_particles=2, notes=[LATTICE_NOTE]))


def _verify_spin(config: TheoremConfig) -> TheoremReport:
    """T and T′ tables for two spin-s particles, plus the total-spin bound."""
    cfg = config.spin_config
    tol = config.tolerance
    t_spec = RelationSpec(RelationKind.T, spin=cfg, tol=tol)
    tp_spec = RelationSpec(RelationKind.TPRIME, spin=cfg, tol=tol)
    dims = (cfg.dimension, cfg.dimension)
    target = 4 * cfg.casimir

    spectrum = scipy.linalg.eigvalsh(total_spin_squared(cfg, 1, 2).matrix)
    bound = 2 * cfg.s * (2 * cfg.s + 1) * cfg.hbar**2
    top = float(spectrum[-1])
    top_multiplicity = int(np.sum(np.abs(spectrum - top) <= SPECTRUM_ATOL))
    zero_multiplicity = int(np.sum(np.abs(spectrum) <= SPECTRUM_ATOL))

    trials = []
    operator_table = None
    state_form_agrees = True
    for i in range(config.trials):
        state = _random_state(config, i, dims)
        if operator_table is None:
            operator_table = truth_table(t_spec, state)
        table = truth_table(tp_spec, state)
        state_form = [eval_relation_T_state(cfg, state, e.x, e.y, tol).holds for e in operator_table]
        state_form_agrees = state_form_agrees and state_form == [e.holds for e in operator_table]
        verdict = _verdict(table)
        trials.append(TrialRecord(
            index=i, label="random", relation=RelationKind.TPRIME, sector=state.sector, table=table, verdict=verdict,
            witness=_lookup(table)[(1, 2)].witness,
            passed=verdict is Verdict.WEAKLY_DISCERNED and _diagonal_pattern(table, diagonal=True),
        ))

    checks = {
        "operator_table_dual_polarity": _diagonal_pattern(operator_table, diagonal=True)
        and _verdict(operator_table) is Verdict.WEAKLY_DISCERNED,
        "bound_attained": abs(top - bound) <= SPECTRUM_ATOL,
        "bound_below_diagonal": top < target - SPECTRUM_ATOL,
        "spectrum_extremes": zero_multiplicity == 1 and top_multiplicity == int(round(4 * cfg.s)) + 1,
        "state_form_agrees": state_form_agrees,
    }
    audits = [physicality_audit(t_spec), physicality_audit(tp_spec)]
    checks["audits_physical"] = all(a.overall is AuditVerdict.PHYSICAL for a in audits)
    values = {"diagonal_value": target, "max_eigenvalue": top, "bound": bound, "min_eigenvalue": float(spectrum[0])}
    return _finish("SMS3", trials, checks, values, audits,
                   _metadata(config, lattice=False, spin=True, n_particles=2))


_SCRIPTS: Dict[str, Callable[[TheoremConfig], TheoremReport]] = {
    "1": lambda c: _verify_variance(c, "1", RelationKind.R),
    "2": lambda c: _verify_variance(c, "2", RelationKind.RPRIME),
    "3": lambda c: _verify_disjunction(c, "3", RelationKind.R),
    "4": lambda c: _verify_disjunction(c, "4", RelationKind.RPRIME),
    "5": lambda c: _verify_assembly_variance(c, "5", momentum_fallback=False),
    "6": lambda c: _verify_assembly_variance(c, "6", momentum_fallback=True),
    "SMS1": _verify_fermions,
    "SMS2": _verify_commutator,
    "SMS3": _verify_spin,
}


def verify_theorem(theorem_id: Union[int, str], config: Optional[TheoremConfig] = None) -> TheoremReport:
    """
    Run the scripted check of one theorem.

    Args:
        theorem_id: ``1``-``6`` or ``SMS1``-``SMS3``.
        config: Lattice size, spin, particle counts, trial count and seed.

    Returns:
        TheoremReport with per-state records; ``passed`` is True only if
        every record and every named check passed.

    Raises:
        UnknownTheoremError: For an unknown id.
        ContractError: If the configuration cannot support the theorem.
    """
    name = normalize_theorem_id(theorem_id)
    config = config or TheoremConfig()
    _require_capacity(name, config)
    logger.info(f"Verifying theorem {name} with {config.trials} trials, seed {config.seed}")
    return _SCRIPTS[name](config)
