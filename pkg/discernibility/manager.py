#!/usr/bin/env python3
"""
High-level manager for discernibility runs.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from .config import LatticeConfig, RunConfig, Settings, SpinConfig, TheoremConfig
from .discernment import RelationSpec, classify, discern, physicality_audit, truth_table
from .exceptions import ContractError
from .hilbert import AssemblyState, Operator, check_capacity
from .models import (
    DiscernmentReport,
    PhysicalityAudit,
    RelationKind,
    RunMetadata,
    SampleReport,
    SampleRow,
    SampleSummary,
    TheoremReport,
)
from .observables import lattice_momentum, lattice_position, projector_family_from_basis, spin_operators
from .states import RNG_ALGORITHM, RandomSpec, load_state, random_states
from .theorems import verify_theorem

LATTICE_QUANTITIES = ("Q", "P")
SPIN_QUANTITIES = ("Sx", "Sy", "Sz")
DEFAULT_T = -2.0


class DiscernmentManager:
    """
    High-level manager for discernibility runs.

    This class turns command-level configuration into relation specs,
    states and theorem configurations, with defaults taken from the
    ``DISCERN_*`` environment variables.
    """

    def __init__(self, settings: Settings = None):
        """
        Initialize the discernment manager.

        Args:
            settings: Process-wide defaults (defaults to ``Settings.from_env()``)
        """
        self.settings = settings or Settings.from_env()
        self.logger = logging.getLogger(self.__class__.__name__)

    def run_config(self, command: str, **overrides) -> RunConfig:
        """
        Create a run configuration with environment defaults.

        Args:
            command: One of verify, discern, audit, sample
            **overrides: RunConfig fields to override

        Returns:
            Validated RunConfig
        """
        params = {
            'command': command,
            'lattice': LatticeConfig(self.settings.lattice_sites, hbar=self.settings.hbar),
            'spin': SpinConfig(0.5, hbar=self.settings.hbar),
            'seed': self.settings.seed,
            'tolerance': self.settings.tolerance,
        }
        params.update(overrides)
        return RunConfig(**params)

    def quantity(self, name: Optional[str], lattice: LatticeConfig, spin: SpinConfig) -> Operator:
        """
        Resolve a single-particle quantity by name.

        Args:
            name: ``Q`` or ``P`` (lattice position, momentum) or ``Sx``/``Sy``/``Sz``
            lattice: Lattice used for Q and P
            spin: Spin used for the spin components

        Returns:
            The hermitian single-particle operator
        """
        name = name or "Q"
        if name == "Q":
            return lattice_position(lattice)
        if name == "P":
            return lattice_momentum(lattice)
        if name in SPIN_QUANTITIES:
            components = spin_operators(spin)
            return getattr(components, name[1].lower())
        raise ContractError(
            f"Unknown quantity '{name}'; expected one of {', '.join(LATTICE_QUANTITIES + SPIN_QUANTITIES)}"
        )

    def relation_spec(self, cfg: RunConfig, state: Optional[AssemblyState] = None) -> RelationSpec:
        """
        Build the relation spec a run asks for.

        Rt uses the computational-basis projector family on C^d, with d from
        ``cfg.dimension``, else the state's factor dimension, else 2.
        """
        try:
            kind = RelationKind(cfg.relation)
        except ValueError as e:
            raise ContractError(f"Unknown relation '{cfg.relation}'") from e
        tol = cfg.tolerance
        if kind is RelationKind.RT:
            d = cfg.dimension or (state.dims[0] if state is not None else 2)
            family = projector_family_from_basis(np.eye(d))
            t = DEFAULT_T if cfg.t is None else cfg.t
            return RelationSpec(kind, family=family, t=t, tol=tol, sector=cfg.sector)
        if kind is RelationKind.C:
            return RelationSpec(kind, lattice=cfg.lattice, threshold=cfg.threshold, tol=tol, sector=cfg.sector)
        if kind in (RelationKind.T, RelationKind.TPRIME):
            return RelationSpec(kind, spin=cfg.spin, tol=tol, sector=cfg.sector)
        if kind in (RelationKind.R, RelationKind.RPRIME):
            a = self.quantity(cfg.quantity, cfg.lattice, cfg.spin)
            return RelationSpec(kind, quantity=a, tol=tol, sector=cfg.sector)
        n = state.n_factors if state is not None else cfg.n_particles
        name = cfg.quantity or "Q"
        if name not in LATTICE_QUANTITIES:
            raise ContractError(f"{kind.value} takes the lattice quantity Q or P, not '{name}'")
        return RelationSpec(kind, lattice=cfg.lattice, n_particles=n, quantity_name=name, tol=tol,
                            sector=cfg.sector)

    def theorem_config(self, cfg: RunConfig) -> TheoremConfig:
        """Translate a verify run into the theorem script's configuration."""
        params = {
            'lattice_sites': cfg.lattice.sites,
            'spacing': cfg.lattice.spacing,
            'hbar': cfg.lattice.hbar,
            'spin': cfg.spin.s,
            'trials': cfg.trials,
            'seed': cfg.seed,
            'tolerance': cfg.tolerance,
            'max_dimension': self.settings.max_dimension,
        }
        if cfg.threshold is not None:
            params['c_threshold'] = cfg.threshold
        if cfg.n_particles > 2:
            params['particle_counts'] = tuple(range(2, cfg.n_particles + 1))
        return TheoremConfig(**params)

    def verify(self, cfg: RunConfig) -> TheoremReport:
        self.logger.info(f"Running verify for theorem {cfg.theorem}")
        return verify_theorem(cfg.theorem, self.theorem_config(cfg))

    def discern(self, cfg: RunConfig) -> DiscernmentReport:
        """
        Evaluate a relation on a state file.

        Returns:
            DiscernmentReport with truth table, verdict, witnesses and audit
        """
        state = load_state(cfg.state_path)
        check_capacity(state.dimension, self.settings.max_dimension)
        spec = self.relation_spec(cfg, state)
        report = discern(spec, state)
        self.logger.info(f"{spec.kind.value} on {cfg.state_path}: {report.verdict.value}")
        return report

    def audit(self, cfg: RunConfig) -> PhysicalityAudit:
        spec = self.relation_spec(cfg)
        check_capacity(int(np.prod(self.sample_dims(cfg, spec))), self.settings.max_dimension)
        audit = physicality_audit(spec)
        self.logger.info(f"Audit of {spec.kind.value}: {audit.overall.value}")
        return audit

    def sample_dims(self, cfg: RunConfig, spec: RelationSpec) -> Tuple[int, ...]:
        """Factor dimensions of the random states a relation is sampled on."""
        if spec.kind is RelationKind.RT:
            return (spec.family.d,) * 2
        if spec.kind in (RelationKind.T, RelationKind.TPRIME):
            return (spec.spin.dimension,) * 2
        if spec.kind in (RelationKind.R, RelationKind.RPRIME):
            return (spec.quantity.side,) * 2
        if spec.kind is RelationKind.C:
            return (cfg.lattice.sites,) * 2
        return (cfg.lattice.sites,) * spec.n_particles

    def sample(self, cfg: RunConfig) -> SampleReport:
        """
        Evaluate a relation over seeded random states.

        One row per trial and unordered pair of distinct particles; the
        verdict of a row is the verdict of that trial's full truth table.

        Returns:
            SampleReport with per-trial witnesses and a min/mean/max summary
        """
        spec = self.relation_spec(cfg)
        dims = self.sample_dims(cfg, spec)
        check_capacity(int(np.prod(dims)), self.settings.max_dimension)
        self.logger.info(f"Sampling {spec.kind.value} over {cfg.trials} {cfg.sector.value} states with dims {dims}")

        rows = []
        for trial in range(cfg.trials):
            state = random_states(RandomSpec(cfg.seed, cfg.sector, dims, count=1, start=trial))[0]
            table = truth_table(spec, state)
            verdict = classify({(e.x, e.y): e.holds for e in table})
            rows.extend(
                SampleRow(trial=trial, pair_x=e.x, pair_y=e.y, relation=spec.kind, witness=e.witness, verdict=verdict)
                for e in table if e.x < e.y
            )

        witnesses = [row.witness for row in rows]
        summary = SampleSummary(
            count=len(witnesses), min=min(witnesses), mean=float(np.mean(witnesses)), max=max(witnesses)
        )
        metadata = RunMetadata(
            seed=cfg.seed,
            rng=RNG_ALGORITHM,
            abs_tol=cfg.tolerance.abs_tol,
            rel_tol=cfg.tolerance.rel_tol,
            hbar=cfg.lattice.hbar,
            lattice_sites=cfg.lattice.sites,
            spin=cfg.spin.s,
            n_particles=len(dims),
        )
        return SampleReport(relation=spec.kind, rows=rows, summary=summary, metadata=metadata)
