#!/usr/bin/env python3
"""
Constructors, random sampling and file serialization for assembly states.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError, model_validator

from .config import MAX_SEED, LatticeConfig
from .exceptions import (
    ContractError,
    EmptySectorError,
    InvalidConfigurationError,
    ShapeError,
    StateParseError,
    StateValidationError,
)
from .hilbert import MIXED, PURE, AssemblyState
from .models import SectorLabel
from .observables import dft_matrix
from .symmetry import project_vector

logger = logging.getLogger(__name__)

RNG_ALGORITHM = "PCG64/SeedSequence"
STATE_FORMAT = "discernibility-state/1"
ORDERING = "row-major-last-factor-fastest"
EMPTY_SECTOR_ATOL = 1e-12
NORMALIZATION_ATOL = 1e-10

# Independent random streams drawn from one seed.
STREAM_STATES = 0
STREAM_PROFILES = 1
STREAM_FAMILIES = 2


def trial_rng(seed: int, trial: int, stream: int = STREAM_STATES, attempt: int = 0) -> np.random.Generator:
    """Generator for one trial; depends only on (seed, stream, trial, attempt)."""
    sequence = np.random.SeedSequence(seed, spawn_key=(stream, trial, attempt))
    return np.random.Generator(np.random.PCG64(sequence))


def singlet() -> AssemblyState:
    """(|01⟩ − |10⟩)/√2."""
    vec = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    return AssemblyState.pure(vec, (2, 2), SectorLabel.ANTISYMMETRIC)


def basis_state(indices: Sequence[int], dims: Sequence[int],
                sector: SectorLabel = SectorLabel.FULL) -> AssemblyState:
    """Computational basis product |i₁ i₂ … iₙ⟩."""
    if len(indices) != len(dims):
        raise ShapeError("Need one index per factor")
    vec = np.zeros(int(np.prod(dims)), dtype=complex)
    vec[np.ravel_multi_index(tuple(indices), tuple(dims))] = 1.0
    return AssemblyState.pure(vec, dims, sector)


def product_state(factors: Sequence[Sequence[complex]], sector: SectorLabel = SectorLabel.FULL) -> AssemblyState:
    """Product of normalized single-particle vectors."""
    vectors = [np.asarray(v, dtype=complex) for v in factors]
    vec = vectors[0]
    for v in vectors[1:]:
        vec = np.kron(vec, v)
    return AssemblyState.pure(vec, tuple(len(v) for v in vectors), sector)


def correlated_boson_state(coeffs: Sequence[complex], basis: Sequence[Sequence[complex]]) -> AssemblyState:
    """
    Σ_k c_k |φ_k⟩⊗|φ_k⟩, a symmetric state without anti-correlations in the φ basis.

    Raises:
        ContractError: If Σ|c_k|² ≠ 1 or the φ_k are not orthonormal.
    """
    c = np.asarray(coeffs, dtype=complex)
    phi = np.asarray(basis, dtype=complex)
    if phi.ndim != 2 or len(c) != phi.shape[0]:
        raise ContractError("Need one basis vector per coefficient")
    if abs(np.sum(np.abs(c) ** 2) - 1.0) > NORMALIZATION_ATOL:
        raise ContractError("Coefficients must satisfy Σ|c_k|² = 1")
    if not np.allclose(phi.conj() @ phi.T, np.eye(len(phi)), rtol=0, atol=NORMALIZATION_ATOL):
        raise ContractError("Basis vectors must be orthonormal")
    vec = sum(ck * np.kron(p, p) for ck, p in zip(c, phi))
    vec = vec / np.linalg.norm(vec)
    d = phi.shape[1]
    return AssemblyState.pure(vec, (d, d), SectorLabel.SYMMETRIC)


def diagonal_pointmass(f: Sequence[complex], cfg: LatticeConfig, n: int) -> AssemblyState:
    """
    Lattice state supported only where all n coordinates coincide.

    Amplitude f(x) sits on the basis point |x x … x⟩; such states are
    symmetric and cannot be fermions.
    """
    profile = np.asarray(f, dtype=complex)
    if profile.shape != (cfg.sites,):
        raise ContractError(f"Profile needs {cfg.sites} amplitudes, got {profile.shape}")
    if abs(np.sum(np.abs(profile) ** 2) - 1.0) > NORMALIZATION_ATOL:
        raise ContractError("Profile must satisfy Σ|f(x)|² = 1")
    if n < 1:
        raise ContractError("Need at least one particle")
    dims = (cfg.sites,) * n
    vec = np.zeros(cfg.sites**n, dtype=complex)
    stride = sum(cfg.sites**k for k in range(n))
    vec[np.arange(cfg.sites) * stride] = profile
    vec = vec / np.linalg.norm(vec)
    return AssemblyState.pure(vec, dims, SectorLabel.SYMMETRIC)


def random_profile(sites: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized complex-Gaussian site profile for point-mass states."""
    f = rng.standard_normal(sites) + 1j * rng.standard_normal(sites)
    return f / np.linalg.norm(f)


def fourier_transform_state(state: AssemblyState, cfg: LatticeConfig) -> AssemblyState:
    """Apply the unitary DFT to every lattice factor (change to the momentum basis)."""
    if any(d != cfg.sites for d in state.dims):
        raise ShapeError(f"State dims {state.dims} are not {cfg.sites}-site lattice factors")
    f = dft_matrix(cfg.sites)
    components = []
    for weight, vec in state.components:
        tensor = vec.reshape(state.dims)
        for axis in range(state.n_factors):
            tensor = np.moveaxis(np.tensordot(f, tensor, axes=([1], [axis])), 0, axis)
        transformed = tensor.reshape(-1)
        components.append((weight, transformed / np.linalg.norm(transformed)))
    return AssemblyState(state.kind, tuple(components), state.dims, state.sector)


@dataclass(frozen=True)
class RandomSpec:
    """Seeded request for random pure states; trial i uses sub-seed (seed, i)."""

    seed: int
    sector: SectorLabel
    dims: Tuple[int, ...]
    count: int = field(default=1)
    start: int = field(default=0)
    max_retries: int = field(default=8)

    def __post_init__(self):
        if self.count < 1:
            raise InvalidConfigurationError("count must be at least 1")
        if not 0 <= self.seed <= MAX_SEED:
            raise InvalidConfigurationError("Seed must be a 64-bit unsigned integer")
        if self.start < 0 or self.max_retries < 0:
            raise InvalidConfigurationError("start and max_retries must be non-negative")


def random_states(spec: RandomSpec) -> List[AssemblyState]:
    """
    Haar-like random pure states projected to a sector.

    Each trial draws complex standard-normal amplitudes, projects them and
    renormalizes; an empty projection is redrawn with a fresh sub-seed.

    Raises:
        EmptySectorError: If a trial stays empty after ``max_retries`` redraws.
    """
    dims = tuple(spec.dims)
    sector = SectorLabel(spec.sector)
    total = int(np.prod(dims))
    states = []
    for trial in range(spec.start, spec.start + spec.count):
        for attempt in range(spec.max_retries + 1):
            rng = trial_rng(spec.seed, trial, STREAM_STATES, attempt)
            raw = rng.standard_normal(total) + 1j * rng.standard_normal(total)
            projected = project_vector(raw, dims, sector)
            norm = float(np.linalg.norm(projected))
            if norm >= EMPTY_SECTOR_ATOL:
                states.append(AssemblyState.pure(projected / norm, dims, sector))
                break
            logger.warning(f"Trial {trial}: empty {sector.value} projection, redrawing (attempt {attempt + 1})")
        else:
            raise EmptySectorError(
                f"No {sector.value} state for dims {dims} after {spec.max_retries} redraws"
            )
    return states


class AmplitudeComponent(BaseModel):
    model_config = ConfigDict(extra="forbid")

    weight: float
    amplitudes: List[Tuple[float, float]]


class StateFile(BaseModel):
    """On-disk state: explicit (re, im) pairs, last tensor factor fastest."""

    model_config = ConfigDict(extra="forbid")

    format: Literal["discernibility-state/1"] = STATE_FORMAT
    ordering: Literal["row-major-last-factor-fastest"] = ORDERING
    dims: List[PositiveInt] = Field(min_length=1)
    sector: SectorLabel = SectorLabel.FULL
    kind: Literal["pure", "mixed"]
    amplitudes: Optional[List[Tuple[float, float]]] = None
    components: Optional[List[AmplitudeComponent]] = None

    @model_validator(mode="after")
    def _check_layout(self) -> "StateFile":
        expected = int(np.prod(self.dims))
        if self.kind == PURE:
            if self.amplitudes is None or self.components is not None:
                raise ValueError("pure states carry 'amplitudes' and no 'components'")
            if len(self.amplitudes) != expected:
                raise ValueError(f"dims {self.dims} need {expected} amplitudes, got {len(self.amplitudes)}")
        else:
            if not self.components or self.amplitudes is not None:
                raise ValueError("mixed states carry non-empty 'components' and no 'amplitudes'")
            for i, component in enumerate(self.components):
                if len(component.amplitudes) != expected:
                    raise ValueError(
                        f"component {i}: dims {self.dims} need {expected} amplitudes, "
                        f"got {len(component.amplitudes)}"
                    )
        return self


def _pairs(vec: np.ndarray) -> List[Tuple[float, float]]:
    return [(float(z.real), float(z.imag)) for z in vec]


def _vector(pairs: List[Tuple[float, float]]) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def to_state_file(state: AssemblyState) -> StateFile:
    if state.is_pure:
        return StateFile(dims=list(state.dims), sector=state.sector, kind=PURE, amplitudes=_pairs(state.vector))
    components = [AmplitudeComponent(weight=w, amplitudes=_pairs(v)) for w, v in state.components]
    return StateFile(dims=list(state.dims), sector=state.sector, kind=MIXED, components=components)


def from_state_file(model: StateFile) -> AssemblyState:
    if model.kind == PURE:
        return AssemblyState.pure(_vector(model.amplitudes), model.dims, model.sector)
    pairs = [(c.weight, _vector(c.amplitudes)) for c in model.components]
    return AssemblyState.mixed(pairs, model.dims, model.sector)


def save_state(state: AssemblyState, path: Union[str, Path]) -> None:
    path = Path(path)
    path.write_text(to_state_file(state).model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"Saved {state.kind} state with dims {state.dims} to {path}")


def load_state(path: Union[str, Path]) -> AssemblyState:
    """
    Load and validate a state file.

    Raises:
        StateParseError: For unreadable or malformed files, with line or field diagnostics.
        StateValidationError: If the amplitudes violate a state invariant.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise StateParseError(f"Cannot read state file {path}: {e}") from e
    except UnicodeDecodeError as e:
        logger.error(f"State file {path} is not UTF-8 text")
        raise StateParseError(f"{path}: not UTF-8 text (byte {e.start}): {e.reason}") from e

    try:
        model = StateFile.model_validate_json(text)
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or '<file>'}: {err['msg']}" for err in e.errors()
        )
        logger.error(f"Malformed state file {path}: {details}")
        raise StateParseError(f"{path}: {details}") from e

    try:
        state = from_state_file(model)
    except (ContractError, ShapeError) as e:
        logger.error(f"State file {path} violates an invariant: {e}")
        raise StateValidationError(f"{path}: invariant violated: {e}") from e
    logger.info(f"Loaded {state.kind} state with dims {state.dims} from {path}")
    return state
