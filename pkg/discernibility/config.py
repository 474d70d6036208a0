#!/usr/bin/env python3
"""
Configuration for the discernibility toolkit.

All configuration objects are frozen dataclasses validated on construction.
Environment defaults (loaded from ``.env`` by the package) are collected by
:meth:`Settings.from_env`.
"""

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from .exceptions import InvalidConfigurationError
from .models import SectorLabel

MAX_SEED = 2**64 - 1


def _require_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise InvalidConfigurationError(f"{name} must be finite and positive, got {value}")


@dataclass(frozen=True)
class Tolerance:
    """Absolute and relative tolerances for numeric comparisons."""

    abs_tol: float = field(default=1e-10)
    rel_tol: float = field(default=1e-10)

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InvalidConfigurationError(f"{name} must be finite and non-negative, got {value}")

    def bound(self, scale: float = 0.0) -> float:
        """Admissible deviation for a quantity of magnitude ``scale``."""
        return self.abs_tol + self.rel_tol * abs(scale)


@dataclass(frozen=True)
class LatticeConfig:
    """Periodic one-dimensional lattice on which Q and P are defined."""

    sites: int
    spacing: float = field(default=1.0)
    hbar: float = field(default=1.0)
    centered: bool = field(default=True)

    def __post_init__(self):
        if self.sites < 2:
            raise InvalidConfigurationError(f"Lattice needs at least 2 sites, got {self.sites}")
        _require_positive("Lattice spacing", self.spacing)
        _require_positive("hbar", self.hbar)


@dataclass(frozen=True)
class SpinConfig:
    """Single-particle spin ``s`` (integer or half-integer)."""

    s: float
    hbar: float = field(default=1.0)

    def __post_init__(self):
        if not math.isfinite(self.s):
            raise InvalidConfigurationError(f"Spin must be finite, got s={self.s}")
        twice = 2 * self.s
        if self.s < 0 or abs(twice - round(twice)) > 1e-12:
            raise InvalidConfigurationError(f"2s must be a non-negative integer, got s={self.s}")
        _require_positive("hbar", self.hbar)

    @property
    def dimension(self) -> int:
        return int(round(2 * self.s)) + 1

    @property
    def casimir(self) -> float:
        """s(s+1)ħ²."""
        return self.s * (self.s + 1) * self.hbar**2


@dataclass(frozen=True)
class Settings:
    """Process-wide defaults, usually taken from the environment."""

    hbar: float = field(default=1.0)
    max_dimension: int = field(default=4096)
    abs_tol: float = field(default=1e-10)
    rel_tol: float = field(default=1e-10)
    lattice_sites: int = field(default=8)
    seed: int = field(default=7)

    def __post_init__(self):
        _require_positive("hbar", self.hbar)
        if self.max_dimension < 1:
            raise InvalidConfigurationError("Maximum dimension must be positive")
        if not 0 <= self.seed <= MAX_SEED:
            raise InvalidConfigurationError("Seed must be a 64-bit unsigned integer")

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(self.abs_tol, self.rel_tol)

    @classmethod
    def from_env(cls) -> "Settings":
        """Build settings from ``DISCERN_*`` environment variables."""
        try:
            return cls(
                hbar=float(os.getenv("DISCERN_HBAR", 1.0)),
                max_dimension=int(os.getenv("DISCERN_MAX_DIMENSION", 4096)),
                abs_tol=float(os.getenv("DISCERN_ABS_TOL", 1e-10)),
                rel_tol=float(os.getenv("DISCERN_REL_TOL", 1e-10)),
                lattice_sites=int(os.getenv("DISCERN_LATTICE_SITES", 8)),
                seed=int(os.getenv("DISCERN_SEED", 7)),
            )
        except ValueError as e:
            raise InvalidConfigurationError(f"Invalid DISCERN_* environment value: {e}") from e


def max_dimension() -> int:
    """Capacity bound for dense operators, from ``DISCERN_MAX_DIMENSION``."""
    raw = os.getenv("DISCERN_MAX_DIMENSION", "4096")
    try:
        limit = int(raw)
    except ValueError as e:
        raise InvalidConfigurationError(f"Invalid DISCERN_MAX_DIMENSION: {raw!r}") from e
    if limit < 1:
        raise InvalidConfigurationError("Maximum dimension must be positive")
    return limit


@dataclass(frozen=True)
class TheoremConfig:
    """Parameters for the scripted theorem checks."""

    lattice_sites: int = field(default=8)
    spacing: float = field(default=1.0)
    hbar: float = field(default=1.0)
    spin: float = field(default=0.5)
    particle_counts: Tuple[int, ...] = field(default=(2, 3))
    dimensions: Tuple[int, ...] = field(default=(2, 3, 4, 5))
    trials: int = field(default=100)
    pointmass_trials: int = field(default=10)
    seed: int = field(default=7)
    c_threshold: float = field(default=1e-6)
    tolerance: Tolerance = field(default_factory=Tolerance)
    max_dimension: Optional[int] = None

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidConfigurationError("trials must be at least 1")
        if self.pointmass_trials < 0:
            raise InvalidConfigurationError("pointmass_trials must be non-negative")
        if not 0 <= self.seed <= MAX_SEED:
            raise InvalidConfigurationError("Seed must be a 64-bit unsigned integer")
        if any(n < 2 for n in self.particle_counts):
            raise InvalidConfigurationError("particle counts must be at least 2")
        if any(d < 2 for d in self.dimensions):
            raise InvalidConfigurationError("SMS1 dimensions must be at least 2")
        _require_positive("C threshold", self.c_threshold)
        if self.max_dimension is not None and self.max_dimension < 1:
            raise InvalidConfigurationError("Maximum dimension must be positive")

    @property
    def capacity(self) -> int:
        """The explicit bound, else the environment one."""
        return max_dimension() if self.max_dimension is None else self.max_dimension

    @property
    def lattice(self) -> LatticeConfig:
        return LatticeConfig(self.lattice_sites, spacing=self.spacing, hbar=self.hbar)

    @property
    def spin_config(self) -> SpinConfig:
        return SpinConfig(self.spin, hbar=self.hbar)


COMMANDS = ("verify", "discern", "audit", "sample")
OUTPUT_FORMATS = ("text", "json", "csv")


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved command-line invocation."""

    command: str
    theorem: Optional[str] = None
    relation: Optional[str] = None
    quantity: Optional[str] = None
    t: Optional[float] = None
    threshold: Optional[float] = None
    state_path: Optional[Path] = None
    lattice: LatticeConfig = field(default_factory=lambda: LatticeConfig(8))
    spin: SpinConfig = field(default_factory=lambda: SpinConfig(0.5))
    n_particles: int = field(default=2)
    dimension: Optional[int] = None
    sector: SectorLabel = field(default=SectorLabel.FULL)
    trials: int = field(default=100)
    seed: int = field(default=7)
    tolerance: Tolerance = field(default_factory=Tolerance)
    output_format: str = field(default="text")
    output_path: Optional[Path] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidConfigurationError(f"Unknown command: {self.command}")
        if self.output_format not in OUTPUT_FORMATS:
            raise InvalidConfigurationError(f"Output format must be one of {OUTPUT_FORMATS}")
        if self.command == "verify" and not self.theorem:
            raise InvalidConfigurationError("verify requires --theorem")
        if self.command in ("discern", "audit", "sample") and not self.relation:
            raise InvalidConfigurationError(f"{self.command} requires --relation")
        if self.command == "discern" and self.state_path is None:
            raise InvalidConfigurationError("discern requires --state")
        if self.command in ("verify", "sample") and self.trials < 1:
            raise InvalidConfigurationError("trials must be at least 1")
        if self.n_particles < 1:
            raise InvalidConfigurationError("particle count must be positive")
        if self.dimension is not None and self.dimension < 2:
            raise InvalidConfigurationError("factor dimension must be at least 2")
        if self.threshold is not None:
            _require_positive("C threshold", self.threshold)
        if not 0 <= self.seed <= MAX_SEED:
            raise InvalidConfigurationError("Seed must be a 64-bit unsigned integer")
