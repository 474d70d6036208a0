#!/usr/bin/env python3
"""
Dense tensor-product linear algebra for assemblies of particles.

Operators and states are immutable values: their arrays are copied on
construction and marked read-only, so they can be shared between threads and
cached freely.
"""

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

import numpy as np

from .config import Tolerance, max_dimension
from .exceptions import (
    CapacityError,
    ContractError,
    NumericalIntegrityError,
    ShapeError,
    SlotIndexError,
)
from .models import SectorLabel

logger = logging.getLogger(__name__)

HERMITIAN_ATOL = 1e-12
NORM_ATOL = 1e-12
SECTOR_ATOL = 1e-10
IMAGINARY_ATOL = 1e-8

PURE = "pure"
MIXED = "mixed"


def check_capacity(total: int, limit: Optional[int]) -> None:
    limit = max_dimension() if limit is None else limit
    if total > limit:
        raise CapacityError(f"Total dimension {total} exceeds the maximum of {limit}")


@dataclass(frozen=True, eq=False)
class Operator:
    """
    A dense complex square matrix acting on a tensor product of factors.

    Args:
        matrix: Square complex matrix; its side must equal ``prod(dims)``.
        dims: Ordered factor dimensions.
        hermitian_hint: If True the matrix is checked to be hermitian.
        label: Human-readable description used in audits and reports.
        flags: Markers such as ``"single-slot"`` for embedded single-particle operators.
    """

    matrix: np.ndarray
    dims: Tuple[int, ...]
    hermitian_hint: Optional[bool] = None
    label: str = ""
    flags: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ShapeError(f"Operator matrix must be square, got shape {matrix.shape}")
        if not dims or any(d < 1 for d in dims):
            raise ShapeError(f"Factor dimensions must be positive, got {dims}")
        if matrix.shape[0] != int(np.prod(dims)):
            raise ShapeError(f"Matrix side {matrix.shape[0]} does not match dims {dims}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "flags", frozenset(self.flags))
        if self.hermitian_hint and not self.is_hermitian():
            raise ContractError(f"Operator {self.label or ''} is flagged hermitian but is not")

    @classmethod
    def identity(cls, dims: Sequence[int], label: str = "I") -> "Operator":
        side = int(np.prod(dims))
        return cls(np.eye(side), tuple(dims), hermitian_hint=True, label=label)

    @property
    def side(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    @property
    def is_homogeneous(self) -> bool:
        return len(set(self.dims)) == 1

    def is_hermitian(self, atol: float = HERMITIAN_ATOL) -> bool:
        """Hermiticity test; the tolerance scales with the largest entry above 1."""
        scale = max(1.0, float(np.max(np.abs(self.matrix)))) if self.side else 1.0
        return bool(np.allclose(self.matrix, self.matrix.conj().T, rtol=0.0, atol=atol * scale))

    def norm_estimate(self) -> float:
        """Cheap upper bound on the operator norm: largest |entry| times the side."""
        return float(np.max(np.abs(self.matrix))) * self.side

    def with_label(self, label: str) -> "Operator":
        return Operator(self.matrix, self.dims, self.hermitian_hint, label, self.flags)

    def hermitized(self) -> "Operator":
        """(O + O†)/2 for operators hermitian by construction."""
        return Operator((self.matrix + self.matrix.conj().T) / 2, self.dims, True, self.label, self.flags)

    def _same_dims(self, other: "Operator") -> None:
        if self.dims != other.dims:
            raise ShapeError(f"Dimension mismatch: {self.dims} vs {other.dims}")

    def __add__(self, other: "Operator") -> "Operator":
        self._same_dims(other)
        return Operator(self.matrix + other.matrix, self.dims, label=f"({self.label} + {other.label})")

    def __sub__(self, other: "Operator") -> "Operator":
        self._same_dims(other)
        return Operator(self.matrix - other.matrix, self.dims, label=f"({self.label} - {other.label})")

    def __neg__(self) -> "Operator":
        return Operator(-self.matrix, self.dims, self.hermitian_hint, f"-{self.label}", self.flags)

    def __mul__(self, scalar: complex) -> "Operator":
        hint = self.hermitian_hint if np.isrealobj(scalar) else None
        return Operator(self.matrix * scalar, self.dims, hint, f"{scalar}*{self.label}", self.flags)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._same_dims(other)
            return Operator(self.matrix @ other.matrix, self.dims, label=f"{self.label}{other.label}")
        return self.matrix @ np.asarray(other)


@dataclass(frozen=True, eq=False)
class AssemblyState:
    """
    A pure state or an explicit convex combination of pure components.

    Use :meth:`pure` and :meth:`mixed` rather than the raw constructor.
    Sector tags are verified, not trusted.
    """

    kind: str
    components: Tuple[Tuple[float, np.ndarray], ...]
    dims: Tuple[int, ...]
    sector: SectorLabel = SectorLabel.FULL

    def __post_init__(self):
        if self.kind not in (PURE, MIXED):
            raise ContractError(f"Unknown state kind: {self.kind}")
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ShapeError(f"Factor dimensions must be positive, got {dims}")
        total = int(np.prod(dims))
        check_capacity(total, None)
        sector = SectorLabel(self.sector)
        if not self.components:
            raise ContractError("A state needs at least one component")
        if self.kind == PURE and len(self.components) != 1:
            raise ContractError("A pure state has exactly one component")

        components = []
        for weight, vector in self.components:
            vec = np.array(vector, dtype=complex).reshape(-1)
            if vec.size != total:
                raise ShapeError(f"State vector has {vec.size} amplitudes, dims {dims} need {total}")
            if not np.all(np.isfinite(vec)):
                raise ContractError("state vector has non-finite amplitudes")
            if abs(np.linalg.norm(vec) - 1.0) > NORM_ATOL:
                raise ContractError(f"state vector must have unit norm, got {np.linalg.norm(vec)!r}")
            vec.setflags(write=False)
            components.append((float(weight), vec))

        weights = np.array([w for w, _ in components])
        if not np.all(np.isfinite(weights)):
            raise ContractError("mixture weights must be finite")
        if np.any(weights <= 0):
            raise ContractError("mixture weights must be positive")
        if abs(weights.sum() - 1.0) > NORM_ATOL:
            raise ContractError(f"mixture weights must sum to 1, got {weights.sum()!r}")

        if sector is not SectorLabel.FULL:
            if len(set(dims)) != 1:
                raise ContractError("Symmetry sectors need equal factor dimensions")
            for _, vec in components:
                residual = sector_residual(vec, dims, sector)
                if residual > SECTOR_ATOL:
                    raise ContractError(f"state tagged {sector.value} violates its sector (residual {residual:.3e})")

        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "sector", sector)
        object.__setattr__(self, "components", tuple(components))

    @classmethod
    def pure(cls, vector, dims: Sequence[int], sector: SectorLabel = SectorLabel.FULL) -> "AssemblyState":
        return cls(PURE, ((1.0, vector),), tuple(dims), sector)

    @classmethod
    def mixed(cls, pairs: Iterable[Tuple[float, np.ndarray]], dims: Sequence[int],
              sector: SectorLabel = SectorLabel.FULL) -> "AssemblyState":
        return cls(MIXED, tuple(pairs), tuple(dims), sector)

    @property
    def is_pure(self) -> bool:
        return self.kind == PURE

    @property
    def vector(self) -> np.ndarray:
        if not self.is_pure:
            raise ContractError("Mixed states have no single state vector")
        return self.components[0][1]

    @property
    def vectors(self) -> Tuple[np.ndarray, ...]:
        return tuple(vec for _, vec in self.components)

    @property
    def weights(self) -> Tuple[float, ...]:
        return tuple(w for w, _ in self.components)

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    @property
    def dimension(self) -> int:
        return int(np.prod(self.dims))

    def density_matrix(self) -> np.ndarray:
        """Materialize ρ = Σ pᵢ |ψᵢ⟩⟨ψᵢ|."""
        rho = np.zeros((self.dimension, self.dimension), dtype=complex)
        for weight, vec in self.components:
            rho += weight * np.outer(vec, vec.conj())
        return rho

    def with_sector(self, sector: SectorLabel) -> "AssemblyState":
        return AssemblyState(self.kind, self.components, self.dims, sector)


def permute_factors(vector: np.ndarray, dims: Sequence[int], mapping: Sequence[int]) -> np.ndarray:
    """
    Move tensor factor ``i`` of ``vector`` to slot ``mapping[i]``.

    Args:
        vector: Flat amplitudes, last factor varying fastest.
        dims: Factor dimensions of ``vector``.
        mapping: Bijection on factor positions.

    Returns:
        Flat amplitudes of the permuted product.
    """
    inverse = np.argsort(mapping)
    return np.asarray(vector).reshape(tuple(dims)).transpose(inverse).reshape(-1)


def sector_residual(vector: np.ndarray, dims: Sequence[int], sector: SectorLabel) -> float:
    """Largest deviation from (anti)symmetry under adjacent transpositions."""
    if sector is SectorLabel.FULL:
        return 0.0
    sign = 1.0 if sector is SectorLabel.SYMMETRIC else -1.0
    n = len(dims)
    worst = 0.0
    for i in range(n - 1):
        mapping = list(range(n))
        mapping[i], mapping[i + 1] = i + 1, i
        swapped = permute_factors(vector, dims, mapping)
        worst = max(worst, float(np.linalg.norm(swapped - sign * np.asarray(vector))))
    return worst


def tensor(a: Operator, b: Operator, limit: Optional[int] = None) -> Operator:
    """
    Kronecker product of two operators.

    Raises:
        CapacityError: If the product exceeds the maximum total dimension.
    """
    check_capacity(a.side * b.side, limit)
    hint = True if a.hermitian_hint and b.hermitian_hint else None
    return Operator(np.kron(a.matrix, b.matrix), a.dims + b.dims, hint, f"{a.label}⊗{b.label}")


def adjoint(a: Operator) -> Operator:
    return Operator(a.matrix.conj().T, a.dims, a.hermitian_hint, f"{a.label}†", a.flags)


def commutator(a: Operator, b: Operator) -> Operator:
    """[a, b] = ab − ba."""
    if a.dims != b.dims:
        raise ShapeError(f"Cannot commute operators with dims {a.dims} and {b.dims}")
    return Operator(a.matrix @ b.matrix - b.matrix @ a.matrix, a.dims, label=f"[{a.label}, {b.label}]")


def embed_single(a: Operator, slot: int, n_factors: int, limit: Optional[int] = None) -> Operator:
    """
    Build 1⊗…⊗a⊗…⊗1 with ``a`` in position ``slot`` (0-based).

    The result is flagged ``single-slot``; the physicality audit reports
    such operators individually.
    """
    if a.n_factors != 1:
        raise ShapeError("embed_single expects a single-factor operator")
    if not 0 <= slot < n_factors:
        raise SlotIndexError(f"Slot {slot} out of range for {n_factors} factors")
    d = a.side
    check_capacity(d**n_factors, limit)
    factors = [a.matrix if k == slot else np.eye(d) for k in range(n_factors)]
    matrix = reduce(np.kron, factors)
    return Operator(matrix, (d,) * n_factors, a.hermitian_hint, f"{a.label}^({slot + 1})",
                    frozenset({"single-slot"}))


def partial_trace(rho: AssemblyState, keep: int) -> Operator:
    """
    Reduced density operator of factor ``keep`` (0-based).

    Raises:
        ContractError: For states with fewer than two factors.
        SlotIndexError: If ``keep`` is out of range.
    """
    if rho.n_factors < 2:
        raise ContractError("partial_trace needs two or more factors")
    if not 0 <= keep < rho.n_factors:
        raise SlotIndexError(f"Factor {keep} out of range for {rho.n_factors} factors")
    d = rho.dims[keep]
    reduced = np.zeros((d, d), dtype=complex)
    for weight, vec in rho.components:
        block = np.moveaxis(vec.reshape(rho.dims), keep, 0).reshape(d, -1)
        reduced += weight * (block @ block.conj().T)
    return Operator((reduced + reduced.conj().T) / 2, (d,), True, f"Tr_¬{keep + 1}(ρ)")


def _check_observable(o: Operator, rho: AssemblyState) -> None:
    if o.dims != rho.dims:
        raise ShapeError(f"Operator dims {o.dims} do not match state dims {rho.dims}")
    if not o.is_hermitian():
        raise ContractError(f"Operator {o.label} is not hermitian")


def expectation(rho: AssemblyState, o: Operator) -> float:
    """
    Born-rule expectation Tr(ρO).

    Raises:
        ContractError: If ``o`` is not hermitian.
        NumericalIntegrityError: If the imaginary residue exceeds 1e-8.
    """
    _check_observable(o, rho)
    if rho.is_pure:
        vec = rho.vector
        value = np.vdot(vec, o.matrix @ vec)
    else:
        value = np.einsum("ij,ji->", rho.density_matrix(), o.matrix)
    if abs(value.imag) > IMAGINARY_ATOL:
        logger.error(f"Expectation of {o.label} has imaginary part {value.imag:.3e}")
        raise NumericalIntegrityError(f"Expectation of {o.label} has imaginary part {value.imag!r}")
    return float(value.real)


def eigen_residual(o: Operator, rho: AssemblyState, eigenvalue: float) -> float:
    """Largest ‖Oψ − λψ‖ over the pure components of ``rho``."""
    if o.dims != rho.dims:
        raise ShapeError(f"Operator dims {o.dims} do not match state dims {rho.dims}")
    return max(float(np.linalg.norm(o.matrix @ vec - eigenvalue * vec)) for vec in rho.vectors)


def is_eigenstate(o: Operator, rho: AssemblyState, eigenvalue: float, tol: Optional[Tolerance] = None) -> bool:
    """
    Strong-property test: every pure component of ``rho`` is an eigenvector
    of ``o`` with ``eigenvalue``.
    """
    tol = tol or Tolerance()
    _check_observable(o, rho)
    return eigen_residual(o, rho, eigenvalue) <= tol.bound(eigenvalue)
