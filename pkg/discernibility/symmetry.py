#!/usr/bin/env python3
"""
Permutations of tensor factors, symmetrization projectors and the
permutation-invariance test that every physical quantity of an assembly of
indistinguishable particles has to pass.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from .config import Tolerance
from .exceptions import ContractError, EmptySectorError
from .hilbert import AssemblyState, Operator, check_capacity, partial_trace, permute_factors
from .models import SectorLabel

logger = logging.getLogger(__name__)

EMPTY_SECTOR_ATOL = 1e-12


@dataclass(frozen=True)
class Permutation:
    """A bijection on factor positions {0..n-1}; factor i moves to slot mapping[i]."""

    mapping: Tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(i) for i in self.mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise ContractError(f"Not a bijection on 0..{len(mapping) - 1}: {mapping}")
        object.__setattr__(self, "mapping", mapping)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        mapping = list(range(n))
        mapping[i], mapping[j] = j, i
        return cls(tuple(mapping))

    def __len__(self) -> int:
        return len(self.mapping)

    def compose(self, other: "Permutation") -> "Permutation":
        """self ∘ other: apply ``other`` first."""
        if len(other) != len(self):
            raise ContractError("Cannot compose permutations of different sizes")
        return Permutation(tuple(self.mapping[i] for i in other.mapping))

    def inverse(self) -> "Permutation":
        return Permutation(tuple(int(i) for i in np.argsort(self.mapping)))

    def sign(self) -> int:
        seen = [False] * len(self)
        parity = 0
        for start in range(len(self)):
            if seen[start]:
                continue
            length = 0
            i = start
            while not seen[i]:
                seen[i] = True
                i = self.mapping[i]
                length += 1
            parity += length - 1
        return -1 if parity % 2 else 1


def all_permutations(n: int) -> Iterator[Permutation]:
    for mapping in itertools.permutations(range(n)):
        yield Permutation(mapping)


def _index_map(p: Permutation, d: int) -> np.ndarray:
    n = len(p)
    return permute_factors(np.arange(d**n), (d,) * n, p.mapping)


def permutation_operator(p: Permutation, d: int, n: int) -> Operator:
    """
    Unitary U_π permuting the factors of (C^d)^⊗n.

    Args:
        p: Permutation of the n factors.
        d: Factor dimension.
        n: Number of factors.

    Returns:
        0/1 permutation matrix with U(v₁⊗…⊗vₙ) = v_{π⁻¹(1)}⊗…⊗v_{π⁻¹(n)}.
    """
    if n < 1:
        raise ContractError("Permutation operators need at least one factor")
    if len(p) != n:
        raise ContractError(f"Permutation acts on {len(p)} factors, expected {n}")
    check_capacity(d**n, None)
    matrix = np.eye(d**n)[_index_map(p, d)]
    return Operator(matrix, (d,) * n, True, f"U{p.mapping}")


def _projector(d: int, n: int, signed: bool) -> np.ndarray:
    check_capacity(d**n, None)
    side = d**n
    rows = np.arange(side)
    matrix = np.zeros((side, side))
    for p in all_permutations(n):
        weight = p.sign() if signed else 1
        matrix[rows, _index_map(p, d)] += weight
    return matrix / math.factorial(n)


def symmetrizer(d: int, n: int) -> Operator:
    """(1/n!) Σ_π U_π, the projector onto the boson sector."""
    return Operator(_projector(d, n, signed=False), (d,) * n, True, f"S({d},{n})")


def antisymmetrizer(d: int, n: int) -> Operator:
    """
    (1/n!) Σ_π sgn(π) U_π, the projector onto the fermion sector.

    For n > d this is the zero projector; the result is then flagged
    ``zero-projector`` rather than rejected.
    """
    flags = frozenset()
    if n > d:
        logger.warning(f"Antisymmetrizer with n={n} > d={d} is the zero projector")
        flags = frozenset({"zero-projector"})
    return Operator(_projector(d, n, signed=True), (d,) * n, True, f"A({d},{n})", flags)


def sector_projector(d: int, n: int, sector: SectorLabel) -> Operator:
    if sector is SectorLabel.SYMMETRIC:
        return symmetrizer(d, n)
    if sector is SectorLabel.ANTISYMMETRIC:
        return antisymmetrizer(d, n)
    return Operator.identity((d,) * n)


def project_vector(vector: np.ndarray, dims: Sequence[int], sector: SectorLabel) -> np.ndarray:
    """Apply the sector projector to a flat vector without building the matrix."""
    if sector is SectorLabel.FULL:
        return np.asarray(vector, dtype=complex)
    n = len(dims)
    result = np.zeros(int(np.prod(dims)), dtype=complex)
    for p in all_permutations(n):
        weight = p.sign() if sector is SectorLabel.ANTISYMMETRIC else 1
        result += weight * permute_factors(vector, dims, p.mapping)
    return result / math.factorial(n)


def project_to_sector(state: AssemblyState, sector: SectorLabel) -> AssemblyState:
    """
    Project a state onto a symmetry sector and renormalize.

    Mixed states are projected componentwise; each weight is rescaled by the
    squared norm its component keeps.

    Raises:
        ContractError: If the factor dimensions differ.
        EmptySectorError: If nothing survives the projection.
    """
    sector = SectorLabel(sector)
    if sector is SectorLabel.FULL:
        return state.with_sector(SectorLabel.FULL)
    if len(set(state.dims)) != 1:
        raise ContractError("Sector projection needs equal factor dimensions")

    kept = []
    for weight, vec in state.components:
        projected = project_vector(vec, state.dims, sector)
        norm = float(np.linalg.norm(projected))
        if norm >= EMPTY_SECTOR_ATOL:
            kept.append((weight * norm**2, projected / norm))
    if not kept:
        raise EmptySectorError(f"State has no component in the {sector.value} sector")

    if state.is_pure:
        return AssemblyState.pure(kept[0][1], state.dims, sector)
    total = sum(w for w, _ in kept)
    return AssemblyState.mixed([(w / total, v) for w, v in kept], state.dims, sector)


def is_permutation_invariant(o: Operator, tol: Optional[Tolerance] = None) -> bool:
    """
    Check U_π O U_π⁻¹ = O for all n! factor permutations.

    Raises:
        ContractError: If the factor dimensions differ.
    """
    tol = tol or Tolerance()
    if not o.is_homogeneous:
        raise ContractError("Permutation invariance needs equal factor dimensions")
    d, n = o.dims[0], o.n_factors
    for p in all_permutations(n):
        index = _index_map(p, d)
        conjugated = o.matrix[np.ix_(index, index)]
        if not np.allclose(conjugated, o.matrix, rtol=tol.rel_tol, atol=tol.abs_tol):
            return False
    return True


def is_multiple_of_identity(o: Operator, sector: SectorLabel, tol: Optional[Tolerance] = None) -> bool:
    """True if ΠOΠ = cΠ for the sector projector Π and some scalar c."""
    tol = tol or Tolerance()
    if not o.is_homogeneous:
        raise ContractError("Sector restriction needs equal factor dimensions")
    projector = sector_projector(o.dims[0], o.n_factors, sector).matrix
    rank = float(np.trace(projector).real)
    if rank < 0.5:
        raise EmptySectorError(f"The {sector.value} sector is empty for dims {o.dims}")
    restricted = projector @ o.matrix @ projector
    c = np.trace(restricted) / rank
    scale = max(1.0, float(np.max(np.abs(o.matrix))))
    return bool(np.allclose(restricted, c * projector, rtol=0.0, atol=tol.bound(scale)))


def has_equal_reductions(state: AssemblyState, tol: Optional[Tolerance] = None) -> bool:
    """All single-particle reduced density operators of ``state`` coincide."""
    tol = tol or Tolerance()
    reductions = [partial_trace(state, k).matrix for k in range(state.n_factors)]
    return all(np.allclose(r, reductions[0], rtol=0.0, atol=tol.abs_tol) for r in reductions[1:])
