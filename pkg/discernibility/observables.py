#!/usr/bin/env python3
"""
Operator families the discernibility relations are built from: projector
families and their pairwise-difference sums, spin matrices, lattice position
and momentum, and the mean and variance operators of a single-particle
quantity over an assembly.
"""

import logging
from dataclasses import dataclass
from typing import Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from .config import LatticeConfig, SpinConfig
from .exceptions import (
    ContractError,
    DegenerateSpinError,
    NumericalIntegrityError,
    ShapeError,
    SlotIndexError,
)
from .hilbert import AssemblyState, Operator, embed_single

logger = logging.getLogger(__name__)

FAMILY_ATOL = 1e-12
ORTHONORMAL_ATOL = 1e-10
CLOSED_FORM_ATOL = 1e-10
VARIANCE_FORM_ATOL = 1e-12
DEGENERACY_ATOL = 1e-9

__all__ = [
    "LatticeConfig",
    "SpinConfig",
    "ProjectorFamily",
    "SpinOperators",
    "projector_family_from_basis",
    "random_projector_family",
    "pij_blocks",
    "pij_sum_operator",
    "spin_operators",
    "total_spin_squared",
    "lattice_coordinates",
    "lattice_momenta",
    "dft_matrix",
    "lattice_position",
    "lattice_momentum",
    "mean_operator",
    "difference_operator",
    "pairwise_variance_operator",
    "pair_excluded_operator",
    "variance_operator",
    "variance_operator_forms",
    "expected_variance_closed_form",
]


@dataclass(frozen=True)
class ProjectorFamily:
    """A complete set of mutually orthogonal projectors {E_i} on C^d."""

    projectors: Tuple[Operator, ...]
    d: int

    def __post_init__(self):
        identity = np.eye(self.d)
        total = np.zeros((self.d, self.d), dtype=complex)
        for i, e in enumerate(self.projectors):
            if e.dims != (self.d,):
                raise ShapeError(f"Projector {i} has dims {e.dims}, expected ({self.d},)")
            m = e.matrix
            if not np.allclose(m, m.conj().T, rtol=0, atol=FAMILY_ATOL):
                raise ContractError(f"Projector {i} is not hermitian")
            if not np.allclose(m @ m, m, rtol=0, atol=FAMILY_ATOL):
                raise ContractError(f"Projector {i} is not idempotent")
            for j, other in enumerate(self.projectors[i + 1:], start=i + 1):
                if not np.allclose(m @ other.matrix, 0, rtol=0, atol=FAMILY_ATOL):
                    raise ContractError(f"Projectors {i} and {j} are not orthogonal")
            total += m
        if not np.allclose(total, identity, rtol=0, atol=FAMILY_ATOL):
            raise ContractError("Projector family does not resolve the identity")

    def __len__(self) -> int:
        return len(self.projectors)


def projector_family_from_basis(basis: Sequence[Sequence[complex]]) -> ProjectorFamily:
    """
    Rank-1 projectors |b_i⟩⟨b_i| onto an orthonormal basis.

    Args:
        basis: The basis vectors, one per row.

    Raises:
        ContractError: If the vectors are not an orthonormal basis.
    """
    vectors = np.array(basis, dtype=complex)
    if vectors.ndim != 2 or vectors.shape[0] != vectors.shape[1]:
        raise ContractError(f"Need d orthonormal vectors of length d, got shape {vectors.shape}")
    gram = vectors.conj() @ vectors.T
    if not np.allclose(gram, np.eye(len(vectors)), rtol=0, atol=ORTHONORMAL_ATOL):
        raise ContractError("Basis vectors are not orthonormal")
    d = vectors.shape[1]
    projectors = tuple(
        Operator(np.outer(b, b.conj()), (d,), True, f"E{i + 1}") for i, b in enumerate(vectors)
    )
    return ProjectorFamily(projectors, d)


def random_projector_family(d: int, rng: np.random.Generator) -> ProjectorFamily:
    """Projector family onto the columns of a Haar-random unitary."""
    if d < 2:
        raise ContractError("Random projector families need d >= 2")
    unitary = unitary_group.rvs(d, random_state=rng)
    return projector_family_from_basis(unitary.T)


def _check_pair_labels(n: int, *labels: int) -> None:
    for label in labels:
        if not 1 <= label <= n:
            raise SlotIndexError(f"Particle label {label} out of range 1..{n}")


def pij_blocks(f: ProjectorFamily, x: int) -> Tuple[Operator, ...]:
    """The embedded differences P⁽ˣ⁾ᵢⱼ = (Eᵢ − Eⱼ)⁽ˣ⁾ for i < j."""
    _check_pair_labels(2, x)
    blocks = []
    for i in range(len(f)):
        for j in range(i + 1, len(f)):
            p = Operator(f.projectors[i].matrix - f.projectors[j].matrix, (f.d,), True, f"P{i + 1}{j + 1}")
            blocks.append(embed_single(p, x - 1, 2))
    return tuple(blocks)


def pij_sum_operator(f: ProjectorFamily, x: int, y: int) -> Operator:
    """
    Σᵢⱼ P⁽ˣ⁾ᵢⱼ P⁽ʸ⁾ᵢⱼ with Pᵢⱼ = Eᵢ − Eⱼ on a two-particle assembly.

    The sum is taken literally over all ordered (i, j) and then checked
    against its closed form: 2d·Σᵢ Eᵢ⊗Eᵢ − 2·I⊗I for x ≠ y and 2(d−1)·I⊗I
    for x = y.

    Raises:
        SlotIndexError: If x or y is not 1 or 2.
        NumericalIntegrityError: If the literal sum misses its closed form.
    """
    _check_pair_labels(2, x, y)
    d = f.d
    total = np.zeros((d * d, d * d), dtype=complex)
    for ei in f.projectors:
        for ej in f.projectors:
            p = Operator(ei.matrix - ej.matrix, (d,), True)
            total += embed_single(p, x - 1, 2).matrix @ embed_single(p, y - 1, 2).matrix

    if x == y:
        closed = 2 * (d - 1) * np.eye(d * d)
    else:
        diagonal = sum(np.kron(e.matrix, e.matrix) for e in f.projectors)
        closed = 2 * d * diagonal - 2 * np.eye(d * d)
    if not np.allclose(total, closed, rtol=0, atol=CLOSED_FORM_ATOL):
        raise NumericalIntegrityError(f"Projector-difference sum ({x},{y}) misses its closed form")
    return Operator(total, (d, d), label=f"ΣP({x})ijP({y})ij").hermitized()


class SpinOperators(NamedTuple):
    x: Operator
    y: Operator
    z: Operator


def spin_operators(cfg: SpinConfig) -> SpinOperators:
    """
    Angular momentum matrices (Sx, Sy, Sz) for spin ``cfg.s``.

    Built from the ladder operators in the basis m = s, s−1, …, −s.

    Raises:
        DegenerateSpinError: For s = 0.
    """
    if cfg.s == 0:
        raise DegenerateSpinError("Spin relations are undefined for spin 0")
    s, hbar, dim = cfg.s, cfg.hbar, cfg.dimension
    m = s - np.arange(dim)
    raising = np.zeros((dim, dim))
    for k in range(1, dim):
        raising[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    lowering = raising.T
    sx = hbar * (raising + lowering) / 2
    sy = hbar * (raising - lowering) / 2j
    sz = hbar * np.diag(m)

    squared = sx @ sx + sy @ sy + sz @ sz
    if not np.allclose(squared, cfg.casimir * np.eye(dim), rtol=0, atol=1e-10 * max(1.0, cfg.casimir)):
        raise NumericalIntegrityError(f"|S|² is not s(s+1)ħ² for s={s}")
    return SpinOperators(
        Operator(sx, (dim,), True, "Sx"),
        Operator(sy, (dim,), True, "Sy"),
        Operator(sz, (dim,), True, "Sz"),
    )


def total_spin_squared(cfg: SpinConfig, x: int, y: int) -> Operator:
    """
    Combined total spin |S⁽ˣ⁾ + S⁽ʸ⁾|² on a two-particle assembly.

    For x = y this is |2S|² = 4s(s+1)ħ²·I⊗I.
    """
    _check_pair_labels(2, x, y)
    total = None
    for component in spin_operators(cfg):
        summed = embed_single(component, x - 1, 2).matrix + embed_single(component, y - 1, 2).matrix
        square = summed @ summed
        total = square if total is None else total + square
    dims = (cfg.dimension, cfg.dimension)
    return Operator(total, dims, label=f"|S({x})+S({y})|²").hermitized()


def lattice_coordinates(cfg: LatticeConfig) -> np.ndarray:
    """Site coordinates; centered lattices are symmetric about zero."""
    sites = np.arange(cfg.sites)
    if cfg.centered:
        return (sites - (cfg.sites - 1) / 2) * cfg.spacing
    return sites * cfg.spacing


def lattice_momenta(cfg: LatticeConfig) -> np.ndarray:
    """Centered discrete momenta ħ·2πm/(L·a) in DFT output order."""
    return 2 * np.pi * cfg.hbar * np.fft.fftfreq(cfg.sites, d=cfg.spacing)


def dft_matrix(sites: int) -> np.ndarray:
    """Unitary discrete Fourier transform F[k, j] = exp(−2πi·jk/L)/√L."""
    return scipy.linalg.dft(sites, scale="sqrtn")


def lattice_position(cfg: LatticeConfig) -> Operator:
    return Operator(np.diag(lattice_coordinates(cfg)), (cfg.sites,), True, "Q")


def lattice_momentum(cfg: LatticeConfig) -> Operator:
    """P = F† diag(k) F on the periodic lattice."""
    f = dft_matrix(cfg.sites)
    matrix = f.conj().T @ np.diag(lattice_momenta(cfg)) @ f
    return Operator(matrix, (cfg.sites,), label="P").hermitized()


def _require_hermitian(a: Operator) -> None:
    if a.n_factors != 1:
        raise ShapeError("Expected a single-particle quantity")
    if not a.is_hermitian():
        raise ContractError(f"Quantity {a.label} is not hermitian")


def mean_operator(a: Operator, n: int) -> Operator:
    """Ā = (1/n) Σᵢ A⁽ⁱ⁾, the statistical mean of A over n particles."""
    _require_hermitian(a)
    if n < 1:
        raise ContractError("Need at least one particle")
    total = sum(embed_single(a, i, n).matrix for i in range(n))
    return Operator(total / n, (a.side,) * n, label=f"mean({a.label})").hermitized()


def difference_operator(a: Operator) -> Operator:
    """Δ_A = (A⊗1 − 1⊗A)/2; sent to −Δ_A by the particle swap."""
    _require_hermitian(a)
    matrix = (embed_single(a, 0, 2).matrix - embed_single(a, 1, 2).matrix) / 2
    return Operator(matrix, (a.side, a.side), label=f"Δ_{a.label}").hermitized()


def _pair_sum(a: Operator, n: int, pairs) -> np.ndarray:
    singles = [embed_single(a, i, n).matrix for i in range(n)]
    total = np.zeros((a.side**n, a.side**n), dtype=complex)
    for i, j in pairs:
        diff = singles[i] - singles[j]
        total += diff @ diff
    return total / n**2


def pairwise_variance_operator(a: Operator, n: int) -> Operator:
    """(1/n²) Σ_{i<j} (A⁽ⁱ⁾ − A⁽ʲ⁾)²."""
    _require_hermitian(a)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return Operator(_pair_sum(a, n, pairs), (a.side,) * n, label=f"Σ(Δ{a.label})²/n²").hermitized()


def pair_excluded_operator(a: Operator, n: int, x: int, y: int) -> Operator:
    """
    (1/n²) Σ (A⁽ⁱ⁾ − A⁽ʲ⁾)² over i < j with {i, j} ≠ {x, y}.

    For x = y nothing is excluded and the full pairwise sum is returned.
    Labels are 1-based.
    """
    _require_hermitian(a)
    _check_pair_labels(n, x, y)
    excluded = {x - 1, y - 1}
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if {i, j} != excluded]
    label = f"Σ(Δ{a.label})²/n² without ({x},{y})"
    return Operator(_pair_sum(a, n, pairs), (a.side,) * n, label=label).hermitized()


def variance_operator(a: Operator, n: int) -> Operator:
    """
    N-particle variance operator mean(A²) − mean(A)².

    The result is cross-checked against the pairwise form
    (1/n²) Σ_{i<j} (A⁽ⁱ⁾ − A⁽ʲ⁾)².

    Args:
        a: Hermitian single-particle quantity; may be degenerate.
        n: Number of particles, at least 2.

    Raises:
        ContractError: For n < 2 or a non-hermitian ``a``.
        NumericalIntegrityError: If the two forms disagree.
    """
    if n < 2:
        raise ContractError("The variance over a single particle is identically zero")
    _require_hermitian(a)
    squared = Operator(a.matrix @ a.matrix, a.dims, label=f"{a.label}²").hermitized()
    mean = mean_operator(a, n).matrix
    variance = mean_operator(squared, n).matrix - mean @ mean

    pairwise = pairwise_variance_operator(a, n).matrix
    scale = max(1.0, float(np.max(np.abs(pairwise))))
    if not np.allclose(variance, pairwise, rtol=0, atol=VARIANCE_FORM_ATOL * scale):
        raise NumericalIntegrityError(f"Variance forms of {a.label} disagree for n={n}")
    return Operator(variance, (a.side,) * n, label=f"Δ²({n})_{a.label}").hermitized()


def variance_operator_forms(a: Operator, n: int) -> Dict[str, Operator]:
    """
    The algebraically equivalent forms of the variance operator.

    ``mean``: mean(A²) − mean(A)²; ``product``: ((n−1)/n)·mean(A²) −
    (2/n²)Σ_{i<j} A⁽ⁱ⁾A⁽ʲ⁾; ``pairwise``: (1/n²)Σ_{i<j}(A⁽ⁱ⁾ − A⁽ʲ⁾)²; and
    for n = 2 also ``difference``: Δ_A².
    """
    _require_hermitian(a)
    dims = (a.side,) * n
    singles = [embed_single(a, i, n).matrix for i in range(n)]
    squares = sum(s @ s for s in singles) / n
    mean = sum(singles) / n
    cross = sum(singles[i] @ singles[j] for i in range(n) for j in range(i + 1, n))

    forms = {
        "mean": Operator(squares - mean @ mean, dims, label="mean form"),
        "product": Operator((n - 1) / n * squares - 2 * cross / n**2, dims, label="product form"),
        "pairwise": pairwise_variance_operator(a, n),
    }
    if n == 2:
        delta = difference_operator(a).matrix
        forms["difference"] = Operator(delta @ delta, dims, label="difference form")
    return forms


def expected_variance_closed_form(a: Operator, state: AssemblyState) -> float:
    """
    ⟨Δ_A²⟩ = (1/4) Σᵢⱼ |cᵢⱼ|² (aᵢ − aⱼ)² from the state's expansion in A's eigenbasis.

    Raises:
        ContractError: For a degenerate ``a`` or a state that is not two-particle.
    """
    _require_hermitian(a)
    if state.n_factors != 2 or state.dims != (a.side, a.side):
        raise ContractError("The closed form needs a two-particle state matching the quantity")
    if a.side < 2:
        raise ContractError("The closed form needs a quantity with at least two eigenvalues")
    values, vectors = scipy.linalg.eigh(a.matrix)
    if np.min(np.diff(values)) <= DEGENERACY_ATOL:
        raise ContractError(f"Quantity {a.label} is degenerate")

    gaps = (values[:, None] - values[None, :]) ** 2
    total = 0.0
    for weight, vec in state.components:
        coefficients = vectors.conj().T @ vec.reshape(a.side, a.side) @ vectors.conj()
        total += weight * float(np.sum(np.abs(coefficients) ** 2 * gaps)) / 4
    return total
