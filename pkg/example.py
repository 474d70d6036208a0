#!/usr/bin/env python3
"""
Example script demonstrating how to use the discernibility library directly.
"""

import logging

from discernibility import (
    DiscernibilityError,
    LatticeConfig,
    RelationKind,
    RelationSpec,
    SpinConfig,
    TheoremConfig,
    discern,
    display_report,
    verify_theorem,
)
from discernibility.observables import lattice_position, spin_operators
from discernibility.states import basis_state, diagonal_pointmass, singlet


def run_example():
    """
    Evaluates a few relations on hand-built states and runs one theorem check.
    """
    print("🚀 Running discernibility examples...")

    try:
        # 1. Spin-1/2 singlet: the z-spin variance discerns the two fermions
        spin = SpinConfig(0.5)
        sz = spin_operators(spin).z
        report = discern(RelationSpec(RelationKind.R, quantity=sz), singlet())
        display_report(report)

        # 2. |00⟩ shows no anti-correlation in z, but does in x
        up_up = basis_state([0, 0], [2, 2])
        for name, component in (("Sz", sz), ("Sx", spin_operators(spin).x)):
            report = discern(RelationSpec(RelationKind.R, quantity=component), up_up, audit=False)
            print(f"\n|00⟩ with {name}: {report.verdict.value}")

        # 3. A point mass on a lattice escapes the position spread but not the momentum one
        lattice = LatticeConfig(8)
        profile = [1 / 8**0.5] * 8
        state = diagonal_pointmass(profile, lattice, 2)
        for kind in (RelationKind.DPRIME, RelationKind.DPRIME_P):
            report = discern(RelationSpec(kind, lattice=lattice), state, audit=False)
            print(f"Point mass with {kind.value}: {report.verdict.value}")

        # 4. Theorem 1 on 50 random lattice states
        report = verify_theorem(1, TheoremConfig(lattice_sites=8, trials=50, seed=7))
        display_report(report)

        # 5. Position as a building block
        q = lattice_position(lattice)
        print(f"\nQ spectrum on {lattice.sites} sites: {q.matrix.diagonal().real}")

    except DiscernibilityError as e:
        logging.error(f"An error occurred while running the walkthrough: {e}")
        print("\n❌ Example failed. Check the configuration values.")
    except Exception as e:
        logging.error(f"An unexpected error occurred: {e}", exc_info=True)
        print("\n❌ An unexpected error occurred. Please check the logs.")


if __name__ == "__main__":
    run_example()
