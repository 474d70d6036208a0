#!/usr/bin/env python3
"""
End-to-end acceptance checks: the projector identities, the spin constants,
the variance identities, the lattice theorems, the audit golden table,
equal reductions in symmetry sectors and reproducible reports.
"""

import itertools

import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

from discernibility.cli import EXIT_OK, main
from discernibility.config import LatticeConfig, Settings, SpinConfig, TheoremConfig
from discernibility.discernment import (
    RelationSpec,
    eval_relation_Dprime,
    eval_relation_Rprime,
    eval_relation_T,
    physicality_audit,
)
from discernibility.hilbert import AssemblyState, Operator, eigen_residual, expectation, partial_trace
from discernibility.manager import DiscernmentManager
from discernibility.models import AuditVerdict, RelationKind, SectorLabel, Verdict
from discernibility.observables import (
    difference_operator,
    expected_variance_closed_form,
    lattice_momentum,
    lattice_position,
    pij_sum_operator,
    random_projector_family,
    spin_operators,
    total_spin_squared,
    variance_operator,
    variance_operator_forms,
)
from discernibility.states import (
    STREAM_PROFILES,
    RandomSpec,
    diagonal_pointmass,
    random_profile,
    random_states,
    trial_rng,
)
from discernibility.symmetry import is_permutation_invariant
from discernibility.theorems import verify_theorem


def random_hermitian(rng, d):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return Operator((m + m.conj().T) / 2, (d,), True, "A")


def antisymmetric_basis(d):
    """(|ij⟩ − |ji⟩)/√2 for i < j."""
    for i, j in itertools.combinations(range(d), 2):
        vec = np.zeros(d * d)
        vec[i * d + j], vec[j * d + i] = 1 / np.sqrt(2), -1 / np.sqrt(2)
        yield AssemblyState.pure(vec, (d, d), SectorLabel.ANTISYMMETRIC)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_same_particle_projector_identity(d):
    for seed in range(5):
        family = random_projector_family(d, np.random.default_rng(seed))
        for x in (1, 2):
            assert_allclose(pij_sum_operator(family, x, x).matrix, 2 * (d - 1) * np.eye(d * d), atol=1e-10)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_every_fermion_basis_state_has_eigenvalue_minus_two(d):
    family = random_projector_family(d, np.random.default_rng(d))
    o = pij_sum_operator(family, 1, 2)
    for state in antisymmetric_basis(d):
        assert eigen_residual(o, state, -2.0) < 1e-10


@pytest.mark.parametrize("hbar", [1.0, 0.5])
def test_spin_half_constants(hbar):
    cfg = SpinConfig(0.5, hbar=hbar)
    spectrum = scipy.linalg.eigvalsh(total_spin_squared(cfg, 1, 2).matrix)
    assert_allclose(spectrum, [0.0, 2 * hbar**2, 2 * hbar**2, 2 * hbar**2], atol=1e-9)
    assert_allclose(total_spin_squared(cfg, 1, 1).matrix, 3 * hbar**2 * np.eye(4), atol=1e-9)
    table = {(x, y): eval_relation_T(cfg, x, y).holds for x in (1, 2) for y in (1, 2)}
    assert table == {(1, 1): True, (2, 2): True, (1, 2): False, (2, 1): False}


@pytest.mark.parametrize("s", [1.0, 1.5])
def test_higher_spin_bound(s):
    cfg = SpinConfig(s)
    top = scipy.linalg.eigvalsh(total_spin_squared(cfg, 1, 2).matrix)[-1]
    assert top == pytest.approx(2 * s * (2 * s + 1), abs=1e-9)
    assert top < 4 * cfg.casimir - 1e-9


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("d", [2, 3])
def test_variance_identities(n, d):
    rng = np.random.default_rng(100 * n + d)
    for _ in range(20):
        a = random_hermitian(rng, d)
        forms = list(variance_operator_forms(a, n).values())
        scale = max(1.0, float(np.max(np.abs(forms[0].matrix))))
        for form in forms[1:]:
            assert_allclose(form.matrix, forms[0].matrix, atol=1e-12 * scale)
        v = variance_operator(a, n)
        assert is_permutation_invariant(v)
        assert scipy.linalg.eigvalsh(v.matrix)[0] >= -1e-10


def test_closed_form_matches_trace():
    rng = np.random.default_rng(5)
    for i in range(100):
        d = 2 + i % 3
        a = random_hermitian(rng, d)
        vec = rng.standard_normal(d * d) + 1j * rng.standard_normal(d * d)
        state = AssemblyState.pure(vec / np.linalg.norm(vec), (d, d))
        delta = difference_operator(a).matrix
        traced = expectation(state, Operator(delta @ delta, (d, d), True))
        assert expected_variance_closed_form(a, state) == pytest.approx(traced, abs=1e-10)


@pytest.mark.parametrize("sites", [8, 16])
def test_position_spread_on_random_states(sites):
    cfg = LatticeConfig(sites)
    q = lattice_position(cfg)
    for sector in SectorLabel:
        for state in random_states(RandomSpec(seed=7, sector=sector, dims=(sites, sites), count=500)):
            assert eval_relation_Rprime(q, state, 1, 2).witness > 1e-12


@pytest.mark.parametrize("sites", [4, 8, 16])
def test_pointmass_disjunction(sites):
    cfg = LatticeConfig(sites)
    q, p = lattice_position(cfg), lattice_momentum(cfg)
    delta_q = difference_operator(q).matrix
    delta_q_squared = Operator(delta_q @ delta_q, (sites, sites), True)
    for j in range(10):
        state = diagonal_pointmass(random_profile(sites, trial_rng(7, j, STREAM_PROFILES)), cfg, 2)
        assert eigen_residual(delta_q_squared, state, 0.0) < 1e-12
        assert eval_relation_Rprime(p, state, 1, 2).witness > 1e-8

    report = verify_theorem(3, TheoremConfig(lattice_sites=sites, trials=20, pointmass_trials=10, seed=7))
    assert report.passed, report.failures()
    assert all(t.verdict is Verdict.WEAKLY_DISCERNED for t in report.trials)


@pytest.mark.parametrize("sites", [4, 8])
def test_three_particle_assembly_variance(sites):
    report = verify_theorem(5, TheoremConfig(lattice_sites=sites, trials=200, particle_counts=(3,), seed=7))
    assert report.passed, report.failures()
    for trial in report.trials:
        assert all(e.holds for e in trial.table if e.x != e.y)
        assert all(not e.holds and abs(e.witness) <= 1e-12 for e in trial.table if e.x == e.y)

    escape = verify_theorem(6, TheoremConfig(lattice_sites=sites, trials=1, pointmass_trials=10,
                                             particle_counts=(3,), seed=7))
    assert escape.checks["pointmass_fail_position"]
    assert escape.checks["pointmass_pass_momentum"]


def test_two_particle_assembly_variance_is_rprime():
    cfg = LatticeConfig(8)
    q = lattice_position(cfg)
    states = random_states(RandomSpec(seed=7, sector=SectorLabel.FULL, dims=(8, 8), count=50))
    states.append(diagonal_pointmass(np.full(8, 1 / np.sqrt(8)), cfg, 2))
    for state in states:
        for x, y in itertools.product((1, 2), repeat=2):
            assert eval_relation_Dprime(cfg, state, x, y).holds == eval_relation_Rprime(q, state, x, y).holds


def test_audit_golden_table():
    lattice = LatticeConfig(4)
    family = random_projector_family(3, np.random.default_rng(0))
    half = SpinConfig(0.5)
    golden = {
        RelationKind.RT: (RelationSpec(RelationKind.RT, family=family, t=-2.0), AuditVerdict.UNPHYSICAL, True),
        RelationKind.C: (RelationSpec(RelationKind.C, lattice=lattice), AuditVerdict.UNPHYSICAL, False),
        RelationKind.T: (RelationSpec(RelationKind.T, spin=half), AuditVerdict.PHYSICAL, False),
        RelationKind.TPRIME: (RelationSpec(RelationKind.TPRIME, spin=half), AuditVerdict.PHYSICAL, False),
        RelationKind.R: (RelationSpec(RelationKind.R, quantity=spin_operators(half).z), AuditVerdict.PHYSICAL, False),
        RelationKind.RPRIME: (RelationSpec(RelationKind.RPRIME, quantity=lattice_position(lattice)),
                              AuditVerdict.PHYSICAL, False),
        RelationKind.DPRIME: (RelationSpec(RelationKind.DPRIME, lattice=lattice, n_particles=3),
                              AuditVerdict.PHYSICAL, False),
        RelationKind.DPRIME_P: (RelationSpec(RelationKind.DPRIME_P, lattice=lattice, n_particles=3),
                                AuditVerdict.PHYSICAL, False),
    }
    for kind, (spec, overall, trivial) in golden.items():
        audit = physicality_audit(spec)
        assert (audit.overall, audit.trivial) == (overall, trivial), kind


@pytest.mark.parametrize("d", [2, 3])
def test_sector_states_have_equal_reductions(d):
    for sector in (SectorLabel.SYMMETRIC, SectorLabel.ANTISYMMETRIC):
        for state in random_states(RandomSpec(seed=d, sector=sector, dims=(d, d), count=100)):
            assert_allclose(partial_trace(state, 0).matrix, partial_trace(state, 1).matrix, atol=1e-10)


def test_verify_reports_are_byte_identical(tmp_path):
    manager = DiscernmentManager(Settings())
    outputs = []
    for name in ("first.json", "second.json"):
        path = tmp_path / name
        argv = ["verify", "--theorem", "1", "--seed", "7", "--trials", "50",
                "--format", "json", "--output", str(path)]
        assert main(argv, manager=manager) == EXIT_OK
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
