#!/usr/bin/env python3
"""
Tests for the scripted theorem checks.
"""

import pytest

from discernibility.config import TheoremConfig
from discernibility.exceptions import CapacityError, ContractError, InvalidConfigurationError, UnknownTheoremError
from discernibility.models import AuditVerdict, RelationKind, SectorLabel, Verdict
from discernibility.theorems import THEOREM_IDS, normalize_theorem_id, verify_theorem

SMALL = TheoremConfig(lattice_sites=4, trials=6, pointmass_trials=3, seed=7)


class TestTheoremIds:
    @pytest.mark.parametrize(
        "raw,expected", [(3, "3"), ("T3", "3"), ("t6", "6"), ("sms2", "SMS2"), (" SMS1 ", "SMS1")]
    )
    def test_accepted_spellings(self, raw, expected):
        assert normalize_theorem_id(raw) == expected

    @pytest.mark.parametrize("raw", [7, "0", "SMS4", "theorem1", ""])
    def test_unknown(self, raw):
        with pytest.raises(UnknownTheoremError):
            normalize_theorem_id(raw)

    def test_unknown_is_contract_error(self):
        with pytest.raises(ContractError):
            verify_theorem("T9", SMALL)


class TestVarianceTheorems:
    @pytest.mark.parametrize("theorem,kind", [("1", RelationKind.R), ("2", RelationKind.RPRIME)])
    def test_passes_over_all_sectors(self, theorem, kind):
        report = verify_theorem(theorem, TheoremConfig(lattice_sites=8, trials=9, seed=7))
        assert report.passed, report.failures()
        assert report.theorem == theorem
        assert {t.sector for t in report.trials} == set(SectorLabel)
        assert all(t.relation is kind and t.verdict is Verdict.WEAKLY_DISCERNED for t in report.trials)
        assert report.values["min_witness"] > 0
        assert report.audits[0].overall is AuditVerdict.PHYSICAL

    def test_metadata_reproduces_run(self):
        report = verify_theorem(1, TheoremConfig(lattice_sites=8, trials=3, seed=11))
        assert report.metadata.seed == 11
        assert report.metadata.rng == "PCG64/SeedSequence"
        assert report.metadata.lattice_sites == 8
        assert report.metadata.n_particles == 2

    def test_deterministic(self):
        config = TheoremConfig(lattice_sites=8, trials=5, seed=7)
        assert verify_theorem(1, config).model_dump_json() == verify_theorem(1, config).model_dump_json()


class TestDisjunctionTheorems:
    @pytest.mark.parametrize("theorem", ["3", "4"])
    def test_pointmass_states_take_momentum_branch(self, theorem):
        report = verify_theorem(theorem, SMALL)
        assert report.passed, report.failures()
        branches = {t.label: set() for t in report.trials}
        for t in report.trials:
            branches[t.label].add(t.branch)
        assert branches == {"random": {"Q"}, "pointmass": {"P"}}
        assert report.checks["pointmass_annihilated_by_position_spread"]
        assert report.values["min_pointmass_momentum_spread"] > 1e-8

    @pytest.mark.parametrize("sites", [4, 8, 16])
    def test_lattice_sizes(self, sites):
        report = verify_theorem(4, TheoremConfig(lattice_sites=sites, trials=3, pointmass_trials=3))
        assert report.passed, report.failures()

    def test_two_sites_rejected(self):
        with pytest.raises(ContractError):
            verify_theorem(3, TheoremConfig(lattice_sites=2, trials=2))

    def test_without_pointmass_states(self):
        report = verify_theorem(3, TheoremConfig(lattice_sites=4, trials=3, pointmass_trials=0))
        assert report.passed
        assert "pointmass_take_momentum_branch" not in report.checks


class TestAssemblyVarianceTheorems:
    def test_theorem_5(self):
        report = verify_theorem(5, TheoremConfig(lattice_sites=4, trials=4, particle_counts=(2, 3)))
        assert report.passed, report.failures()
        assert report.checks["witness_identity"]
        assert report.checks["two_particles_match_rprime"]
        assert all(t.branch == "Q" for t in report.trials)
        for trial in report.trials:
            assert all(abs(e.witness) <= 1e-12 and not e.holds for e in trial.table if e.x == e.y)

    def test_theorem_6_pointmass_escape(self):
        report = verify_theorem(6, TheoremConfig(lattice_sites=4, trials=3, pointmass_trials=3, particle_counts=(3,)))
        assert report.passed, report.failures()
        assert report.checks["pointmass_fail_position"]
        assert report.checks["pointmass_pass_momentum"]
        pointmass = [t for t in report.trials if t.label.startswith("pointmass")]
        assert pointmass and all(t.relation is RelationKind.DPRIME_P for t in pointmass)
        assert "two_particles_match_rprime" not in report.checks

    def test_capacity(self, monkeypatch):
        monkeypatch.setenv("DISCERN_MAX_DIMENSION", "100")
        with pytest.raises(CapacityError):
            verify_theorem(5, TheoremConfig(lattice_sites=8, trials=1, particle_counts=(3,)))

    def test_explicit_bound_overrides_environment(self, monkeypatch):
        monkeypatch.setenv("DISCERN_MAX_DIMENSION", "100000")
        with pytest.raises(CapacityError):
            verify_theorem(1, TheoremConfig(lattice_sites=8, trials=1, max_dimension=16))

    def test_bad_environment_bound(self, monkeypatch):
        monkeypatch.setenv("DISCERN_MAX_DIMENSION", "abc")
        with pytest.raises(InvalidConfigurationError):
            verify_theorem(1, TheoremConfig(lattice_sites=4, trials=1))

    @pytest.mark.parametrize("bound", [0, -3])
    def test_bound_must_be_positive(self, bound):
        with pytest.raises(InvalidConfigurationError):
            TheoremConfig(max_dimension=bound)


class TestStructureTheorems:
    def test_fermions(self):
        report = verify_theorem("SMS1", TheoremConfig(trials=4, dimensions=(2, 3, 4)))
        assert report.passed, report.failures()
        assert report.values["t"] == -2.0
        assert all(a.overall is AuditVerdict.UNPHYSICAL and a.trivial for a in report.audits)
        assert {t.label for t in report.trials} == {"d=2", "d=3", "d=4"}

    def test_commutator(self):
        report = verify_theorem("SMS2", TheoremConfig(lattice_sites=8, trials=4))
        assert report.passed, report.failures()
        assert report.values["max_cross_witness"] <= 1e-12
        assert report.values["min_same_particle_witness"] > 1e-6
        assert any("lattice analogue" in note for note in report.metadata.notes)

    @pytest.mark.parametrize("spin", [0.5, 1.0, 1.5])
    @pytest.mark.parametrize("hbar", [1.0, 0.5])
    def test_spin(self, spin, hbar):
        report = verify_theorem("SMS3", TheoremConfig(spin=spin, hbar=hbar, trials=4))
        assert report.passed, report.failures()
        assert report.values["diagonal_value"] == pytest.approx(4 * spin * (spin + 1) * hbar**2)
        assert report.values["max_eigenvalue"] == pytest.approx(2 * spin * (2 * spin + 1) * hbar**2, abs=1e-9)
        assert report.values["min_eigenvalue"] == pytest.approx(0.0, abs=1e-9)

    def test_spin_zero(self):
        with pytest.raises(ContractError):
            verify_theorem("SMS3", TheoremConfig(spin=0.0, trials=1))


def test_every_theorem_has_a_script():
    config = TheoremConfig(lattice_sites=4, trials=2, pointmass_trials=1, particle_counts=(2,), dimensions=(2, 3))
    for theorem in THEOREM_IDS:
        assert verify_theorem(theorem, config).passed, theorem
