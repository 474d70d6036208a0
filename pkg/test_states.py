#!/usr/bin/env python3
"""
Tests for state constructors, seeded sampling and the state file format.
"""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from discernibility.config import LatticeConfig
from discernibility.exceptions import (
    ContractError,
    InvalidConfigurationError,
    ShapeError,
    StateParseError,
    StateValidationError,
)
from discernibility.hilbert import AssemblyState, embed_single, expectation
from discernibility.models import SectorLabel
from discernibility.observables import lattice_position
from discernibility.states import (
    STREAM_PROFILES,
    RandomSpec,
    StateFile,
    basis_state,
    correlated_boson_state,
    diagonal_pointmass,
    fourier_transform_state,
    from_state_file,
    load_state,
    product_state,
    random_profile,
    random_states,
    save_state,
    singlet,
    trial_rng,
)
from discernibility.symmetry import has_equal_reductions


class TestTrialRng:
    def test_same_key_same_stream(self):
        a = trial_rng(7, 3).standard_normal(5)
        b = trial_rng(7, 3).standard_normal(5)
        assert_allclose(a, b)

    def test_keys_are_independent(self):
        base = trial_rng(7, 3).standard_normal(5)
        assert not np.allclose(base, trial_rng(7, 4).standard_normal(5))
        assert not np.allclose(base, trial_rng(8, 3).standard_normal(5))
        assert not np.allclose(base, trial_rng(7, 3, STREAM_PROFILES).standard_normal(5))
        assert not np.allclose(base, trial_rng(7, 3, attempt=1).standard_normal(5))


class TestConstructors:
    def test_singlet(self):
        state = singlet()
        assert state.sector is SectorLabel.ANTISYMMETRIC
        assert_allclose(state.vector, np.array([0, 1, -1, 0]) / np.sqrt(2))

    def test_basis_state(self):
        state = basis_state([1, 0, 2], [2, 2, 3])
        assert state.dims == (2, 2, 3)
        assert state.vector[1 * 6 + 0 * 3 + 2] == 1.0
        with pytest.raises(ShapeError):
            basis_state([0], [2, 2])

    def test_product_state(self):
        plus = np.array([1, 1]) / np.sqrt(2)
        state = product_state([plus, [1.0, 0.0]])
        assert_allclose(state.vector, np.kron(plus, [1.0, 0.0]))

    def test_correlated_boson(self):
        plus = np.array([1, 1]) / np.sqrt(2)
        minus = np.array([1, -1]) / np.sqrt(2)
        state = correlated_boson_state([0.6, 0.8], [plus, minus])
        assert state.sector is SectorLabel.SYMMETRIC
        assert has_equal_reductions(state)

    def test_correlated_boson_rejects_bad_input(self):
        with pytest.raises(ContractError):
            correlated_boson_state([1.0, 1.0], np.eye(2))
        with pytest.raises(ContractError):
            correlated_boson_state([0.6, 0.8], [[1, 0], [1, 0]])


class TestPointMass:
    def test_support_is_diagonal(self):
        cfg = LatticeConfig(4)
        profile = random_profile(4, trial_rng(1, 0, STREAM_PROFILES))
        state = diagonal_pointmass(profile, cfg, 3)
        support = np.flatnonzero(np.abs(state.vector) > 0)
        assert [np.unravel_index(k, state.dims) for k in support] == [(x, x, x) for x in range(4)]
        assert state.sector is SectorLabel.SYMMETRIC

    def test_rejects_bad_profile(self):
        cfg = LatticeConfig(4)
        with pytest.raises(ContractError):
            diagonal_pointmass([1.0, 0, 0], cfg, 2)
        with pytest.raises(ContractError):
            diagonal_pointmass([1.0, 1.0, 0, 0], cfg, 2)

    def test_fourier_transform_exchanges_q_and_p(self):
        cfg = LatticeConfig(6)
        state = diagonal_pointmass(random_profile(6, trial_rng(2, 0, STREAM_PROFILES)), cfg, 2)
        transformed = fourier_transform_state(state, cfg)
        assert transformed.sector is SectorLabel.SYMMETRIC
        assert abs(np.linalg.norm(transformed.vector) - 1.0) < 1e-12
        # a single-site state becomes flat in the momentum basis
        local = basis_state([0], [6])
        flat = fourier_transform_state(local, cfg)
        assert_allclose(np.abs(flat.vector), np.full(6, 1 / np.sqrt(6)), atol=1e-12)

    def test_fourier_transform_needs_lattice_factors(self):
        with pytest.raises(ShapeError):
            fourier_transform_state(singlet(), LatticeConfig(3))


class TestRandomStates:
    @pytest.mark.parametrize("sector", list(SectorLabel))
    def test_sector_and_norm(self, sector):
        states = random_states(RandomSpec(seed=11, sector=sector, dims=(3, 3), count=5))
        assert len(states) == 5
        for state in states:
            assert state.sector is sector
            assert abs(np.linalg.norm(state.vector) - 1.0) < 1e-12

    def test_deterministic_per_trial(self):
        batch = random_states(RandomSpec(seed=5, sector=SectorLabel.SYMMETRIC, dims=(2, 2), count=4))
        single = random_states(RandomSpec(seed=5, sector=SectorLabel.SYMMETRIC, dims=(2, 2), start=2))
        assert_allclose(batch[2].vector, single[0].vector)

    def test_sector_states_have_zero_mean_difference(self):
        cfg = LatticeConfig(4)
        q = lattice_position(cfg)
        for state in random_states(RandomSpec(seed=3, sector=SectorLabel.ANTISYMMETRIC, dims=(4, 4), count=3)):
            diff = embed_single(q, 0, 2) - embed_single(q, 1, 2)
            assert expectation(state, diff.hermitized()) == pytest.approx(0.0, abs=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    def test_two_qubit_fermions_are_the_singlet_ray(self, seed):
        reference = singlet().vector
        for state in random_states(RandomSpec(seed=seed, sector=SectorLabel.ANTISYMMETRIC, dims=(2, 2), count=3)):
            assert abs(np.vdot(reference, state.vector)) == pytest.approx(1.0, abs=1e-12)

    def test_invalid_request(self):
        with pytest.raises(InvalidConfigurationError):
            RandomSpec(seed=1, sector=SectorLabel.FULL, dims=(2, 2), count=0)
        with pytest.raises(InvalidConfigurationError):
            RandomSpec(seed=-1, sector=SectorLabel.FULL, dims=(2, 2))


class TestStateFiles:
    def test_pure_round_trip(self, tmp_path):
        path = tmp_path / "singlet.json"
        save_state(singlet(), path)
        loaded = load_state(path)
        assert loaded.sector is SectorLabel.ANTISYMMETRIC
        assert_allclose(loaded.vector, singlet().vector)

    def test_mixed_round_trip(self, tmp_path):
        path = tmp_path / "mixed.json"
        state = AssemblyState.mixed([(0.25, np.eye(4)[0]), (0.75, np.eye(4)[3])], (2, 2))
        save_state(state, path)
        loaded = load_state(path)
        assert not loaded.is_pure
        assert loaded.weights == pytest.approx((0.25, 0.75))
        assert_allclose(loaded.density_matrix(), state.density_matrix())

    def test_file_layout(self, tmp_path):
        path = tmp_path / "state.json"
        save_state(basis_state([0, 1], [2, 2]), path)
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["format"] == "discernibility-state/1"
        assert data["ordering"] == "row-major-last-factor-fastest"
        assert data["amplitudes"][1] == [1.0, 0.0]

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(StateParseError):
            load_state(path)

    def test_wrong_amplitude_count(self, tmp_path):
        path = tmp_path / "short.json"
        path.write_text(json.dumps({"dims": [2, 2], "kind": "pure", "amplitudes": [[1, 0], [0, 0]]}),
                        encoding="utf-8")
        with pytest.raises(StateParseError, match="amplitudes"):
            load_state(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(StateParseError):
            load_state(tmp_path / "absent.json")

    def test_non_unit_norm(self, tmp_path):
        path = tmp_path / "norm.json"
        path.write_text(json.dumps({"dims": [2], "kind": "pure", "amplitudes": [[1, 0], [1, 0]]}),
                        encoding="utf-8")
        with pytest.raises(StateValidationError):
            load_state(path)

    def test_false_sector_tag(self, tmp_path):
        path = tmp_path / "tag.json"
        data = {"dims": [2, 2], "sector": "symmetric", "kind": "pure",
                "amplitudes": [[0, 0], [1, 0], [0, 0], [0, 0]]}
        path.write_text(json.dumps(data), encoding="utf-8")
        with pytest.raises(StateValidationError):
            load_state(path)

    def test_non_finite_amplitude_model(self):
        model = StateFile(dims=[2], kind="pure", amplitudes=[(float("nan"), 0.0), (0.0, 0.0)])
        with pytest.raises(ContractError):
            from_state_file(model)

    @pytest.mark.parametrize("bad", ["NaN", "Infinity"])
    def test_non_finite_amplitude_file(self, tmp_path, bad):
        path = tmp_path / "nan.json"
        path.write_text(f'{{"dims": [2], "kind": "pure", "amplitudes": [[{bad}, 0], [0, 0]]}}', encoding="utf-8")
        with pytest.raises((StateParseError, StateValidationError)):
            load_state(path)

    def test_non_finite_weight_file(self, tmp_path):
        path = tmp_path / "weights.json"
        path.write_text(
            '{"dims": [2], "kind": "mixed", "components": ['
            '{"weight": NaN, "amplitudes": [[1, 0], [0, 0]]}, '
            '{"weight": 1.0, "amplitudes": [[0, 0], [1, 0]]}]}',
            encoding="utf-8",
        )
        with pytest.raises((StateParseError, StateValidationError)):
            load_state(path)

    def test_non_utf8_file(self, tmp_path):
        path = tmp_path / "binary.json"
        path.write_bytes(b'{"dims": [2], "kind": "\xff\xfe"}')
        with pytest.raises(StateParseError, match="UTF-8"):
            load_state(path)
