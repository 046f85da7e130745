"""Hamiltonian construction, coupling schedules, and flavor encoding."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nuqsim.model import (
    CouplingSchedule,
    HamiltonianSplit,
    NeutrinoModel,
    build_model,
    initial_flavor_state,
    mu_at,
)
from nuqsim.pauli import PauliSum, commutator, to_matrix


class TestBuildModel:
    def test_two_neutrino_coefficients(self):
        theta = 0.37
        split = build_model(2, theta)
        s, c = math.sin(theta), math.cos(theta)
        assert np.isclose(split.vacuum.coefficient("XI"), 0.5 * s)
        assert np.isclose(split.vacuum.coefficient("ZI"), -0.5 * c)
        assert np.isclose(split.vacuum.coefficient("IX"), s)
        assert np.isclose(split.vacuum.coefficient("IZ"), -c)
        for labels in ("XX", "YY", "ZZ"):
            assert np.isclose(split.exchange.coefficient(labels), 0.5)
        assert len(split.exchange) == 3

    def test_zero_angle_gives_diagonal_vacuum_part(self):
        split = build_model(2, 0.0)
        assert all(set(t.string.labels) <= {"I", "Z"} for t in split.vacuum)

    def test_four_neutrino_exchange_term_count_and_hermiticity(self):
        split = build_model(4, 0.6)
        assert len(split.exchange) == 18  # 3 * C(4,2)
        assert all(np.isclose(t.coeff, 0.5) for t in split.exchange)
        h = to_matrix(split.vacuum + 0.8 * split.exchange)
        assert np.max(np.abs(h - h.conj().T)) < 1e-12

    def test_input_validation(self):
        with pytest.raises(ValueError):
            build_model(1, 0.1)
        with pytest.raises(ValueError):
            build_model(2, math.pi / 2)

    @given(
        st.floats(0, math.pi / 2, exclude_max=True),
        st.floats(0, 10, allow_nan=False),
    )
    @settings(max_examples=50, deadline=None)
    def test_hamiltonian_always_hermitian(self, theta, mu):
        split = build_model(3, theta)
        h = to_matrix(split.at(mu))
        assert np.max(np.abs(h - h.conj().T)) < 1e-12

    def test_exchange_conserves_total_z(self):
        split = build_model(3, 0.5)
        total_z = PauliSum.from_dict(3, {"ZII": 1.0, "IZI": 1.0, "IIZ": 1.0})
        assert commutator(split.exchange, total_z).is_zero()

    def test_frequencies_scale_with_bin_index(self):
        model = NeutrinoModel(3, 0.2, CouplingSchedule.constant(1.0))
        assert model.frequencies == (1.0, 2.0, 3.0)

    def test_split_register_mismatch(self):
        with pytest.raises(ValueError):
            HamiltonianSplit(PauliSum.zero(2), PauliSum.zero(3))


class TestCouplingSchedule:
    def test_constant(self):
        sched = CouplingSchedule.constant(1.0)
        assert mu_at(sched, 0.0) == 1.0
        assert mu_at(sched, 1e6) == 1.0

    def test_profile_at_emission_radius(self):
        sched = CouplingSchedule.supernova_profile(3.5, 50.0)
        assert np.isclose(sched.mu_at(50.0), 3.5)

    def test_profile_at_twice_radius(self):
        mu0, rnu = 2.0, 80.0
        sched = CouplingSchedule.supernova_profile(mu0, rnu)
        expected = mu0 * (1 - math.sqrt(3) / 2) ** 2
        assert np.isclose(sched.mu_at(2 * rnu), expected)

    def test_profile_decreases(self):
        sched = CouplingSchedule.supernova_profile(1.0, 100.0)
        values = [sched.mu_at(t) for t in (100.0, 150.0, 300.0, 1000.0)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_profile_rejects_inside_radius(self):
        sched = CouplingSchedule.supernova_profile(1.0, 100.0)
        with pytest.raises(ValueError):
            sched.mu_at(99.0)

    def test_tabulated_interpolates(self):
        sched = CouplingSchedule.tabulated([0.0, 1.0, 2.0], [1.0, 3.0, 3.0])
        assert np.isclose(sched.mu_at(0.5), 2.0)
        with pytest.raises(ValueError):
            sched.mu_at(2.5)

    def test_tabulated_requires_increasing_times(self):
        with pytest.raises(ValueError):
            CouplingSchedule.tabulated([0.0, 0.0], [1.0, 1.0])

    def test_negative_mu_rejected(self):
        with pytest.raises(ValueError):
            CouplingSchedule.constant(-1.0)


class TestInitialState:
    def test_all_electron_flavor(self):
        state = initial_flavor_state(2, ["e", "e"])
        assert np.allclose(state.amplitudes, [1, 0, 0, 0])

    def test_all_x_flavor(self):
        state = initial_flavor_state(2, ["x", "x"])
        assert np.allclose(state.amplitudes, [0, 0, 0, 1])

    def test_four_electron_string_form(self):
        state = initial_flavor_state(4, "eeee")
        assert state.amplitudes[0] == 1.0

    def test_length_and_label_validation(self):
        with pytest.raises(ValueError):
            initial_flavor_state(2, ["e"])
        with pytest.raises(ValueError):
            initial_flavor_state(2, ["e", "mu"])
