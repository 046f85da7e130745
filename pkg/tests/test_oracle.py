"""Exact-evolution oracle self-checks."""
import numpy as np
import pytest
from scipy.linalg import expm

from nuqsim.model import CouplingSchedule, HamiltonianSplit, NeutrinoModel, build_model
from nuqsim.oracle import OracleConfig, evolve_exact
from nuqsim.pauli import PauliSum, to_matrix
from nuqsim.statevector import Statevector, marginal_probability


MODEL = NeutrinoModel(2, 0.195, CouplingSchedule.constant(1.0))


def closed_form_final(model, t_span):
    h = to_matrix(model.hamiltonian().at(model.schedule.mu_at(0.0)))
    return expm(-1j * t_span * h) @ Statevector.zero(2).amplitudes


class TestRk4:
    def test_constant_hamiltonian_matches_closed_form(self):
        t_span = 3.0
        trajectory = evolve_exact(
            MODEL, None, Statevector.zero(2), 0.0, t_span, report_dt=t_span,
            config=OracleConfig(dt_inner=1e-3),
        )
        expected = closed_form_final(MODEL, t_span)
        assert np.max(np.abs(trajectory[-1].amplitudes - expected)) < 1e-9

    def test_diagonal_hamiltonian_leaves_basis_state_alone(self):
        model = NeutrinoModel(2, 0.0, CouplingSchedule.constant(0.0))
        trajectory = evolve_exact(model, None, Statevector.zero(2), 0.0, 10.0, 0.5)
        # survival is exactly 1 in exact arithmetic; the slack is pure RK4
        # amplitude-polynomial drift (|R(iy)| != 1), about 5e-12 here
        assert all(
            abs(marginal_probability(s, 0, 0) - 1.0) < 1e-10 for s in trajectory
        )

    def test_fourth_order_convergence(self):
        t_span = 2.0
        expected = closed_form_final(MODEL, t_span)
        dts = np.array([0.1, 0.05, 0.025, 0.0125])
        errs = []
        for dt in dts:
            final = evolve_exact(
                MODEL, None, Statevector.zero(2), 0.0, t_span, report_dt=t_span,
                config=OracleConfig(dt_inner=float(dt)),
            )[-1]
            errs.append(np.max(np.abs(final.amplitudes - expected)))
        slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
        assert 3.7 <= slope <= 4.3

    def test_norm_conserved_over_long_window(self):
        model = NeutrinoModel(2, 0.195, CouplingSchedule.supernova_profile(1.0, 200.0))
        trajectory = evolve_exact(model, None, Statevector.zero(2), 210.64, 310.0, 0.2)
        drift = max(abs(s.norm() - 1.0) for s in trajectory)
        assert drift < 1e-8

    def test_norm_abort_on_too_coarse_step(self):
        with pytest.raises(RuntimeError, match="norm drift"):
            evolve_exact(
                MODEL, None, Statevector.zero(2), 0.0, 40.0, report_dt=40.0,
                config=OracleConfig(dt_inner=0.4, norm_abort=1e-10),
            )


class TestExpmStep:
    def test_agrees_with_rk4_on_time_varying_coupling(self):
        model = NeutrinoModel(2, 0.195, CouplingSchedule.supernova_profile(1.0, 200.0))
        kwargs = dict(t_start=210.64, t_end=214.64, report_dt=0.2)
        rk4 = evolve_exact(model, None, Statevector.zero(2),
                           config=OracleConfig("rk4", 1e-3), **kwargs)
        exp = evolve_exact(model, None, Statevector.zero(2),
                           config=OracleConfig("expm_step", 1e-3), **kwargs)
        dev = max(
            np.max(np.abs(a.amplitudes - b.amplitudes)) for a, b in zip(rk4, exp)
        )
        assert dev < 1e-7


class TestConservation:
    def test_total_z_conserved_under_exchange_alone(self):
        n = 3
        split = HamiltonianSplit(PauliSum.zero(n), build_model(n, 0.1).exchange)
        z_total = to_matrix(
            PauliSum.from_dict(n, {"ZII": 1.0, "IZI": 1.0, "IIZ": 1.0})
        )
        rng = np.random.default_rng(4)
        amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        state = Statevector(amps / np.linalg.norm(amps))
        trajectory = evolve_exact(
            split, CouplingSchedule.constant(1.3), state, 0.0, 5.0, 0.5
        )
        values = [
            np.vdot(s.amplitudes, z_total @ s.amplitudes).real for s in trajectory
        ]
        assert max(abs(v - values[0]) for v in values) < 1e-8


class TestValidation:
    def test_dense_cap(self):
        model = NeutrinoModel(13, 0.1, CouplingSchedule.constant(1.0))
        with pytest.raises(ValueError):
            evolve_exact(model, None, Statevector.zero(13), 0.0, 1.0, 0.5)

    def test_needs_schedule(self):
        split = build_model(2, 0.1)
        with pytest.raises(ValueError):
            evolve_exact(split, None, Statevector.zero(2), 0.0, 1.0, 0.5)

    def test_bad_window(self):
        with pytest.raises(ValueError):
            evolve_exact(MODEL, None, Statevector.zero(2), 1.0, 1.0, 0.5)
