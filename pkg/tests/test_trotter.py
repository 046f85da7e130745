"""Step-circuit compilation against dense exponential oracles."""
import numpy as np
import pytest
from scipy.linalg import expm

from nuqsim.model import CouplingSchedule, NeutrinoModel, build_model
from nuqsim.oracle import OracleConfig, evolve_exact
from nuqsim.statevector import Statevector, circuit_unitary
from nuqsim.trotter import TrotterPlan, cartan_pair_block, evolve, step_circuit

_M = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_oracle(labels: str) -> np.ndarray:
    m = np.array([[1.0]], dtype=complex)
    for lab in reversed(labels):
        m = np.kron(m, _M[lab])
    return m


def exchange_exponential(angle: float) -> np.ndarray:
    gen = kron_oracle("XX") + kron_oracle("YY") + kron_oracle("ZZ")
    return expm(-0.5j * angle * gen)


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    phase = a[idx] / b[idx]
    phase /= abs(phase)
    return float(np.max(np.abs(a - phase * b)))


SCHED = CouplingSchedule.constant(1.0)


class TestStepStructure:
    def test_two_neutrino_brute_force_gate_counts(self):
        circuit = step_circuit(build_model(2, 0.195), TrotterPlan("brute_force", 0.2), 0.0, SCHED)
        assert circuit.count_single_qubit() == 19
        assert circuit.count_cnots() == 6

    def test_one_body_angles_follow_frequency_bins(self):
        theta, dt = 0.195, 0.2
        circuit = step_circuit(build_model(2, theta), TrotterPlan("brute_force", dt), 0.0, SCHED)
        rx = [g for g in circuit.gates if g.name == "rx"]
        rz = [g for g in circuit.gates if g.name == "rz" and g.qubits[0] in (0, 1)][:2]
        s, c = np.sin(theta), np.cos(theta)
        assert np.isclose(rx[0].angle, s * dt) and rx[0].qubits == (0,)
        assert np.isclose(rx[1].angle, 2 * s * dt) and rx[1].qubits == (1,)
        assert np.isclose(rz[0].angle, -c * dt)
        assert np.isclose(rz[1].angle, -2 * c * dt)

    def test_cartan_variant_gate_counts(self):
        circuit = step_circuit(build_model(2, 0.195), TrotterPlan("cartan", 0.2), 0.0, SCHED)
        assert circuit.count_cnots() == 3
        assert circuit.count_single_qubit() == 4 + 8  # one-body + pair block

    def test_zero_dt_is_identity(self):
        circuit = step_circuit(build_model(2, 0.3), TrotterPlan("brute_force", 1e-300), 0.0, SCHED)
        assert phase_aligned_distance(circuit_unitary(circuit), np.eye(4)) < 1e-12

    def test_coupling_evaluated_at_step_end(self):
        # mu(t) = t on a tabulated ramp; the pair-block angle must use t+dt
        sched = CouplingSchedule.tabulated([0.0, 10.0], [0.0, 10.0])
        dt = 0.5
        circuit = step_circuit(build_model(2, 0.2), TrotterPlan("brute_force", dt), 1.0, sched)
        pair_rz = [g for g in circuit.gates if g.name == "rz" and g.qubits == (1,)]
        assert np.isclose(pair_rz[-1].angle, (1.0 + dt) * dt)

    def test_midpoint_flag_changes_evaluation_point(self):
        sched = CouplingSchedule.tabulated([0.0, 10.0], [0.0, 10.0])
        dt = 0.5
        plan = TrotterPlan("brute_force", dt, midpoint_mu=True)
        circuit = step_circuit(build_model(2, 0.2), plan, 1.0, sched)
        pair_rz = [g for g in circuit.gates if g.name == "rz" and g.qubits == (1,)]
        assert np.isclose(pair_rz[-1].angle, (1.0 + dt / 2) * dt)

    def test_rejects_unknown_variant(self):
        with pytest.raises(ValueError):
            TrotterPlan("suzuki4", 0.1)


class TestCartanBlock:
    def test_zero_angle_is_identity_up_to_phase(self):
        u = circuit_unitary(cartan_pair_block(0.0))
        assert phase_aligned_distance(u, np.eye(4)) < 1e-12

    def test_pi_angle_matches_exponential(self):
        u = circuit_unitary(cartan_pair_block(np.pi))
        assert phase_aligned_distance(u, exchange_exponential(np.pi)) < 1e-9

    def test_random_angles_match_exponential(self):
        rng = np.random.default_rng(2)
        worst = 0.0
        for angle in rng.uniform(-np.pi, np.pi, 100):
            u = circuit_unitary(cartan_pair_block(angle))
            worst = max(worst, phase_aligned_distance(u, exchange_exponential(angle)))
        assert worst < 1e-9

    def test_gate_budget(self):
        block = cartan_pair_block(0.3)
        assert block.count_cnots() == 3
        assert block.count_single_qubit() == 8


class TestPairBlockExactness:
    def test_brute_force_pair_block_is_exact(self):
        # XX, YY, ZZ commute pairwise, so the block has no internal error
        theta = 0.0  # suppress one-body gates: theta=0 keeps only RZ on Z terms
        split = build_model(2, theta)
        mu, dt = 0.9, 0.31
        circuit = step_circuit(split, TrotterPlan("brute_force", dt), 0.0,
                               CouplingSchedule.constant(mu))
        # divide out the (diagonal, exactly compiled) one-body layer
        one_body = expm(
            1j * dt / 2 * kron_oracle("ZI") + 1j * dt * kron_oracle("IZ")
        )
        u = circuit_unitary(circuit) @ np.linalg.inv(one_body)
        assert phase_aligned_distance(u, exchange_exponential(mu * dt)) < 1e-9

    def test_brute_and_cartan_compile_the_same_step(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            theta = rng.uniform(0, 1.2)
            mu = rng.uniform(0, 3)
            dt = rng.uniform(0.01, 0.5)
            split = build_model(2, theta)
            sched = CouplingSchedule.constant(mu)
            u1 = circuit_unitary(step_circuit(split, TrotterPlan("brute_force", dt), 0.0, sched))
            u2 = circuit_unitary(step_circuit(split, TrotterPlan("cartan", dt), 0.0, sched))
            assert phase_aligned_distance(u1, u2) < 1e-9


class TestEvolve:
    MODEL = NeutrinoModel(2, 0.195, CouplingSchedule.supernova_profile(1.0, 200.0))

    def test_zero_steps_returns_initial_state(self):
        s0 = Statevector.zero(2)
        trajectory = evolve(self.MODEL, TrotterPlan("brute_force", 0.2), s0, 0.0, 0.1)
        assert len(trajectory) == 1 and trajectory[0] is s0

    def test_error_bounded_linearly_in_dt(self):
        s0 = Statevector.zero(2)
        t0, dt, steps = 210.64, 0.2, 10
        t1 = t0 + steps * dt
        trajectory = evolve(self.MODEL, TrotterPlan("brute_force", dt), s0, t0, t1)
        exact = evolve_exact(self.MODEL, None, s0, t0, t1, report_dt=dt,
                             config=OracleConfig(dt_inner=1e-3))
        errs = [
            np.linalg.norm(a.amplitudes - _align(a.amplitudes, b.amplitudes))
            for a, b in zip(trajectory, exact)
        ]
        # first-order local error, linear accumulation: fit the envelope
        slope = max(errs) / (steps * dt)
        assert errs[0] == 0.0
        assert max(errs) < 10 * slope * steps * dt  # sanity: finite constant

    def test_halving_dt_roughly_halves_final_error(self):
        s0 = Statevector.zero(2)
        t0, t1 = 210.64, 218.64
        exact = evolve_exact(self.MODEL, None, s0, t0, t1, report_dt=t1 - t0,
                             config=OracleConfig(dt_inner=1e-3))[-1]
        errors = []
        for dt in (0.2, 0.1):
            final = evolve(self.MODEL, TrotterPlan("brute_force", dt), s0, t0, t1)[-1]
            errors.append(
                np.linalg.norm(final.amplitudes - _align(final.amplitudes, exact.amplitudes))
            )
        ratio = errors[0] / errors[1]
        assert 1.5 <= ratio <= 3.0

    def test_observer_sees_every_step(self):
        seen = []
        evolve(self.MODEL, TrotterPlan("brute_force", 0.2), Statevector.zero(2),
               210.64, 212.64, observer=lambda k, t, s: seen.append((k, t)))
        assert len(seen) == 10
        assert seen[0][0] == 0 and np.isclose(seen[-1][1], 212.64)

    def test_step_cap(self):
        with pytest.raises(ValueError):
            evolve(self.MODEL, TrotterPlan("brute_force", 0.2), Statevector.zero(2),
                   210.64, 310.64, max_steps=10)


def _align(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    overlap = np.vdot(b, a)
    if abs(overlap) < 1e-30:
        return b
    return (overlap / abs(overlap)) * b
