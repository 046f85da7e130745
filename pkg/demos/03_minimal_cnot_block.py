"""The minimal-CNOT exchange block and what it buys.

The exchange interaction exp(-i a (XX+YY+ZZ)/2) compiles brute-force into
three CNOT-RZ-CNOT cores (6 CNOTs, 15 single-qubit gates).  A Cartan-style
two-qubit synthesis does the same job with 3 CNOTs and 8 single-qubit
gates, roughly halving the entangling-gate count; on an ideal simulator
both evolve identically, which this script verifies.
"""
import numpy as np
from scipy.linalg import expm

from nuqsim import (
    CouplingSchedule,
    NeutrinoModel,
    TrotterPlan,
    cartan_pair_block,
    circuit_unitary,
    evolve,
    initial_flavor_state,
    marginal_probability,
    step_circuit,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
EXCHANGE = np.kron(X, X) + np.kron(Y, Y) + np.kron(Z, Z)

print("=== gate budget per pair block ===")
split = NeutrinoModel(2, 0.195, CouplingSchedule.constant(1.0)).hamiltonian()
for variant in ("brute_force", "cartan"):
    c = step_circuit(split, TrotterPlan(variant, 0.2), 0.0,
                     CouplingSchedule.constant(1.0))
    print(f"  {variant:12s}: {c.count_single_qubit():2d} single-qubit, "
          f"{c.count_cnots()} CNOT (full two-neutrino step)")

print("\n=== equivalence to the dense exponential ===")
rng = np.random.default_rng(0)
worst = 0.0
for angle in rng.uniform(-np.pi, np.pi, 200):
    u = circuit_unitary(cartan_pair_block(angle))
    target = expm(-0.5j * angle * EXCHANGE)
    ref = np.unravel_index(np.argmax(np.abs(target)), target.shape)
    phase = u[ref] / target[ref]
    worst = max(worst, np.max(np.abs(u - (phase / abs(phase)) * target)))
print(f"  worst phase-aligned deviation over 200 angles: {worst:.2e}")

print("\n=== identical trajectories on a noiseless simulator ===")
model = NeutrinoModel(2, 0.195, CouplingSchedule.supernova_profile(1.0, 200.0))
psi0 = initial_flavor_state(2, "ee")
t0, t1 = 210.64, 260.64
a = evolve(model, TrotterPlan("brute_force", 0.2), psi0, t0, t1)
b = evolve(model, TrotterPlan("cartan", 0.2), psi0, t0, t1)
gap = max(abs(marginal_probability(x, 0, 0) - marginal_probability(y, 0, 0))
          for x, y in zip(a, b))
print(f"  max survival-probability gap over {len(a) - 1} steps: {gap:.2e}")
print("  the advantage of fewer CNOTs appears only under hardware noise")
