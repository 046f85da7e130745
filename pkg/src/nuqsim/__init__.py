"""Collective neutrino oscillations on a simulated quantum computer.

The package splits into an exact Pauli algebra (:mod:`nuqsim.pauli`), a
dense statevector simulator (:mod:`nuqsim.statevector`), the neutrino
Hamiltonian (:mod:`nuqsim.model`), step-circuit compilation
(:mod:`nuqsim.trotter`), the hybrid quantum-assisted propagator
(:mod:`nuqsim.qas`), a classical exact-evolution oracle
(:mod:`nuqsim.oracle`), and the experiment orchestrator behind the
``simulate`` command (:mod:`nuqsim.cli`).
"""
from .model import (
    CouplingSchedule,
    HamiltonianSplit,
    NeutrinoModel,
    build_model,
    initial_flavor_state,
    mu_at,
)
from .oracle import OracleConfig, evolve_exact
from .pauli import (
    ClosureResult,
    PauliString,
    PauliSum,
    PauliTerm,
    commutator,
    multiply,
    nested_commutator_closure,
    to_matrix,
)
from .qas import (
    CoefficientTrajectory,
    OverlapMatrices,
    QasBasis,
    build_basis,
    estimate_overlaps,
    propagate_coefficients,
    survival_probability,
)
from .statevector import (
    Circuit,
    Gate,
    Statevector,
    apply,
    apply_pauli,
    circuit_unitary,
    hadamard_test,
    hadamard_test_invocations,
    marginal_probability,
    sample_counts,
)
from .trotter import TrotterPlan, cartan_pair_block, evolve, step_circuit

__version__ = "0.1.0"

__all__ = [
    "CouplingSchedule",
    "HamiltonianSplit",
    "NeutrinoModel",
    "build_model",
    "initial_flavor_state",
    "mu_at",
    "OracleConfig",
    "evolve_exact",
    "ClosureResult",
    "PauliString",
    "PauliSum",
    "PauliTerm",
    "commutator",
    "multiply",
    "nested_commutator_closure",
    "to_matrix",
    "CoefficientTrajectory",
    "OverlapMatrices",
    "QasBasis",
    "build_basis",
    "estimate_overlaps",
    "propagate_coefficients",
    "survival_probability",
    "Circuit",
    "Gate",
    "Statevector",
    "apply",
    "apply_pauli",
    "circuit_unitary",
    "hadamard_test",
    "hadamard_test_invocations",
    "marginal_probability",
    "sample_counts",
    "TrotterPlan",
    "cartan_pair_block",
    "evolve",
    "step_circuit",
    "__version__",
]
