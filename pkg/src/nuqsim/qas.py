"""Quantum-assisted simulator: one-shot overlap estimation + classical ODE.

The hybrid algorithm expands the evolving state in a fixed basis of
states P_i |psi0>, where the generator strings P_i come from the
nested-commutator closure of the two Hamiltonian parts (the reachable-set
argument of quantum control).  The quantum device is needed exactly once,
to estimate three matrices over that basis:

    gram_ij     = <basis_i | basis_j>
    vacuum_ij   = <basis_i | H_vacuum | basis_j>
    exchange_ij = <basis_i | H_exchange | basis_j>

Because each basis state is a Pauli string applied to |psi0>, every matrix
element reduces to a phase times <psi0| S |psi0> for a single Pauli string
S, measurable by a Hadamard test (real and imaginary parts).  The
time-dependent matrix never needs re-measurement: D(t) = vacuum +
mu(t) * exchange is assembled classically at integration time.

The coefficient vector c(t) of the expansion then follows the variational
equation of motion

    gram . dc/dt = -i (vacuum + mu(t) exchange) . c

integrated classically (RK4 by default; plain forward Euler available).
There is no classical feedback loop: once the matrices exist, propagation
touches only numpy.  ``statevector.hadamard_test_invocations()`` lets
callers audit that contract.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import CouplingSchedule, HamiltonianSplit
from .pauli import PauliString, PauliSum, multiply, nested_commutator_closure
from .statevector import (
    Circuit,
    Statevector,
    apply_pauli,
    hadamard_test,
    marginal_probability,
)

__all__ = [
    "QasBasis",
    "OverlapMatrices",
    "CoefficientTrajectory",
    "build_basis",
    "estimate_overlaps",
    "propagate_coefficients",
    "survival_probability",
]


def _generator_order(s: PauliString) -> str:
    # qubit-0-major ordering: X0 ("XI") sorts before X1 ("IX")
    return s.labels[::-1]


@dataclass(frozen=True)
class QasBasis:
    """Expansion basis: generator strings and the states they produce."""

    generators: tuple[PauliString, ...]
    states: tuple[Statevector, ...]
    moment_order: int
    psi0: Statevector

    def __post_init__(self) -> None:
        if not self.generators:
            raise ValueError("empty basis")
        if len(self.generators) != len(self.states):
            raise ValueError("generator/state count mismatch")
        if not self.generators[0].is_identity():
            raise ValueError("basis must start with the identity generator")

    def __len__(self) -> int:
        return len(self.generators)


def build_basis(
    split: HamiltonianSplit,
    psi0: Statevector,
    moment_order: int = 1,
    reduce: bool = True,
    closure_depth: int = 12,
    max_basis: int = 256,
) -> QasBasis:
    """Cumulative K-moment basis from the closure of the Hamiltonian parts.

    The generator pool is the nested-commutator closure string set
    (identity included).  For ``moment_order`` K > 1 the pool is raised to
    products of up to K strings (phases stripped; only the state matters).
    With ``reduce`` on, generators whose states coincide up to a phase are
    collapsed onto the first representative in qubit-0-major order, which
    on a computational-basis psi0 keeps exactly one generator per reachable
    bitstring.
    """
    if moment_order < 1:
        raise ValueError("moment order must be >= 1")
    n = split.n_qubits
    if psi0.dim != 2**n:
        raise ValueError("psi0 does not match the register")
    closure = nested_commutator_closure(
        split.vacuum, split.exchange, closure_depth, max_strings=max_basis * 64
    )
    pool = sorted(closure.strings, key=_generator_order)
    candidates = list(pool)
    seen = set(candidates)
    for _ in range(1, moment_order):
        grown = []
        for a in candidates:
            for b in pool:
                _, s = multiply(a, b)
                if s not in seen:
                    seen.add(s)
                    grown.append(s)
        candidates.extend(grown)
    candidates.sort(key=_generator_order)

    generators: list[PauliString] = []
    states: list[Statevector] = []
    for gen in candidates:
        state = apply_pauli(gen, psi0)
        if reduce:
            dup = any(abs(state.inner(kept)) > 1.0 - 1e-10 for kept in states)
            if dup:
                continue
        generators.append(gen)
        states.append(state)
        if len(generators) > max_basis:
            raise ValueError(f"basis exceeded the cap of {max_basis} states")
    return QasBasis(tuple(generators), tuple(states), moment_order, psi0)


@dataclass(frozen=True)
class OverlapMatrices:
    """The three one-shot matrices over the basis.

    ``gram`` holds the basis overlaps, ``vacuum`` and ``exchange`` the
    matrix elements of the two Hamiltonian parts; the full D(t) is
    vacuum + mu(t) * exchange.  ``hermiticity_error`` records the largest
    deviation max(|M - M^dagger|) seen across the three at estimation
    time (zero up to rounding for the exact backend, shot noise for the
    sampled one).
    """

    gram: np.ndarray
    vacuum: np.ndarray
    exchange: np.ndarray
    backend: str
    shots: int | None = None
    hermiticity_error: float = 0.0

    @property
    def size(self) -> int:
        return self.gram.shape[0]

    def d_at(self, mu: float) -> np.ndarray:
        return self.vacuum + mu * self.exchange


def _prep_circuit_for(psi0: Statevector) -> Circuit:
    """X-gate preparation circuit, valid only for basis states."""
    amps = psi0.amplitudes
    hot = np.flatnonzero(np.abs(amps) > 1e-12)
    if len(hot) != 1 or abs(amps[hot[0]] - 1.0) > 1e-12:
        raise ValueError(
            "cannot derive a preparation circuit for a non-basis psi0; "
            "pass prep= explicitly"
        )
    index = int(hot[0])
    n = psi0.n_qubits
    circuit = Circuit(n)
    for q in range(n):
        if (index >> q) & 1:
            circuit.x(q)
    return circuit


def estimate_overlaps(
    basis: QasBasis,
    split: HamiltonianSplit,
    backend: str = "exact",
    shots: int = 1024,
    rng_seed: int = 0,
    prep: Circuit | None = None,
    hermiticity_tol: float | None = None,
) -> OverlapMatrices:
    """Estimate the gram/vacuum/exchange matrices; the one quantum pass.

    ``backend="exact"`` computes analytic matrix elements; ``"hadamard"``
    runs a real-part and an imaginary-part Hadamard test per distinct
    Pauli string (each with ``shots`` samples and a seed derived from
    ``rng_seed``), reusing the estimate wherever the same string reappears,
    exactly as a device run would reuse the same measured circuit.

    A non-Hermitian result beyond the noise bound is flagged with a
    warning and recorded on the result; it is never silently symmetrized.
    """
    if backend not in ("exact", "hadamard"):
        raise ValueError(f"unknown backend {backend!r}")
    n = split.n_qubits
    psi0 = basis.psi0
    if backend == "hadamard" and prep is None:
        prep = _prep_circuit_for(psi0)

    cache: dict[PauliString, complex] = {}
    counter = 0

    def expectation(string: PauliString) -> complex:
        nonlocal counter
        if string in cache:
            return cache[string]
        if backend == "exact":
            value = psi0.inner(apply_pauli(string, psi0))
        else:
            re = hadamard_test(prep, string, "real", shots, rng_seed + 2 * counter)
            im = hadamard_test(prep, string, "imag", shots, rng_seed + 2 * counter + 1)
            counter += 1
            value = complex(re, im)
        cache[string] = value
        return value

    m = len(basis)
    gram = np.zeros((m, m), dtype=complex)
    vac = np.zeros((m, m), dtype=complex)
    exc = np.zeros((m, m), dtype=complex)

    def sandwich(left: PauliString, middle: PauliSum, right: PauliString) -> complex:
        total = 0j
        for term in middle:
            ph1, a = multiply(left, term.string)
            ph2, b = multiply(a, right)
            total += term.coeff * ph1 * ph2 * expectation(b)
        return total

    for i, gi in enumerate(basis.generators):
        for j, gj in enumerate(basis.generators):
            # Pauli strings are self-adjoint, so <psi_i| = <psi0| P_i
            phase, s = multiply(gi, gj)
            gram[i, j] = phase * expectation(s)
            vac[i, j] = sandwich(gi, split.vacuum, gj)
            exc[i, j] = sandwich(gi, split.exchange, gj)

    herm = max(
        float(np.max(np.abs(mat - mat.conj().T))) for mat in (gram, vac, exc)
    )
    if hermiticity_tol is None:
        hermiticity_tol = 1e-10 if backend == "exact" else 10.0 / np.sqrt(shots)
    if herm > hermiticity_tol:
        warnings.warn(
            f"overlap matrices deviate from Hermitian by {herm:.3e} "
            f"(bound {hermiticity_tol:.3e})",
            stacklevel=2,
        )
    return OverlapMatrices(
        gram=gram,
        vacuum=vac,
        exchange=exc,
        backend=backend,
        shots=shots if backend == "hadamard" else None,
        hermiticity_error=herm,
    )


@dataclass(frozen=True)
class CoefficientTrajectory:
    """Recorded expansion coefficients c(t) on the integration grid."""

    times: np.ndarray
    coeffs: np.ndarray  # shape (len(times), basis size)

    def __post_init__(self) -> None:
        if self.coeffs.shape[0] != self.times.shape[0]:
            raise ValueError("times/coeffs length mismatch")

    def __len__(self) -> int:
        return len(self.times)


def propagate_coefficients(
    overlaps: OverlapMatrices,
    schedule: CouplingSchedule,
    c0: np.ndarray,
    t_start: float,
    t_end: float,
    dt: float,
    method: str = "rk4",
    renormalize: bool = True,
    record_every: int = 1,
    singular_cutoff: float = 1e-10,
) -> CoefficientTrajectory:
    """Integrate gram . dc/dt = -i (vacuum + mu(t) exchange) . c.

    The gram matrix is inverted once by pseudo-inverse with singular values
    below ``singular_cutoff`` (relative) treated as rank deficiency, since
    moment bases are generically linearly dependent before reduction.  By
    default the coefficient norm sqrt(c^dag gram c) is reset to 1 after
    every step, containing integration drift; turn ``renormalize`` off to
    observe the raw drift.  ``method="euler"`` applies the plain first
    order update c += dc/dt * dt.

    Every ``record_every``-th state lands in the returned trajectory
    (t_start always included), so callers can integrate on a fine grid but
    record on a coarse reporting grid.
    """
    if method not in ("rk4", "euler"):
        raise ValueError(f"unknown integrator {method!r}")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end <= t_start:
        raise ValueError("t_end must exceed t_start")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    m = overlaps.size
    c = np.asarray(c0, dtype=complex).copy()
    if c.shape != (m,):
        raise ValueError(f"coefficient vector must have shape ({m},)")

    gram_inv = np.linalg.pinv(overlaps.gram, rcond=singular_cutoff)
    a_vac = gram_inv @ overlaps.vacuum
    a_exc = gram_inv @ overlaps.exchange

    def deriv(t: float, vec: np.ndarray) -> np.ndarray:
        return -1j * ((a_vac + schedule.mu_at(t) * a_exc) @ vec)

    steps = int(round((t_end - t_start) / dt))
    times = [t_start]
    recorded = [c.copy()]
    for k in range(steps):
        t = t_start + k * dt
        if method == "rk4":
            k1 = deriv(t, c)
            k2 = deriv(t + dt / 2, c + dt / 2 * k1)
            k3 = deriv(t + dt / 2, c + dt / 2 * k2)
            k4 = deriv(t + dt, c + dt * k3)
            c = c + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        else:
            c = c + dt * deriv(t, c)
        if not np.all(np.isfinite(c)):
            raise RuntimeError(f"coefficients diverged at t={t + dt:.4f}")
        if renormalize:
            nrm = np.sqrt(abs(np.real(np.conj(c) @ overlaps.gram @ c)))
            if nrm < 1e-12:
                raise RuntimeError(f"coefficient norm collapsed at t={t + dt:.4f}")
            c = c / nrm
        if (k + 1) % record_every == 0 or k == steps - 1:
            times.append(t_start + (k + 1) * dt)
            recorded.append(c.copy())
    return CoefficientTrajectory(np.array(times), np.array(recorded))


def survival_probability(
    basis: QasBasis,
    coeffs: np.ndarray,
    qubit: int = 0,
    outcome: int = 0,
    norm_tol: float = 1e-3,
) -> float:
    """Flavor survival probability of the reconstructed expansion state.

    Rebuilds sum_i c_i |basis_i> densely and takes the single-qubit
    marginal.  The reconstruction norm must sit within ``norm_tol`` of 1;
    a larger violation means the coefficients no longer describe a
    physical state.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (len(basis),):
        raise ValueError(f"need {len(basis)} coefficients")
    amps = np.zeros(basis.psi0.dim, dtype=complex)
    for c, state in zip(coeffs, basis.states):
        amps += c * state.amplitudes
    nrm = np.linalg.norm(amps)
    if abs(nrm - 1.0) > norm_tol:
        raise ValueError(f"reconstructed state norm {nrm:.6f} violates tolerance")
    return marginal_probability(Statevector(amps / nrm), qubit, outcome)
