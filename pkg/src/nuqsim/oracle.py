"""Classical ground truth: dense integration of the Schrodinger equation.

Integrates i d/dt psi = (vacuum + mu(t) * exchange) psi with either classic
RK4 substeps or per-substep matrix exponentials at the midpoint coupling.
RK4 does not exactly conserve the norm, so the drift is monitored and the
run aborts loudly if it exceeds the configured bound; nothing is
renormalized behind the caller's back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .model import CouplingSchedule, HamiltonianSplit, NeutrinoModel
from .pauli import to_matrix
from .statevector import Statevector

__all__ = ["OracleConfig", "evolve_exact"]


@dataclass(frozen=True)
class OracleConfig:
    method: str = "rk4"  # "rk4" | "expm_step"
    dt_inner: float | None = None  # default: report_dt / 100
    dense_cap: int = 12
    norm_abort: float = 1e-6

    def __post_init__(self) -> None:
        if self.method not in ("rk4", "expm_step"):
            raise ValueError(f"unknown oracle method {self.method!r}")
        if self.dt_inner is not None and self.dt_inner <= 0:
            raise ValueError("dt_inner must be positive")


def evolve_exact(
    model: NeutrinoModel | HamiltonianSplit,
    schedule: CouplingSchedule | None,
    state0: Statevector,
    t_start: float,
    t_end: float,
    report_dt: float,
    config: OracleConfig = OracleConfig(),
) -> list[Statevector]:
    """Exact-evolution trajectory on the reporting grid, state0 included.

    ``schedule`` may be omitted when ``model`` carries one.  The coupling
    is sampled at the RK4 stage times (t, t+d/2, t+d), preserving fourth
    order for a time-dependent Hamiltonian; the expm_step method applies
    exp(-i H(t+d/2) d) per inner step.
    """
    if isinstance(model, NeutrinoModel):
        split = model.hamiltonian()
        schedule = schedule or model.schedule
    else:
        split = model
    if schedule is None:
        raise ValueError("no coupling schedule given")
    if t_end <= t_start:
        raise ValueError("t_end must exceed t_start")
    if report_dt <= 0:
        raise ValueError("report_dt must be positive")
    n = split.n_qubits
    if n > config.dense_cap:
        raise ValueError(f"register of {n} qubits exceeds dense cap {config.dense_cap}")
    if state0.dim != 2**n:
        raise ValueError("initial state does not match the register")

    h_vac = to_matrix(split.vacuum, max_qubits=config.dense_cap)
    h_exc = to_matrix(split.exchange, max_qubits=config.dense_cap)
    dt_inner = config.dt_inner if config.dt_inner is not None else report_dt / 100.0
    if dt_inner > report_dt:
        raise ValueError("dt_inner must not exceed the reporting step")
    n_inner = max(1, round(report_dt / dt_inner))
    delta = report_dt / n_inner
    steps = int(math.floor((t_end - t_start) / report_dt + 1e-9))

    def deriv(t: float, psi: np.ndarray) -> np.ndarray:
        return -1j * ((h_vac + schedule.mu_at(t) * h_exc) @ psi)

    psi = state0.amplitudes.astype(complex).copy()
    trajectory = [state0]
    for k in range(steps):
        t0 = t_start + k * report_dt
        for m in range(n_inner):
            t = t0 + m * delta
            if config.method == "rk4":
                k1 = deriv(t, psi)
                k2 = deriv(t + delta / 2, psi + delta / 2 * k1)
                k3 = deriv(t + delta / 2, psi + delta / 2 * k2)
                k4 = deriv(t + delta, psi + delta * k3)
                psi = psi + delta / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            else:
                h = h_vac + schedule.mu_at(t + delta / 2) * h_exc
                psi = expm(-1j * delta * h) @ psi
        drift = abs(np.linalg.norm(psi) - 1.0)
        if drift > config.norm_abort:
            raise RuntimeError(
                f"norm drift {drift:.3e} at t={t0 + report_dt:.4f} exceeds "
                f"{config.norm_abort:.1e}; reduce dt_inner"
            )
        trajectory.append(Statevector(psi))
    return trajectory
