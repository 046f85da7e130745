"""Two-flavor collective-oscillation Hamiltonian for N neutrinos.

Each neutrino occupies its own vacuum-frequency bin, with frequencies
(i+1)*omega0 for qubit i.  The Hamiltonian splits into a static one-body
vacuum part and a pairwise exchange interaction whose strength mu(t)
decays as the gas dilutes:

    H(t) = vacuum + mu(t) * exchange
    vacuum   = 1/2 sum_i (i+1) (sin(theta) X_i - cos(theta) Z_i)
    exchange = 1/2 sum_{i<j} (X_i X_j + Y_i Y_j + Z_i Z_j)

All times and energies are expressed in units of omega0 (omega0 = 1
internally).  Electron flavor maps to |0>, so the survival probability of
the electron flavor in bin i is the probability of measuring qubit i in 0.

Note the frequency bins are (i+1)*omega0, i.e. the first neutrino sits at
omega0, not 0; keep that in mind when comparing against conventions that
label bins from omega_i = i*omega0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .pauli import PauliString, PauliSum, PauliTerm
from .statevector import Statevector

__all__ = [
    "CouplingSchedule",
    "NeutrinoModel",
    "HamiltonianSplit",
    "build_model",
    "mu_at",
    "initial_flavor_state",
]


@dataclass(frozen=True)
class CouplingSchedule:
    """Time-dependent pair-coupling strength mu(t).

    Three kinds are supported:

    * ``constant``: mu(t) = mu0 everywhere.
    * ``profile``: the single-angle bulb form
      mu(t) = mu0 * (1 - sqrt(1 - (r_nu/t)^2))^2, defined for t >= r_nu.
    * ``table``: linear interpolation through strictly increasing samples.
    """

    kind: str
    mu0: float = 0.0
    r_nu: float = 0.0
    times: tuple[float, ...] = field(default=())
    values: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "profile", "table"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind in ("constant", "profile"):
            if not math.isfinite(self.mu0) or self.mu0 < 0:
                raise ValueError("mu0 must be finite and nonnegative")
        if self.kind == "profile" and self.r_nu <= 0:
            raise ValueError("profile schedule needs r_nu > 0")
        if self.kind == "table":
            if len(self.times) != len(self.values) or len(self.times) < 2:
                raise ValueError("table schedule needs matching t/mu samples")
            if any(b <= a for a, b in zip(self.times, self.times[1:])):
                raise ValueError("table times must be strictly increasing")
            if any(v < 0 or not math.isfinite(v) for v in self.values):
                raise ValueError("table values must be finite and nonnegative")

    @classmethod
    def constant(cls, mu0: float) -> "CouplingSchedule":
        return cls("constant", mu0=float(mu0))

    @classmethod
    def supernova_profile(cls, mu0: float, r_nu: float) -> "CouplingSchedule":
        return cls("profile", mu0=float(mu0), r_nu=float(r_nu))

    @classmethod
    def tabulated(
        cls, times: Sequence[float], values: Sequence[float]
    ) -> "CouplingSchedule":
        return cls(
            "table",
            times=tuple(float(t) for t in times),
            values=tuple(float(v) for v in values),
        )

    def mu_at(self, t: float) -> float:
        if self.kind == "constant":
            return self.mu0
        if self.kind == "profile":
            if t < self.r_nu:
                raise ValueError(
                    f"profile schedule undefined at t={t} < r_nu={self.r_nu}"
                )
            ratio = self.r_nu / t
            return self.mu0 * (1.0 - math.sqrt(1.0 - ratio * ratio)) ** 2
        if not self.times[0] <= t <= self.times[-1]:
            raise ValueError(
                f"t={t} outside tabulated range "
                f"[{self.times[0]}, {self.times[-1]}]"
            )
        return float(np.interp(t, self.times, self.values))


def mu_at(schedule: CouplingSchedule, t: float) -> float:
    """Coupling strength at time t (in 1/omega0 units)."""
    return schedule.mu_at(t)


@dataclass(frozen=True)
class HamiltonianSplit:
    """Static and coupling-free parts of H(t) = vacuum + mu(t)*exchange."""

    vacuum: PauliSum
    exchange: PauliSum

    def __post_init__(self) -> None:
        if self.vacuum.n_qubits != self.exchange.n_qubits:
            raise ValueError("vacuum and exchange parts differ in register size")

    @property
    def n_qubits(self) -> int:
        return self.vacuum.n_qubits

    def at(self, mu: float) -> PauliSum:
        """Full Hamiltonian for a frozen coupling value."""
        return self.vacuum + mu * self.exchange


@dataclass(frozen=True)
class NeutrinoModel:
    """N-neutrino configuration: register size, mixing angle, coupling."""

    n: int
    theta: float
    schedule: CouplingSchedule
    omega0: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("need at least two neutrinos")
        if not 0 <= self.theta < math.pi / 2:
            raise ValueError("mixing angle must lie in [0, pi/2)")
        if self.omega0 <= 0:
            raise ValueError("omega0 must be positive")

    @property
    def frequencies(self) -> tuple[float, ...]:
        """Vacuum oscillation frequency of each bin, (i+1)*omega0."""
        return tuple((i + 1) * self.omega0 for i in range(self.n))

    def hamiltonian(self) -> HamiltonianSplit:
        return build_model(self.n, self.theta, self.schedule)


def build_model(
    n: int, theta: float, schedule: CouplingSchedule | None = None
) -> HamiltonianSplit:
    """Assemble the split Hamiltonian for n neutrinos at mixing angle theta.

    The schedule does not enter the operators (mu multiplies the exchange
    part at application time); it is accepted here so call sites carrying a
    full configuration need not unpack it.
    """
    if n < 2:
        raise ValueError("need at least two neutrinos")
    if not 0 <= theta < math.pi / 2:
        raise ValueError("mixing angle must lie in [0, pi/2)")
    s, c = math.sin(theta), math.cos(theta)
    one_body = []
    for i in range(n):
        w = 0.5 * (i + 1)
        one_body.append(PauliTerm(w * s, PauliString.from_ops(n, {i: "X"})))
        one_body.append(PauliTerm(-w * c, PauliString.from_ops(n, {i: "Z"})))
    pair = []
    for i in range(n):
        for j in range(i + 1, n):
            for axis in ("X", "Y", "Z"):
                pair.append(
                    PauliTerm(0.5, PauliString.from_ops(n, {i: axis, j: axis}))
                )
    return HamiltonianSplit(PauliSum(n, one_body), PauliSum(n, pair))


_FLAVOR_BITS = {"e": 0, "x": 1}


def initial_flavor_state(n: int, flavors: Sequence[str] | str) -> Statevector:
    """Product state with electron flavor as |0> and the x flavor as |1>.

    ``flavors`` is a sequence like ["e", "e"] or the string "ee", one entry
    per neutrino.
    """
    labels = list(flavors)
    if len(labels) != n:
        raise ValueError(f"need {n} flavor labels, got {len(labels)}")
    try:
        bits = [_FLAVOR_BITS[f] for f in labels]
    except KeyError as err:
        raise ValueError(f"unknown flavor {err.args[0]!r}; use 'e' or 'x'") from None
    return Statevector.basis(n, bits)
