"""Exact algebra over N-qubit Pauli strings.

A string is an immutable label sequence over {I, X, Y, Z}; the qubit index
is the position in the sequence (qubit 0 first).  Phases produced by
products live in term coefficients, never in the string itself.  Sums are
kept canonical (lexicographically ordered, duplicate-free, zero-free) so
equality is structural and matrix assembly is reproducible.

All values are immutable after construction and all operations are pure,
so they can be shared freely across threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

__all__ = [
    "PRUNE_TOL",
    "PauliString",
    "PauliTerm",
    "PauliSum",
    "ClosureResult",
    "multiply",
    "commutator",
    "nested_commutator_closure",
    "to_matrix",
]

# Coefficients below this magnitude are floating-point residue and are
# dropped when a sum is canonicalized.
PRUNE_TOL = 1e-14

# Single-qubit products a*b -> (phase, result).
_MUL: dict[tuple[str, str], tuple[complex, str]] = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}

_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, order=True)
class PauliString:
    """Tensor product of single-qubit Paulis, e.g. ``"XIZ"`` = X0 Z2.

    Equality and ordering are by the label sequence alone; any phase that
    arises from multiplication is reported separately.
    """

    labels: str

    def __post_init__(self) -> None:
        if not self.labels or any(c not in "IXYZ" for c in self.labels):
            raise ValueError(f"invalid Pauli labels {self.labels!r}")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls("I" * n_qubits)

    @classmethod
    def from_ops(cls, n_qubits: int, ops: Mapping[int, str]) -> "PauliString":
        """Build a string from a {qubit: label} map, identity elsewhere."""
        labels = ["I"] * n_qubits
        for q, lab in ops.items():
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
            labels[q] = lab
        return cls("".join(labels))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __getitem__(self, qubit: int) -> str:
        return self.labels[qubit]

    def __str__(self) -> str:
        return self.labels

    @property
    def weight(self) -> int:
        """Number of non-identity positions."""
        return sum(1 for c in self.labels if c != "I")

    def is_identity(self) -> bool:
        return self.weight == 0

    def commutes_with(self, other: "PauliString") -> bool:
        """True iff the strings commute (even number of conflicting sites)."""
        _check_len(self, other)
        conflicts = sum(
            1 for a, b in zip(self.labels, other.labels)
            if a != "I" and b != "I" and a != b
        )
        return conflicts % 2 == 0

    def flipped_bits(self) -> tuple[int, ...]:
        """Qubits whose computational-basis bit this string flips (X or Y)."""
        return tuple(q for q, c in enumerate(self.labels) if c in "XY")


@dataclass(frozen=True)
class PauliTerm:
    """A complex coefficient attached to a Pauli string."""

    coeff: complex
    string: PauliString

    def __post_init__(self) -> None:
        if not np.isfinite(self.coeff):
            raise ValueError(f"non-finite coefficient {self.coeff!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.string)


def _check_len(a: PauliString, b: PauliString) -> None:
    if len(a) != len(b):
        raise ValueError(f"register size mismatch: {len(a)} vs {len(b)}")


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product of two strings as (phase, string), phase in {1, -1, i, -i}."""
    _check_len(a, b)
    phase: complex = 1
    out = []
    for x, y in zip(a.labels, b.labels):
        ph, lab = _MUL[(x, y)]
        phase *= ph
        out.append(lab)
    return phase, PauliString("".join(out))


class PauliSum:
    """Canonical linear combination of Pauli strings over a fixed register.

    Duplicate strings are merged, coefficients below PRUNE_TOL are dropped,
    and terms are sorted lexicographically by label sequence.  A sum
    representing a Hamiltonian is Hermitian exactly when every coefficient
    is real.
    """

    __slots__ = ("_n", "_terms")

    def __init__(self, n_qubits: int, terms: Iterable[PauliTerm] = ()) -> None:
        if n_qubits < 1:
            raise ValueError("register must hold at least one qubit")
        acc: dict[PauliString, complex] = {}
        for term in terms:
            if term.n_qubits != n_qubits:
                raise ValueError(
                    f"term on {term.n_qubits} qubits in a {n_qubits}-qubit sum"
                )
            acc[term.string] = acc.get(term.string, 0) + complex(term.coeff)
        self._n = n_qubits
        self._terms = tuple(
            PauliTerm(c, s)
            for s, c in sorted(acc.items(), key=lambda kv: kv[0].labels)
            if abs(c) > PRUNE_TOL
        )

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @classmethod
    def from_dict(cls, n_qubits: int, coeffs: Mapping[str, complex]) -> "PauliSum":
        """Build from a {labels: coefficient} map, e.g. {"XI": 0.5}."""
        return cls(
            n_qubits,
            (PauliTerm(c, PauliString(labels)) for labels, c in coeffs.items()),
        )

    @property
    def n_qubits(self) -> int:
        return self._n

    @property
    def terms(self) -> tuple[PauliTerm, ...]:
        return self._terms

    def strings(self) -> tuple[PauliString, ...]:
        return tuple(t.string for t in self._terms)

    def coefficient(self, string: PauliString | str) -> complex:
        if isinstance(string, str):
            string = PauliString(string)
        for t in self._terms:
            if t.string == string:
                return t.coeff
        return 0j

    def is_zero(self) -> bool:
        return not self._terms

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(t.coeff.imag) <= tol for t in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self._n, self._terms))

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        if self._n != other._n:
            raise ValueError("register size mismatch in sum")
        return PauliSum(self._n, self._terms + other._terms)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __neg__(self) -> "PauliSum":
        return (-1.0) * self

    def __mul__(self, scalar: complex) -> "PauliSum":
        if isinstance(scalar, (int, float, complex)):
            return PauliSum(
                self._n, (PauliTerm(t.coeff * scalar, t.string) for t in self._terms)
            )
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product of two sums."""
        if not isinstance(other, PauliSum):
            return NotImplemented
        if self._n != other._n:
            raise ValueError("register size mismatch in product")
        out = []
        for ta in self._terms:
            for tb in other._terms:
                phase, s = multiply(ta.string, tb.string)
                out.append(PauliTerm(ta.coeff * tb.coeff * phase, s))
        return PauliSum(self._n, out)

    def __repr__(self) -> str:
        if not self._terms:
            return f"PauliSum({self._n} qubits, 0)"
        body = " + ".join(f"({t.coeff:.6g})*{t.string}" for t in self._terms)
        return f"PauliSum({body})"


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """Commutator [a, b] = ab - ba in canonical form.

    Term pairs whose strings commute contribute nothing; anticommuting
    pairs contribute 2*ca*cb*phase times the product string.
    """
    if a.n_qubits != b.n_qubits:
        raise ValueError("register size mismatch in commutator")
    out = []
    for ta in a.terms:
        for tb in b.terms:
            if ta.string.commutes_with(tb.string):
                continue
            phase, s = multiply(ta.string, tb.string)
            out.append(PauliTerm(2 * ta.coeff * tb.coeff * phase, s))
    return PauliSum(a.n_qubits, out)


@dataclass(frozen=True)
class ClosureResult:
    """Strings reachable by nested commutators of two Hermitian operators.

    ``fixed_point_depth`` is the depth after which one further level added
    no new strings, or None if the requested depth ran out first.
    """

    strings: frozenset[PauliString]
    fixed_point_depth: int | None
    depth_reached: int

    def sorted_strings(self) -> list[PauliString]:
        return sorted(self.strings)

    def __len__(self) -> int:
        return len(self.strings)


def nested_commutator_closure(
    a: PauliSum,
    b: PauliSum,
    max_depth: int,
    max_strings: int = 4096,
) -> ClosureResult:
    """Collect the distinct strings of a, b and their nested commutators.

    Starting from the operators a and b (typically the static and driven
    parts of a split Hamiltonian), each depth level commutes both
    generators with every operator of the previous level.  Coefficients
    and phases are stripped; the identity string is always included.  The
    iteration stops early once a whole level contributes nothing new.

    Raises RuntimeError if the collected set exceeds ``max_strings``.
    """
    if a.n_qubits != b.n_qubits:
        raise ValueError("register size mismatch in closure")
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if not a.is_hermitian() or not b.is_hermitian():
        raise ValueError("closure requires Hermitian inputs")

    n = a.n_qubits
    collected: set[PauliString] = {PauliString.identity(n)}
    collected.update(a.strings())
    collected.update(b.strings())

    level: list[PauliSum] = [op for op in (a, b) if not op.is_zero()]
    fixed_point: int | None = None
    depth = 0
    for depth in range(1, max_depth + 1):
        nxt: list[PauliSum] = []
        new_strings: set[PauliString] = set()
        for op in level:
            for gen in (a, b):
                comm = commutator(gen, op)
                if comm.is_zero():
                    continue
                nxt.append(comm)
                new_strings.update(comm.strings())
        new_strings -= collected
        collected.update(new_strings)
        if len(collected) > max_strings:
            raise RuntimeError(
                f"closure exceeded {max_strings} strings at depth {depth}"
            )
        if not new_strings:
            fixed_point = depth - 1
            break
        level = nxt
    return ClosureResult(frozenset(collected), fixed_point, depth)


def to_matrix(
    op: PauliSum | PauliTerm | PauliString, max_qubits: int = 12
) -> np.ndarray:
    """Dense 2^N x 2^N matrix of a string, term, or sum.

    Kept for oracles and small-register checks; registers above
    ``max_qubits`` are refused to avoid runaway memory use.
    """
    if isinstance(op, PauliString):
        op = PauliTerm(1.0, op)
    if isinstance(op, PauliTerm):
        op = PauliSum(op.n_qubits, [op])
    n = op.n_qubits
    if n > max_qubits:
        raise ValueError(f"register of {n} qubits exceeds dense cap {max_qubits}")
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for term in op.terms:
        # qubit 0 is the least significant bit, so it sits rightmost in the
        # Kronecker chain
        m = np.array([[1.0]], dtype=complex)
        for lab in reversed(term.string.labels):
            m = np.kron(m, _MATRICES[lab])
        out += term.coeff * m
    return out
