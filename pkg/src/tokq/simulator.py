"""Dense statevector simulator.

Basis convention is little-endian: bit ``k`` of a basis index is qubit ``k``.
A bitstring such as ``"01"`` is read left to right as qubit 0, qubit 1, so
``"01"`` means qubit0=0, qubit1=1 and sits at index 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import CapacityError, InvalidArgumentError

MAX_QUBITS = 24
MAX_DIAG_QUBITS = 12
NORM_TOL = 1e-10
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise InvalidArgumentError(
                f"expected {1 << self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol


def _check_capacity(n: int, bound: int = MAX_QUBITS) -> None:
    if n < 1:
        raise InvalidArgumentError(f"need at least one qubit, got {n}")
    if n > bound:
        raise CapacityError(f"{n} qubits exceed the dense bound of {bound}")


def _check_qubit(state: Statevector, *qubits: int) -> None:
    for q in qubits:
        if not 0 <= q < state.n_qubits:
            raise InvalidArgumentError(f"qubit {q} out of range for {state.n_qubits} qubits")


def init_plus_state(n_qubits: int) -> Statevector:
    _check_capacity(n_qubits)
    dim = 1 << n_qubits
    return Statevector(n_qubits, np.full(dim, 1.0 / math.sqrt(dim), dtype=complex))


def bitstring_index(bitstring: str) -> int:
    """Index of a bitstring written qubit 0 first."""
    if any(c not in "01" for c in bitstring):
        raise InvalidArgumentError(f"invalid bitstring {bitstring!r}")
    return sum(1 << k for k, c in enumerate(bitstring) if c == "1")


def index_bitstring(index: int, n_qubits: int) -> str:
    return "".join(str((index >> k) & 1) for k in range(n_qubits))


def init_basis_state(n_qubits: int, bitstring: str) -> Statevector:
    _check_capacity(n_qubits)
    if len(bitstring) != n_qubits:
        raise InvalidArgumentError(f"bitstring {bitstring!r} has length {len(bitstring)}, expected {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[bitstring_index(bitstring)] = 1.0
    return Statevector(n_qubits, amps)


def _bits(n: int, q: int) -> np.ndarray:
    return (np.arange(1 << n) >> q) & 1


def apply_rx_all(state: Statevector, angle: float) -> Statevector:
    """Apply ``exp(-i*angle*X)`` to every qubit."""
    n = state.n_qubits
    c, s = math.cos(angle), math.sin(angle)
    psi = state.amplitudes.reshape((2,) * n)
    for axis in range(n):
        psi = c * psi - 1j * s * np.flip(psi, axis=axis)
    return Statevector(n, psi.reshape(-1))


def apply_zz(state: Statevector, qubit_i: int, qubit_j: int, angle: float) -> Statevector:
    """Apply ``exp(-i*angle*Z_i Z_j)``: phase ``exp(-i*angle*(-1)**(b_i xor b_j))``."""
    _check_qubit(state, qubit_i, qubit_j)
    if qubit_i == qubit_j:
        raise InvalidArgumentError("apply_zz needs two distinct qubits")
    n = state.n_qubits
    parity = _bits(n, qubit_i) ^ _bits(n, qubit_j)
    phase = np.where(parity == 0, np.exp(-1j * angle), np.exp(1j * angle))
    return Statevector(n, state.amplitudes * phase)


def apply_xy_exponential(state: Statevector, qubit_i: int, qubit_j: int, theta: float) -> Statevector:
    """Apply ``exp(-i*theta*X_i Y_j) = cos(theta) I - i sin(theta) X_i Y_j``."""
    _check_qubit(state, qubit_i, qubit_j)
    if qubit_i == qubit_j:
        raise InvalidArgumentError("apply_xy_exponential needs two distinct qubits")
    xy = apply_pauli(state.amplitudes, state.n_qubits, {qubit_i: "X", qubit_j: "Y"})
    return Statevector(state.n_qubits, math.cos(theta) * state.amplitudes - 1j * math.sin(theta) * xy)


# --- Pauli operators ----------------------------------------------------------

_PAULI = frozenset("XYZ")


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    operators: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        ops = dict(self.operators)
        cleaned = []
        for q, p in ops.items():
            p = p.upper()
            if p == "I":
                continue
            if p not in _PAULI:
                raise InvalidArgumentError(f"unknown Pauli {p!r}")
            if q < 0:
                raise InvalidArgumentError(f"negative qubit index {q}")
            cleaned.append((int(q), p))
        if not math.isfinite(self.coefficient):
            raise InvalidArgumentError("Pauli coefficient must be finite")
        object.__setattr__(self, "coefficient", float(self.coefficient))
        object.__setattr__(self, "operators", tuple(sorted(cleaned)))

    @property
    def max_qubit(self) -> int:
        return max((q for q, _ in self.operators), default=-1)

    def label(self) -> str:
        return " ".join(f"{p}{q}" for q, p in self.operators) or "I"


class PauliSum:
    """Real linear combination of Pauli strings; equal strings are merged."""

    def __init__(self, terms: Iterable[PauliTerm | tuple] = ()):
        merged: dict[tuple, float] = {}
        for t in terms:
            if not isinstance(t, PauliTerm):
                t = PauliTerm(*t)
            merged[t.operators] = merged.get(t.operators, 0.0) + t.coefficient
        self.terms = [PauliTerm(c, ops) for ops, c in merged.items()]

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return "PauliSum(" + " + ".join(f"{t.coefficient:g}*{t.label()}" for t in self.terms) + ")"

    @property
    def max_qubit(self) -> int:
        return max((t.max_qubit for t in self.terms), default=-1)

    def to_matrix(self, n_qubits: int) -> np.ndarray:
        dim = 1 << n_qubits
        eye = np.eye(dim, dtype=complex)
        m = np.zeros((dim, dim), dtype=complex)
        for t in self.terms:
            m += t.coefficient * apply_pauli(eye, n_qubits, dict(t.operators))
        return m


def apply_pauli(amps: np.ndarray, n_qubits: int, operators: Mapping[int, str]) -> np.ndarray:
    """Apply a Pauli string to amplitudes (leading axis is the basis index).

    ``P|b> = i**nY (-1)**popcount(b & zmask) |b ^ xmask>``.
    """
    xmask = zmask = 0
    n_y = 0
    for q, p in operators.items():
        if q >= n_qubits:
            raise InvalidArgumentError(f"qubit {q} out of range for {n_qubits} qubits")
        if p in "XY":
            xmask |= 1 << q
        if p in "ZY":
            zmask |= 1 << q
        n_y += p == "Y"
    idx = np.arange(1 << n_qubits)
    src = idx ^ xmask
    sign = 1 - 2 * (np.bitwise_count(src & zmask).astype(np.int64) & 1)
    factor = (1j ** n_y) * sign
    if amps.ndim == 1:
        return factor * amps[src]
    return factor[:, None] * amps[src]


def expectation(state: Statevector, hamiltonian: PauliSum) -> float:
    if hamiltonian.max_qubit >= state.n_qubits:
        raise InvalidArgumentError("Hamiltonian acts on qubits outside the state")
    psi = state.amplitudes
    total = 0j
    for t in hamiltonian.terms:
        if not t.operators:
            total += t.coefficient * np.vdot(psi, psi)
        else:
            total += t.coefficient * np.vdot(psi, apply_pauli(psi, state.n_qubits, dict(t.operators)))
    if abs(total.imag) >= IMAG_TOL:
        raise AssertionError(f"expectation has imaginary part {total.imag:.3e}; Hamiltonian not Hermitian?")
    return float(total.real)


def probabilities(state: Statevector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def sample_counts(state: Statevector, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Multinomial shot counts per basis index."""
    if shots < 1:
        raise InvalidArgumentError("shots must be positive")
    p = probabilities(state)
    return rng.multinomial(shots, p / p.sum())


def exact_ground_energy(hamiltonian: PauliSum, n_qubits: int) -> float:
    """Smallest eigenvalue of the dense Hamiltonian matrix."""
    _check_capacity(n_qubits, MAX_DIAG_QUBITS)
    if hamiltonian.max_qubit >= n_qubits:
        raise InvalidArgumentError("Hamiltonian acts on qubits outside the register")
    return float(np.linalg.eigvalsh(hamiltonian.to_matrix(n_qubits))[0])
