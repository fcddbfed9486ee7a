"""
Dense state vectors for small qubit registers.

Qubit k (1-indexed) of an n-qubit register contributes bit 2**(n - k) to the
amplitude index, so qubit 1 is the most significant bit and a ket |q1 q2 ... qn>
transcribes directly into an index. Operators acting on an ordered list of
target qubits use the same convention: the first target is the most
significant bit of the operator's row and column index.
"""

from typing import List, NamedTuple, Optional, Sequence

import numpy as np

# Tolerances.
NORM_TOLERANCE = 1e-10
UNITARY_TOLERANCE = 1e-12
# Branches less likely than this are treated as impossible.
PROBABILITY_CUTOFF = 1e-14

DEFAULT_MAX_QUBITS = 6


class StateVectorError(ValueError):
    pass


class DimensionError(StateVectorError):
    pass


class RegisterOverflowError(StateVectorError):
    pass


class NonUnitaryError(StateVectorError):
    pass


class NormalizationError(StateVectorError):
    pass


def _frozen_array(values: Sequence) -> np.ndarray:
    array = np.array(values, dtype=complex)
    if not np.all(np.isfinite(array)):
        raise StateVectorError("Amplitudes must be finite.")
    array.setflags(write=False)
    return array


def _num_qubits(size: int) -> int:
    n_qubits = size.bit_length() - 1
    if size < 2 or 1 << n_qubits != size:
        raise DimensionError(f"Amplitude count {size} is not a power of two >= 2.")
    return n_qubits


class StateVector:
    """
    Normalized complex amplitude vector over an ordered qubit register.

    StateVectors are immutable: the amplitude array is read-only and every
    operation returns a fresh value.
    """

    def __init__(
        self,
        amps: Sequence,
        normalize: bool = False,
        max_qubits: int = DEFAULT_MAX_QUBITS,
    ):
        amps = np.array(amps, dtype=complex).ravel()
        self.n_qubits = _num_qubits(len(amps))
        if self.n_qubits > max_qubits:
            raise RegisterOverflowError(
                f"{self.n_qubits} qubits exceeds the register cap of {max_qubits}."
            )
        if not np.all(np.isfinite(amps)):
            raise StateVectorError("Amplitudes must be finite.")

        norm = float(np.linalg.norm(amps))
        if normalize:
            if norm ** 2 < PROBABILITY_CUTOFF:
                raise NormalizationError("Cannot normalize a zero vector.")
            amps = amps / norm
        elif abs(norm ** 2 - 1) > NORM_TOLERANCE:
            raise NormalizationError(f"State has squared norm {norm ** 2!r}, expected 1.")

        self.amps = _frozen_array(amps)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """
        Returns the computational basis state for a bit string, e.g. '01'.
        """
        if not bits or set(bits) - {"0", "1"}:
            raise DimensionError(f"Invalid basis label '{bits}'.")
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def amplitude(self, bits: str) -> complex:
        """
        Returns the amplitude of a basis ket, e.g. state.amplitude('0110').
        """
        if len(bits) != self.n_qubits:
            raise DimensionError(f"Basis label '{bits}' does not have {self.n_qubits} bits.")
        return complex(self.amps[int(bits, 2)])

    def overlap(self, other: "StateVector") -> complex:
        """
        Returns the inner product <self|other>.
        """
        if other.n_qubits != self.n_qubits:
            raise DimensionError("Cannot take the overlap of states of different sizes.")
        return complex(np.vdot(self.amps, other.amps))

    def allclose(self, other: "StateVector", atol: float = NORM_TOLERANCE) -> bool:
        return other.n_qubits == self.n_qubits and bool(
            np.allclose(self.amps, other.amps, rtol=0, atol=atol)
        )

    def equals_up_to_phase(self, other: "StateVector", atol: float = NORM_TOLERANCE) -> bool:
        """
        Returns True if the states differ only by a global phase.
        """
        if other.n_qubits != self.n_qubits:
            return False
        return abs(abs(self.overlap(other)) - 1.0) <= atol

    def __len__(self) -> int:
        return len(self.amps)

    def __repr__(self) -> str:
        terms = [
            f"({amp.real:.6g}{amp.imag:+.6g}j)|{index:0{self.n_qubits}b}>"
            for index, amp in enumerate(self.amps)
            if abs(amp) > PROBABILITY_CUTOFF
        ]
        return f"StateVector({' + '.join(terms) or '0'})"


def unitarity_error(matrix: np.ndarray) -> float:
    """
    Returns max |(U^dagger U - I)_ij|.
    """
    matrix = np.asarray(matrix, dtype=complex)
    return float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(len(matrix)))))


class LocalOperator:
    """
    A 1- or 2-qubit operator given as a dense 2^arity x 2^arity matrix.

    Column j is the image of basis state j of the target qubits, with the
    first target as the most significant bit. Operators flagged as gates are
    checked for unitarity on construction.
    """

    def __init__(self, matrix: Sequence, gate: bool = True, name: str = ""):
        matrix = _frozen_array(matrix)
        if matrix.shape not in ((2, 2), (4, 4)):
            raise DimensionError(f"Operator shape {matrix.shape} is not 2x2 or 4x4.")

        self.matrix = matrix
        self.arity = _num_qubits(len(matrix))
        self.gate = gate
        self.name = name

        if gate:
            error = unitarity_error(matrix)
            if error > UNITARY_TOLERANCE:
                raise NonUnitaryError(
                    f"Operator {name or ''} is not unitary: max |U^dagger U - I| = {error:.3g}."
                )

    def __repr__(self) -> str:
        return f"LocalOperator(name={self.name!r}, arity={self.arity})"


class Projection(NamedTuple):
    """
    Outcome of projecting part of a register onto a given state.

    `residual` is None when the probability is below PROBABILITY_CUTOFF.
    """

    probability: float
    residual: Optional[StateVector]


def _check_targets(n_qubits: int, targets: Sequence[int]) -> List[int]:
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise DimensionError(f"Target qubits {targets} are not distinct.")
    for target in targets:
        if not 1 <= target <= n_qubits:
            raise DimensionError(f"Target qubit {target} is outside 1..{n_qubits}.")
    return targets


def tensor(
    s1: StateVector, s2: StateVector, max_qubits: int = DEFAULT_MAX_QUBITS
) -> StateVector:
    """
    Returns s1 (x) s2; the qubits of s1 occupy the high-order positions.
    """
    if s1.n_qubits + s2.n_qubits > max_qubits:
        raise RegisterOverflowError(
            f"{s1.n_qubits + s2.n_qubits} qubits exceeds the register cap of {max_qubits}."
        )
    return StateVector(np.kron(s1.amps, s2.amps), max_qubits=max_qubits)


def apply_local(s: StateVector, u: LocalOperator, targets: Sequence[int]) -> StateVector:
    """
    Apply a local operator to the target qubits, leaving all other qubits untouched.
    """
    targets = _check_targets(s.n_qubits, targets)
    if len(targets) != u.arity:
        raise DimensionError(f"Operator of arity {u.arity} given {len(targets)} targets.")

    axes = [target - 1 for target in targets]
    psi = s.amps.reshape((2,) * s.n_qubits)
    op = u.matrix.reshape((2,) * (2 * u.arity))

    # tensordot puts the operator's output axes first, followed by the
    # untouched register axes in their original order.
    out = np.tensordot(op, psi, axes=(list(range(u.arity, 2 * u.arity)), axes))
    out = np.moveaxis(out, list(range(u.arity)), axes)
    return StateVector(out.ravel(), max_qubits=max(s.n_qubits, DEFAULT_MAX_QUBITS))


def project_onto(s: StateVector, onto: StateVector, targets: Sequence[int]) -> Projection:
    """
    Project the target qubits of s onto the state `onto`.

    The probability is the squared norm of the partial inner product
    <onto|s> and the residual is the normalized state of the remaining qubits.
    """
    targets = _check_targets(s.n_qubits, targets)
    if onto.n_qubits != len(targets):
        raise DimensionError(
            f"Projection state of {onto.n_qubits} qubits does not match {len(targets)} targets."
        )
    if len(targets) >= s.n_qubits:
        raise DimensionError("Projection must leave at least one qubit.")

    axes = [target - 1 for target in targets]
    k = len(targets)
    psi = s.amps.reshape((2,) * s.n_qubits)
    bra = onto.amps.conj().reshape((2,) * k)

    remainder = np.tensordot(bra, psi, axes=(list(range(k)), axes)).ravel()
    probability = float(np.vdot(remainder, remainder).real)
    if probability < PROBABILITY_CUTOFF:
        return Projection(probability, None)
    return Projection(probability, StateVector(remainder / np.sqrt(probability)))
