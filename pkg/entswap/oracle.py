"""
Independent brute-force pipeline used to cross-check the protocol.

Nothing here calls statevec or filtering, and only the BellOutcome enum comes
from bell. States are built with explicit index loops, operators are embedded
into the full register as dense 2^n x 2^n matrices, and filter parameters
come from the closed-form branch amplitudes of the input pairs.
"""

import functools
import math
from typing import Dict, List, NamedTuple, Sequence

import numpy as np

from entswap.bell import BellOutcome

# Register layout of the 5-qubit pipeline: particles 1-4, then the ancilla.
N_QUBITS = 5
ANCILLA = 5

SQRT_HALF = 1 / math.sqrt(2)

# Bell states as (index, amplitude) lists over two qubits.
BELL_TERMS: Dict[BellOutcome, List] = {
    BellOutcome.PhiPlus: [(0b00, SQRT_HALF), (0b11, SQRT_HALF)],
    BellOutcome.PhiMinus: [(0b00, SQRT_HALF), (0b11, -SQRT_HALF)],
    BellOutcome.PsiPlus: [(0b01, SQRT_HALF), (0b10, SQRT_HALF)],
    BellOutcome.PsiMinus: [(0b01, SQRT_HALF), (0b10, -SQRT_HALF)],
}


class OracleBranch(NamedTuple):
    branch_probability: float
    joint_success_probability: float
    joint_failure_probability: float


def bit(index: int, qubit: int, n_qubits: int) -> int:
    """
    Value of a 1-indexed qubit in a basis index (qubit 1 is the high bit).
    """
    return (index >> (n_qubits - qubit)) & 1


def kron(a: Sequence[complex], b: Sequence[complex]) -> np.ndarray:
    """
    Tensor product by explicit index arithmetic.
    """
    out = np.zeros(len(a) * len(b), dtype=complex)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i * len(b) + j] = x * y
    return out


def embed(matrix: np.ndarray, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """
    Embed a k-qubit matrix acting on `targets` into the full register.

    Entry [i, j] is matrix[sub(i), sub(j)] when i and j agree on every
    non-target qubit, and zero otherwise.
    """
    dim = 2 ** n_qubits
    others = [q for q in range(1, n_qubits + 1) if q not in targets]
    full = np.zeros((dim, dim), dtype=complex)

    def sub(index: int) -> int:
        value = 0
        for qubit in targets:
            value = 2 * value + bit(index, qubit, n_qubits)
        return value

    for i in range(dim):
        for j in range(dim):
            if all(bit(i, q, n_qubits) == bit(j, q, n_qubits) for q in others):
                full[i, j] = matrix[sub(i), sub(j)]
    return full


def apply_dense(
    amps: Sequence[complex], matrix: np.ndarray, targets: Sequence[int]
) -> np.ndarray:
    """
    Apply a local matrix through its full embedded form.
    """
    n_qubits = int(math.log2(len(amps)))
    return embed(np.asarray(matrix, dtype=complex), targets, n_qubits) @ np.asarray(amps)


def filter_matrix(attenuate: int, ratio: complex) -> np.ndarray:
    """
    Filter unitary in the basis index = 2 * ancilla + particle.
    """
    s = math.sqrt(max(1 - abs(ratio) ** 2, 0.0))
    keep = 1 - attenuate
    matrix = np.zeros((4, 4), dtype=complex)
    # |attenuate, 0_a> -> r |attenuate, 0_a> + s |keep, 1_a>
    matrix[attenuate, attenuate] = ratio
    matrix[2 + keep, attenuate] = s
    # |keep, 0_a> is untouched.
    matrix[keep, keep] = 1
    # |attenuate, 1_a> -> s |attenuate, 0_a> - conj(r) |keep, 1_a>
    matrix[attenuate, 2 + attenuate] = s
    matrix[2 + keep, 2 + attenuate] = -np.conj(ratio)
    # |keep, 1_a> -> -|attenuate, 1_a>
    matrix[2 + attenuate, 2 + keep] = -1
    return matrix


def branch_amplitudes(
    pair12: Sequence[complex], pair34: Sequence[complex], outcome: BellOutcome
) -> Dict[int, complex]:
    """
    Closed-form unnormalized amplitudes of particles (1, 4), keyed by the
    particle-1 value, for a Bell outcome on particles (2, 3).
    """
    (alpha, beta), (a, b) = pair12, pair34
    sign = -1 if outcome in (BellOutcome.PhiMinus, BellOutcome.PsiMinus) else 1
    if outcome in (BellOutcome.PhiPlus, BellOutcome.PhiMinus):
        return {0: alpha * a * SQRT_HALF, 1: sign * beta * b * SQRT_HALF}
    else:
        return {0: alpha * b * SQRT_HALF, 1: sign * beta * a * SQRT_HALF}


def oracle_initial_state(pair12: Sequence[complex], pair34: Sequence[complex]) -> np.ndarray:
    """
    The 5-qubit state |pair12> |pair34> |0>_a.
    """
    (alpha, beta), (a, b) = pair12, pair34
    return kron(kron([alpha, 0, 0, beta], [a, 0, 0, b]), [1, 0])


@functools.lru_cache(maxsize=None)
def _bell_projector(outcome: BellOutcome) -> np.ndarray:
    bell = np.zeros(4, dtype=complex)
    for index, amp in BELL_TERMS[outcome]:
        bell[index] = amp
    return embed(np.outer(bell, bell.conj()), [2, 3], N_QUBITS)


@functools.lru_cache(maxsize=None)
def _ancilla_projector(value: int) -> np.ndarray:
    diagonal = [0, 0]
    diagonal[value] = 1
    return embed(np.diag(diagonal), [ANCILLA], N_QUBITS)


def oracle_run(pair12: Sequence[complex], pair34: Sequence[complex]) -> Dict:
    """
    Run the protocol on the dense 32-dimensional register.

    Every branch is filtered, including already balanced ones (|r| = 1) and
    single-term ones (r = 0), which gives the same joint probabilities as
    skipping or failing them.
    """
    psi = oracle_initial_state(pair12, pair34)
    ancilla_zero, ancilla_one = _ancilla_projector(0), _ancilla_projector(1)

    results = {}
    for outcome in BELL_TERMS:
        branch = _bell_projector(outcome) @ psi
        branch_probability = float(np.vdot(branch, branch).real)

        amps = branch_amplitudes(pair12, pair34, outcome)
        attenuate = 0 if abs(amps[0]) >= abs(amps[1]) else 1
        larger, smaller = amps[attenuate], amps[1 - attenuate]
        ratio = smaller / larger if abs(larger) > 0 else 0.0

        operator = embed(filter_matrix(attenuate, ratio), [ANCILLA, 1], N_QUBITS)
        filtered = operator @ branch
        success = ancilla_zero @ filtered
        failure = ancilla_one @ filtered
        results[outcome] = OracleBranch(
            branch_probability,
            float(np.vdot(success, success).real),
            float(np.vdot(failure, failure).real),
        )
    return results
