"""
Entanglement diagnostics for two-qubit pure states.

All formulas assume a pure state written as a 2x2 amplitude matrix
M[i][j] = <ij|s>.
"""

import math
from typing import NamedTuple

import numpy as np

from entswap.bell import BellOutcome, bell_vector
from entswap.statevec import DimensionError, StateVector


class SchmidtPair(NamedTuple):
    lambda_max: float
    lambda_min: float


def _amplitude_matrix(s: StateVector) -> np.ndarray:
    if s.n_qubits != 2:
        raise DimensionError(f"Expected a 2-qubit state, got {s.n_qubits} qubits.")
    return s.amps.reshape(2, 2)


def schmidt_coefficients(s: StateVector) -> SchmidtPair:
    """
    Returns the singular values of the amplitude matrix.

    For a 2x2 matrix the squared singular values solve
    x^2 - |M|_F^2 x + |det M|^2 = 0, so no iterative decomposition is needed.
    """
    matrix = _amplitude_matrix(s)
    frobenius2 = float(np.sum(np.abs(matrix) ** 2))
    det = abs(matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0])

    discriminant = max(frobenius2 ** 2 - 4 * det ** 2, 0.0)
    lambda_max = math.sqrt((frobenius2 + math.sqrt(discriminant)) / 2)
    # Product form avoids cancellation when lambda_min is tiny.
    lambda_min = det / lambda_max if lambda_max > 0 else 0.0
    return SchmidtPair(lambda_max, min(lambda_min, lambda_max))


def concurrence(s: StateVector) -> float:
    """
    Pure-state concurrence 2|a00 a11 - a01 a10|.
    """
    matrix = _amplitude_matrix(s)
    value = 2 * abs(matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0])
    return min(float(value), 1.0)


def single_pair_purification_prob(s: StateVector) -> float:
    """
    Optimal probability of distilling a Bell pair from one copy of s by local
    filtering: twice the smaller squared Schmidt coefficient.
    """
    return 2 * schmidt_coefficients(s).lambda_min ** 2


def bell_fidelity(s: StateVector) -> float:
    """
    Returns the largest overlap |<b|s>|^2 over the four Bell vectors.
    """
    _amplitude_matrix(s)
    return min(max(abs(bell_vector(kind).overlap(s)) ** 2 for kind in BellOutcome), 1.0)
