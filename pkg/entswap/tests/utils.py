import math
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from entswap.protocol import PairSpec
from entswap.statevec import StateVector

SQRT_HALF = 1 / math.sqrt(2)


def random_state(rng: np.random.Generator, n_qubits: int) -> StateVector:
    """
    Returns a random normalized complex state.
    """
    size = 2 ** n_qubits
    return StateVector(rng.normal(size=size) + 1j * rng.normal(size=size), normalize=True)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng)


def two_term_state(amps: dict) -> StateVector:
    """
    Build a normalized 2-qubit state from {'01': amp, ...}.
    """
    vector = np.zeros(4, dtype=complex)
    for bits, amp in amps.items():
        vector[int(bits, 2)] = amp
    return StateVector(vector, normalize=True)


def pair_weights(beta2: float, b2: float, phase_beta: float = 0.0, phase_b: float = 0.0):
    return PairSpec.from_weight(beta2, phase_beta), PairSpec.from_weight(b2, phase_b)


def assert_amps_close(state: StateVector, expected: Sequence[complex], atol: float = 1e-10):
    np.testing.assert_allclose(state.amps, np.asarray(expected, dtype=complex), rtol=0, atol=atol)
