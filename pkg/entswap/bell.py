import enum
import math
from typing import Dict, List, NamedTuple, Optional

from entswap.logging import logger
from entswap.statevec import StateVector, project_onto

SQRT_HALF = 1 / math.sqrt(2)


class BellOutcome(enum.Enum):
    """
    Results of a complete Bell-state measurement, in report order.
    """

    PhiPlus = "PhiPlus"
    PhiMinus = "PhiMinus"
    PsiPlus = "PsiPlus"
    PsiMinus = "PsiMinus"


_BELL_AMPS: Dict[BellOutcome, List[float]] = {
    BellOutcome.PhiPlus: [SQRT_HALF, 0, 0, SQRT_HALF],
    BellOutcome.PhiMinus: [SQRT_HALF, 0, 0, -SQRT_HALF],
    BellOutcome.PsiPlus: [0, SQRT_HALF, SQRT_HALF, 0],
    BellOutcome.PsiMinus: [0, SQRT_HALF, -SQRT_HALF, 0],
}

_BELL_VECTORS: Dict[BellOutcome, StateVector] = {
    kind: StateVector(amps) for kind, amps in _BELL_AMPS.items()
}


class BellRecord(NamedTuple):
    outcome: BellOutcome
    probability: float
    # State of the unmeasured qubits, None for impossible outcomes.
    post_state: Optional[StateVector]


def bell_vector(kind: BellOutcome) -> StateVector:
    """
    Returns the 2-qubit Bell state for a measurement outcome.
    """
    return _BELL_VECTORS[kind]


def bell_measure_exact(s: StateVector, qi: int, qj: int) -> List[BellRecord]:
    """
    Enumerate all four outcomes of a Bell measurement on qubits (qi, qj).

    The post-measurement states are on the remaining qubits, in register order.
    """
    records = []
    for kind in BellOutcome:
        probability, post_state = project_onto(s, bell_vector(kind), [qi, qj])
        logger.debug(f"Bell outcome {kind.value} on ({qi}, {qj}): p = {probability:.12g}")
        records.append(BellRecord(kind, probability, post_state))
    return records
