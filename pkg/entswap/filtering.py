"""
Local filtering of a two-term branch state with one ancilla.

A branch state A|x> + B|y> on particles (1, 4), where the two kets differ in
particle 1, is balanced by attenuating the larger term: particle 1 and a fresh
ancilla |0>_a undergo a unitary, then the ancilla is measured. Ancilla 0
leaves a maximally entangled state with probability 2 min(|A|^2, |B|^2);
ancilla 1 leaves a product state.

Filter matrices are written in the basis
{|0>_1|0>_a, |1>_1|0>_a, |0>_1|1>_a, |1>_1|1>_a}, i.e. the ancilla is the most
significant bit. They are therefore applied with targets (ancilla, particle 1).
"""

import math
from typing import List, NamedTuple, Optional

import numpy as np

from entswap.logging import logger
from entswap.statevec import (
    PROBABILITY_CUTOFF,
    LocalOperator,
    StateVector,
    apply_local,
    project_onto,
    tensor,
)

# Magnitudes within this of each other are a tie.
TIE_TOLERANCE = 1e-12
RATIO_TOLERANCE = 1e-12

# Register layout used while filtering: particle 1, particle 4, ancilla.
PARTICLE_QUBIT = 1
ANCILLA_QUBIT = 3
FILTER_TARGETS = [ANCILLA_QUBIT, PARTICLE_QUBIT]

ANCILLA_ZERO = StateVector.basis("0")
ANCILLA_ONE = StateVector.basis("1")


class FilterPlanError(ValueError):
    pass


class FilterPlan(NamedTuple):
    """
    Which particle-1 subspace to attenuate, and by what complex ratio
    r = smaller amplitude / larger amplitude.
    """

    attenuate_subspace: int
    ratio: complex


class FilterOutcome(NamedTuple):
    """
    Ancilla measurement result, conditioned on the branch.
    """

    success_probability: float
    success_state: Optional[StateVector]
    failure_probability: float
    failure_state: Optional[StateVector]


def _two_terms(branch_state: StateVector) -> List[int]:
    if branch_state.n_qubits != 2:
        raise FilterPlanError(f"Expected a 2-qubit branch state, got {branch_state.n_qubits}.")
    terms = [
        index
        for index, amp in enumerate(branch_state.amps)
        if abs(amp) > PROBABILITY_CUTOFF
    ]
    if len(terms) != 2:
        raise FilterPlanError(
            f"Branch state {branch_state!r} is not of two-term form ({len(terms)} terms)."
        )
    return terms


def plan_filter(branch_state: StateVector) -> FilterPlan:
    """
    Choose the filter that balances a two-term branch state.

    The larger term is attenuated by r = smaller / larger, phase included, so
    the success state is always the '+' superposition of the two kets.
    On a tie the particle-1 = 0 term is the one "attenuated" with |r| = 1,
    and a branch that is already a Bell state gets r = 1 and passes unchanged.
    """
    terms = _two_terms(branch_state)
    # Particle 1 is the high bit of the 2-qubit index.
    bits = [index >> 1 for index in terms]
    if bits[0] == bits[1]:
        raise FilterPlanError(
            f"Both terms of {branch_state!r} share particle-1 value {bits[0]}; "
            "filtering particle 1 cannot balance them."
        )

    amp = {bit: complex(branch_state.amps[index]) for bit, index in zip(bits, terms)}
    if abs(abs(amp[0]) - abs(amp[1])) <= TIE_TOLERANCE:
        larger = 0
        ratio = amp[1] / amp[0]
        if abs(ratio.imag) <= TIE_TOLERANCE:
            # Already a Bell state (relative sign +-1): pass it through unchanged.
            ratio = 1.0
    else:
        larger = 0 if abs(amp[0]) > abs(amp[1]) else 1
        ratio = amp[1 - larger] / amp[larger]

    plan = FilterPlan(attenuate_subspace=larger, ratio=complex(ratio))
    logger.debug(f"Filter plan: attenuate {plan.attenuate_subspace}, ratio {plan.ratio:.12g}")
    return plan


def check_plan(plan: FilterPlan) -> complex:
    """
    Validate a plan and return its ratio, clamped onto the unit disk.
    """
    if plan.attenuate_subspace not in (0, 1):
        raise FilterPlanError(f"attenuate_subspace must be 0 or 1, not {plan.attenuate_subspace}.")
    ratio = complex(plan.ratio)
    if not (math.isfinite(ratio.real) and math.isfinite(ratio.imag)):
        raise FilterPlanError("Filter ratio must be finite.")
    magnitude = abs(ratio)
    if magnitude > 1 + RATIO_TOLERANCE:
        raise FilterPlanError(f"Filter ratio magnitude {magnitude:.12g} exceeds 1.")
    if magnitude > 1:
        ratio /= magnitude
    return ratio


def build_filter(plan: FilterPlan) -> LocalOperator:
    """
    Build the filtering unitary on (ancilla, particle 1).

    For attenuate_subspace 0 the columns are
        |0>_1|0>_a -> r |0>_1|0>_a + s |1>_1|1>_a
        |1>_1|0>_a -> |1>_1|0>_a
        |0>_1|1>_a -> s |0>_1|0>_a - conj(r) |1>_1|1>_a
        |1>_1|1>_a -> -|0>_1|1>_a
    with s = sqrt(1 - |r|^2). For real r this is literal_filter(r).
    attenuate_subspace 1 is the mirror image, exchanging particle-1 values.
    """
    ratio = check_plan(plan)
    s = math.sqrt(max(1.0 - abs(ratio) ** 2, 0.0))

    matrix = np.zeros((4, 4), dtype=complex)
    matrix[:, 0] = [ratio, 0, 0, s]
    matrix[:, 1] = [0, 1, 0, 0]
    matrix[:, 2] = [s, 0, 0, -ratio.conjugate()]
    matrix[:, 3] = [0, 0, -1, 0]

    if plan.attenuate_subspace == 1:
        # Conjugate by a bit flip of particle 1: swaps indices 0<->1 and 2<->3.
        flip = [1, 0, 3, 2]
        matrix = matrix[np.ix_(flip, flip)]

    return LocalOperator(matrix, name=f"filter[{plan.attenuate_subspace}]")


def literal_filter(ratio: float) -> LocalOperator:
    """
    The fixed-orientation 4x4 filter matrix with real parameter `ratio`.

    It always attenuates the particle-1 = 0 term. When |alpha b| < |a beta|
    that is the smaller term of a Psi branch and the result is not balanced;
    build_filter() attenuates the larger (particle-1 = 1) term instead, which
    gives the success probability alpha^2 b^2.
    """
    s = math.sqrt(1.0 - ratio ** 2)
    matrix = [
        [ratio, 0, s, 0],
        [0, 1, 0, 0],
        [0, 0, 0, -1],
        [s, 0, -ratio, 0],
    ]
    return LocalOperator(matrix, name="literal_filter")


def apply_filter(branch_state: StateVector, operator: LocalOperator) -> FilterOutcome:
    """
    Attach |0>_a, apply `operator` on (ancilla, particle 1) and measure the ancilla.
    """
    joint = apply_local(tensor(branch_state, ANCILLA_ZERO), operator, FILTER_TARGETS)
    success_probability, success_state = project_onto(joint, ANCILLA_ZERO, [ANCILLA_QUBIT])
    failure_probability, failure_state = project_onto(joint, ANCILLA_ONE, [ANCILLA_QUBIT])
    return FilterOutcome(success_probability, success_state, failure_probability, failure_state)


def filter_and_measure(
    branch_state: StateVector, plan: Optional[FilterPlan] = None
) -> FilterOutcome:
    """
    Filter a two-term branch state on particle 1 and measure the ancilla.

    The plan defaults to plan_filter(branch_state).
    """
    if plan is None:
        plan = plan_filter(branch_state)
    return apply_filter(branch_state, build_filter(plan))
