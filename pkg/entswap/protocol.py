"""
Entanglement swapping followed by local filtering.

Pairs (1, 2) and (3, 4) are prepared as large|00> + small|11>. A Bell
measurement on particles (2, 3) projects particles (1, 4) onto one of four
branch states; every branch that is not already maximally entangled is
filtered on particle 1 with an ancilla. The total success probability equals
2 min(|beta|^2, |b|^2), the single-pair purification probability of the less
entangled input.
"""

import cmath
import enum
import math
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np

from entswap.analysis import bell_fidelity, concurrence, single_pair_purification_prob
from entswap.bell import BellOutcome, bell_measure_exact
from entswap.filtering import FilterPlan, FilterPlanError, filter_and_measure, plan_filter
from entswap.logging import logger
from entswap.statevec import NORM_TOLERANCE, PROBABILITY_CUTOFF, StateVector, tensor

# Branch states this close to a Bell state are not filtered.
BELL_FIDELITY_THRESHOLD = 1 - 1e-12
PSI_CASE_TOLERANCE = 1e-12

# Pinned pseudorandom generator for sampled runs.
GENERATOR_NAME = "PCG64"
MAX_SEED = 2 ** 64 - 1

SUCCESS = "success"
FAILURE = "failure"
RESULTS = (SUCCESS, FAILURE)

# Bell measurement on particles 2 and 3 of the register (1, 2, 3, 4).
SWAP_QUBITS = (2, 3)


class PairSpecError(ValueError):
    pass


class PairSpec(NamedTuple):
    """
    Schmidt data of one pair, large|00> + small|11>.
    """

    large: complex
    small: complex

    @classmethod
    def from_weight(cls, small_weight: float, phase: float = 0.0) -> "PairSpec":
        """
        Build a pair from its smaller Schmidt weight |small|^2 and the phase of small.
        """
        if not 0 <= small_weight <= 0.5:
            raise PairSpecError(f"Small Schmidt weight {small_weight} is outside [0, 0.5].")
        return cls(
            large=complex(math.sqrt(1 - small_weight)),
            small=math.sqrt(small_weight) * cmath.exp(1j * phase),
        )

    @property
    def small_weight(self) -> float:
        return abs(self.small) ** 2


class PsiCase(enum.Enum):
    """
    Which term dominates the Psi branches, alpha b |01> + beta a |10>.
    """

    Case1 = "Case1"  # |alpha b| > |a beta|
    Case2 = "Case2"  # |alpha b| < |a beta|
    Tie = "Tie"


class BranchRecord(NamedTuple):
    outcome: BellOutcome
    branch_probability: float
    filter_applied: bool
    plan: Optional[FilterPlan]
    joint_success_probability: float
    joint_failure_probability: float
    success_state: Optional[StateVector]
    failure_state: Optional[StateVector]
    # Post-measurement state of particles (1, 4) before any filtering.
    branch_state: Optional[StateVector]
    concurrence: Optional[float]


class BranchReport(NamedTuple):
    """
    Exact probability tree of one protocol run: Bell outcome -> filter -> ancilla.
    """

    pairs: Tuple[PairSpec, PairSpec]
    branches: List[BranchRecord]
    total_success_probability: float
    predicted_total: float
    max_abs_error: float
    swap_only_success_probability: float
    psi_case: PsiCase

    def branch(self, outcome: BellOutcome) -> BranchRecord:
        [record] = [record for record in self.branches if record.outcome == outcome]
        return record


class SampleTally(NamedTuple):
    seed: int
    trials: int
    counts: Dict[Tuple[BellOutcome, str], int]
    generator: str = GENERATOR_NAME
    numpy_version: str = np.__version__

    def count(self, outcome: BellOutcome, result: str) -> int:
        return self.counts[(outcome, result)]

    @property
    def success_count(self) -> int:
        return sum(self.counts[(outcome, SUCCESS)] for outcome in BellOutcome)

    @property
    def success_frequency(self) -> float:
        return self.success_count / self.trials if self.trials else 0.0


def check_pair(spec: PairSpec) -> None:
    """
    Raise PairSpecError unless |large|^2 + |small|^2 = 1 and |large| >= |small|.
    """
    large, small = complex(spec.large), complex(spec.small)
    if not all(math.isfinite(x) for x in (large.real, large.imag, small.real, small.imag)):
        raise PairSpecError(f"Pair {spec} has non-finite amplitudes.")
    norm2 = abs(large) ** 2 + abs(small) ** 2
    if abs(norm2 - 1) > NORM_TOLERANCE:
        raise PairSpecError(f"Pair {spec} has squared norm {norm2!r}, expected 1.")
    if abs(small) > abs(large) + NORM_TOLERANCE:
        raise PairSpecError(f"Pair {spec} has |small| > |large|.")


def make_pair(spec: PairSpec) -> StateVector:
    """
    Returns the 2-qubit state large|00> + small|11>.
    """
    check_pair(spec)
    return StateVector([spec.large, 0, 0, spec.small])


def classify_psi_case(pair12: PairSpec, pair34: PairSpec) -> PsiCase:
    check_pair(pair12)
    check_pair(pair34)
    alpha_b = abs(pair12.large * pair34.small)
    a_beta = abs(pair34.large * pair12.small)
    if alpha_b > a_beta + PSI_CASE_TOLERANCE:
        return PsiCase.Case1
    elif alpha_b < a_beta - PSI_CASE_TOLERANCE:
        return PsiCase.Case2
    else:
        return PsiCase.Tie


def _run_branch(
    outcome: BellOutcome,
    probability: float,
    branch_state: Optional[StateVector],
    planner: Callable[[StateVector], FilterPlan],
) -> BranchRecord:
    if branch_state is None:
        return BranchRecord(outcome, probability, False, None, 0.0, 0.0, None, None, None, None)

    entanglement = concurrence(branch_state)
    if bell_fidelity(branch_state) >= BELL_FIDELITY_THRESHOLD:
        return BranchRecord(
            outcome,
            probability,
            False,
            None,
            probability,
            0.0,
            branch_state,
            None,
            branch_state,
            entanglement,
        )

    try:
        plan = planner(branch_state)
    except FilterPlanError as error:
        # A single-term branch (product input pair) cannot be balanced.
        logger.debug(f"Branch {outcome.value} reported as failure: {error}")
        return BranchRecord(
            outcome,
            probability,
            False,
            None,
            0.0,
            probability,
            None,
            branch_state,
            branch_state,
            entanglement,
        )

    result = filter_and_measure(branch_state, plan)
    return BranchRecord(
        outcome,
        probability,
        True,
        plan,
        probability * result.success_probability,
        probability * result.failure_probability,
        result.success_state,
        result.failure_state,
        branch_state,
        entanglement,
    )


def run_exact(
    pair12: PairSpec,
    pair34: PairSpec,
    planner: Optional[Callable[[StateVector], FilterPlan]] = None,
) -> BranchReport:
    """
    Enumerate the full probability tree of one protocol run.

    `planner` chooses the filter for each branch and defaults to plan_filter().
    """
    planner = planner or plan_filter
    state = tensor(make_pair(pair12), make_pair(pair34))
    branches = [
        _run_branch(record.outcome, record.probability, record.post_state, planner)
        for record in bell_measure_exact(state, *SWAP_QUBITS)
    ]

    total_success = sum(branch.joint_success_probability for branch in branches)
    total_mass = sum(
        branch.joint_success_probability + branch.joint_failure_probability
        for branch in branches
    )
    predicted_total = min(
        single_pair_purification_prob(make_pair(pair12)),
        single_pair_purification_prob(make_pair(pair34)),
    )
    # Branches that were already maximally entangled after the Bell measurement.
    swap_only = sum(
        branch.branch_probability
        for branch in branches
        if not branch.filter_applied and branch.success_state is not None
    )

    report = BranchReport(
        pairs=(pair12, pair34),
        branches=branches,
        total_success_probability=total_success,
        predicted_total=predicted_total,
        max_abs_error=max(abs(total_success - predicted_total), abs(total_mass - 1)),
        swap_only_success_probability=swap_only,
        psi_case=classify_psi_case(pair12, pair34),
    )
    logger.debug(
        f"run_exact beta2={pair12.small_weight:.6g} b2={pair34.small_weight:.6g}: "
        f"total {total_success:.12g}, predicted {predicted_total:.12g}"
    )
    return report


def make_rng(seed: Union[int, np.random.SeedSequence]) -> np.random.Generator:
    """
    Returns the pinned generator for a seed.
    """
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(seed: int, index: int) -> int:
    """
    Derive an independent 64-bit sub-seed for work item `index` of a seeded run.
    """
    sequence = np.random.SeedSequence(seed, spawn_key=(index,))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"Seed {seed} is not a 64-bit unsigned integer.")
    return seed


def run_sampled(
    pair12: PairSpec,
    pair34: PairSpec,
    trials: int,
    seed: int,
    report: Optional[BranchReport] = None,
) -> SampleTally:
    """
    Sample the two-stage outcome (Bell outcome, then ancilla) `trials` times.

    Sampling is ancestral over the exact tree of run_exact(); a precomputed
    `report` for the same pairs may be passed to avoid recomputing it.
    """
    if trials < 0:
        raise ValueError(f"trials must be non-negative, not {trials}.")
    seed = check_seed(seed)
    if report is None:
        report = run_exact(pair12, pair34)

    outcomes = list(BellOutcome)
    branch_probabilities = np.array([branch.branch_probability for branch in report.branches])
    conditional_success = np.array(
        [
            branch.joint_success_probability / branch.branch_probability
            if branch.branch_probability > PROBABILITY_CUTOFF
            else 0.0
            for branch in report.branches
        ]
    )
    cumulative = np.cumsum(branch_probabilities / branch_probabilities.sum())

    rng = make_rng(seed)
    uniforms = rng.random((trials, 2))
    chosen = np.searchsorted(cumulative, uniforms[:, 0], side="right")
    chosen = np.minimum(chosen, len(outcomes) - 1)
    failed = uniforms[:, 1] >= conditional_success[chosen]

    # Cell index 2 * outcome + failed.
    cells = np.bincount(2 * chosen + failed, minlength=2 * len(outcomes))
    counts = {
        (outcome, result): int(cells[2 * i + j])
        for i, outcome in enumerate(outcomes)
        for j, result in enumerate(RESULTS)
    }
    return SampleTally(seed=seed, trials=trials, counts=counts)
