"""
JSON and CSV encodings of protocol results.
"""

import csv
from typing import IO, Any, Dict, Iterable, List, Optional, Sequence

from entswap.bell import BellOutcome
from entswap.protocol import (
    FAILURE,
    RESULTS,
    SUCCESS,
    BranchRecord,
    BranchReport,
    PairSpec,
    SampleTally,
)
from entswap.statevec import StateVector
from entswap.utils import complex_pair, format_float, round_float

SWEEP_COLUMNS = [
    "beta2",
    "b2",
    "p_phi_plus",
    "p_phi_minus",
    "p_psi_plus",
    "p_psi_minus",
    "p_success_total",
    "p_success_predicted",
    "abs_err",
]
SAMPLED_COLUMN = "p_success_sampled"

BRANCH_COLUMNS = [
    "outcome",
    "branch_probability",
    "filter_applied",
    "joint_success_probability",
    "joint_failure_probability",
]
# Appended to BRANCH_COLUMNS in sample mode.
SAMPLE_COLUMNS = ["trials", "seed", "sample_success", "sample_failure"]


def state_to_list(state: Optional[StateVector]) -> Optional[List[List[float]]]:
    if state is None:
        return None
    return [complex_pair(amp) for amp in state.amps]


def pair_to_dict(label: str, pair: PairSpec) -> Dict[str, Any]:
    return {
        "label": label,
        "large": complex_pair(pair.large),
        "small": complex_pair(pair.small),
        "small_weight": round_float(pair.small_weight),
    }


def branch_to_dict(branch: BranchRecord) -> Dict[str, Any]:
    plan = None
    if branch.plan is not None:
        plan = {
            "attenuate_subspace": branch.plan.attenuate_subspace,
            "ratio": complex_pair(branch.plan.ratio),
        }
    return {
        "outcome": branch.outcome.value,
        "branch_probability": round_float(branch.branch_probability),
        "filter_applied": branch.filter_applied,
        "plan": plan,
        "joint_success_probability": round_float(branch.joint_success_probability),
        "joint_failure_probability": round_float(branch.joint_failure_probability),
        "concurrence": None if branch.concurrence is None else round_float(branch.concurrence),
        "success_state": state_to_list(branch.success_state),
        "failure_state": state_to_list(branch.failure_state),
    }


def report_to_dict(report: BranchReport) -> Dict[str, Any]:
    """
    Encode a BranchReport with stable key names; branches are in BellOutcome order.
    """
    pair12, pair34 = report.pairs
    return {
        "pairs": [pair_to_dict("12", pair12), pair_to_dict("34", pair34)],
        "branches": [branch_to_dict(report.branch(outcome)) for outcome in BellOutcome],
        "totals": {
            "total_success_probability": round_float(report.total_success_probability),
            "predicted_total": round_float(report.predicted_total),
            "max_abs_error": round_float(report.max_abs_error),
            "swap_only_success_probability": round_float(report.swap_only_success_probability),
            "psi_case": report.psi_case.value,
        },
    }


def tally_to_dict(tally: SampleTally) -> Dict[str, Any]:
    return {
        "seed": tally.seed,
        "trials": tally.trials,
        "generator": tally.generator,
        "numpy_version": tally.numpy_version,
        "counts": {
            outcome.value: {result: tally.count(outcome, result) for result in RESULTS}
            for outcome in BellOutcome
        },
        "success_frequency": round_float(tally.success_frequency),
    }


def sweep_row(report: BranchReport, sampled: Optional[float] = None) -> List[str]:
    """
    Format one sweep CSV row for a grid point.
    """
    pair12, pair34 = report.pairs
    values = [pair12.small_weight, pair34.small_weight]
    values.extend(report.branch(outcome).joint_success_probability for outcome in BellOutcome)
    values.extend(
        [
            report.total_success_probability,
            report.predicted_total,
            abs(report.total_success_probability - report.predicted_total),
        ]
    )
    if sampled is not None:
        values.append(sampled)
    return [format_float(value) for value in values]


def branch_rows(
    report: BranchReport, tally: Optional[SampleTally] = None
) -> Iterable[List[str]]:
    """
    One CSV row per outcome; a tally adds the SAMPLE_COLUMNS cells.
    """
    for outcome in BellOutcome:
        branch = report.branch(outcome)
        row = [
            outcome.value,
            format_float(branch.branch_probability),
            str(branch.filter_applied).lower(),
            format_float(branch.joint_success_probability),
            format_float(branch.joint_failure_probability),
        ]
        if tally is not None:
            row.extend(
                [
                    str(tally.trials),
                    str(tally.seed),
                    str(tally.count(outcome, SUCCESS)),
                    str(tally.count(outcome, FAILURE)),
                ]
            )
        yield row


def write_csv(out: IO, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
