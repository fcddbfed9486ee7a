import csv
import json
from io import StringIO
from typing import List, Tuple

import pytest

import entswap.cli
import entswap.protocol
from entswap.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED, EntswapClient, main
from entswap.config import get_default_config
from entswap.filtering import FilterPlan, plan_filter
from entswap.report import BRANCH_COLUMNS, SAMPLED_COLUMN, SAMPLE_COLUMNS, SWEEP_COLUMNS

SWEEP_HEADER = (
    "beta2,b2,p_phi_plus,p_phi_minus,p_psi_plus,p_psi_minus,"
    "p_success_total,p_success_predicted,abs_err"
)


def run_cli(argv: List[str]) -> Tuple[int, str, str]:
    """
    Run the command line client and capture its exit code, stdout and stderr.
    """
    client = EntswapClient(stdout=StringIO(), stderr=StringIO())
    code = main(["entswap"] + argv, client=client)
    return code, client.stdout.getvalue(), client.stderr.getvalue()


def read_csv(text: str) -> List[List[str]]:
    return list(csv.reader(StringIO(text)))


@pytest.fixture
def small_verify_config(monkeypatch):
    """
    Reduce the verify workload behind the CLI.
    """
    reduced = {
        "mc_seeds": "2",
        "oracle_draws": "10",
        "unitarity_draws": "50",
        "normalization_draws": "40",
        "grid_step": "0.1",
    }

    def get_small_config(overrides=None):
        overrides = dict(overrides or {})
        overrides["verify"] = {**reduced, **overrides.get("verify", {})}
        return get_default_config(overrides)

    monkeypatch.setattr(entswap.cli, "get_default_config", get_small_config)


def test_help() -> None:
    code, out, _ = run_cli([])
    assert code == EXIT_OK
    assert "usage: entswap" in out

    code, out, _ = run_cli(["help"])
    assert code == EXIT_OK
    assert "sweep" in out


def test_run_json_equal_pairs() -> None:
    code, out, err = run_cli(["run", "--beta2", "0.2"])
    assert code == EXIT_OK
    assert err == ""

    document = json.loads(out)
    assert list(document) == ["pairs", "branches", "totals"]
    assert [branch["outcome"] for branch in document["branches"]] == [
        "PhiPlus",
        "PhiMinus",
        "PsiPlus",
        "PsiMinus",
    ]
    joint = {
        branch["outcome"]: branch["joint_success_probability"] for branch in document["branches"]
    }
    assert joint == {"PhiPlus": 0.04, "PhiMinus": 0.04, "PsiPlus": 0.16, "PsiMinus": 0.16}
    assert document["totals"]["total_success_probability"] == 0.4
    assert document["totals"]["predicted_total"] == 0.4
    assert document["totals"]["psi_case"] == "Tie"
    assert document["pairs"][1]["small_weight"] == 0.2

    psi_plus = document["branches"][2]
    assert psi_plus["filter_applied"] is False
    assert psi_plus["plan"] is None
    assert psi_plus["failure_state"] is None


def test_run_json_unequal_pairs() -> None:
    code, out, _ = run_cli(["run", "--beta2", "0.2", "--b2", "0.3"])
    assert code == EXIT_OK

    document = json.loads(out)
    assert document["totals"]["total_success_probability"] == 0.4
    assert document["totals"]["psi_case"] == "Case1"
    phi_plus = document["branches"][0]
    assert phi_plus["filter_applied"] is True
    assert phi_plus["plan"]["attenuate_subspace"] == 0
    assert len(phi_plus["success_state"]) == 4


def test_run_with_phases() -> None:
    code, out, _ = run_cli(["run", "--beta2", "0.2", "--b2", "0.3", "--phase-b", "1.5"])
    assert code == EXIT_OK
    assert json.loads(out)["totals"]["total_success_probability"] == 0.4


def test_run_csv() -> None:
    code, out, _ = run_cli(["run", "--beta2", "0.2", "--format", "csv"])
    assert code == EXIT_OK

    rows = read_csv(out)
    assert rows[0] == BRANCH_COLUMNS
    assert [row[0] for row in rows[1:]] == ["PhiPlus", "PhiMinus", "PsiPlus", "PsiMinus"]
    assert rows[1][1:] == ["0.3400000000", "true", "0.04000000000", "0.3000000000"]
    assert rows[3][2] == "false"


def test_run_sample_mode() -> None:
    argv = ["run", "--beta2", "0.2", "--mode", "sample", "--trials", "1000", "--seed", "5"]
    code, out, _ = run_cli(argv)
    assert code == EXIT_OK

    document = json.loads(out)
    assert list(document) == ["pairs", "branches", "totals", "tally"]
    tally = document["tally"]
    assert tally["seed"] == 5
    assert tally["trials"] == 1000
    assert tally["generator"] == "PCG64"
    assert sum(sum(cell.values()) for cell in tally["counts"].values()) == 1000

    # Identical arguments give identical documents.
    assert run_cli(argv)[1] == out


def test_run_sample_mode_csv() -> None:
    argv = ["run", "--beta2", "0.2", "--mode", "sample", "--trials", "1000", "--seed", "5"]
    code, out, _ = run_cli(argv + ["--format", "csv"])
    assert code == EXIT_OK

    rows = read_csv(out)
    assert rows[0] == BRANCH_COLUMNS + SAMPLE_COLUMNS
    assert len(rows) == 5
    for row in rows[1:]:
        assert row[5:7] == ["1000", "5"]
    assert sum(int(row[7]) + int(row[8]) for row in rows[1:]) == 1000

    # Psi branches are already balanced and never fail.
    assert rows[3][8] == "0"
    assert rows[4][8] == "0"

    # Counts agree with the JSON tally for the same seed.
    counts = json.loads(run_cli(argv)[1])["tally"]["counts"]
    for row in rows[1:]:
        assert [int(row[7]), int(row[8])] == [counts[row[0]]["success"], counts[row[0]]["failure"]]

    assert run_cli(argv + ["--format", "csv"])[1] == out


def test_run_output_file(tmp_path) -> None:
    path = tmp_path / "report.json"
    code, out, _ = run_cli(["run", "--beta2", "0.2", "-o", str(path)])
    assert code == EXIT_OK
    assert out == ""
    assert json.loads(path.read_text())["totals"]["total_success_probability"] == 0.4


@pytest.mark.parametrize(
    "argv, message",
    [
        (["run", "--beta2", "0.6"], "--beta2 0.6 is outside the valid range (0.0, 0.5]"),
        (["run", "--beta2", "0"], "--beta2 0.0 is outside the valid range (0.0, 0.5]"),
        (["run", "--beta2", "0.2", "--b2", "-0.1"], "--b2 -0.1 is outside the valid range"),
        (["run", "--beta2", "nan"], "outside the valid range"),
        (["run", "--beta2", "0.2", "--seed", "-1"], "--seed -1 is outside the valid range"),
        (["run", "--beta2", "0.2", "--mode", "sample", "--trials", "0"], "--trials must be >= 1"),
        (["sweep", "--beta2", "0.5:0.1:0.1"], "start is greater than stop"),
        (["sweep", "--beta2", "0.1:0.5:0"], "positive step"),
        (["sweep", "--beta2", "0.1:0.6:0.25"], "--beta2 0.6 is outside the valid range"),
        (["sweep", "--beta2", "abc"], "Cannot parse grid"),
        (["sweep", "--beta2", "0.2", "--trials", "0"], "--trials must be >= 1"),
        (["sweep", "--beta2", "0.2", "--max-workers", "0"], "--max-workers must be >= 1"),
        (["verify", "--trials", "0"], "--trials must be >= 1"),
        (["verify", "--max-workers", "0"], "--max-workers must be >= 1, not 0."),
    ],
)
def test_usage_errors(argv: List[str], message: str) -> None:
    code, out, err = run_cli(argv)
    assert code == EXIT_USAGE
    assert out == ""
    assert err.startswith("entswap: error: ")
    assert message in err
    assert err.count("\n") == 1


def test_argparse_usage_error() -> None:
    with pytest.raises(SystemExit) as excinfo:
        run_cli(["run"])
    assert excinfo.value.code == EXIT_USAGE


def test_sweep() -> None:
    code, out, _ = run_cli(["sweep", "--beta2", "0.1:0.5:0.2", "--b2", "0.2"])
    assert code == EXIT_OK
    assert out.splitlines()[0] == SWEEP_HEADER

    rows = read_csv(out)
    assert rows[0] == SWEEP_COLUMNS
    assert len(rows) == 4
    assert [row[0] for row in rows[1:]] == ["0.1000000000", "0.3000000000", "0.5000000000"]
    assert rows[1][:3] == ["0.1000000000", "0.2000000000", "0.02000000000"]
    assert rows[1][4] == "0.08000000000"
    assert rows[1][6] == "0.2000000000"
    assert rows[2][6] == "0.4000000000"
    for row in rows[1:]:
        assert len(row) == len(SWEEP_COLUMNS)
        assert float(row[8]) <= 1e-10
        for cell in row:
            assert cell == format(float(cell), "#.10g")
            assert "," not in cell


def test_sweep_matches_run() -> None:
    _, sweep_out, _ = run_cli(["sweep", "--beta2", "0.2"])
    _, run_out, _ = run_cli(["run", "--beta2", "0.2"])
    row = dict(zip(*read_csv(sweep_out)))
    document = json.loads(run_out)

    assert float(row["p_success_total"]) == document["totals"]["total_success_probability"]
    assert float(row["p_phi_plus"]) == document["branches"][0]["joint_success_probability"]
    assert float(row["p_psi_minus"]) == document["branches"][3]["joint_success_probability"]


def test_sweep_sampled() -> None:
    argv = ["sweep", "--beta2", "0.1:0.3:0.1", "--trials", "2000", "--seed", "9"]
    code, out, _ = run_cli(argv)
    assert code == EXIT_OK

    rows = read_csv(out)
    assert rows[0] == SWEEP_COLUMNS + [SAMPLED_COLUMN]
    assert len(rows) == 10
    for row in rows[1:]:
        assert abs(float(row[9]) - float(row[6])) < 0.05

    # Rows do not depend on scheduling.
    assert run_cli(argv + ["--max-workers", "1"])[1] == out


def test_sweep_process_mode() -> None:
    argv = ["sweep", "--beta2", "0.1:0.5:0.2", "--trials", "500"]
    _, thread_out, _ = run_cli(argv)
    code, process_out, _ = run_cli(argv + ["--exec-mode", "process", "--max-workers", "2"])
    assert code == EXIT_OK
    assert process_out == thread_out


def test_sweep_output_file(tmp_path) -> None:
    path = tmp_path / "sweep.csv"
    code, out, _ = run_cli(["sweep", "--beta2", "0.2", "-o", str(path)])
    assert code == EXIT_OK
    assert out == ""
    assert path.read_text().splitlines()[0] == SWEEP_HEADER


def test_verify(small_verify_config) -> None:
    argv = ["verify", "--trials", "1000", "--seed", "7"]
    code, out, _ = run_cli(argv)
    assert code == EXIT_OK

    lines = out.splitlines()
    assert lines[0] == "PASS unitarity (50 checks)"
    assert lines[2] == "PASS closed_form_grid (25 checks)"
    assert all(line.startswith("PASS ") for line in lines[:5])
    assert lines[5] == "ALL PASS"

    # Byte-identical across invocations.
    assert run_cli(argv)[1] == out


def test_verify_inverted_filter(small_verify_config, monkeypatch) -> None:
    """
    Mutation check: attenuating the smaller term fails the closed-form grid.
    """

    def inverted_planner(state):
        plan = plan_filter(state)
        return FilterPlan(1 - plan.attenuate_subspace, plan.ratio)

    monkeypatch.setattr(entswap.protocol, "plan_filter", inverted_planner)
    code, out, _ = run_cli(["verify", "--trials", "1000"])
    assert code == EXIT_VERIFY_FAILED

    lines = out.splitlines()
    assert lines[-1] == "FAILED: closed_form_grid"
    [failed] = [line for line in lines if line.startswith("FAIL closed_form_grid")]
    assert "observed" in failed
    assert "expected" in failed


@pytest.mark.slow
def test_verify_default_config() -> None:
    code, out, _ = run_cli(["verify", "--trials", "1000", "--seed", "7"])
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "ALL PASS"
