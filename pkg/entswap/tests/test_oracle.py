import numpy as np
import pytest

import entswap.oracle
from entswap.bell import BellOutcome
from entswap.oracle import embed, filter_matrix, kron, oracle_run
from entswap.statevec import unitarity_error
from entswap.tests.utils import pair_weights


def test_kron_matches_numpy(rng) -> None:
    a = rng.normal(size=4) + 1j * rng.normal(size=4)
    b = rng.normal(size=2) + 1j * rng.normal(size=2)
    np.testing.assert_allclose(kron(a, b), np.kron(a, b), atol=1e-15)


def test_embed_identity_factors() -> None:
    x = np.array([[0, 1], [1, 0]])
    np.testing.assert_allclose(embed(x, [1], 2), np.kron(x, np.eye(2)))
    np.testing.assert_allclose(embed(x, [2], 2), np.kron(np.eye(2), x))


def test_filter_matrix_unitary() -> None:
    for attenuate in (0, 1):
        assert unitarity_error(filter_matrix(attenuate, 0.3 - 0.4j)) <= 1e-12


def test_oracle_unequal_pairs(unequal_pairs) -> None:
    oracle = oracle_run(*unequal_pairs)
    for outcome, success, failure in [
        (BellOutcome.PhiPlus, 0.06, 0.25),
        (BellOutcome.PhiMinus, 0.06, 0.25),
        (BellOutcome.PsiPlus, 0.14, 0.05),
        (BellOutcome.PsiMinus, 0.14, 0.05),
    ]:
        assert oracle[outcome].joint_success_probability == pytest.approx(success, abs=1e-12)
        assert oracle[outcome].joint_failure_probability == pytest.approx(failure, abs=1e-12)


def test_oracle_failure_is_projected(monkeypatch) -> None:
    """
    The failure mass comes from the ancilla |1> projection, not from the
    branch probability minus the success mass.
    """

    def lossy_filter(attenuate, ratio):
        # Keeps only the ancilla-0 half of the input, at half amplitude.
        return np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)

    monkeypatch.setattr(entswap.oracle, "filter_matrix", lossy_filter)
    oracle = oracle_run(*pair_weights(0.2, 0.3))
    for branch in oracle.values():
        assert branch.joint_failure_probability == 0
        assert branch.joint_success_probability == pytest.approx(
            branch.branch_probability / 4, abs=1e-12
        )
