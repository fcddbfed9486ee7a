import numpy as np
import pytest

from entswap.logging import logger
from entswap.protocol import PairSpec


@pytest.fixture
def rng() -> np.random.Generator:
    """
    A fixed-seed generator so that randomized checks are reproducible.
    """
    return np.random.default_rng(20011)


@pytest.fixture
def equal_pairs():
    """
    Two identical pairs with beta^2 = 0.2.
    """
    return PairSpec.from_weight(0.2), PairSpec.from_weight(0.2)


@pytest.fixture
def unequal_pairs():
    """
    beta^2 = 0.2 and b^2 = 0.3, a Case1 instance.
    """
    return PairSpec.from_weight(0.2), PairSpec.from_weight(0.3)


@pytest.fixture(autouse=True)
def reset_log_level():
    """
    CLI tests change the package log level; restore it after every test.
    """
    level = logger.level
    yield
    logger.setLevel(level)
