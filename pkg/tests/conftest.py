import pytest
import numpy as np

from flecs.context import ContextState


@pytest.fixture(autouse=True)
def random_seed():
    np.random.seed(42)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def no_checks():
    with ContextState(check_finite=False, check_symmetric=False):
        yield
