import numpy as np
import pytest

from zonoreach import benchmark


@pytest.fixture(scope="session")
def bench():
    """One shared benchmark build: K=2-capable data, Ns=3, default seed."""
    return benchmark.build()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(0)
