import numpy as np
import pytest

from blochweyl.symbols import TrigSeries, schrodinger_symbol


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def mathieu():
    """(2 pi)^2 xi^2 + 2 cos(2 pi x), the workhorse test symbol."""
    return schrodinger_symbol(TrigSeries.cosine(1, (1,), 2.0))
