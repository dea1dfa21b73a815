import numpy as np
import pytest

from slicegibbs.accel import NUMBA_ENABLED


@pytest.fixture(scope="session", autouse=True)
def warm_engine():
    """Compile (or cache-load) the chain engine once so per-test timing
    budgets never include numba compilation."""
    if NUMBA_ENABLED:
        from slicegibbs import engine

        engine.warmup()
    yield


@pytest.fixture()
def rng():
    return np.random.default_rng(20240801)
