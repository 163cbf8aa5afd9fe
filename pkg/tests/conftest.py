import numpy as np
import pytest

from topoprobe.groundstate import ground_state
from topoprobe.hamiltonians import HamiltonianSpec


@pytest.fixture(scope="session")
def ground_state_cache():
    """Ground states are deterministic; solve each spec once per session."""
    cache = {}

    def solve(**kwargs):
        key = tuple(sorted(kwargs.items()))
        if key not in cache:
            cache[key] = ground_state(HamiltonianSpec(**kwargs), seed=0)
        return cache[key]

    return solve


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
