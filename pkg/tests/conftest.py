"""
Test configuration and fixtures.
"""
import numpy as np
import pytest

from src.models.mps import MPS
from src.services.mps_service import random_mps
from src.utils.linalg import haar_random_unitary


@pytest.fixture
def rng():
    """Seeded generator; every test starts from the same stream."""
    return np.random.default_rng(20240607)


@pytest.fixture
def haar(rng):
    """Haar-random unitary sampler on n qubits."""
    def sample(n: int) -> np.ndarray:
        return haar_random_unitary(2 ** n, rng)
    return sample


@pytest.fixture
def mps_factory(rng):
    """Random left-canonical MPS of a given length and bond dimension."""
    def build(length: int, chi: int) -> MPS:
        return random_mps(length, chi, rng)
    return build


@pytest.fixture
def ghz_mps():
    """GHZ state on four sites with bond dimension 2."""
    first = np.zeros((1, 2, 2))
    first[0, 0, 0] = first[0, 1, 1] = 1 / np.sqrt(2)
    bulk = np.zeros((2, 2, 2))
    bulk[0, 0, 0] = bulk[1, 1, 1] = 1.0
    last = np.zeros((2, 2, 1))
    last[0, 0, 0] = last[1, 1, 0] = 1.0
    return MPS(tensors=[first, bulk, bulk, last])

