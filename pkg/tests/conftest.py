# conftest.py - Shared fixtures for the noisy Trotter toolkit tests
import numpy as np
import pytest

from services.simulation_service.hamiltonians import build_tfi


@pytest.fixture
def tfi2():
    """Open two-qubit TFI chain, J=2, h=1."""
    return build_tfi(2, 2.0, 1.0, periodic=False)


@pytest.fixture
def tfi3():
    return build_tfi(3, 2.0, 1.0, periodic=False)


@pytest.fixture
def tfi4():
    return build_tfi(4, 2.0, 1.0, periodic=False)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
