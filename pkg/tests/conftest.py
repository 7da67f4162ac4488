import numpy as np
import pytest

from hilbertcomplex import complex_from_matrices, zero_complex


@pytest.fixture
def fix():
    """0 -> C -> C^2 -> C -> 0 with t0 = col(1,1), t1 = row(1,-1)."""
    return complex_from_matrices([[[[1], [1]]], [[[1, -1]]]])


@pytest.fixture
def row():
    return complex_from_matrices([[[[1, 0]]]])


@pytest.fixture
def zero121():
    return zero_complex([1], [[1], [2], [1]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
