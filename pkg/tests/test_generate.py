import numpy as np
import pytest

from hilbertcomplex.exceptions import ValidationError
from hilbertcomplex.generate import feasible_ranks, random_complex, random_gram, random_invertible, random_unitary
from hilbertcomplex.hodge import betti
from hilbertcomplex.module import HilbertModule
from hilbertcomplex.operator import Operator, compose, operator_norm


def test_unitary_and_gram(rng):
    U = random_unitary(4, rng)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(4), atol=1e-14)
    G = random_gram(3, rng)
    w = np.linalg.eigvalsh(G)
    assert w.min() >= 0.25 - 1e-12 and w.max() <= 4 + 1e-12


def test_invertible_pair(rng):
    E = HilbertModule([1, 2], [3, 2])
    A, Ai = random_invertible(E, rng)
    assert operator_norm(compose(A, Ai) - Operator.identity(E)) <= 1e-13


def test_feasible_ranks():
    assert feasible_ranks([1, 2, 1], [0, 0, 0]) == [1, 1]
    assert feasible_ranks([2, 1], [1, 0]) == [1]
    with pytest.raises(ValidationError, match="Euler"):
        feasible_ranks([1, 2, 1], [1, 0, 0])
    with pytest.raises(ValidationError, match="must lie"):
        feasible_ranks([1, 1], [0, 2])
    with pytest.raises(ValidationError, match="rank of t_0"):
        feasible_ranks([1, 0, 0, 1], [0, 0, 0, 0])


def test_random_complex_is_seeded():
    a = random_complex([1, 2], [[1, 2], [3, 3], [2, 1]], seed=5, grams=True)
    b = random_complex([1, 2], [[1, 2], [3, 3], [2, 1]], seed=5, grams=True)
    assert all(np.array_equal(x, y) for s, t in zip(a.diffs, b.diffs) for x, y in zip(s.blocks, t.blocks))


def test_random_complex_target():
    C = random_complex([1], [[2], [4], [3], [1]], target=[[1], [1], [0], [0]], seed=2, grams=True)
    assert betti(C) == [(1,), (1,), (0,), (0,)]
    with pytest.raises(ValidationError):
        random_complex([1], [[2]], seed=0)
    with pytest.raises(ValidationError):
        random_complex([1, 1], [[2], [1]], seed=0)
