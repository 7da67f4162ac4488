import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hilbertcomplex.exceptions import ValidationError
from hilbertcomplex.generate import random_gram, random_module
from hilbertcomplex.module import (HilbertModule, ModuleElement, direct_sum, graph_module, inner_product,
                                   orthonormal_dimension, zero_module)
from hilbertcomplex.operator import Operator


def test_inner_product_examples():
    E = HilbertModule([1], [2])
    assert inner_product(E.zero_element(), E.zero_element()).norm() == 0
    x = ModuleElement(E, [[[1], [0]]])
    y = ModuleElement(E, [[[0], [1]]])
    assert inner_product(x, y).blocks[0][0, 0] == 0
    F = HilbertModule([2], [1])
    x = ModuleElement(F, [[[1, 0]]])
    y = ModuleElement(F, [[[1, 1]]])
    np.testing.assert_array_equal(inner_product(x, y).blocks[0], [[1, 1], [0, 0]])


def test_inner_product_module_mismatch():
    with pytest.raises(ValidationError):
        inner_product(HilbertModule([1], [2]).zero_element(), HilbertModule([1], [3]).zero_element())


def test_direct_sum_examples():
    assert direct_sum(HilbertModule([1], [2]), HilbertModule([1], [3])).dims == (5,)
    E = HilbertModule([1], [2], [np.diag([2.0, 3.0])])
    S = direct_sum(E, zero_module([1]))
    assert S == E
    assert direct_sum(HilbertModule([1, 2], [1, 0]), HilbertModule([1, 2], [0, 2])).dims == (1, 2)
    with pytest.raises(ValidationError):
        direct_sum(HilbertModule([1], [1]), HilbertModule([2], [1]))


def test_orthonormal_dimension():
    assert orthonormal_dimension(HilbertModule([2], [4]), 0) == 4
    E = HilbertModule([1, 3], [0, 5])
    assert orthonormal_dimension(E, 0) == 0
    assert orthonormal_dimension(E, 1) == 5
    with pytest.raises(ValidationError):
        orthonormal_dimension(E, 2)


def test_graph_module_examples():
    E = HilbertModule([1], [1])
    t = Operator(E, E, [[[0.0]]])
    np.testing.assert_array_equal(graph_module(E, t).gram(0), [[1]])
    t = Operator(E, E, [[[1.0]]])
    np.testing.assert_array_equal(graph_module(E, t).gram(0), [[2]])
    E2 = HilbertModule([1], [2])
    t = Operator(E2, E, [[[1.0, 0.0]]])
    np.testing.assert_array_equal(graph_module(E2, t).gram(0), np.diag([2, 1]))


def test_gram_validation():
    with pytest.raises(ValidationError):
        HilbertModule([1], [2], [np.array([[1, 2], [0, 1]])])
    with pytest.raises(ValidationError):
        HilbertModule([1], [2], [np.diag([1.0, -1.0])])
    with pytest.raises(ValidationError):
        HilbertModule([1], [2], [np.eye(3)])


def _pair(seed):
    rng = np.random.default_rng(seed)
    E = random_module([1, 2, 3], [2, 3, 1], rng, grams=True)
    return E, E.random_element(rng), E.random_element(rng), rng


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_cauchy_schwarz_and_symmetry(seed):
    E, x, y, _ = _pair(seed)
    xy = inner_product(x, y)
    assert xy.norm() <= x.norm() * y.norm() * (1 + 1e-10) + 1e-12
    assert (xy - inner_product(y, x).star).norm() <= 1e-12 * (1 + x.norm() * y.norm())


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_polarization(seed):
    E, x, y, _ = _pair(seed)
    # <x,y> = 1/4 sum_k i^k <x + i^k y, x + i^k y> with <.,.> conjugate-linear in the first slot
    acc = None
    for k in range(4):
        c = 1j ** k
        z = x + y * c
        term = inner_product(z, z) * (np.conj(c) / 4)
        acc = term if acc is None else acc + term
    assert (acc - inner_product(x, y)).norm() <= 1e-10 * (1 + x.norm() * y.norm())


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_graph_inner_product(seed):
    rng = np.random.default_rng(seed)
    E = HilbertModule([2, 1], [3, 2])
    F = HilbertModule([2, 1], [2, 4])
    t = Operator(E, F, [rng.standard_normal((e, d)) for d, e in zip(E.dims, F.dims)])
    G = graph_module(E, t)
    x, y = E.random_element(rng), E.random_element(rng)
    xg, yg = ModuleElement(G, x.blocks), ModuleElement(G, y.blocks)
    direct = inner_product(x, y) + inner_product(t(x), t(y))
    assert (inner_product(xg, yg) - direct).norm() <= 1e-12 * (1 + direct.norm())


def test_gram_roots(rng):
    G = random_gram(4, rng)
    E = HilbertModule([1], [4], [G])
    np.testing.assert_allclose(E.gram_sqrt(0) @ E.gram_sqrt(0), G, atol=1e-12)
    np.testing.assert_allclose(E.gram_isqrt(0) @ E.gram_sqrt(0), np.eye(4), atol=1e-12)
