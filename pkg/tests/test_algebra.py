import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hilbertcomplex.algebra import AlgebraElement, K0Class, k0_class, k0_sub, make_algebra
from hilbertcomplex.exceptions import ValidationError
from hilbertcomplex.module import HilbertModule, zero_module


def test_make_algebra_examples():
    assert make_algebra([1]).block_sizes == (1,)
    assert make_algebra([1, 2]).m == 2
    assert make_algebra([3]) == make_algebra((3,))
    assert make_algebra([1, 2]) != make_algebra([2, 1])


@pytest.mark.parametrize("bad", [[], [0], [2, -1]])
def test_make_algebra_rejects(bad):
    with pytest.raises(ValidationError):
        make_algebra(bad)


def test_k0_class_examples():
    assert k0_class(HilbertModule([1], [2])) == K0Class((2,), (0,))
    assert k0_class(HilbertModule([1, 2], [1, 3])).plus == (1, 3)
    assert k0_class(zero_module([1])).is_zero()


def test_k0_sub_examples():
    assert k0_sub(K0Class((2,), (0,)), K0Class((2,), (0,))) == K0Class.zero(1)
    assert k0_sub(K0Class((3,), (0,)), K0Class((1,), (0,))) == K0Class((2,), (0,))
    d = k0_sub(K0Class((0, 1), (0, 0)), K0Class((2, 0), (0, 0)))
    assert (d.plus, d.minus) == ((0, 1), (2, 0))


def test_k0_canonical_form():
    c = K0Class((5, 1), (3, 4))
    assert (c.plus, c.minus) == ((2, 0), (0, 3))


def test_k0_length_mismatch():
    with pytest.raises(ValidationError):
        K0Class.zero(1) + K0Class.zero(2)


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=4), st.data())
def test_k0_group_laws(v, data):
    w = data.draw(st.lists(st.integers(-20, 20), min_size=len(v), max_size=len(v)))
    a, b = K0Class.from_vector(v), K0Class.from_vector(w)
    assert (a + (-a)).is_zero()
    assert a + b == b + a
    assert (a - b).vector == tuple(x - y for x, y in zip(v, w))
    assert all(min(p, q) == 0 for p, q in zip((a - b).plus, (a - b).minus))


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_cstar_identity(seed):
    rng = np.random.default_rng(seed)
    alg = make_algebra([1, 2, 3])

    def rand():
        return AlgebraElement(alg, [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                                    for n in alg.block_sizes])
    a, b = rand(), rand()
    assert (a * b).norm() <= a.norm() * b.norm() * (1 + 1e-10)
    assert abs((a.star * a).norm() - a.norm() ** 2) <= 1e-10 * a.norm() ** 2
