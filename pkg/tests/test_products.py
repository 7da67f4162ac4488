import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hilbertcomplex.complex import complex_from_matrices, dirac, zero_complex
from hilbertcomplex.exceptions import ValidationError
from hilbertcomplex.fredholm import index_complex, index_operator, pseudo_inverse_parametrix
from hilbertcomplex.generate import random_complex
from hilbertcomplex.operator import operator_norm
from hilbertcomplex.products import (TensorLayout, direct_sum_complex, sharp_dirac, sharp_dirac_residual,
                                     tensor_algebra, tensor_complex, tensor_index, tensor_parametrix,
                                     tensor_parametrix_residual, unit_complex)

ONE = complex_from_matrices([[[[1.0]]]])


def test_tensor_algebra_examples():
    assert tensor_algebra([1], [1]).block_sizes == (1,)
    assert tensor_algebra([1, 2], [3]).block_sizes == (3, 6)
    assert tensor_algebra([2], [2]).block_sizes == (4,)


def test_direct_sum_examples(fix, row):
    Z = zero_complex([1], [[0], [0]])
    D = direct_sum_complex(fix, Z)
    assert [E.dims for E in D.modules] == [E.dims for E in fix.modules]
    two = complex_from_matrices([[[[1, 0, 0]]]])
    assert index_complex(direct_sum_complex(row, two)).vector == (3,)
    assert index_complex(direct_sum_complex(fix, fix)).is_zero()
    with pytest.raises(ValidationError):
        direct_sum_complex(fix, zero_complex([2], [[1], [1]]))


def test_tensor_complex_examples(fix, row):
    S = random_complex([1, 2], [[1, 2], [2, 3], [1, 1]], seed=3)
    T = tensor_complex(unit_complex([1]), S)
    assert [E.dims for E in T.modules[:3]] == [E.dims for E in S.modules]
    assert all(operator_norm(a - b) == 0 for a, b in zip(T.diffs, S.diffs))
    T = tensor_complex(ONE, ONE)
    np.testing.assert_array_equal(T.diffs[0].blocks[0], [[1], [1]])
    # j-ascending layout: (0,1) before (1,0)
    np.testing.assert_array_equal(T.diffs[1].blocks[0], [[1, -1]])
    assert index_complex(T).is_zero()
    assert index_complex(tensor_complex(fix, row)).is_zero()
    assert TensorLayout(ONE, ONE).pairs == [[(0, 0)], [(0, 1), (1, 0)], [(1, 1)]]


def test_tensor_parametrix_examples(fix, row):
    P, pred = tensor_parametrix(ONE, pseudo_inverse_parametrix(ONE), ONE, pseudo_inverse_parametrix(ONE))
    assert max(P.residual_norms()) <= 1e-15
    assert tensor_parametrix_residual(fix, pseudo_inverse_parametrix(fix), row,
                                      pseudo_inverse_parametrix(row)) <= 1e-12
    R = random_complex([1], [[1], [2], [1]], target=[[0], [0], [0]], seed=1)
    S = random_complex([1], [[2], [2]], target=[[0], [0]], seed=2)
    P, _ = tensor_parametrix(R, pseudo_inverse_parametrix(R), S, pseudo_inverse_parametrix(S))
    assert max(P.residual_norms()) <= 1e-10


def test_sharp_dirac_examples(fix):
    np.testing.assert_array_equal(sharp_dirac(ONE, ONE).blocks[0], [[1, -1], [1, 1]])
    assert index_operator(sharp_dirac(ONE, ONE)).is_zero()
    assert sharp_dirac_residual(ONE, ONE) == 0
    U = unit_complex([1])
    assert sharp_dirac_residual(fix, U) == 0
    assert operator_norm(sharp_dirac(fix, U) - dirac(fix).even) == 0
    a = random_complex([1], [[3], [2]], seed=5)
    b = random_complex([1], [[1], [3], [1]], seed=6)
    assert index_operator(sharp_dirac(a, b)).vector == (index_complex(a).vector[0] * index_complex(b).vector[0],)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_tensor_properties(seed):
    rng = np.random.default_rng(seed)
    A = [int(x) for x in rng.integers(1, 3, int(rng.integers(1, 3)))]
    B = [int(x) for x in rng.integers(1, 3, int(rng.integers(1, 3)))]
    R = random_complex(A, [[int(x) for x in rng.integers(0, 3, len(A))] for _ in range(int(rng.integers(2, 4)))],
                       seed=rng, grams=bool(rng.integers(0, 2)))
    S = random_complex(B, [[int(x) for x in rng.integers(0, 3, len(B))] for _ in range(int(rng.integers(2, 4)))],
                       seed=rng, grams=bool(rng.integers(0, 2)))
    T = tensor_complex(R, S)
    assert max(T.composite_norms, default=0) <= 1e-9
    iT = index_complex(T)
    assert iT == index_operator(sharp_dirac(R, S)) == tensor_index(index_complex(R), index_complex(S))
    assert sharp_dirac_residual(R, S) <= 1e-9
    assert tensor_parametrix_residual(R, pseudo_inverse_parametrix(R), S, pseudo_inverse_parametrix(S)) <= 1e-8
