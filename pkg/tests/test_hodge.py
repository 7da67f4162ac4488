import numpy as np
from hypothesis import given, settings, strategies as st

from hilbertcomplex.complex import bounded_transform_complex, zero_complex
from hilbertcomplex.fredholm import module_euler_class
from hilbertcomplex.generate import random_complex
from hilbertcomplex.hodge import (betti, check_hodge_equivalences, cohomology, euler_characteristic_dims,
                                  harmonic_meet, hodge_split)
from hilbertcomplex.operator import Operator, operator_norm


def test_hodge_split_examples(fix, row, zero121):
    for k in range(3):
        s = hodge_split(zero121, k)
        assert operator_norm(s.harmonic - Operator.identity(zero121.modules[k])) == 0
        assert operator_norm(s.exact) == 0 and operator_norm(s.coexact) == 0
    s = hodge_split(fix, 1)
    assert operator_norm(s.harmonic) <= 1e-15
    np.testing.assert_allclose(s.exact.blocks[0], [[.5, .5], [.5, .5]], atol=1e-15)
    np.testing.assert_allclose(s.coexact.blocks[0], [[.5, -.5], [-.5, .5]], atol=1e-15)
    s = hodge_split(row, 0)
    np.testing.assert_allclose(s.harmonic.blocks[0], np.diag([0, 1]), atol=1e-15)
    np.testing.assert_allclose(s.coexact.blocks[0], np.diag([1, 0]), atol=1e-15)
    assert operator_norm(s.exact) == 0


def test_cohomology_examples(fix, row):
    assert betti(fix) == [(0,), (0,), (0,)]
    H0, c0 = cohomology(row, 0)
    assert H0.dims == (1,) and c0.plus == (1,)
    assert cohomology(row, 1)[0].dims == (0,)
    Z = zero_complex([1], [[3], [4]])
    assert betti(Z) == [(3,), (4,)]


def test_hodge_equivalence_examples(fix, zero121):
    assert check_hodge_equivalences(zero121).max == 0
    assert check_hodge_equivalences(fix).max <= 1e-10
    C = random_complex([1], [[2], [3], [2]], seed=5)
    assert check_hodge_equivalences(C).max <= 1e-8


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hodge_properties(seed):
    rng = np.random.default_rng(seed)
    alg = [int(x) for x in rng.integers(1, 3, int(rng.integers(1, 3)))]
    dims = [[int(x) for x in rng.integers(0, 5, len(alg))] for _ in range(int(rng.integers(2, 5)))]
    C = random_complex(alg, dims, seed=rng, grams=bool(rng.integers(0, 2)))
    assert check_hodge_equivalences(C).passed
    eu = [sum((-1) ** k * b[i] for k, b in enumerate(betti(C))) for i in range(len(alg))]
    assert tuple(eu) == euler_characteristic_dims(C) == module_euler_class(C).vector
    FC = bounded_transform_complex(C)
    for k in range(C.N + 2):
        H = hodge_split(C, k).harmonic
        assert operator_norm(H - harmonic_meet(C, k)) <= 1e-8
        assert operator_norm(H - hodge_split(FC, k).harmonic) <= 1e-9


def test_target_cohomology_is_realised():
    C = random_complex([1, 2], [[2, 1], [3, 3], [1, 2]], target=[[1, 0], [1, 1], [0, 1]], seed=3)
    assert betti(C) == [(1, 0), (1, 1), (0, 1)]
