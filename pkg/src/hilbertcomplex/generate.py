"""Seeded random fixtures: operators, grams and complexes with prescribed cohomology."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .algebra import make_algebra
from .complex import Complex
from .exceptions import ValidationError
from .module import HilbertModule
from .operator import Operator


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unitary(n: int, rng) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_gram(n: int, rng, spread: float = 4.0) -> np.ndarray:
    """Positive definite matrix with eigenvalues in ``[1/spread, spread]``."""
    U = random_unitary(n, rng)
    w = np.exp(rng.uniform(-np.log(spread), np.log(spread), n))
    G = (U * w) @ U.conj().T
    return (G + G.conj().T) / 2


def random_module(algebra, dims, rng=None, grams: bool = False) -> HilbertModule:
    rng = _rng(rng)
    alg = make_algebra(algebra)
    if not grams:
        return HilbertModule(alg, dims)
    return HilbertModule(alg, dims, [random_gram(d, rng) for d in dims])


def random_operator(source: HilbertModule, target: HilbertModule, rng=None, scale: float = 1.0) -> Operator:
    rng = _rng(rng)
    return Operator(source, target, [scale * (rng.standard_normal((e, d)) + 1j * rng.standard_normal((e, d)))
                                     for d, e in zip(source.dims, target.dims)])


def random_invertible(E: HilbertModule, rng=None, low: float = 0.5, high: float = 2.0) -> tuple[Operator, Operator]:
    """Invertible operator on ``E`` with singular values in ``[low, high]`` and its inverse."""
    rng = _rng(rng)
    A, Ai = [], []
    for d in E.dims:
        s = rng.uniform(low, high, d)
        U, V = random_unitary(d, rng), random_unitary(d, rng)
        A.append((U * s) @ V.conj().T)
        Ai.append((V / s) @ U.conj().T)
    return Operator(E, E, A), Operator(E, E, Ai)


def feasible_ranks(dims: Sequence[int], target: Sequence[int]) -> list[int]:
    """Ranks ``r_k = d_k - h_k - r_{k-1}`` of one block, or raise if the target is infeasible."""
    for k, (d, h) in enumerate(zip(dims, target)):
        if not 0 <= h <= d:
            raise ValidationError(f"target h_{k} = {h} must lie in [0, {d}]")
    gap = sum((-1) ** k * (d - h) for k, (d, h) in enumerate(zip(dims, target)))
    if gap:
        raise ValidationError(
            f"infeasible cohomology {list(target)} for dims {list(dims)}: need "
            f"sum (-1)^k h_k = sum (-1)^k d_k (Euler constraint fails by {gap})")
    r_prev = 0
    ranks = []
    n = len(dims)
    for k in range(n):
        r = dims[k] - target[k] - r_prev
        if k == n - 1:
            if r != 0:
                raise ValidationError(
                    f"infeasible cohomology {list(target)} for dims {list(dims)}: need "
                    f"sum (-1)^k h_k = sum (-1)^k d_k with 0 <= h_k <= d_k "
                    f"(Euler constraint fails by {r})")
            break
        if r < 0 or r > dims[k + 1]:
            raise ValidationError(
                f"infeasible cohomology {list(target)} for dims {list(dims)}: rank of t_{k} would be {r}, "
                f"must lie in [0, min(d_{k} - r_{k - 1}, d_{k + 1})]")
        ranks.append(r)
        r_prev = r
    return ranks


def _random_ranks(dims: Sequence[int], rng) -> list[int]:
    ranks, r_prev = [], 0
    for k in range(len(dims) - 1):
        hi = min(dims[k] - r_prev, dims[k + 1])
        r = int(rng.integers(0, hi + 1))
        ranks.append(r)
        r_prev = r
    return ranks


def random_complex(algebra, dims_list: Sequence[Sequence[int]], target: Optional[Sequence[Sequence[int]]] = None,
                   seed=None, grams: bool = False, tol: float = 1e-10) -> Complex:
    """Complex ``E_0 -> ... -> E_{N+1}`` built from random frames of exact, coexact and harmonic parts.

    ``dims_list[k]`` are the fiber dims of ``E_k``; ``target[k]`` optional cohomology dims.
    Differentials are ``t_k = B_exact(k+1) A_k B_coexact(k)^flat`` with ``A_k``'s singular
    values in ``[0.5, 2]``.
    """
    rng = _rng(seed)
    alg = make_algebra(algebra)
    n_mod = len(dims_list)
    if n_mod < 2:
        raise ValidationError("need at least two modules")
    for k, d in enumerate(dims_list):
        if len(d) != alg.m:
            raise ValidationError(f"dims_list[{k}] has {len(d)} entries, algebra has {alg.m} blocks")
    if target is not None and (len(target) != n_mod or any(len(h) != alg.m for h in target)):
        raise ValidationError("target must give one cohomology vector per module")
    mods = [random_module(alg, d, rng, grams) for d in dims_list]
    ranks = []
    for i in range(alg.m):
        col = [dims_list[k][i] for k in range(n_mod)]
        if target is None:
            ranks.append(_random_ranks(col, rng))
        else:
            ranks.append(feasible_ranks(col, [target[k][i] for k in range(n_mod)]))
    # frames[k][i] = (exact, coexact, harmonic) column blocks, orthonormal in E_k's inner product
    frames = []
    for k, E in enumerate(mods):
        per = []
        for i, d in enumerate(E.dims):
            U = random_unitary(d, rng)
            if E.has_grams:
                U = E.gram_isqrt(i) @ U
            re = ranks[i][k - 1] if k >= 1 else 0
            rc = ranks[i][k] if k < n_mod - 1 else 0
            per.append((U[:, :re], U[:, re:re + rc], U[:, re + rc:]))
        frames.append(per)
    diffs = []
    for k in range(n_mod - 1):
        blocks = []
        for i in range(alg.m):
            r = ranks[i][k]
            Bex = frames[k + 1][i][0]
            Bco = frames[k][i][1]
            s = rng.uniform(0.5, 2.0, r)
            A = (random_unitary(r, rng) * s) @ random_unitary(r, rng).conj().T
            flat = Bco.conj().T @ mods[k].gram(i)
            blocks.append(Bex @ A @ flat)
        diffs.append(Operator(mods[k], mods[k + 1], blocks))
    meta = {"ranks": [list(r) for r in ranks]}
    return Complex(mods, diffs, "complex", tol, meta)


def random_dims(algebra, length: int, max_dim: int, rng) -> list[list[int]]:
    alg = make_algebra(algebra)
    return [[int(rng.integers(0, max_dim + 1)) for _ in range(alg.m)] for _ in range(length + 1)]


def random_algebra(rng, max_blocks: int = 3, max_size: int = 3):
    return make_algebra([int(rng.integers(1, max_size + 1)) for _ in range(int(rng.integers(1, max_blocks + 1)))])
