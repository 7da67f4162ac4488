"""Finite-rank Hilbert C*-modules over a finite-dimensional C*-algebra.

A module over ``M_{n_1} + ... + M_{n_m}`` is determined up to isomorphism by
fiber multiplicities ``d_i``; its elements are tuples of ``d_i x n_i`` matrices
with inner product ``x_i^H G_i y_i``.  Grams default to identities.
"""

from __future__ import annotations

from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .algebra import AlgebraElement, make_algebra
from .exceptions import ValidationError

PD_TOL = 1e-12


def _herm_eig(g: np.ndarray):
    w, v = np.linalg.eigh((g + g.conj().T) / 2)
    return w, v


class HilbertModule:
    """Module ``E = (+)_i Mat(d_i, n_i)`` with optional Gram metrics."""

    def __init__(self, algebra, dims: Sequence[int], grams: Optional[Sequence] = None):
        algebra = make_algebra(algebra)
        dims = tuple(int(d) for d in dims)
        if len(dims) != algebra.m:
            raise ValidationError(f"dims has length {len(dims)}, algebra has {algebra.m} blocks")
        if any(d < 0 for d in dims):
            raise ValidationError(f"dims must be nonnegative, got {list(dims)}")
        if grams is not None:
            if len(grams) != algebra.m:
                raise ValidationError(f"expected {algebra.m} grams, got {len(grams)}")
            checked = []
            for i, (d, g) in enumerate(zip(dims, grams)):
                g = np.array(g, dtype=complex)
                if g.size == d * d:
                    g = g.reshape((d, d))
                if g.shape != (d, d):
                    raise ValidationError(f"gram {i} has shape {g.shape}, expected {(d, d)}")
                if d:
                    scale = max(np.abs(g).max(), 1.0)
                    if np.abs(g - g.conj().T).max() > 1e-10 * scale:
                        raise ValidationError(f"gram {i} is not Hermitian")
                    w = np.linalg.eigvalsh((g + g.conj().T) / 2)
                    if w[0] <= PD_TOL * max(w[-1], 1e-300):
                        raise ValidationError(f"gram {i} is not positive definite (min eigenvalue {w[0]:.3e})")
                    g = (g + g.conj().T) / 2
                g.setflags(write=False)
                checked.append(g)
            grams = tuple(checked)
        self.algebra = algebra
        self.dims = dims
        self._grams = grams

    @property
    def m(self) -> int:
        return self.algebra.m

    @property
    def has_grams(self) -> bool:
        return self._grams is not None

    @property
    def grams(self):
        return self._grams

    def gram(self, i: int) -> np.ndarray:
        if self._grams is None:
            return np.eye(self.dims[i], dtype=complex)
        return self._grams[i]

    @cached_property
    def _gram_roots(self):
        out = []
        for i, d in enumerate(self.dims):
            if self._grams is None or d == 0:
                out.append((np.eye(d, dtype=complex), np.eye(d, dtype=complex), np.eye(d, dtype=complex)))
                continue
            w, v = _herm_eig(self._grams[i])
            vh = v.conj().T
            out.append(((v * np.sqrt(w)) @ vh, (v / np.sqrt(w)) @ vh, (v / w) @ vh))
        return tuple(out)

    def gram_sqrt(self, i: int) -> np.ndarray:
        return self._gram_roots[i][0]

    def gram_isqrt(self, i: int) -> np.ndarray:
        return self._gram_roots[i][1]

    def gram_inv(self, i: int) -> np.ndarray:
        return self._gram_roots[i][2]

    def plain(self) -> "HilbertModule":
        """Same dims, default inner product."""
        return HilbertModule(self.algebra, self.dims)

    def is_zero(self) -> bool:
        return not any(self.dims)

    def same_space(self, other: "HilbertModule") -> bool:
        return self.algebra == other.algebra and self.dims == other.dims

    def __eq__(self, other):
        if not isinstance(other, HilbertModule) or not self.same_space(other):
            return False
        if self._grams is None and other._grams is None:
            return True
        return all(np.allclose(self.gram(i), other.gram(i), rtol=1e-12, atol=1e-12)
                   for i in range(self.m))

    def __hash__(self):
        return hash((self.algebra, self.dims))

    def __repr__(self):
        tag = ", grams" if self._grams is not None else ""
        return f"HilbertModule({list(self.algebra.block_sizes)}, dims={list(self.dims)}{tag})"

    def zero_element(self) -> "ModuleElement":
        return ModuleElement(self, [np.zeros((d, n), dtype=complex)
                                    for d, n in zip(self.dims, self.algebra.block_sizes)])

    def random_element(self, rng: np.random.Generator) -> "ModuleElement":
        return ModuleElement(self, [rng.standard_normal((d, n)) + 1j * rng.standard_normal((d, n))
                                    for d, n in zip(self.dims, self.algebra.block_sizes)])


class ModuleElement:
    __slots__ = ("module", "blocks")

    def __init__(self, module: HilbertModule, blocks):
        blocks = tuple(np.asarray(b, dtype=complex) for b in blocks)
        if len(blocks) != module.m:
            raise ValidationError(f"expected {module.m} blocks, got {len(blocks)}")
        for d, n, b in zip(module.dims, module.algebra.block_sizes, blocks):
            if b.shape != (d, n):
                raise ValidationError(f"element block shape {b.shape}, expected {(d, n)}")
        self.module = module
        self.blocks = blocks

    def __add__(self, other):
        _same_module(self, other)
        return ModuleElement(self.module, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        _same_module(self, other)
        return ModuleElement(self.module, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, c):
        if isinstance(c, AlgebraElement):
            # right module action x.a
            return ModuleElement(self.module, [x @ a for x, a in zip(self.blocks, c.blocks)])
        return ModuleElement(self.module, [c * x for x in self.blocks])

    def __rmul__(self, c):
        return ModuleElement(self.module, [c * x for x in self.blocks])

    def norm(self) -> float:
        return float(np.sqrt(inner_product(self, self).norm()))


def _same_module(x: ModuleElement, y: ModuleElement):
    if not x.module.same_space(y.module):
        raise ValidationError("elements belong to different modules")


def inner_product(x: ModuleElement, y: ModuleElement) -> AlgebraElement:
    """Algebra-valued inner product, blockwise ``x_i^H G_i y_i``."""
    _same_module(x, y)
    E = x.module
    out = []
    for i, (a, b) in enumerate(zip(x.blocks, y.blocks)):
        if E.has_grams:
            out.append(a.conj().T @ E.gram(i) @ b)
        else:
            out.append(a.conj().T @ b)
    return AlgebraElement(E.algebra, out)


def zero_module(algebra) -> HilbertModule:
    algebra = make_algebra(algebra)
    return HilbertModule(algebra, (0,) * algebra.m)


def _block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
    out[:a.shape[0], :a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def direct_sum(*modules: HilbertModule) -> HilbertModule:
    """Orthogonal sum; grams combine block-diagonally."""
    if not modules:
        raise ValidationError("direct_sum needs at least one module")
    alg = modules[0].algebra
    for E in modules[1:]:
        if E.algebra != alg:
            raise ValidationError(f"algebra mismatch: {E.algebra!r} vs {alg!r}")
    dims = tuple(sum(E.dims[i] for E in modules) for i in range(alg.m))
    if not any(E.has_grams for E in modules):
        return HilbertModule(alg, dims)
    grams = []
    for i in range(alg.m):
        g = np.zeros((0, 0), dtype=complex)
        for E in modules:
            g = _block_diag(g, E.gram(i))
        grams.append(g)
    return HilbertModule(alg, dims, grams)


def orthonormal_dimension(E: HilbertModule, block: int) -> int:
    """Hilbert-space dimension of ``E e_0`` for a minimal projection ``e_0`` in ``block``."""
    if not 0 <= block < E.m:
        raise ValidationError(f"block index {block} out of range for {E.m} blocks")
    return E.dims[block]


def graph_module(E: HilbertModule, t) -> HilbertModule:
    """``E`` with the graph inner product ``<x,y> + <tx,ty>``."""
    if not t.source.same_space(E):
        raise ValidationError("operator source does not match module")
    grams = []
    for i, M in enumerate(t.blocks):
        grams.append(E.gram(i) + M.conj().T @ t.target.gram(i) @ M)
    return HilbertModule(E.algebra, E.dims, grams)
