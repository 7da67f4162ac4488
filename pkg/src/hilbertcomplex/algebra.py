"""Finite-dimensional C*-algebras ``M_{n_1}(C) + ... + M_{n_m}(C)`` and K0 arithmetic.

K0 of such an algebra is Z^m; the class of a finite-rank module is its vector
of fiber multiplicities, one entry per matrix block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import ValidationError


@dataclass(frozen=True)
class AlgebraDescriptor:
    """Ordered list of matrix-block sizes ``[n_1, ..., n_m]``."""

    block_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.block_sizes)
        if not sizes:
            raise ValidationError("algebra needs at least one block")
        if any(n < 1 for n in sizes):
            raise ValidationError(f"block sizes must be positive, got {list(sizes)}")
        object.__setattr__(self, "block_sizes", sizes)

    @property
    def m(self) -> int:
        return len(self.block_sizes)

    def __len__(self):
        return len(self.block_sizes)

    def __repr__(self):
        return f"AlgebraDescriptor({list(self.block_sizes)})"

    def to_dict(self) -> dict:
        return {"blocks": list(self.block_sizes)}

    @classmethod
    def from_dict(cls, d: dict) -> "AlgebraDescriptor":
        return cls(tuple(d["blocks"]))


def make_algebra(block_sizes: Sequence[int]) -> AlgebraDescriptor:
    if isinstance(block_sizes, AlgebraDescriptor):
        return block_sizes
    return AlgebraDescriptor(tuple(block_sizes))


class AlgebraElement:
    """An element of the algebra, stored as one square matrix per block."""

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: AlgebraDescriptor, blocks):
        blocks = tuple(np.asarray(b, dtype=complex) for b in blocks)
        if len(blocks) != algebra.m:
            raise ValidationError(f"expected {algebra.m} blocks, got {len(blocks)}")
        for n, b in zip(algebra.block_sizes, blocks):
            if b.shape != (n, n):
                raise ValidationError(f"block shape {b.shape} does not match size {n}")
            b.setflags(write=False)
        self.algebra = algebra
        self.blocks = blocks

    @classmethod
    def zeros(cls, algebra: AlgebraDescriptor) -> "AlgebraElement":
        return cls(algebra, [np.zeros((n, n)) for n in algebra.block_sizes])

    @classmethod
    def identity(cls, algebra: AlgebraDescriptor) -> "AlgebraElement":
        return cls(algebra, [np.eye(n) for n in algebra.block_sizes])

    def _check(self, other: "AlgebraElement"):
        if self.algebra != other.algebra:
            raise ValidationError("algebra elements live in different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            return AlgebraElement(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])
        return AlgebraElement(self.algebra, [other * a for a in self.blocks])

    __rmul__ = __mul__

    @property
    def star(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [a.conj().T for a in self.blocks])

    def norm(self) -> float:
        """C*-norm of a direct sum: the largest blockwise spectral norm."""
        return max((_spectral_norm(b) for b in self.blocks), default=0.0)

    def __repr__(self):
        return f"AlgebraElement({self.algebra!r}, norm={self.norm():.3g})"


def _spectral_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


@dataclass(frozen=True)
class K0Class:
    """Reduced formal difference ``[plus] - [minus]`` in K0 = Z^m."""

    plus: tuple[int, ...]
    minus: tuple[int, ...]

    def __post_init__(self):
        plus = tuple(int(v) for v in self.plus)
        minus = tuple(int(v) for v in self.minus)
        if len(plus) != len(minus):
            raise ValidationError("plus and minus vectors differ in length")
        if any(v < 0 for v in plus + minus):
            raise ValidationError("K0 entries must be nonnegative")
        net = [p - q for p, q in zip(plus, minus)]
        object.__setattr__(self, "plus", tuple(max(v, 0) for v in net))
        object.__setattr__(self, "minus", tuple(max(-v, 0) for v in net))

    @classmethod
    def from_vector(cls, v: Sequence[int]) -> "K0Class":
        v = [int(x) for x in v]
        return cls(tuple(max(x, 0) for x in v), tuple(max(-x, 0) for x in v))

    @classmethod
    def zero(cls, m: int) -> "K0Class":
        return cls((0,) * m, (0,) * m)

    @property
    def vector(self) -> tuple[int, ...]:
        return tuple(p - q for p, q in zip(self.plus, self.minus))

    def __len__(self):
        return len(self.plus)

    def _check(self, other: "K0Class"):
        if len(self) != len(other):
            raise ValidationError(
                f"K0 classes over algebras of different length ({len(self)} vs {len(other)})")

    def __add__(self, other: "K0Class") -> "K0Class":
        self._check(other)
        return K0Class.from_vector([a + b for a, b in zip(self.vector, other.vector)])

    def __sub__(self, other: "K0Class") -> "K0Class":
        self._check(other)
        return K0Class.from_vector([a - b for a, b in zip(self.vector, other.vector)])

    def __neg__(self) -> "K0Class":
        return K0Class(self.minus, self.plus)

    def __mul__(self, n: int) -> "K0Class":
        return K0Class.from_vector([int(n) * a for a in self.vector])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.plus) and not any(self.minus)

    def to_dict(self) -> dict:
        return {"plus": list(self.plus), "minus": list(self.minus)}

    def __repr__(self):
        return f"K0Class(+{list(self.plus)}, -{list(self.minus)})"


def k0_class(E) -> K0Class:
    """K0 class of a finite-rank module: its fiber multiplicities."""
    return K0Class(tuple(E.dims), (0,) * len(E.dims))


def k0_add(a: K0Class, b: K0Class) -> K0Class:
    return a + b


def k0_sub(a: K0Class, b: K0Class) -> K0Class:
    return a - b


def k0_neg(a: K0Class) -> K0Class:
    return -a
