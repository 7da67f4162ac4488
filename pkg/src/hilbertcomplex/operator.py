"""Adjointable operators between finite-rank modules.

Spectral work happens in whitened coordinates ``W = G_F^{1/2} M G_E^{-1/2}``,
where the module inner products become the standard ones; results are mapped
back with the inverse square roots.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import ValidationError
from .module import HilbertModule, ModuleElement
from .report import Report

RANK_TOL = 1e-10


class Operator:
    """Operator ``E -> F`` stored as one ``e_i x d_i`` matrix per algebra block."""

    __slots__ = ("source", "target", "blocks")

    def __init__(self, source: HilbertModule, target: HilbertModule, blocks):
        if source.algebra != target.algebra:
            raise ValidationError("source and target live over different algebras")
        blocks = tuple(np.asarray(b, dtype=complex) for b in blocks)
        if len(blocks) != source.m:
            raise ValidationError(f"expected {source.m} blocks, got {len(blocks)}")
        for i, (d, e, b) in enumerate(zip(source.dims, target.dims, blocks)):
            if b.shape != (e, d):
                raise ValidationError(f"block {i} has shape {b.shape}, expected {(e, d)}")
        self.source = source
        self.target = target
        self.blocks = blocks

    @classmethod
    def from_matrices(cls, blocks, algebra=None) -> "Operator":
        """Operator between default-gram modules inferred from block shapes."""
        mats = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks]
        if algebra is None:
            algebra = [1] * len(mats)
        E = HilbertModule(algebra, [b.shape[1] for b in mats])
        F = HilbertModule(algebra, [b.shape[0] for b in mats])
        return cls(E, F, mats)

    @classmethod
    def zero(cls, source: HilbertModule, target: HilbertModule) -> "Operator":
        return cls(source, target, [np.zeros((e, d), dtype=complex)
                                    for d, e in zip(source.dims, target.dims)])

    @classmethod
    def identity(cls, E: HilbertModule) -> "Operator":
        return cls(E, E, [np.eye(d, dtype=complex) for d in E.dims])

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def algebra(self):
        return self.source.algebra

    def __call__(self, x: ModuleElement) -> ModuleElement:
        if not x.module.same_space(self.source):
            raise ValidationError("element is not in the operator's source")
        return ModuleElement(self.target, [M @ b for M, b in zip(self.blocks, x.blocks)])

    def _check_parallel(self, other: "Operator"):
        if not (self.source.same_space(other.source) and self.target.same_space(other.target)):
            raise ValidationError("operators have different source or target")

    def __add__(self, other: "Operator") -> "Operator":
        self._check_parallel(other)
        return Operator(self.source, self.target, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_parallel(other)
        return Operator(self.source, self.target, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "Operator":
        return Operator(self.source, self.target, [-a for a in self.blocks])

    def __mul__(self, c) -> "Operator":
        return Operator(self.source, self.target, [c * a for a in self.blocks])

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        return compose(self, other)

    @property
    def H(self) -> "Operator":
        return adjoint(self)

    def norm(self) -> float:
        return operator_norm(self)

    def with_modules(self, source: HilbertModule, target: HilbertModule) -> "Operator":
        """Same matrices, reinterpreted between other modules of equal dims."""
        return Operator(source, target, self.blocks)

    def __repr__(self):
        return f"Operator({list(self.source.dims)} -> {list(self.target.dims)})"


def _is_square_on(T: Operator) -> bool:
    return T.source.same_space(T.target)


def adjoint(T: Operator) -> Operator:
    """Gram-aware adjoint ``G_E^{-1} M^H G_F``."""
    blocks = []
    for i, M in enumerate(T.blocks):
        A = M.conj().T
        if T.target.has_grams:
            A = A @ T.target.gram(i)
        if T.source.has_grams:
            A = T.source.gram_inv(i) @ A
        blocks.append(A)
    return Operator(T.target, T.source, blocks)


def compose(S: Operator, T: Operator) -> Operator:
    """``S o T``."""
    if not T.target.same_space(S.source):
        raise ValidationError(
            f"cannot compose: T maps into dims {list(T.target.dims)}, S starts at {list(S.source.dims)}")
    return Operator(T.source, S.target, [a @ b for a, b in zip(S.blocks, T.blocks)])


def chain(*ops: Operator) -> Operator:
    """``ops[0] o ops[1] o ...``."""
    out = ops[-1]
    for op in reversed(ops[:-1]):
        out = compose(op, out)
    return out


def whiten(T: Operator, i: int) -> np.ndarray:
    M = T.blocks[i]
    if T.target.has_grams:
        M = T.target.gram_sqrt(i) @ M
    if T.source.has_grams:
        M = M @ T.source.gram_isqrt(i)
    return M


def _unwhiten(W: np.ndarray, source: HilbertModule, target: HilbertModule, i: int) -> np.ndarray:
    if target.has_grams:
        W = target.gram_isqrt(i) @ W
    if source.has_grams:
        W = W @ source.gram_sqrt(i)
    return W


def _spec_norm(W: np.ndarray) -> float:
    if W.size == 0:
        return 0.0
    return float(np.linalg.norm(W, 2))


def operator_norm(T: Operator) -> float:
    return max((_spec_norm(whiten(T, i)) for i in range(T.m)), default=0.0)


def is_hermitian(T: Operator, tol: float = 1e-8) -> bool:
    if not _is_square_on(T):
        return False
    return operator_norm(T - adjoint(T)) <= tol * max(operator_norm(T), 1e-300)


def herm_funcalc(T: Operator, f: Callable[[np.ndarray], np.ndarray]) -> Operator:
    """Apply ``f`` to a self-adjoint operator through an orthonormal eigenbasis."""
    if not _is_square_on(T):
        raise ValidationError("functional calculus needs an operator on a single module")
    nT = operator_norm(T)
    blocks = []
    for i in range(T.m):
        W = whiten(T, i)
        if W.size and np.linalg.norm(W - W.conj().T, 2) > 1e-8 * max(nT, 1e-300):
            raise ValidationError("operator is not self-adjoint; functional calculus undefined")
        if W.size == 0:
            blocks.append(W)
            continue
        w, v = np.linalg.eigh((W + W.conj().T) / 2)
        fW = (v * np.asarray(f(w), dtype=complex)) @ v.conj().T
        blocks.append(_unwhiten(fW, T.source, T.target, i))
    return Operator(T.source, T.target, blocks)


def _inv_sqrt1p(x):
    return 1.0 / np.sqrt(1.0 + np.maximum(x, 0.0))


def _sqrt1p(x):
    return np.sqrt(1.0 + np.maximum(x, 0.0))


def resolvent_root(t: Operator) -> Operator:
    """``Q_t = (1 + t*t)^{-1/2}``."""
    return herm_funcalc(compose(adjoint(t), t), _inv_sqrt1p)


def resolvent_root_inv(t: Operator) -> Operator:
    """``Q_t^{-1} = (1 + t*t)^{1/2}``, never by inverting ``Q_t``."""
    return herm_funcalc(compose(adjoint(t), t), _sqrt1p)


def co_resolvent_root(t: Operator) -> Operator:
    """``Q_{t*} = (1 + t t*)^{-1/2}`` on the target."""
    return resolvent_root(adjoint(t))


@dataclass(frozen=True)
class BoundedTransformPair:
    f: Operator
    q: Operator

    def __iter__(self):
        yield self.f
        yield self.q


def bounded_transform(t: Operator) -> BoundedTransformPair:
    """``F_t = t (1 + t*t)^{-1/2}`` together with ``Q_t``."""
    q = resolvent_root(t)
    return BoundedTransformPair(compose(t, q), q)


def inverse_bounded_transform(F: Operator) -> Operator:
    """Recover ``t = F (1 - F*F)^{-1/2}`` from a strict contraction."""
    FF = compose(adjoint(F), F)
    if operator_norm(FF) >= 1.0:
        raise ValidationError("inverse bounded transform needs ||F|| < 1")
    return compose(F, herm_funcalc(FF, lambda x: 1.0 / np.sqrt(np.maximum(1.0 - x, 1e-300))))


def check_bt_identities(t: Operator, tol: float = 1e-9) -> Report:
    """Residual norms of the eight bounded-transform identities."""
    ts = adjoint(t)
    F, Q = bounded_transform(t)
    Qi = resolvent_root_inv(t)
    Qs = resolvent_root(ts)
    Qsi = resolvent_root_inv(ts)
    IE = Operator.identity(t.source)
    Q2inv = IE + compose(ts, t)
    Fs = adjoint(F)
    r = {
        "i: F = tQ": operator_norm(F - compose(t, Q)),
        "ii: t = F Q^-1": operator_norm(t - compose(F, Qi)),
        "iii: Q^2 = 1 - F*F": operator_norm(compose(Q, Q) - (IE - compose(Fs, F))),
        "iv: Q Q^-1 = 1": operator_norm(compose(Q, Qi) - IE),
        "v: Q^2 Q^-2 = 1": operator_norm(chain(Q, Q, Q2inv) - IE),
        "vi: Q t* = F*": operator_norm(compose(Q, ts) - Fs),
        "vii: Q_t* F = F Q": operator_norm(compose(Qs, F) - compose(F, Q)),
        "viii: F Q^-1 = Q_t*^-1 F": operator_norm(compose(F, Qi) - compose(Qsi, F)),
    }
    return Report(r, tol)


def _cutoff(s: np.ndarray, shape, tol: float) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0] * max(shape)))


def _svd(W: np.ndarray):
    if W.size == 0:
        e, d = W.shape
        return np.eye(e, dtype=complex), np.zeros(0), np.eye(d, dtype=complex)
    U, s, Vh = np.linalg.svd(W)
    return U, s, Vh.conj().T


def singular_values(T: Operator, i: int) -> np.ndarray:
    W = whiten(T, i)
    if W.size == 0:
        return np.zeros(0)
    return np.linalg.svd(W, compute_uv=False)


def numerical_rank(T: Operator, tol: float = RANK_TOL) -> tuple[int, ...]:
    """Per-block rank: singular values above ``tol * s_max * max(d, e)``."""
    return tuple(_cutoff(singular_values(T, i), T.blocks[i].shape, tol) for i in range(T.m))


def kernel_projection(T: Operator, tol: float = RANK_TOL) -> Operator:
    """Orthogonal projection of the source onto ``ker T``."""
    blocks = []
    for i in range(T.m):
        W = whiten(T, i)
        d = W.shape[1]
        U, s, V = _svd(W)
        r = _cutoff(s, W.shape, tol)
        Vk = V[:, r:]
        P = Vk @ Vk.conj().T if d else np.zeros((0, 0), dtype=complex)
        blocks.append(_unwhiten(P, T.source, T.source, i))
    return Operator(T.source, T.source, blocks)


def range_projection(T: Operator, tol: float = RANK_TOL) -> Operator:
    """Orthogonal projection of the target onto ``ran T``."""
    blocks = []
    for i in range(T.m):
        W = whiten(T, i)
        U, s, V = _svd(W)
        r = _cutoff(s, W.shape, tol)
        Ur = U[:, :r]
        blocks.append(_unwhiten(Ur @ Ur.conj().T, T.target, T.target, i))
    return Operator(T.target, T.target, blocks)


def pseudo_inverse(T: Operator, tol: float = RANK_TOL) -> Operator:
    """Moore-Penrose inverse with respect to the module inner products."""
    blocks = []
    for i in range(T.m):
        W = whiten(T, i)
        U, s, V = _svd(W)
        r = _cutoff(s, W.shape, tol)
        Wp = (V[:, :r] / s[:r]) @ U[:, :r].conj().T
        blocks.append(_unwhiten(Wp, T.target, T.source, i))
    return Operator(T.target, T.source, blocks)


def polar_decompose(T: Operator, tol: float = RANK_TOL) -> tuple[Operator, Operator]:
    """``T = V |T|`` with ``V`` a partial isometry from ran T* onto ran T."""
    Vb, Ab = [], []
    for i in range(T.m):
        W = whiten(T, i)
        U, s, V = _svd(W)
        r = _cutoff(s, W.shape, tol)
        Vb.append(_unwhiten(U[:, :r] @ V[:, :r].conj().T, T.source, T.target, i))
        k = s.size
        Ab.append(_unwhiten((V[:, :k] * s) @ V[:, :k].conj().T, T.source, T.source, i))
    return Operator(T.source, T.target, Vb), Operator(T.source, T.source, Ab)


def reduced_minimum_modulus(T: Operator, tol: float = RANK_TOL) -> float:
    """Smallest nonzero singular value over all blocks; 0 for the zero operator."""
    best = None
    for i in range(T.m):
        s = singular_values(T, i)
        r = _cutoff(s, T.blocks[i].shape, tol)
        if r:
            best = s[r - 1] if best is None else min(best, s[r - 1])
    return 0.0 if best is None else float(best)


def closed_range_report(T: Operator, tol: float = RANK_TOL) -> Report:
    Ts = adjoint(T)
    kT, rTs = kernel_projection(T, tol), range_projection(Ts, tol)
    kTs, rT = kernel_projection(Ts, tol), range_projection(T, tol)
    IE, IF = Operator.identity(T.source), Operator.identity(T.target)
    r = {
        "source = ker T + ran T*": operator_norm(kT + rTs - IE),
        "ker T perp ran T*": operator_norm(compose(kT, rTs)),
        "target = ker T* + ran T": operator_norm(kTs + rT - IF),
        "ker T* perp ran T": operator_norm(compose(kTs, rT)),
    }
    return Report(r, 1e-9, {"gamma": reduced_minimum_modulus(T, tol)})


def is_projection(P: Operator, tol: float = 1e-9) -> bool:
    return (operator_norm(compose(P, P) - P) <= tol
            and operator_norm(P - adjoint(P)) <= tol)


def block_operator(rows: Sequence[Sequence[Optional[Operator]]],
                   sources: Sequence[HilbertModule],
                   targets: Sequence[HilbertModule]) -> Operator:
    """Assemble ``(+)sources -> (+)targets`` from a grid; ``None`` is zero.

    ``rows[r][c]`` maps ``sources[c]`` into ``targets[r]``.
    """
    from .module import direct_sum
    if len(rows) != len(targets) or any(len(row) != len(sources) for row in rows):
        raise ValidationError("block grid does not match the given sources and targets")
    E = direct_sum(*sources)
    F = direct_sum(*targets)
    blocks = []
    for i in range(E.m):
        M = np.zeros((F.dims[i], E.dims[i]), dtype=complex)
        r0 = 0
        for r, tgt in enumerate(targets):
            c0 = 0
            for c, src in enumerate(sources):
                op = rows[r][c]
                if op is not None:
                    if not (op.source.same_space(src) and op.target.same_space(tgt)):
                        raise ValidationError(f"grid entry ({r},{c}) has wrong source or target")
                    M[r0:r0 + tgt.dims[i], c0:c0 + src.dims[i]] = op.blocks[i]
                c0 += src.dims[i]
            r0 += tgt.dims[i]
        blocks.append(M)
    return Operator(E, F, blocks)


def direct_sum_operator(*ops: Operator) -> Operator:
    n = len(ops)
    grid = [[ops[r] if r == c else None for c in range(n)] for r in range(n)]
    return block_operator(grid, [o.source for o in ops], [o.target for o in ops])


def embedding(parts: Sequence[HilbertModule], j: int) -> Operator:
    """Inclusion of ``parts[j]`` into the direct sum."""
    grid = [[Operator.identity(parts[j]) if r == j else None] for r in range(len(parts))]
    return block_operator(grid, [parts[j]], list(parts))


def restriction(parts: Sequence[HilbertModule], j: int) -> Operator:
    """Coordinate projection of the direct sum onto ``parts[j]``."""
    grid = [[Operator.identity(parts[j]) if c == j else None for c in range(len(parts))]]
    return block_operator(grid, list(parts), [parts[j]])
