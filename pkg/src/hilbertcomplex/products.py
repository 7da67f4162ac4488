"""Direct sums and tensor products of complexes, and the sharp Dirac operator.

Tensor conventions: algebra blocks of ``A (x) B`` are pairs ``(a, b)`` in
lexicographic order with ``A`` outer; Kronecker factors put the left operand
outer; ``E_k = (+)_{j+i=k} L_j (x) M_i`` with ``j`` ascending.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .algebra import AlgebraDescriptor, K0Class, make_algebra
from .complex import Complex, dirac
from .complex import direct_sum_complex as _sum_equal_length
from .exceptions import ValidationError
from .fredholm import Parametrix, index_complex, index_operator
from .module import HilbertModule, direct_sum, zero_module
from .operator import Operator, block_operator, compose, operator_norm


def tensor_algebra(A, B) -> AlgebraDescriptor:
    A, B = make_algebra(A), make_algebra(B)
    return make_algebra([n * m for n in A.block_sizes for m in B.block_sizes])


def tensor_module(L: HilbertModule, M: HilbertModule) -> HilbertModule:
    alg = tensor_algebra(L.algebra, M.algebra)
    dims = [a * b for a in L.dims for b in M.dims]
    if not (L.has_grams or M.has_grams):
        return HilbertModule(alg, dims)
    grams = [np.kron(L.gram(a), M.gram(b)) for a in range(L.m) for b in range(M.m)]
    return HilbertModule(alg, dims, grams)


def tensor_operator(R: Operator, S: Operator) -> Operator:
    return Operator(tensor_module(R.source, S.source), tensor_module(R.target, S.target),
                    [np.kron(a, b) for a in R.blocks for b in S.blocks])


def unit_complex(algebra=(1,)) -> Complex:
    """``0 -> A -> 0``: the rank-one module in degree 0, as a length-one complex with ``t_0 = 0``."""
    alg = make_algebra(algebra)
    E = HilbertModule(alg, [1] * alg.m)
    Z = zero_module(alg)
    return Complex([E, Z], [Operator.zero(E, Z)])


def pad_complex(C: Complex, N: int) -> Complex:
    """Append zero modules until the complex has ``N + 1`` differentials."""
    if N < C.N:
        raise ValidationError("cannot pad to a shorter length")
    mods = list(C.modules)
    diffs = list(C.diffs)
    Z = zero_module(C.algebra)
    while len(diffs) < N + 1:
        mods.append(Z)
        diffs.append(Operator.zero(mods[-2], Z))
    return Complex(mods, diffs, C.kind, C.tol)


def direct_sum_complex(C: Complex, D: Complex) -> Complex:
    if C.algebra != D.algebra:
        raise ValidationError(f"algebra mismatch: {C.algebra!r} vs {D.algebra!r}")
    N = max(C.N, D.N)
    return _sum_equal_length(pad_complex(C, N), pad_complex(D, N))


class TensorLayout:
    """Degree bookkeeping for ``L (x) M``: ``pairs[k]`` lists ``(j, i)`` with ``j + i = k``."""

    def __init__(self, L: Complex, M: Complex):
        self.left, self.right = L, M
        nL, nM = len(L.modules), len(M.modules)
        self.pairs = [[(j, k - j) for j in range(nL) if 0 <= k - j < nM] for k in range(nL + nM - 1)]
        self.algebra = tensor_algebra(L.algebra, M.algebra)
        self.block_pairs = [(a, b) for a in range(L.algebra.m) for b in range(M.algebra.m)]

    def piece(self, j: int, i: int) -> HilbertModule:
        return tensor_module(self.left.modules[j], self.right.modules[i])

    def module(self, k: int) -> HilbertModule:
        return direct_sum(*[self.piece(j, i) for j, i in self.pairs[k]])

    def to_dict(self) -> dict:
        return {"left_blocks": list(self.left.algebra.block_sizes),
                "right_blocks": list(self.right.algebra.block_sizes),
                "degrees": [[list(p) for p in ps] for ps in self.pairs]}


def _ident(E: HilbertModule) -> Operator:
    return Operator.identity(E)


def tensor_complex(R: Complex, S: Complex) -> Complex:
    """``T_k = (+)_{j+i=k} (R_j (x) 1 + (-1)^j 1 (x) S_i)``."""
    lay = TensorLayout(R, S)
    mods = [lay.module(k) for k in range(len(lay.pairs))]
    diffs = []
    for k in range(len(lay.pairs) - 1):
        src, tgt = lay.pairs[k], lay.pairs[k + 1]
        grid = [[None] * len(src) for _ in tgt]
        for c, (j, i) in enumerate(src):
            for r, (jj, ii) in enumerate(tgt):
                if (jj, ii) == (j + 1, i):
                    grid[r][c] = tensor_operator(R.t(j), _ident(S.modules[i]))
                elif (jj, ii) == (j, i + 1):
                    grid[r][c] = tensor_operator(_ident(R.modules[j]), S.t(i)) * ((-1) ** j)
        diffs.append(block_operator(grid, [lay.piece(*p) for p in src], [lay.piece(*p) for p in tgt]))
    kind = "complex" if R.kind == S.kind == "complex" else "quasicomplex"
    meta = {"tensor_layout": lay.to_dict()}
    return Complex(mods, diffs, kind, max(R.tol, S.tol), meta)


def tensor_parametrix(R: Complex, Phat: Parametrix, S: Complex, Ptil: Parametrix,
                      T: Optional[Complex] = None) -> tuple[Parametrix, list[Operator]]:
    """Parametrix of ``R (x) S`` and the predicted residuals ``(+) C^_j (x) C~_i``."""
    T = tensor_complex(R, S) if T is None else T
    lay = TensorLayout(R, S)
    Ch, Ct = Phat.residuals, Ptil.residuals
    ops = []
    for k in range(T.N + 1):
        src, tgt = lay.pairs[k + 1], lay.pairs[k]
        grid = [[None] * len(src) for _ in tgt]
        for r, (j, i) in enumerate(tgt):
            for c, (jj, ii) in enumerate(src):
                if (jj, ii) == (j + 1, i):
                    grid[r][c] = tensor_operator(Phat.p(j), _ident(S.modules[i]))
                elif (jj, ii) == (j, i + 1):
                    grid[r][c] = tensor_operator(Ch[j], Ptil.p(i)) * ((-1) ** j)
        ops.append(block_operator(grid, [lay.piece(*p) for p in src], [lay.piece(*p) for p in tgt]))
    predicted = []
    for k in range(T.N + 2):
        ps = lay.pairs[k]
        n = len(ps)
        grid = [[tensor_operator(Ch[j], Ct[i]) if r == c else None for c in range(n)]
                for r, (j, i) in enumerate(ps)]
        predicted.append(block_operator(grid, [lay.piece(*p) for p in ps], [lay.piece(*p) for p in ps]))
    return Parametrix(T, ops), predicted


def tensor_parametrix_residual(R: Complex, Phat: Parametrix, S: Complex, Ptil: Parametrix) -> float:
    P, pred = tensor_parametrix(R, Phat, S, Ptil)
    return max(operator_norm(a - b) for a, b in zip(P.residuals, pred))


def sharp_dirac(R: Complex, S: Complex) -> Operator:
    """``[[D+_R (x) 1, -1 (x) D-_S], [1 (x) D+_S, D-_R (x) 1]]``.

    Source ``(L_ev (x) M_ev) + (L_odd (x) M_odd)``, target ``(L_odd (x) M_ev) + (L_ev (x) M_odd)``.
    """
    DR, DS = dirac(R), dirac(S)
    Lev, Lod = DR.even.source, DR.even.target
    Mev, Mod = DS.even.source, DS.even.target
    grid = [[tensor_operator(DR.even, _ident(Mev)), tensor_operator(_ident(Lod), DS.odd) * -1],
            [tensor_operator(_ident(Lev), DS.even), tensor_operator(DR.odd, _ident(Mod))]]
    return block_operator(grid, [tensor_module(Lev, Mev), tensor_module(Lod, Mod)],
                          [tensor_module(Lod, Mev), tensor_module(Lev, Mod)])


def _labels_sharp(R: Complex, S: Complex, lpar: int, mpar: int, a: int, b: int) -> list:
    """Coordinate labels ``(j, i, p, q)`` of ``L_par (x) M_par`` in block ``(a, b)``."""
    Ls = [(j, p) for j in range(lpar, len(R.modules), 2) for p in range(R.modules[j].dims[a])]
    Ms = [(i, q) for i in range(mpar, len(S.modules), 2) for q in range(S.modules[i].dims[b])]
    return [(j, i, p, q) for (j, p) in Ls for (i, q) in Ms]


def _labels_total(R: Complex, S: Complex, lay: TensorLayout, parity: int, a: int, b: int) -> list:
    out = []
    for k in range(parity, len(lay.pairs), 2):
        for j, i in lay.pairs[k]:
            out += [(j, i, p, q) for p in range(R.modules[j].dims[a]) for q in range(S.modules[i].dims[b])]
    return out


def _permutation(src_labels: list, tgt_labels: list) -> np.ndarray:
    pos = {lab: n for n, lab in enumerate(tgt_labels)}
    P = np.zeros((len(tgt_labels), len(src_labels)), dtype=complex)
    for n, lab in enumerate(src_labels):
        P[pos[lab], n] = 1.0
    return P


def layout_unitaries(R: Complex, S: Complex, T: Optional[Complex] = None) -> tuple[Operator, Operator]:
    """Permutations ``U: src(D#) -> E_ev(T)`` and ``V: tgt(D#) -> E_odd(T)``."""
    T = tensor_complex(R, S) if T is None else T
    lay = TensorLayout(R, S)
    Dsh = sharp_dirac(R, S)
    DT = dirac(T).even
    Ub, Vb = [], []
    for a, b in lay.block_pairs:
        src = _labels_sharp(R, S, 0, 0, a, b) + _labels_sharp(R, S, 1, 1, a, b)
        tgt = _labels_sharp(R, S, 1, 0, a, b) + _labels_sharp(R, S, 0, 1, a, b)
        Ub.append(_permutation(src, _labels_total(R, S, lay, 0, a, b)))
        Vb.append(_permutation(tgt, _labels_total(R, S, lay, 1, a, b)))
    return Operator(Dsh.source, DT.source, Ub), Operator(Dsh.target, DT.target, Vb)


def sharp_dirac_residual(R: Complex, S: Complex) -> float:
    """``|V* D+_T U - D#|``."""
    from .operator import adjoint
    T = tensor_complex(R, S)
    U, V = layout_unitaries(R, S, T)
    lhs = compose(adjoint(V), compose(dirac(T).even, U))
    return operator_norm(lhs - sharp_dirac(R, S))


def tensor_index(a: K0Class, b: K0Class) -> K0Class:
    """External product ``K0(A) x K0(B) -> K0(A (x) B)``: the outer product of vectors."""
    return K0Class.from_vector([x * y for x in a.vector for y in b.vector])


def tensor_index_report(R: Complex, S: Complex) -> dict:
    T = tensor_complex(R, S)
    iT = index_complex(T)
    return {"index_T": iT.to_dict(),
            "index_sharp": index_operator(sharp_dirac(R, S)).to_dict(),
            "product": tensor_index(index_complex(R), index_complex(S)).to_dict(),
            "sharp_residual": sharp_dirac_residual(R, S),
            "composites": list(T.composite_norms)}
