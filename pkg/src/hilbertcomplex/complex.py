"""Finite-length complexes and quasicomplexes of Hilbert modules.

A complex ``E_0 -> E_1 -> ... -> E_{N+1}`` holds ``N+1`` differentials
``t_0 .. t_N``.  Out-of-range differentials are zero operators, so
``t(-1)`` and ``t(N+1)`` are always available.
"""

from __future__ import annotations

from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .exceptions import ComplexPropertyError, ValidationError
from .module import HilbertModule, graph_module, zero_module
from .operator import (Operator, adjoint, block_operator, bounded_transform, chain, compose,
                       direct_sum_operator, operator_norm, resolvent_root)
from .report import Report

COMPLEX_TOL = 1e-10
KINDS = ("complex", "quasicomplex")


class Complex:
    def __init__(self, modules: Sequence[HilbertModule], diffs: Sequence[Operator],
                 kind: str = "complex", tol: float = COMPLEX_TOL, metadata: Optional[dict] = None):
        if kind not in KINDS:
            raise ValidationError(f"kind must be one of {KINDS}, got {kind!r}")
        modules = tuple(modules)
        diffs = tuple(diffs)
        if not diffs:
            raise ValidationError("a complex needs at least one differential")
        if len(modules) != len(diffs) + 1:
            raise ValidationError(f"{len(diffs)} differentials need {len(diffs) + 1} modules, got {len(modules)}")
        alg = modules[0].algebra
        rebound = []
        for k, t in enumerate(diffs):
            if modules[k].algebra != alg or modules[k + 1].algebra != alg:
                raise ValidationError(f"module {k} or {k + 1} is over a different algebra")
            if not t.source.same_space(modules[k]):
                raise ValidationError(
                    f"diffs[{k}] source dims {list(t.source.dims)} != modules[{k}] dims {list(modules[k].dims)}")
            if not t.target.same_space(modules[k + 1]):
                raise ValidationError(
                    f"diffs[{k}] target dims {list(t.target.dims)} != modules[{k + 1}] dims {list(modules[k + 1].dims)}")
            rebound.append(t.with_modules(modules[k], modules[k + 1]))
        self.modules = modules
        self.diffs = tuple(rebound)
        self.kind = kind
        self.tol = float(tol)
        self.metadata = dict(metadata or {})
        self.composite_norms = tuple(
            operator_norm(compose(self.diffs[k + 1], self.diffs[k])) for k in range(len(diffs) - 1))
        if kind == "complex":
            for k, c in enumerate(self.composite_norms):
                bound = self.tol * (1 + operator_norm(self.diffs[k + 1]) * operator_norm(self.diffs[k]))
                if c > bound:
                    raise ComplexPropertyError(k, c, bound)

    @property
    def N(self) -> int:
        return len(self.diffs) - 1

    @property
    def length(self) -> int:
        return len(self.diffs)

    @property
    def algebra(self):
        return self.modules[0].algebra

    def module(self, k: int) -> HilbertModule:
        if 0 <= k < len(self.modules):
            return self.modules[k]
        return zero_module(self.algebra)

    def t(self, k: int) -> Operator:
        if 0 <= k <= self.N:
            return self.diffs[k]
        return Operator.zero(self.module(k), self.module(k + 1))

    def t_star(self, k: int) -> Operator:
        return adjoint(self.t(k))

    @cached_property
    def _q(self):
        return tuple(resolvent_root(self.t(k)) for k in range(self.N + 2))

    @cached_property
    def _q_star(self):
        return tuple(resolvent_root(self.t_star(k - 1)) for k in range(self.N + 2))

    def q(self, k: int) -> Operator:
        """``Q_k = (1 + t_k* t_k)^{-1/2}`` on ``E_k``."""
        return self._q[k]

    def q_star(self, k: int) -> Operator:
        """``Q_{(k-1)*} = (1 + t_{k-1} t_{k-1}*)^{-1/2}`` on ``E_k``."""
        return self._q_star[k]

    @property
    def even_indices(self) -> list[int]:
        return list(range(0, self.N + 2, 2))

    @property
    def odd_indices(self) -> list[int]:
        return list(range(1, self.N + 2, 2))

    def __repr__(self):
        dims = " -> ".join(str(list(E.dims)) for E in self.modules)
        return f"Complex({self.kind}, {dims})"


def make_complex(modules, diffs, kind: str = "complex", tol: float = COMPLEX_TOL,
                 metadata: Optional[dict] = None) -> Complex:
    if modules is None:
        modules = [d.source for d in diffs] + [diffs[-1].target]
    return Complex(modules, diffs, kind, tol, metadata)


def complex_from_matrices(diff_blocks: Sequence[Sequence], algebra=None, kind: str = "complex",
                          tol: float = COMPLEX_TOL) -> Complex:
    """Build a default-gram complex from per-differential lists of block matrices."""
    ops = [Operator.from_matrices(b, algebra) for b in diff_blocks]
    modules = [ops[0].source] + [o.target for o in ops]
    return Complex(modules, [o.with_modules(modules[k], modules[k + 1]) for k, o in enumerate(ops)], kind, tol)


def zero_complex(algebra, dims_list: Sequence[Sequence[int]]) -> Complex:
    mods = [HilbertModule(algebra, d) for d in dims_list]
    return Complex(mods, [Operator.zero(mods[k], mods[k + 1]) for k in range(len(mods) - 1)])


def adjoint_complex(C: Complex) -> Complex:
    """Reverse the complex: ``s_k = t_{N-k}*`` on ``E_{N+1-k}``."""
    mods = list(reversed(C.modules))
    diffs = [adjoint(C.t(C.N - k)) for k in range(C.N + 1)]
    return Complex(mods, diffs, C.kind, C.tol)


def bounded_transform_complex(C: Complex) -> Complex:
    return Complex(C.modules, [bounded_transform(t).f for t in C.diffs], C.kind, C.tol)


def graph_norm_complex(C: Complex) -> Complex:
    """Same matrices, modules carrying the graph inner products of their differentials."""
    mods = [graph_module(C.modules[k], C.diffs[k]) for k in range(C.N + 1)] + [C.modules[-1]]
    return Complex(mods, C.diffs, C.kind, C.tol)


def direct_sum_complex(C: Complex, D: Complex) -> Complex:
    if C.N != D.N or C.algebra != D.algebra:
        raise ValidationError("direct sum needs complexes of equal length over one algebra")
    diffs = [direct_sum_operator(s, t) for s, t in zip(C.diffs, D.diffs)]
    mods = [diffs[0].source] + [d.target for d in diffs]
    kind = "complex" if C.kind == D.kind == "complex" else "quasicomplex"
    return Complex(mods, diffs, kind, max(C.tol, D.tol))


def conjugate_complex(C: Complex, units: Sequence[Operator], inverses: Optional[Sequence[Operator]] = None) -> Complex:
    """``s_k = U_{k+1} t_k U_k^{-1}`` for invertible ``U_k: E_k -> F_k``."""
    if inverses is None:
        from .operator import pseudo_inverse
        inverses = [pseudo_inverse(U) for U in units]
    diffs = [chain(units[k + 1], C.diffs[k], inverses[k]) for k in range(C.N + 1)]
    return Complex([U.target for U in units], diffs, C.kind, C.tol)


class DiracPair:
    __slots__ = ("even", "odd", "even_modules", "odd_modules")

    def __init__(self, even: Operator, odd: Operator, even_modules, odd_modules):
        self.even = even
        self.odd = odd
        self.even_modules = tuple(even_modules)
        self.odd_modules = tuple(odd_modules)

    def __iter__(self):
        yield self.even
        yield self.odd


def dirac(C: Complex) -> DiracPair:
    """Even Dirac operator ``E_ev -> E_odd``: ``t_{2r}`` on the diagonal, ``t_{2r+1}*`` right of it."""
    ev = [C.modules[k] for k in C.even_indices]
    od = [C.modules[k] for k in C.odd_indices]
    grid = []
    for r, k in enumerate(C.odd_indices):
        row = [None] * len(ev)
        row[r] = C.t(k - 1)
        if r + 1 < len(ev):
            row[r + 1] = C.t_star(k)
        grid.append(row)
    even = block_operator(grid, ev, od)
    return DiracPair(even, adjoint(even), ev, od)


def laplace_k(C: Complex, k: int) -> Operator:
    if not 0 <= k <= C.N + 1:
        raise ValidationError(f"degree {k} out of range 0..{C.N + 1}")
    return compose(C.t_star(k), C.t(k)) + compose(C.t(k - 1), C.t_star(k - 1))


def laplace(C: Complex) -> list[Operator]:
    return [laplace_k(C, k) for k in range(C.N + 2)]


def laplace_even(C: Complex) -> Operator:
    return direct_sum_operator(*[laplace_k(C, k) for k in C.even_indices])


def laplace_odd(C: Complex) -> Operator:
    return direct_sum_operator(*[laplace_k(C, k) for k in C.odd_indices])


def _qq(C: Complex, k: int) -> Operator:
    """``Q_k^2 Q_{(k-1)*}^2`` on ``E_k``."""
    return chain(C.q(k), C.q(k), C.q_star(k), C.q_star(k))


def resolvent_lemma_residuals(C: Complex) -> dict[str, float]:
    F = bounded_transform_complex(C) if C.kind == "complex" else None
    Ft = [bounded_transform(C.t(k)).f for k in range(-1, C.N + 2)]

    def f(k):
        return Ft[k + 1]

    out = {}
    for k in range(C.N + 2):
        I = Operator.identity(C.modules[k])
        Qk, Qs = C.q(k), C.q_star(k)
        rhs = I - compose(adjoint(f(k)), f(k)) - compose(f(k - 1), adjoint(f(k - 1)))
        out[f"(i) QQ=1-F*F-FF* k={k}"] = operator_norm(_qq(C, k) - rhs)
        out[f"(i') Q*Q*QQ=1-F*F-FF* k={k}"] = operator_norm(chain(Qs, Qs, Qk, Qk) - rhs)
        out[f"(ii) [Q_k,Q_(k-1)*]=0 k={k}"] = operator_norm(compose(Qk, Qs) - compose(Qs, Qk))
        if k <= C.N:
            out[f"(iii) F_k Q_(k-1)* = F_k k={k}"] = operator_norm(compose(f(k), Qs) - f(k))
            out[f"(iii) Q_(k+1) F_k = F_k k={k}"] = operator_norm(compose(C.q(k + 1), f(k)) - f(k))
        out[f"(iv) |1-QQ|<=1 excess k={k}"] = max(0.0, operator_norm(I - _qq(C, k)) - 1.0)
    del F
    return out


def structural_checks(C: Complex, tol: float = 1e-8) -> Report:
    """Residuals of the resolvent lemma and the Dirac/Laplace/graph relations."""
    r = resolvent_lemma_residuals(C)
    D = dirac(C)
    r["Delta_ev = D-D+"] = operator_norm(laplace_even(C) - compose(D.odd, D.even))
    r["Delta_odd = D+D-"] = operator_norm(laplace_odd(C) - compose(D.even, D.odd))

    FC = bounded_transform_complex(C)
    DF = dirac(FC)
    r["D+(F) = BT(D+)"] = operator_norm(DF.even - bounded_transform(D.even).f)
    qq_ev = direct_sum_operator(*[_qq(C, k) for k in C.even_indices])
    qq_od = direct_sum_operator(*[_qq(C, k) for k in C.odd_indices])
    r["Delta^F_ev = Delta_ev QQ"] = operator_norm(laplace_even(FC) - compose(laplace_even(C), qq_ev))
    r["Delta^F_odd = Delta_odd QQ"] = operator_norm(laplace_odd(FC) - compose(laplace_odd(C), qq_od))
    q_dplus = direct_sum_operator(*[compose(C.q(k), C.q_star(k)) for k in C.even_indices])
    r["Q_D+ = (+) Q_2k Q_(2k-1)*"] = operator_norm(resolvent_root(D.even) - q_dplus)

    G = graph_norm_complex(C)
    for k in range(C.N + 1):
        Qk = C.q(k).with_modules(C.modules[k], G.modules[k])
        Qk1 = C.q(k + 1).with_modules(C.modules[k + 1], G.modules[k + 1])
        r[f"graph t_k Q_k = Q_k+1 F_k k={k}"] = operator_norm(
            compose(G.t(k), Qk) - compose(Qk1, FC.t(k)))
    for k in range(C.N + 2):
        Qk = C.q(k).with_modules(C.modules[k], G.modules[k])
        r[f"graph Q_k unitary k={k}"] = operator_norm(
            compose(adjoint(Qk), Qk) - Operator.identity(C.modules[k]))
    DG = dirac(G)
    q_ev = direct_sum_operator(*[C.q(k) for k in C.even_indices])
    q_od = direct_sum_operator(*[C.q(k) for k in C.odd_indices])
    q_ev = q_ev.with_modules(DF.even.source, DG.even.source)
    q_od = q_od.with_modules(DF.even.target, DG.even.target)
    r["graph D+ Q_ev = Q_odd D+(F)"] = operator_norm(compose(DG.even, q_ev) - compose(q_od, DF.even))
    r["graph D- Q_odd = Q_ev D-(F)"] = operator_norm(compose(DG.odd, q_od) - compose(q_ev, DF.odd))
    r.update(adjoint_complex_residuals(C))
    return Report(r, tol)


def _sv_multiset(T: Operator, i: int) -> np.ndarray:
    from .operator import singular_values
    s = singular_values(T, i)
    n = min(T.blocks[i].shape)
    return np.sort(np.concatenate([s, np.zeros(n - s.size)]))


def adjoint_complex_residuals(C: Complex) -> dict[str, float]:
    """``Delta^#_k = Delta_{N+1-k}`` and the parity swap of the even Dirac operator."""
    A = adjoint_complex(C)
    out = {}
    for k in range(C.N + 2):
        out[f"Delta#_{k} = Delta_{C.N + 1 - k}"] = operator_norm(laplace_k(A, k) - laplace_k(C, C.N + 1 - k))
    DA = dirac(A).even
    ref = dirac(C).odd if C.N % 2 == 0 else dirac(C).even
    worst = 0.0
    for i in range(C.algebra.m):
        a, b = DA.blocks[i].shape, ref.blocks[i].shape
        if a != b:
            worst = np.inf
            break
        sa, sb = _sv_multiset(DA, i), _sv_multiset(ref, i)
        if sa.size:
            worst = max(worst, float(np.abs(sa - sb).max()))
    out["D+(t#) ~ D(t) singular values"] = worst
    return out
