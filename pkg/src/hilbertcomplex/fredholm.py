"""Parametrices, K0-valued indices and maps of complexes.

Every operator in this model is compact, so "Fredholm" is automatic and the
interesting content is in the residual operators and in exact index identities.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import K0Class, make_algebra
from .complex import Complex, dirac
from .exceptions import ExactnessError, SingularOperatorError, ValidationError
from .hodge import cohomology, hodge_split, is_exact
from .module import HilbertModule
from .operator import (RANK_TOL, Operator, adjoint, block_operator, chain, compose,
                       numerical_rank, operator_norm, pseudo_inverse, resolvent_root)
from .report import Report


# ---------------------------------------------------------------- parametrices

class Parametrix:
    """Operators ``P_k: E_{k+1} -> E_k`` with ``C_k = 1 - (P_k S_k + S_{k-1} P_{k-1})``."""

    def __init__(self, C: Complex, ops: Sequence[Operator]):
        ops = tuple(ops)
        if len(ops) != C.N + 1:
            raise ValidationError(f"parametrix needs {C.N + 1} operators, got {len(ops)}")
        for k, P in enumerate(ops):
            if not (P.source.same_space(C.module(k + 1)) and P.target.same_space(C.module(k))):
                raise ValidationError(f"P_{k} must map E_{k + 1} -> E_{k}")
        self.complex = C
        self.ops = tuple(P.with_modules(C.module(k + 1), C.module(k)) for k, P in enumerate(ops))
        self._residuals = None

    def p(self, k: int) -> Operator:
        if 0 <= k <= self.complex.N:
            return self.ops[k]
        return Operator.zero(self.complex.module(k + 1), self.complex.module(k))

    @property
    def residuals(self) -> list[Operator]:
        if self._residuals is None:
            self._residuals = parametrix_residuals(self.complex, self.ops)
        return self._residuals

    def residual_norms(self) -> list[float]:
        return [operator_norm(c) for c in self.residuals]

    def composite_norms(self) -> list[float]:
        """``||P_k P_{k+1}||``; zero for a quasicomplex parametrix of a complex."""
        return [operator_norm(compose(self.ops[k], self.ops[k + 1])) for k in range(len(self.ops) - 1)]


def parametrix_residuals(C: Complex, ops: Sequence[Operator],
                         right: Optional[Sequence[Operator]] = None) -> list[Operator]:
    """``1 - (P_k t_k + t_{k-1} R_{k-1})`` for ``k = 0..N+1``; ``R`` defaults to ``P``."""
    right = ops if right is None else right

    def get(seq, k):
        if 0 <= k <= C.N:
            return seq[k]
        return Operator.zero(C.module(k + 1), C.module(k))

    out = []
    for k in range(C.N + 2):
        I = Operator.identity(C.module(k))
        out.append(I - compose(get(ops, k), C.t(k)) - compose(C.t(k - 1), get(right, k - 1)))
    return out


def pseudo_inverse_parametrix(C: Complex, tol: float = RANK_TOL) -> Parametrix:
    """``P_k = t_k^+``; residuals are the harmonic projections."""
    return Parametrix(C, [pseudo_inverse(t, tol) for t in C.diffs])


def associated_parametrix(C: Complex, P: Sequence[Operator], R: Optional[Sequence[Operator]] = None,
                          tol: float = RANK_TOL) -> Parametrix:
    """``P^_k = R_k P_k`` where ``R_k`` approximately inverts ``D_k = P_k S_k + S_{k-1} P_{k-1}``.

    Without ``R`` the exact inverse of ``D_k`` is used; a singular ``D_k`` raises.
    """
    base = Parametrix(C, P)
    if R is None:
        R = []
        for k in range(C.N + 1):
            Dk = Operator.identity(C.module(k)) - base.residuals[k]
            if numerical_rank(Dk, tol) != Dk.source.dims:
                raise SingularOperatorError(f"D_{k} is singular; supply approximate inverses R")
            R.append(pseudo_inverse(Dk, tol))
    if len(R) < C.N + 1:
        raise ValidationError(f"need at least {C.N + 1} operators R_k")
    return Parametrix(C, [compose(R[k], base.ops[k]) for k in range(C.N + 1)])


def quasicomplex_parametrix(C: Complex, Ptilde: Parametrix, warn_above: float = 0.5) -> Parametrix:
    """``P_k = P~_k S_k P~_k``, a parametrix that is itself a quasicomplex."""
    worst = max(Ptilde.residual_norms(), default=0.0)
    if worst > warn_above:
        warnings.warn(f"input parametrix residual norm {worst:.3g} exceeds {warn_above}", RuntimeWarning)
    return Parametrix(C, [chain(Ptilde.ops[k], C.t(k), Ptilde.ops[k]) for k in range(C.N + 1)])


def bounded_transform_joint_parametrix(C: Complex, PF: Parametrix) -> tuple[list[Operator], list[Operator]]:
    """``P_l,k = P_k Q_{k*}``, ``P_r,k = Q_k P_k`` from a parametrix of the bounded transform."""
    Pl = [compose(PF.ops[k], resolvent_root(C.t_star(k))) for k in range(C.N + 1)]
    Pr = [compose(C.q(k), PF.ops[k]) for k in range(C.N + 1)]
    return Pl, Pr


def gamma_diagnostic(C: Complex, Pr: Sequence[Operator]) -> dict[str, float]:
    """``Gamma_k = 1 + N_k`` with ``N_k = S_{k-1} R_{r,k-1} R_{r,k} S_k`` nilpotent."""
    out = {}
    for k in range(1, C.N + 1):
        Nk = chain(C.t(k - 1), Pr[k - 1], Pr[k], C.t(k))
        I = Operator.identity(C.module(k))
        out[f"N_{k}^2"] = operator_norm(compose(Nk, Nk))
        out[f"Gamma_{k}(1-N_{k}) - 1"] = operator_norm(compose(I + Nk, I - Nk) - I)
    return out


def verify_joint_parametrix(C: Complex, Pl: Optional[Sequence[Operator]] = None,
                            Pr: Optional[Sequence[Operator]] = None, tol: float = 1e-8) -> Report:
    """Residuals ``C_k`` of a joint parametrix and of the bounded-transform transfer."""
    from .complex import bounded_transform_complex
    if Pl is None:
        Pl = pseudo_inverse_parametrix(C).ops
    if Pr is None:
        Pr = Pl
    for seq in (Pl, Pr):
        if len(seq) != C.N + 1:
            raise ValidationError(f"joint parametrix needs {C.N + 1} operators per side")
        for k, P in enumerate(seq):
            if not (P.source.same_space(C.module(k + 1)) and P.target.same_space(C.module(k))):
                raise ValidationError(f"P_{k} must map E_{k + 1} -> E_{k}")
    Ck = parametrix_residuals(C, Pl, Pr)
    FC = bounded_transform_complex(C)
    PF = pseudo_inverse_parametrix(FC)
    tl, tr = bounded_transform_joint_parametrix(C, PF)
    Ct = parametrix_residuals(C, tl, tr)
    r = {}
    for k in range(C.N + 2):
        r[f"transfer C_{k} = C_{k}(F)"] = operator_norm(Ct[k] - PF.residuals[k])
    r.update(gamma_diagnostic(C, tr))
    extra = {"residual_norms": [operator_norm(c) for c in Ck],
             "transfer_residual_norms": [operator_norm(c) for c in Ct]}
    rep = Report(r, tol, extra)
    rep.extra["residuals"] = Ck
    return rep


# ---------------------------------------------------------------------- index

def index_operator(T: Operator, tol: float = RANK_TOL) -> K0Class:
    """``[ker T] - [ker T*]``."""
    r = numerical_rank(T, tol)
    ker = [d - ri for d, ri in zip(T.source.dims, r)]
    coker = [e - ri for e, ri in zip(T.target.dims, r)]
    return K0Class(tuple(ker), tuple(coker))


def index_complex(C: Complex, tol: float = RANK_TOL) -> K0Class:
    return index_operator(dirac(C).even, tol)


def euler_index(C: Complex, tol: float = RANK_TOL) -> K0Class:
    """``sum (-1)^k [H^k]``."""
    total = K0Class.zero(C.algebra.m)
    for k in range(C.N + 2):
        cls = cohomology(C, k, tol)[1]
        total = total + cls if k % 2 == 0 else total - cls
    return total


def weak_index(C: Complex, tol: float = RANK_TOL) -> K0Class:
    """Weakly Fredholm and Fredholm coincide in finite rank; same as :func:`index_complex`."""
    return index_complex(C, tol)


def module_euler_class(C: Complex) -> K0Class:
    """``sum (-1)^k [E_k]``."""
    m = C.algebra.m
    return K0Class.from_vector([sum((-1) ** k * C.modules[k].dims[i] for k in range(C.N + 2))
                                for i in range(m)])


def putinar_tev(C: Complex, P: Parametrix) -> tuple[Operator, Operator]:
    """Putinar's ``T_ev: E_ev -> E_odd`` and ``T_odd: E_odd -> E_ev``."""
    ev = [C.modules[k] for k in C.even_indices]
    od = [C.modules[k] for k in C.odd_indices]
    grid_ev = []
    for r, k in enumerate(C.odd_indices):
        row = [None] * len(ev)
        row[r] = C.t(k - 1)
        if r + 1 < len(ev):
            row[r + 1] = P.p(k)
        grid_ev.append(row)
    grid_odd = []
    for r, k in enumerate(C.even_indices):
        row = [None] * len(od)
        if r - 1 >= 0:
            row[r - 1] = C.t(k - 1)
        if r < len(od):
            row[r] = P.p(k)
        grid_odd.append(row)
    return block_operator(grid_ev, ev, od), block_operator(grid_odd, od, ev)


def dirac_of_parametrix_adjoint(C: Complex, P: Parametrix) -> Operator:
    """Even Dirac operator of ``P#``: ``P_{2r}*`` on the diagonal, ``P_{2r+1}`` right of it."""
    ev = [C.modules[k] for k in C.even_indices]
    od = [C.modules[k] for k in C.odd_indices]
    grid = []
    for r, k in enumerate(C.odd_indices):
        row = [None] * len(ev)
        row[r] = adjoint(P.p(k - 1))
        if r + 1 < len(ev):
            row[r + 1] = P.p(k)
        grid.append(row)
    return block_operator(grid, ev, od)


def putinar_check(C: Complex, P: Parametrix, tol: float = RANK_TOL) -> Report:
    Tev, Todd = putinar_tev(C, P)
    lhs = dirac(C).even + dirac_of_parametrix_adjoint(C, P)
    r = {"D+(T) + D+(P#) = T_ev + T_odd*": operator_norm(lhs - (Tev + adjoint(Todd)))}
    ind_ev = index_operator(Tev, tol)
    ind_d = index_complex(C, tol)
    return Report(r, 1e-9, {"index_T_ev": ind_ev.to_dict(), "index_D+": ind_d.to_dict(),
                            "index_equal": ind_ev == ind_d})


def index_with_adjoint_of_parametrix_check(T: Operator, P: Operator, tol: float = RANK_TOL) -> Report:
    """``ind T = ind(T + P*)`` for a parametrix ``P`` of ``T``."""
    I_E, I_F = Operator.identity(T.source), Operator.identity(T.target)
    r = {"|1 - PT|": operator_norm(I_E - compose(P, T)), "|1 - TP|": operator_norm(I_F - compose(T, P))}
    a = index_operator(T, tol)
    b = index_operator(T + adjoint(P), tol)
    return Report(r, np.inf, {"index_T": a.to_dict(), "index_T_plus_Pstar": b.to_dict(), "index_equal": a == b})


# ------------------------------------------------- single-block (Hilbert) index

def _require_single_block(alg):
    if alg.m != 1:
        raise ValidationError(f"needs a single-block algebra, got {alg.m} blocks")


def kdim_index(C: Complex, tol: float = RANK_TOL) -> int:
    """``sum (-1)^k dim_K H^k`` over a single-block algebra."""
    _require_single_block(C.algebra)
    return sum((-1) ** k * cohomology(C, k, tol)[0].dims[0] for k in range(C.N + 2))


def psi_restrict(T: Operator) -> np.ndarray:
    """Matrix of ``T`` restricted to ``E e_0`` for the minimal projection ``e_0 = e_11``."""
    _require_single_block(T.algebra)
    return np.array(T.blocks[0])


def hilbert_index(M: np.ndarray, tol: float = RANK_TOL) -> int:
    """``dim ker M - dim coker M`` for a plain matrix."""
    M = np.asarray(M)
    e, d = M.shape
    if M.size == 0:
        return d - e
    s = np.linalg.svd(M, compute_uv=False)
    r = int(np.sum(s > tol * s[0] * max(d, e))) if s[0] > 0 else 0
    return (d - r) - (e - r)


def rebase(C: Complex, algebra) -> Complex:
    """Same fibers and matrices over another algebra with the same number of blocks."""
    alg = make_algebra(algebra)
    if alg.m != C.algebra.m:
        raise ValidationError("rebase keeps the number of blocks")
    mods = [HilbertModule(alg, E.dims, E.grams) for E in C.modules]
    return Complex(mods, [t.with_modules(mods[k], mods[k + 1]) for k, t in enumerate(C.diffs)], C.kind, C.tol)


# ------------------------------------------------------------- maps of complexes

@dataclass
class ChainMap:
    """``G_k: E_k -> F_k`` between complexes ``source`` and ``target``."""

    source: Complex
    target: Complex
    maps: Sequence[Operator]
    residuals: list = field(init=False)

    def __post_init__(self):
        S, T = self.source, self.target
        if S.N != T.N:
            raise ValidationError("chain map between complexes of different length")
        if len(self.maps) != S.N + 2:
            raise ValidationError(f"chain map needs {S.N + 2} components")
        for k, G in enumerate(self.maps):
            if not (G.source.same_space(S.modules[k]) and G.target.same_space(T.modules[k])):
                raise ValidationError(f"G_{k} must map E_{k} -> F_{k}")
        self.maps = [G.with_modules(S.modules[k], T.modules[k]) for k, G in enumerate(self.maps)]
        self.residuals = [operator_norm(compose(self.maps[k + 1], S.t(k)) - compose(T.t(k), self.maps[k]))
                          for k in range(S.N + 1)]

    @classmethod
    def identity(cls, C: Complex) -> "ChainMap":
        return cls(C, C, [Operator.identity(E) for E in C.modules])

    @classmethod
    def zero(cls, S: Complex, T: Complex) -> "ChainMap":
        return cls(S, T, [Operator.zero(a, b) for a, b in zip(S.modules, T.modules)])


def validate_chain_map(G: ChainMap, tol: float = 1e-9) -> Report:
    return Report({f"G_{k + 1} t_{k} - s_{k} G_{k}": v for k, v in enumerate(G.residuals)}, tol)


def chain_homotopy_check(G: ChainMap, H: ChainMap, p: Sequence[Operator], tol: float = 1e-8) -> Report:
    """Residuals of ``g_k - h_k = p_k t_k + s_{k-1} p_{k-1}`` and of the induced harmonic maps."""
    S, T = G.source, G.target
    if len(p) != S.N + 1:
        raise ValidationError(f"homotopy needs {S.N + 1} operators p_k: E_(k+1) -> F_k")

    def pk(k):
        if 0 <= k <= S.N:
            return p[k]
        return Operator.zero(S.module(k + 1), T.module(k))

    r = {}
    for k in range(S.N + 2):
        lhs = G.maps[k] - H.maps[k]
        rhs = compose(pk(k), S.t(k)) + compose(T.t(k - 1), pk(k - 1))
        r[f"homotopy k={k}"] = operator_norm(lhs - rhs)
    for k, (a, b) in enumerate(zip(induced_cohomology_map(G), induced_cohomology_map(H))):
        r[f"induced maps agree k={k}"] = operator_norm(a - b)
    return Report(r, tol)


def induced_cohomology_map(G: ChainMap, tol: float = RANK_TOL) -> list[Operator]:
    """``H_F G_k H_E`` on harmonic representatives."""
    out = []
    for k, Gk in enumerate(G.maps):
        HE = hodge_split(G.source, k, tol).harmonic
        HF = hodge_split(G.target, k, tol).harmonic
        out.append(chain(HF, Gk, HE))
    return out


def exact_complex_check(C: Complex, tol: float = RANK_TOL) -> dict:
    """An exact complex has index zero and invertible Laplacians."""
    from .complex import laplace_k
    ind = index_complex(C, tol)
    inv = all(numerical_rank(laplace_k(C, k), tol) == C.modules[k].dims for k in range(C.N + 2))
    return {"exact": is_exact(C, tol), "index_zero": ind.is_zero(), "laplacians_invertible": inv}


def ses_index_check(T: Complex, U: Complex, V: Complex, G: ChainMap, H: ChainMap,
                    tol: float = RANK_TOL, map_tol: float = 1e-8) -> Report:
    """For ``0 -> T -> U -> V -> 0`` verify ``ind T - ind U + ind V = 0``."""
    if not (T.N == U.N == V.N):
        raise ValidationError("short exact sequence needs complexes of equal length")
    for k in range(U.N + 2):
        rg, rh = numerical_rank(G.maps[k], tol), numerical_rank(H.maps[k], tol)
        if rg != T.modules[k].dims:
            raise ExactnessError(k, "G_k is not injective")
        if rh != V.modules[k].dims:
            raise ExactnessError(k, "H_k is not surjective")
        hg = operator_norm(compose(H.maps[k], G.maps[k]))
        if hg > map_tol * (1 + operator_norm(H.maps[k]) * operator_norm(G.maps[k])):
            raise ExactnessError(k, f"H_k G_k != 0 (norm {hg:.3e})")
        if tuple(a + c for a, c in zip(rg, rh)) != U.modules[k].dims:
            raise ExactnessError(k, "ran G_k != ker H_k (rank mismatch)")
    r = {}
    for name, M in (("G", G), ("H", H)):
        for k, v in enumerate(M.residuals):
            r[f"{name} commutes k={k}"] = v
    iT, iU, iV = index_complex(T, tol), index_complex(U, tol), index_complex(V, tol)
    total = iT - iU + iV
    extra = {"index_T": iT.to_dict(), "index_U": iU.to_dict(), "index_V": iV.to_dict(),
             "alternating_sum_zero": total.is_zero()}
    for name, C in (("T", T), ("U", U), ("V", V)):
        ex = exact_complex_check(C, tol)
        extra[f"exact_{name}"] = ex
        if ex["exact"]:
            extra["alternating_sum_zero"] &= ex["index_zero"] and ex["laplacians_invertible"]
    return Report(r, map_tol, extra)
