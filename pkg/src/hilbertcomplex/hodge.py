"""Hodge decompositions and cohomology via harmonic projections.

In finite rank every differential has closed range, so the strong Hodge
decomposition ``E_k = ker Delta_k + ran t_k* + ran t_{k-1}`` always holds and
cohomology is modelled by the harmonic space ``ker Delta_k``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import K0Class, k0_class
from .complex import Complex, dirac, laplace_k
from .module import HilbertModule
from .operator import (RANK_TOL, Operator, adjoint, block_operator, compose, kernel_projection,
                       numerical_rank, operator_norm, polar_decompose, range_projection)
from .report import Report


@dataclass(frozen=True)
class HodgeSplit:
    harmonic: Operator
    coexact: Operator
    exact: Operator
    at: int

    def residuals(self) -> dict[str, float]:
        H, X, Y = self.harmonic, self.coexact, self.exact
        I = Operator.identity(H.source)
        out = {"sum = 1": operator_norm(H + X + Y - I)}
        for name, (A, B) in {"HX": (H, X), "HY": (H, Y), "XY": (X, Y)}.items():
            out[f"{name} = 0"] = operator_norm(compose(A, B))
        for name, P in {"H": H, "X": X, "Y": Y}.items():
            out[f"{name}^2 = {name}"] = operator_norm(compose(P, P) - P)
            out[f"{name}* = {name}"] = operator_norm(adjoint(P) - P)
        return out


def hodge_split(C: Complex, k: int, tol: float = RANK_TOL) -> HodgeSplit:
    return HodgeSplit(
        harmonic=kernel_projection(laplace_k(C, k), tol),
        coexact=range_projection(C.t_star(k), tol),
        exact=range_projection(C.t(k - 1), tol),
        at=k,
    )


def harmonic_meet(C: Complex, k: int, tol: float = RANK_TOL) -> Operator:
    """Projection onto ``ker t_k`` intersected with ``ker t_{k-1}*``, from the stacked operator."""
    E = C.module(k)
    stacked = block_operator([[C.t(k)], [C.t_star(k - 1)]], [E], [C.module(k + 1), C.module(k - 1)])
    return kernel_projection(stacked, tol)


def cohomology(C: Complex, k: int, tol: float = RANK_TOL) -> tuple[HilbertModule, K0Class]:
    """Harmonic model of ``H^k``: dims are the per-block nullity of ``Delta_k``."""
    E = C.module(k)
    r = numerical_rank(laplace_k(C, k), tol)
    H = HilbertModule(E.algebra, [d - ri for d, ri in zip(E.dims, r)])
    return H, k0_class(H)


def betti(C: Complex, tol: float = RANK_TOL) -> list[tuple[int, ...]]:
    return [cohomology(C, k, tol)[0].dims for k in range(C.N + 2)]


def is_exact(C: Complex, tol: float = RANK_TOL) -> bool:
    return all(not any(b) for b in betti(C, tol))


def check_hodge_equivalences(C: Complex, tol: float = RANK_TOL, report_tol: float = 1e-8) -> Report:
    from .complex import bounded_transform_complex
    r = {}
    FC = bounded_transform_complex(C)
    for k in range(C.N + 2):
        s = hodge_split(C, k, tol)
        for name, v in s.residuals().items():
            r[f"k={k} {name}"] = v
        H, X, Y = s.harmonic, s.coexact, s.exact
        r[f"k={k} ker t_k = H + ran t_(k-1)"] = operator_norm(kernel_projection(C.t(k), tol) - (H + Y))
        r[f"k={k} ker t*_(k-1) = H + ran t_k*"] = operator_norm(kernel_projection(C.t_star(k - 1), tol) - (H + X))
        r[f"k={k} ran Delta = ran t_k* + ran t_(k-1)"] = operator_norm(range_projection(laplace_k(C, k), tol) - (X + Y))
        r[f"k={k} ker Delta = meet"] = operator_norm(H - harmonic_meet(C, k, tol))
        r[f"k={k} ker Delta = ker Delta(F)"] = operator_norm(H - kernel_projection(laplace_k(FC, k), tol))
    D = dirac(C)
    V, A = polar_decompose(D.even, tol)
    r["D+ = V|D+|"] = operator_norm(D.even - compose(V, A))
    r["V*V = ran D-"] = operator_norm(compose(adjoint(V), V) - range_projection(D.odd, tol))
    r["VV* = ran D+"] = operator_norm(compose(V, adjoint(V)) - range_projection(D.even, tol))
    return Report(r, report_tol)


def euler_characteristic_dims(C: Complex) -> tuple[int, ...]:
    """``sum (-1)^k dims(E_k)`` per block."""
    m = C.algebra.m
    return tuple(sum((-1) ** k * C.modules[k].dims[i] for k in range(C.N + 2)) for i in range(m))
