"""Gap and Riesz metrics, the V operator, hat-doubling and index-stability sweeps."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .complex import Complex, conjugate_complex, make_complex
from .exceptions import ComplexPropertyError, ValidationError
from .fredholm import index_complex
from .hodge import hodge_split
from .module import HilbertModule
from .operator import (Operator, adjoint, block_operator, bounded_transform, chain, compose,
                       herm_funcalc, operator_norm, resolvent_root)
from .report import Report


def _check_pair(t: Operator, s: Operator):
    if not (t.source.same_space(s.source) and t.target.same_space(s.target)):
        raise ValidationError("operators must share source and target")


def gap_metric(t: Operator, s: Operator) -> float:
    """``(|Q_t^2-Q_s^2|^2 + |Q_t*^2-Q_s*^2|^2 + 2|F_tQ_t-F_sQ_s|^2)^{1/2}``."""
    _check_pair(t, s)
    Ft, Qt = bounded_transform(t)
    Fs, Qs = bounded_transform(s)
    Qts, Qss = resolvent_root(adjoint(t)), resolvent_root(adjoint(s))
    a = operator_norm(compose(Qt, Qt) - compose(Qs, Qs))
    b = operator_norm(compose(Qts, Qts) - compose(Qss, Qss))
    c = operator_norm(compose(Ft, Qt) - compose(Fs, Qs))
    return float(np.sqrt(a * a + b * b + 2 * c * c))


def projection_gap(t: Operator, s: Operator) -> float:
    """``|P_G(t) - P_G(s)|`` for the orthogonal projections onto the graphs in ``E + F``.

    Supplementary metric; unlike :func:`gap_metric` it is invariant under hat-doubling.
    """
    _check_pair(t, s)
    return operator_norm(_graph_projection(t) - _graph_projection(s))


def _graph_projection(t: Operator) -> Operator:
    E, F = t.source, t.target
    Q2 = compose(*[resolvent_root(t)] * 2)
    Qs2 = compose(*[resolvent_root(adjoint(t))] * 2)
    tQ2 = compose(t, Q2)
    return block_operator([[Q2, compose(Q2, adjoint(t))], [tQ2, Operator.identity(F) - Qs2]], [E, F], [E, F])


def riesz_metric(t: Operator, s: Operator) -> float:
    """``|F_t - F_s|``."""
    _check_pair(t, s)
    return operator_norm(bounded_transform(t).f - bounded_transform(s).f)


def v_operator(t: Operator, s: Operator) -> Operator:
    """``V_{t,s} = Q_t Q_s + F_t* F_s``."""
    _check_pair(t, s)
    Ft, Qt = bounded_transform(t)
    Fs, Qs = bounded_transform(s)
    return compose(Qt, Qs) + compose(adjoint(Ft), Fs)


def v_lemma_check(t: Operator, s: Operator, samples: int = 1000, seed: int = 0) -> Report:
    """Excesses over ``gamma(t,s)`` in the V-lemma inequalities (zero means satisfied)."""
    g = gap_metric(t, s)
    V = v_operator(t, s)
    Vts = v_operator(s, t)
    I = Operator.identity(t.source)
    vv = operator_norm(compose(adjoint(V), V) - I)
    Fs = bounded_transform(s).f
    Ft = bounded_transform(t).f
    fv = operator_norm(compose(Fs, v_operator(s, t)) - Ft)
    rng = np.random.default_rng(seed)
    worst = 0.0
    E = t.source
    for _ in range(samples):
        x = E.random_element(rng)
        nx = x.norm() ** 2
        if nx == 0:
            continue
        worst = max(worst, abs(V(x).norm() ** 2 - nx) - g * nx)
    r = {"|V*V - 1| - gamma": max(0.0, vv - g),
         "sampled |Vx|^2 - |x|^2 excess": max(0.0, worst),
         "V_ts - V_st*": operator_norm(Vts - adjoint(V))}
    if g < 1:
        r["|F_s V_st - F_t| - gamma"] = max(0.0, fv - g)
    extra = {"gamma": g, "v_star_v_deviation": vv, "fv_residual": fv}
    if g < 1:
        smin = min((np.linalg.svd(b, compute_uv=False).min() for b in _whitened_blocks(V) if b.size), default=1.0)
        extra["v_invertible"] = bool(smin > 0)
        extra["v_condition_bound"] = float(1.0 / max(1 - g, 1e-300))
    return Report(r, 1e-9, extra)


def _whitened_blocks(T: Operator):
    from .operator import whiten
    return [whiten(T, i) for i in range(T.m)]


def hat_operator(t: Operator) -> Operator:
    """Self-adjoint doubling ``[[0, t*], [t, 0]]`` on ``E + F``."""
    E, F = t.source, t.target
    return block_operator([[None, adjoint(t)], [t, None]], [E, F], [E, F])


def relative_bound(s: Operator, t: Operator, grid: Optional[Sequence[float]] = None,
                   cap: float = 0.0, slack: float = 1e-8) -> dict:
    """Smallest ``alpha`` on ``grid`` with ``|s^x| <= alpha|t^x| + beta|x|`` and ``beta <= cap``.

    ``beta(alpha) = sqrt(max(0, lambda_max(s^*s^ - alpha^2 t^*t^)))`` is a certified
    (not necessarily minimal) constant.
    """
    _check_pair(t, s)
    if grid is None:
        grid = np.round(np.linspace(0.0, 2.0, 201), 12)
    sh, th = hat_operator(s), hat_operator(t)
    S2 = compose(adjoint(sh), sh)
    T2 = compose(adjoint(th), th)
    scale = max(operator_norm(sh), 1.0)
    curve = []
    for a in grid:
        M = S2 - T2 * (a * a)
        lam = 0.0
        for i in range(M.m):
            from .operator import whiten
            W = whiten(M, i)
            if W.size:
                lam = max(lam, float(np.linalg.eigvalsh((W + W.conj().T) / 2)[-1]))
        beta = float(np.sqrt(max(lam, 0.0)))
        curve.append((float(a), beta))
    for a, beta in curve:
        if beta <= cap + slack * scale:
            return {"alpha": a, "beta": beta, "curve": curve}
    return {"alpha": None, "beta": None, "curve": curve}


# ------------------------------------------------------------------ sweeps

@dataclass
class PerturbationReport:
    metric_used: str
    epsilon: float
    trials: int
    accepted: int
    rejected: int
    index_changes: int
    max_metric_observed: float
    seed: int
    base_index: dict
    stability_bound: float
    max_gap_observed: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def stable(self) -> bool:
        return self.index_changes == 0

    def to_dict(self) -> dict:
        return asdict(self)


def random_hermitian(E: HilbertModule, rng: np.random.Generator) -> Operator:
    """Self-adjoint operator of norm 1 (w.r.t. ``E``'s inner product)."""
    blocks = []
    for i, d in enumerate(E.dims):
        X = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        H = (X + X.conj().T) / 2
        blocks.append(E.gram_isqrt(i) @ H @ E.gram_sqrt(i) if E.has_grams else H)
    H = Operator(E, E, blocks)
    n = operator_norm(H)
    return H * (1.0 / n) if n > 0 else H


def unitary_exp(H: Operator, theta: float) -> tuple[Operator, Operator]:
    """``exp(i theta H)`` and its inverse for self-adjoint ``H``."""
    return (herm_funcalc(H, lambda x: np.exp(1j * theta * x)),
            herm_funcalc(H, lambda x: np.exp(-1j * theta * x)))


def _coexact_to_exact(C: Complex, k: int, size: float, rng) -> Operator:
    Pe = hodge_split(C, k + 1).exact
    Pc = hodge_split(C, k).coexact
    X = _random_op(C.modules[k], C.modules[k + 1], rng)
    R = chain(Pe, X, Pc)
    n = operator_norm(R)
    return R * (size / n) if n > 0 else R


def _harmonic_to_harmonic(C: Complex, k: int, size: float, rng) -> Operator:
    Hk = hodge_split(C, k).harmonic
    Hk1 = hodge_split(C, k + 1).harmonic
    R = chain(Hk1, _random_op(C.modules[k], C.modules[k + 1], rng), Hk)
    n = operator_norm(R)
    return R * (size / n) if n > 0 else R


def _random_op(E: HilbertModule, F: HilbertModule, rng) -> Operator:
    return Operator(E, F, [rng.standard_normal((e, d)) + 1j * rng.standard_normal((e, d))
                           for d, e in zip(E.dims, F.dims)])


def _trial(C: Complex, kind: str, eps: float, rng) -> list[Operator]:
    N = C.N
    if eps == 0:
        return list(C.diffs)
    norms = [operator_norm(t) for t in C.diffs]
    if kind == "compact":
        ks = [k for k in range(N + 1) if rng.random() < 0.5]
        chosen = []
        for k in ks:
            if not chosen or chosen[-1] != k - 1:
                chosen.append(k)
        diffs = list(C.diffs)
        for k in chosen:
            diffs[k] = diffs[k] + _harmonic_to_harmonic(C, k, eps * rng.uniform(0.1, 1.0), rng)
        return diffs
    budget = [eps * (n if kind == "relative" else 1.0) for n in norms]
    diffs = [C.diffs[k] + _coexact_to_exact(C, k, 0.5 * budget[k] * rng.uniform(0.1, 1.0), rng)
             for k in range(N + 1)]
    edited = make_complex(C.modules, diffs, C.kind, C.tol)
    theta = min(0.25 * b / (1.0 + 2.0 * n) for b, n in zip(budget, norms))
    pairs = [unitary_exp(random_hermitian(E, rng), theta * rng.uniform(0.1, 1.0)) for E in C.modules]
    conj = conjugate_complex(edited, [u for u, _ in pairs], [v for _, v in pairs])
    return list(conj.diffs)


def perturb_sweep(C: Complex, kind: str = "bounded", epsilon: float = 1e-3, trials: int = 50,
                  seed: int = 0) -> PerturbationReport:
    """Perturb ``C`` within the complex-property constraint and recompute its index."""
    if kind not in ("bounded", "relative", "compact"):
        raise ValidationError(f"unknown perturbation kind {kind!r}")
    if C.kind != "complex":
        raise ValidationError("perturbation sweeps need a complex")
    base = index_complex(C)
    metric_name = {"bounded": "operator-norm", "relative": "relative", "compact": "operator-norm"}[kind]
    norms = [operator_norm(t) for t in C.diffs]
    accepted = rejected = changes = 0
    max_metric = max_gap = 0.0
    failures = []
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        try:
            diffs = _trial(C, kind, epsilon, rng)
            D = make_complex(C.modules, diffs, C.kind, C.tol)
        except ComplexPropertyError:
            rejected += 1
            continue
        sizes = [operator_norm(d - t) for d, t in zip(D.diffs, C.diffs)]
        if kind == "relative":
            sizes = [s / n if n > 0 else s for s, n in zip(sizes, norms)]
        if max(sizes) > epsilon * (1 + 1e-12):
            rejected += 1
            continue
        accepted += 1
        max_metric = max(max_metric, max(sizes))
        max_gap = max(max_gap, max(gap_metric(t, d) for t, d in zip(C.diffs, D.diffs)))
        ind = index_complex(D)
        if ind != base:
            changes += 1
            failures.append(ind.to_dict())
    return PerturbationReport(metric_name, float(epsilon), trials, accepted, rejected, changes,
                              float(max_metric), int(seed), base.to_dict(), float(epsilon),
                              float(max_gap), failures)


def linear_path(C0: Complex, C1: Complex) -> Callable[[float], Complex]:
    if len(C0.diffs) != len(C1.diffs) or any(not a.source.same_space(b.source) or not a.target.same_space(b.target)
                                            for a, b in zip(C0.diffs, C1.diffs)):
        raise ValidationError("endpoints must have the same module shapes")

    def path(lam: float) -> Complex:
        return make_complex(C0.modules, [a * (1 - lam) + b * lam for a, b in zip(C0.diffs, C1.diffs)],
                            C0.kind, C0.tol)
    return path


def unitary_path(C: Complex, hermitians: Sequence[Operator]) -> Callable[[float], Complex]:
    """``lam -> exp(i lam H_{k+1}) t_k exp(-i lam H_k)``."""
    def path(lam: float) -> Complex:
        pairs = [unitary_exp(H, lam) for H in hermitians]
        return conjugate_complex(C, [u for u, _ in pairs], [v for _, v in pairs])
    return path


def homotopy_path_check(C0: Complex, C1: Optional[Complex] = None, steps: int = 10,
                        path: Optional[Callable[[float], Complex]] = None) -> Report:
    """Indices and consecutive gap distances along a path of complexes."""
    if path is None:
        if C1 is None:
            raise ValidationError("give an endpoint or a path")
        path = linear_path(C0, C1)
    indices, gaps = [], []
    prev = None
    for j in range(steps + 1):
        lam = j / steps
        try:
            Cj = path(lam)
        except ComplexPropertyError as e:
            e.step = j
            e.args = (f"path step {j}: {e}",)
            raise
        indices.append(index_complex(Cj).to_dict())
        if prev is not None:
            gaps.append(max(gap_metric(a, b) for a, b in zip(prev.diffs, Cj.diffs)))
        prev = Cj
    constant = all(i == indices[0] for i in indices)
    return Report({"index changes": float(sum(i != indices[0] for i in indices))}, 0.0,
                  {"indices": indices, "step_gaps": gaps, "constant": constant})
