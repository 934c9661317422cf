"""Uncertainty and complementarity bounds for bounded observables.

Infima of deviation functionals are taken over pure states; every objective
here is a concave function of the density matrix, so mixed states never do
better.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .matrix_algebra import as_matrix, commutator, dagger, is_hermitian, operator_norm
from .optimize import OptimizerConfig, grid_minimize, minimize_on_sphere
from .states import State, expectation

KINDS = ("sum", "sum_of_squares", "product", "single")
WEYL_COSINE_REFERENCE = 0.125


class BoundError(ValueError):
    pass


def _herm(a, name: str = "observable") -> np.ndarray:
    a = as_matrix(a)
    if not is_hermitian(a):
        raise BoundError(f"{name} is not hermitian")
    return 0.5 * (a + dagger(a))


@dataclass
class BoundReport:
    objective_kind: str
    infimum_estimate: float
    argmin_state: np.ndarray
    starts: int
    converged_starts: int
    iterations_total: int
    seed: int
    oracle_value: float | None = None
    oracle_gap: float | None = None
    extras: dict = field(default_factory=dict)
    trace: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        from .serialize import vector_to_json

        d = {
            "objective_kind": self.objective_kind,
            "infimum_estimate": self.infimum_estimate,
            "argmin_state": vector_to_json(self.argmin_state),
            "starts": self.starts,
            "converged_starts": self.converged_starts,
            "iterations_total": self.iterations_total,
            "seed": self.seed,
        }
        if self.oracle_value is not None:
            d["oracle_value"] = self.oracle_value
            d["oracle_gap"] = self.oracle_gap
        d.update(self.extras)
        return d


def robertson_bound(s: State, a, b) -> float:
    """Half the modulus of the commutator expectation, |omega([a, b])| / 2."""
    a, b = _herm(a), _herm(b)
    if a.shape != b.shape or a.shape[0] != s.dim:
        raise BoundError("dimension mismatch")
    return 0.5 * abs(expectation(s, commutator(a, b)))


class _Moments:
    """Mean and variance of a hermitian matrix along a state vector, with gradients."""

    def __init__(self, a: np.ndarray):
        self.a = a
        self.a2 = a @ a

    def __call__(self, psi: np.ndarray):
        ap = self.a @ psi
        a2p = self.a2 @ psi
        m = float(np.real(np.vdot(psi, ap)))
        var = float(np.real(np.vdot(psi, a2p))) - m * m
        grad = 2.0 * (a2p - 2.0 * m * ap)
        return max(var, 0.0), grad

    def batch(self, psis: np.ndarray) -> np.ndarray:
        m = np.real(np.einsum("pi,ij,pj->p", np.conj(psis), self.a, psis))
        m2 = np.real(np.einsum("pi,ij,pj->p", np.conj(psis), self.a2, psis))
        return np.maximum(m2 - m * m, 0.0)


def _objective(kind: str, a: np.ndarray, b: np.ndarray | None):
    """(value-and-gradient for descent, exact reported value, batched reported value)."""
    ma = _Moments(a)
    mb = _Moments(b) if b is not None else None

    if kind == "single":
        def fg(psi):
            return ma(psi)

        def report(psi):
            return math.sqrt(ma(psi)[0])

        def batch(p):
            return np.sqrt(ma.batch(p))

    elif kind == "sum_of_squares":
        def fg(psi):
            va, ga = ma(psi)
            vb, gb = mb(psi)
            return va + vb, ga + gb

        def report(psi):
            return ma(psi)[0] + mb(psi)[0]

        def batch(p):
            return ma.batch(p) + mb.batch(p)

    elif kind == "product":
        def fg(psi):
            va, ga = ma(psi)
            vb, gb = mb(psi)
            return va * vb, vb * ga + va * gb

        def report(psi):
            return math.sqrt(ma(psi)[0] * mb(psi)[0])

        def batch(p):
            return np.sqrt(ma.batch(p) * mb.batch(p))

    elif kind == "sum":
        def fg(psi):
            va, ga = ma(psi)
            vb, gb = mb(psi)
            da, db = math.sqrt(va), math.sqrt(vb)
            g = (ga / (2 * da) if da > 1e-150 else 0 * ga) + (gb / (2 * db) if db > 1e-150 else 0 * gb)
            return da + db, g

        def report(psi):
            return math.sqrt(ma(psi)[0]) + math.sqrt(mb(psi)[0])

        def batch(p):
            return np.sqrt(ma.batch(p)) + np.sqrt(mb.batch(p))

    else:
        raise BoundError(f"unknown objective kind {kind!r}; expected one of {KINDS}")
    return fg, report, batch


def evaluate_objective(kind: str, a, b, psi) -> float:
    """The reported objective of ``kind`` at the unit vector ``psi``."""
    a = _herm(a, "a")
    b = None if b is None else _herm(b, "b")
    return _objective(kind, a, b)[1](np.asarray(psi, dtype=complex))


def _eigen_starts(*mats: np.ndarray) -> list[np.ndarray]:
    out = []
    for m in mats:
        _, v = np.linalg.eigh(m)
        out.extend(v[:, i] for i in range(v.shape[1]))
    return out


def minimize_deviation_functional(a, b=None, kind: str = "sum", cfg: OptimizerConfig | None = None) -> BoundReport:
    """Infimum over pure states of a deviation functional of one or two observables.

    Eigenvectors of ``a`` and ``b`` seed the first starts (the single-observable
    infimum is attained there); the rest are seeded random vectors.
    """
    cfg = dataclasses.replace(cfg or OptimizerConfig(), floor=0.0)
    a = _herm(a, "a")
    if a.shape[0] < 1:
        raise BoundError("empty observable")
    if kind == "single":
        if b is not None:
            raise BoundError("kind 'single' takes one observable")
    else:
        if b is None:
            raise BoundError(f"kind {kind!r} needs two observables")
        b = _herm(b, "b")
        if b.shape != a.shape:
            raise BoundError("observables have different dimensions")
    n = a.shape[0]
    fg, report, batch = _objective(kind, a, b)
    seeds = _eigen_starts(a) if b is None else _eigen_starts(a, b)
    res = minimize_on_sphere(fg, n, cfg, report, seeds[: max(cfg.starts // 2, 1)])
    out = BoundReport(
        objective_kind=kind,
        infimum_estimate=res.best.value,
        argmin_state=res.best.psi,
        starts=len(res.runs),
        converged_starts=res.converged_starts,
        iterations_total=res.iterations_total,
        seed=cfg.seed,
        trace=res.trace,
    )
    if cfg.grid_check and n <= 4:
        g = grid_minimize(batch, n, cfg.grid_points)
        out.oracle_value = g.value
        out.oracle_gap = abs(res.best.value - g.value)
    return out


def default_threshold(a, b) -> float:
    return 1e-6 * (operator_norm(a) + operator_norm(b))


def certify_complementarity(a, b, cfg: OptimizerConfig | None = None) -> tuple[bool, BoundReport]:
    """True iff the estimated infimum of Delta(a) + Delta(b) clears the threshold."""
    cfg = cfg or OptimizerConfig()
    rep = minimize_deviation_functional(a, b, "sum", cfg)
    thr = cfg.threshold if cfg.threshold is not None else default_threshold(a, b)
    rep.extras["threshold"] = thr
    return rep.infimum_estimate > thr, rep


class SharpState(NamedTuple):
    vector: np.ndarray | None
    commutator_norm: float


def common_sharp_state(a, b, tol: float = 1e-9) -> SharpState:
    """A joint eigenvector of commuting a, b; ``vector`` is None when they do not commute."""
    a, b = _herm(a, "a"), _herm(b, "b")
    cn = operator_norm(commutator(a, b))
    if cn >= tol:
        return SharpState(None, cn)
    scale = max(operator_norm(a), operator_norm(b), 1.0)
    for t in (0.7548776662466927, 1.3247179572447460, 2.718281828459045, 0.5772156649015329):
        _, v = np.linalg.eigh(a + t * b)
        psi = v[:, 0]
        s = State.pure(psi)
        da = math.sqrt(max(expectation(s, a @ a).real - expectation(s, a).real ** 2, 0.0))
        db = math.sqrt(max(expectation(s, b @ b).real - expectation(s, b).real ** 2, 0.0))
        if da < math.sqrt(tol) * scale and db < math.sqrt(tol) * scale:
            return SharpState(psi, cn)
    return SharpState(None, cn)


@dataclass
class CollapseReport:
    product_infimum: float
    single_infimum: float
    norm_b: float
    bound: float
    holds: bool

    def to_dict(self) -> dict:
        return dict(vars(self))


def bounded_product_collapse(a, b, cfg: OptimizerConfig | None = None, tol: float = 1e-9) -> CollapseReport:
    """inf Delta(a) Delta(b) <= inf Delta(a) * sqrt(2) * ||b|| for bounded b."""
    cfg = cfg or OptimizerConfig()
    prod = minimize_deviation_functional(a, b, "product", cfg).infimum_estimate
    single = minimize_deviation_functional(a, None, "single", cfg).infimum_estimate
    nb = operator_norm(b)
    bound = single * math.sqrt(2.0) * nb
    return CollapseReport(prod, single, nb, bound, prod <= bound + tol)


@dataclass(frozen=True, eq=False)
class OscillatorModel:
    """Truncated canonical pair in the number basis."""

    truncation_dim: int
    scale_s: float
    hbar: float
    q_matrix: np.ndarray
    p_matrix: np.ndarray

    @cached_property
    def _q_eig(self):
        w, v = np.linalg.eigh(self.q_matrix)
        return w * math.sqrt(self.scale_s / self.hbar), v

    @cached_property
    def _p_eig(self):
        w, v = np.linalg.eigh(self.p_matrix)
        return w / math.sqrt(self.hbar * self.scale_s), v

    def ccr_corner_residual(self) -> float:
        n = self.truncation_dim
        c = commutator(self.q_matrix, self.p_matrix)
        return float(np.max(np.abs(c[: n - 1, : n - 1] - 1j * self.hbar * np.eye(n - 1))))


def ladder(n: int) -> np.ndarray:
    """Truncated annihilation operator."""
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1).astype(complex)


def build_oscillator(n: int, s: float = 1.0, hbar: float = 1.0, tol: float = 1e-10) -> OscillatorModel:
    if n < 4:
        raise BoundError("truncation dimension must be at least 4")
    if s <= 0 or hbar <= 0:
        raise BoundError("scale and hbar must be positive")
    a = ladder(n)
    ad = dagger(a)
    q = math.sqrt(hbar / (2 * s)) * (ad + a)
    p = 1j * math.sqrt(hbar * s / 2) * (ad - a)
    model = OscillatorModel(n, float(s), float(hbar), q, p)
    if model.ccr_corner_residual() > tol * max(hbar, 1.0):
        raise BoundError("canonical commutation relation fails on the leading corner")
    return model


def _cos_variance(x: np.ndarray, prob: np.ndarray):
    """Variance of cos(x - <x>) under prob, and its derivative in each prob_k."""
    m = prob @ x
    c = np.cos(x - m)
    sn = np.sin(x - m)
    cm = prob @ c
    var = prob @ (c * c) - cm * cm
    dvar_dm = 2.0 * (prob @ (c * sn)) - 2.0 * cm * (prob @ sn)
    dvar_dp = c * c - 2.0 * cm * c + dvar_dm * x
    return max(float(var), 0.0), dvar_dp


def weyl_cosine_objective(model: OscillatorModel, psi: np.ndarray):
    """Delta(cos q~)^2 + Delta(cos p~)^2 with q~, p~ recentred at psi's own means.

    q~ is a shifted multiple of q, so it shares q's eigenvectors; the functional
    calculus is done once in that eigenbasis.
    """
    total, grad = 0.0, np.zeros_like(psi)
    for x, v in (model._q_eig, model._p_eig):
        w = dagger(v) @ psi
        var, dp = _cos_variance(x, np.abs(w) ** 2)
        total += var
        grad += 2.0 * (v @ (dp * w))
    return total, grad


def weyl_cosine_direct(model: OscillatorModel, psi: np.ndarray) -> float:
    """Same objective by literal construction of q~, p~ and cos via eigendecomposition."""
    s = State.pure(psi)
    out = 0.0
    for op, scale in ((model.q_matrix, math.sqrt(model.scale_s / model.hbar)), (model.p_matrix, 1 / math.sqrt(model.hbar * model.scale_s))):
        shifted = scale * (op - expectation(s, op).real * np.eye(model.truncation_dim))
        w, v = np.linalg.eigh(shifted)
        c = (v * np.cos(w)) @ dagger(v)
        out += expectation(s, c @ c).real - expectation(s, c).real ** 2
    return out


def weyl_cosine_experiment(model: OscillatorModel, cfg: OptimizerConfig | None = None, truncation_check: bool = True) -> BoundReport:
    """Multistart infimum of the cosine complementarity functional.

    The printed reference 1/8 comes from a small-argument estimate and is
    reported for comparison only.
    """
    cfg = dataclasses.replace(cfg or OptimizerConfig(), floor=0.0)
    n = model.truncation_dim
    ground = np.zeros(n, dtype=complex)
    ground[0] = 1.0

    def fg(psi):
        return weyl_cosine_objective(model, psi)

    def report(psi):
        return weyl_cosine_objective(model, psi)[0]

    res = minimize_on_sphere(fg, n, cfg, report, [ground])
    out = BoundReport(
        objective_kind="weyl_cosine",
        infimum_estimate=res.best.value,
        argmin_state=res.best.psi,
        starts=len(res.runs),
        converged_starts=res.converged_starts,
        iterations_total=res.iterations_total,
        seed=cfg.seed,
        trace=res.trace,
        extras={"reference": WEYL_COSINE_REFERENCE, "truncation_dim": n, "ground_state_value": report(ground)},
    )
    if truncation_check and n // 2 >= 4:
        half = build_oscillator(n // 2, model.scale_s, model.hbar)
        sub = weyl_cosine_experiment(half, cfg, truncation_check=False)
        out.extras["half_truncation_dim"] = n // 2
        out.extras["half_truncation_infimum"] = sub.infimum_estimate
        out.extras["relative_change"] = abs(sub.infimum_estimate - res.best.value) / max(res.best.value, 1e-300)
    return out
