"""Minimisation over unit vectors of C^n.

``minimize_on_sphere`` is multistart Riemannian gradient descent with Armijo
backtracking on the real unit sphere S^{2n-1}. ``grid_minimize`` is an
independent, derivative-free check for small n: a hyperspherical grid followed
by Powell polishing of the best grid local minima.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

# f(psi) -> (value, G) with G = 2 df/d(conj psi), the gradient in (Re, Im) coordinates
ValueAndGrad = Callable[[np.ndarray], "tuple[float, np.ndarray]"]


@dataclass
class OptimizerConfig:
    starts: int = 32
    gtol: float = 1e-10
    max_iter: int = 10_000
    backtrack: float = 0.5
    armijo: float = 1e-4
    seed: int = 0
    threshold: float | None = None
    grid_check: bool = True
    grid_points: int = 200_000
    record_trace: bool = False
    # known lower bound of the objective; reaching it ends a run
    floor: float | None = None


@dataclass
class StartResult:
    psi: np.ndarray
    value: float
    iterations: int
    converged: bool


@dataclass
class SphereResult:
    best: StartResult
    best_index: int
    runs: list[StartResult]
    trace: list[tuple[int, int, float]] = field(default_factory=list)

    @property
    def iterations_total(self) -> int:
        return sum(r.iterations for r in self.runs)

    @property
    def converged_starts(self) -> int:
        return sum(r.converged for r in self.runs)


def random_unit_vectors(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _real_dot(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.real(np.vdot(x, y)))


def descend(
    fg: ValueAndGrad,
    psi: np.ndarray,
    cfg: OptimizerConfig,
    report: Callable[[np.ndarray], float] | None = None,
    trace: list | None = None,
    start_index: int = 0,
    memory: int = 8,
    stall: int = 30,
) -> StartResult:
    """Riemannian gradient descent from one start.

    Trial steps use the Barzilai-Borwein length; acceptance is Armijo against
    the largest of the last ``memory`` values (non-monotone), backtracking by
    ``cfg.backtrack``. A run also stops when the best value has not improved
    by more than round-off for ``stall`` consecutive steps.
    """
    psi = psi / np.linalg.norm(psi)
    f, g = fg(psi)
    rg = g - _real_dot(psi, g) * psi
    history = [f]
    best_f, best_psi, since_best = f, psi, 0
    t_trial = 1.0 / max(np.sqrt(_real_dot(rg, rg)), 1.0)
    converged = False
    steps = 0
    while steps < cfg.max_iter:
        gnorm2 = _real_dot(rg, rg)
        if gnorm2 <= cfg.gtol**2 or (cfg.floor is not None and f <= cfg.floor):
            converged = True
            break
        ref = max(history[-memory:])
        t = t_trial
        while t >= 1e-18:
            cand = psi - t * rg
            cand /= np.linalg.norm(cand)
            fc, gc = fg(cand)
            if fc <= ref - cfg.armijo * t * gnorm2:
                break
            t *= cfg.backtrack
        if t < 1e-18:
            # no decrease representable in floating point: a kink or round-off floor
            converged = gnorm2 <= 1e-6
            break
        rgc = gc - _real_dot(cand, gc) * cand
        s_vec = cand - psi
        y_vec = rgc - rg
        sy = abs(_real_dot(s_vec, y_vec))
        t_trial = min(max(_real_dot(s_vec, s_vec) / sy, 1e-12), 1e6) if sy > 0 else min(2.0 * t, 1e6)
        psi, f, rg = cand, fc, rgc
        history.append(f)
        steps += 1
        if trace is not None:
            trace.append((start_index, steps, report(psi) if report else f))
        if f < best_f - 1e-15 * max(abs(best_f), 1e-300):
            best_f, best_psi, since_best = f, psi, 0
        else:
            since_best += 1
            if since_best >= stall:
                converged = _real_dot(rg, rg) <= 1e-6
                break
    if best_f < f:
        psi = best_psi
    value = report(psi) if report else fg(psi)[0]
    return StartResult(psi, float(value), steps, converged)


def minimize_on_sphere(
    fg: ValueAndGrad,
    n: int,
    cfg: OptimizerConfig,
    report: Callable[[np.ndarray], float] | None = None,
    extra_starts: Sequence[np.ndarray] = (),
) -> SphereResult:
    """Multistart descent; ``extra_starts`` come first, random starts fill up to cfg.starts.

    The winner is the smallest reported value, ties broken by start index.
    """
    rng = np.random.default_rng(cfg.seed)
    extra = [np.asarray(v, dtype=complex) for v in extra_starts][: cfg.starts]
    rand = random_unit_vectors(n, max(cfg.starts - len(extra), 0), rng)
    starts = extra + list(rand)
    trace: list | None = [] if cfg.record_trace else None
    runs = [descend(fg, s, cfg, report, trace, i) for i, s in enumerate(starts)]
    best_index = min(range(len(runs)), key=lambda i: (runs[i].value, i))
    return SphereResult(runs[best_index], best_index, runs, trace or [])


def angles_to_vectors(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Hyperspherical amplitudes (n-1 angles) and relative phases (n-1) to unit vectors."""
    m, k = theta.shape
    n = k + 1
    amp = np.ones((m, n))
    s = np.ones(m)
    for j in range(k):
        amp[:, j] = s * np.cos(theta[:, j])
        s = s * np.sin(theta[:, j])
    amp[:, n - 1] = s
    ph = np.concatenate([np.zeros((m, 1)), phi], axis=1)
    return amp * np.exp(1j * ph)


@dataclass
class GridResult:
    value: float
    psi: np.ndarray
    grid_value: float
    points: int


def grid_minimize(
    batch_objective: Callable[[np.ndarray], np.ndarray],
    n: int,
    points: int = 200_000,
    polish: int = 24,
) -> GridResult:
    """Derivative-free global estimate of min over unit psi in C^n (n small).

    The objective is tabulated on a hyperspherical grid; the ``polish`` best
    grid local minima are then refined with Powell's method in unconstrained
    (Re z, Im z) coordinates, psi = z / |z|, which have no coordinate
    singularities.
    """
    if n == 1:
        psi = np.ones((1, 1), dtype=complex)
        v = float(batch_objective(psi)[0])
        return GridResult(v, psi[0], v, 1)
    dims = 2 * (n - 1)
    per_axis = max(int(points ** (1.0 / dims)), 3)
    th = np.linspace(0.0, np.pi / 2, per_axis)
    ph = np.linspace(0.0, 2 * np.pi, per_axis, endpoint=False)
    axes = [th] * (n - 1) + [ph] * (n - 1)
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dims)
    vecs = angles_to_vectors(mesh[:, : n - 1], mesh[:, n - 1 :])
    vals = np.concatenate([batch_objective(c) for c in np.array_split(vecs, max(1, len(vecs) // 50_000))])
    grid_value = float(vals.min())

    cube = vals.reshape((per_axis,) * dims)
    local = np.ones(cube.shape, dtype=bool)
    for ax in range(dims):
        for sh in (1, -1):
            local &= cube <= np.roll(cube, sh, axis=ax)
    idx = np.flatnonzero(local.reshape(-1))
    idx = idx[np.argsort(vals[idx], kind="stable")][:polish]

    def f(x):
        z = x[:n] + 1j * x[n:]
        return float(batch_objective((z / np.linalg.norm(z))[None])[0])

    best_val, best_psi = grid_value, vecs[int(np.argmin(vals))]
    for i in idx:
        z = vecs[i]
        r = minimize(f, np.concatenate([z.real, z.imag]), method="Powell", options={"xtol": 1e-10, "ftol": 1e-15})
        if r.fun < best_val:
            z = r.x[:n] + 1j * r.x[n:]
            best_val, best_psi = float(r.fun), z / np.linalg.norm(z)
    return GridResult(best_val, best_psi, grid_value, len(mesh))
