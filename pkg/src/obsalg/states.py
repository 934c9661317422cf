"""Density-matrix states, expectations and simulated measurements."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matrix_algebra import StarAlgebra, as_matrix, dagger, is_hermitian

STATE_TOL = 1e-10


class StateError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class State:
    rho: np.ndarray
    tol: float = STATE_TOL

    def __post_init__(self):
        rho = as_matrix(self.rho)
        if np.max(np.abs(rho - dagger(rho))) > self.tol:
            raise StateError("density matrix is not hermitian")
        rho = 0.5 * (rho + dagger(rho))
        if abs(np.trace(rho).real - 1.0) > self.tol:
            raise StateError(f"density matrix has trace {np.trace(rho).real!r}, expected 1")
        if np.linalg.eigvalsh(rho)[0] < -self.tol:
            raise StateError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @classmethod
    def pure(cls, psi, tol: float = STATE_TOL) -> "State":
        v = np.asarray(psi, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), tol)

    @classmethod
    def mixed(cls, n: int) -> "State":
        return cls(np.eye(n) / n)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, rank: int | None = None) -> "State":
        """Random density matrix of the given rank (full rank by default)."""
        r = n if rank is None else rank
        g = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
        rho = g @ dagger(g)
        return cls(rho / np.trace(rho).real)


def _check_dims(s: State, a: np.ndarray) -> None:
    if a.shape[0] != s.dim:
        raise StateError(f"state has dimension {s.dim}, observable has {a.shape[0]}")


def expectation(s: State, a) -> complex:
    """omega(a) = Tr(rho a)."""
    a = as_matrix(a)
    _check_dims(s, a)
    return complex(np.einsum("ij,ji->", s.rho, a))


def _hermitian(a) -> np.ndarray:
    a = as_matrix(a)
    if not is_hermitian(a):
        raise StateError("observable is not hermitian")
    return 0.5 * (a + dagger(a))


def deviation(s: State, a) -> float:
    """Standard deviation sqrt(omega(a^2) - omega(a)^2)."""
    a = _hermitian(a)
    _check_dims(s, a)
    m = expectation(s, a).real
    var = expectation(s, a @ a).real - m * m
    if var < -s.tol * max(1.0, m * m):
        raise StateError(f"negative variance {var!r}")
    return math.sqrt(max(var, 0.0))


def spectral_projections(a: np.ndarray, rel_gap: float = 1e-10):
    """Distinct eigenvalues of hermitian ``a`` with their spectral projections.

    Eigenvalues closer than ``rel_gap`` times the spectral range are merged.
    """
    w, v = np.linalg.eigh(a)
    span = max(w[-1] - w[0], 1.0)
    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] > rel_gap * span:
            groups.append([i])
        else:
            groups[-1].append(i)
    values, projs = [], []
    for g in groups:
        vecs = v[:, g]
        values.append(float(np.mean(w[g])))
        projs.append(vecs @ dagger(vecs))
    return np.array(values), projs


@dataclass
class MeasurementRecord:
    outcomes: np.ndarray
    empirical_mean: float
    sample_count: int
    seed: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# seed={self.seed} mean={self.empirical_mean!r} count={self.sample_count}\n")
        buf.write("index,outcome\n")
        for i, x in enumerate(self.outcomes):
            buf.write(f"{i},{float(x)!r}\n")
        return buf.getvalue()


def simulate_measurements(s: State, a, n_samples: int, seed: int) -> MeasurementRecord:
    """Draw ``n_samples`` Born-rule outcomes of observable ``a`` in state ``s``."""
    if n_samples < 1:
        raise StateError("n_samples must be at least 1")
    a = _hermitian(a)
    _check_dims(s, a)
    values, projs = spectral_projections(a)
    probs = np.array([np.einsum("ij,ji->", s.rho, p).real for p in projs])
    if probs.min() < -s.tol:
        raise StateError("negative outcome probability; invalid state")
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(values), size=n_samples, p=probs)
    outcomes = values[idx]
    mean = math.fsum(outcomes.tolist()) / n_samples
    return MeasurementRecord(outcomes, mean, n_samples, seed)


def functional_matrix(states: Sequence[State], alg: StarAlgebra) -> np.ndarray:
    """F[i, j] = omega_i(B_j)."""
    rhos = np.array([s.rho for s in states])
    return np.einsum("sij,bji->sb", rhos, alg.basis)


def separates(states: Sequence[State], alg: StarAlgebra, tol: float | None = None) -> bool:
    """True iff A -> (omega_i(A))_i is injective on the span of ``alg``."""
    if len(states) == 0:
        raise StateError("empty state family")
    for s in states:
        if s.dim != alg.ambient_dim:
            raise StateError("state and algebra dimensions differ")
    tol = alg.tol if tol is None else tol
    sv = np.linalg.svd(functional_matrix(states, alg), compute_uv=False)
    rank = int(np.sum(sv > tol * max(sv[0], 1.0)))
    return rank == alg.dim


def tomographic_states(n: int) -> list[State]:
    """n^2 states whose expectations determine any n x n matrix."""
    eye = np.eye(n)
    out = [State.pure(eye[i]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            out.append(State.pure(eye[i] + eye[j]))
            out.append(State.pure(eye[i] + 1j * eye[j]))
    return out


@dataclass
class PositivityReport:
    min_expectation: float
    min_eigenvalue: float
    agree: bool
    insufficient_family: bool

    def to_dict(self) -> dict:
        return dict(vars(self))


def positivity_report(a, states: Sequence[State], tol: float = 1e-9) -> PositivityReport:
    """Compare inf over the given states of omega(a) with the least eigenvalue of a."""
    a = _hermitian(a)
    lo = float(np.linalg.eigvalsh(a)[0])
    mins = min((expectation(s, a).real for s in states), default=math.inf)
    agree = abs(mins - lo) <= tol
    return PositivityReport(mins, lo, agree, not agree and mins > lo)


def eigenstates(a) -> list[State]:
    a = _hermitian(a)
    _, v = np.linalg.eigh(a)
    return [State.pure(v[:, i]) for i in range(v.shape[1])]

