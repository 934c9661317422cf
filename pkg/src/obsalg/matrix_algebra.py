"""Finite-dimensional *-algebras of complex matrices.

An algebra is stored as a Hilbert-Schmidt orthonormal basis ``(k, n, n)``.
Everything downstream (states, GNS, sectors) works in coordinates with
respect to that basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9
RNG_NAME = "numpy.random.PCG64"


class AlgebraError(ValueError):
    """Raised for malformed matrices or algebra inputs."""


def as_matrix(a, square: bool = True) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise AlgebraError(f"expected a 2-d matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise AlgebraError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise AlgebraError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol * max(1.0, np.max(np.abs(a), initial=0.0)))


def operator_norm(a) -> float:
    """Largest singular value (the C*-norm of a matrix)."""
    m = as_matrix(a)
    return float(np.linalg.norm(m, 2))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def _null_space(m: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal columns spanning ker(m); relative singular-value cutoff."""
    _, s, vh = np.linalg.svd(m)
    scale = max(s[0] if s.size else 0.0, 1.0)
    rank = int(np.sum(s > tol * scale))
    return dagger(vh[rank:])


@dataclass(frozen=True, eq=False)
class StarAlgebra:
    """A unital *-closed matrix algebra given by an orthonormal basis."""

    basis: np.ndarray
    tol: float = DEFAULT_TOL
    ambient_dim: int = field(init=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 3 or b.shape[1] != b.shape[2] or b.shape[0] < 1:
            raise AlgebraError(f"basis must have shape (k, n, n), got {b.shape}")
        if b.shape[0] > b.shape[1] ** 2:
            raise AlgebraError("basis larger than the full matrix algebra")
        if not np.all(np.isfinite(b)):
            raise AlgebraError("basis has non-finite entries")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "ambient_dim", b.shape[1])
        checks = (
            ("orthonormal", self.orthonormality_residual()),
            ("unital", self.identity_residual()),
            ("closed under products and adjoints", self.closure_residual()),
        )
        for what, r in checks:
            if r > self.tol:
                raise AlgebraError(f"basis span is not {what} (residual {r:.2e} > tol {self.tol:.1e})")

    def __len__(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @cached_property
    def _flat(self) -> np.ndarray:
        # rows are vec(B_i), row-major
        return self.basis.reshape(self.dim, -1)

    def coefficients(self, x) -> np.ndarray:
        """Hilbert-Schmidt coordinates <B_i, x> = Tr(B_i^* x)."""
        x = np.asarray(x, dtype=complex)
        return np.conj(self._flat) @ x.reshape(-1)

    def element(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=complex), self.basis, axes=1)

    def residual(self, x) -> float:
        """Hilbert-Schmidt distance from x to the span."""
        x = np.asarray(x, dtype=complex)
        return float(np.linalg.norm(x - self.element(self.coefficients(x))))

    def contains(self, x, tol: float | None = None) -> bool:
        tol = self.tol if tol is None else tol
        x = np.asarray(x, dtype=complex)
        return self.residual(x) <= tol * max(1.0, float(np.linalg.norm(x)))

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """c[a, b, j] = <B_j, B_a B_b>, so B_a B_b = sum_j c[a, b, j] B_j."""
        prods = np.einsum("aij,bjk->abik", self.basis, self.basis)
        return np.einsum("jik,abik->abj", np.conj(self.basis), prods)

    @cached_property
    def adjoint_matrix(self) -> np.ndarray:
        """s[a, j] = <B_j, B_a^*>."""
        return np.einsum("jik,aik->aj", np.conj(self.basis), dagger(self.basis))

    def closure_residual(self) -> float:
        """Largest distance of a basis product or adjoint from the span."""
        prods = np.einsum("aij,bjk->abik", self.basis, self.basis).reshape(-1, self.ambient_dim**2)
        adj = dagger(self.basis).reshape(self.dim, -1)
        cand = np.vstack([prods, adj])
        proj = (cand @ self._flat.conj().T) @ self._flat
        return float(np.max(np.linalg.norm(cand - proj, axis=1)))

    def orthonormality_residual(self) -> float:
        gram = np.conj(self._flat) @ self._flat.T
        return float(np.max(np.abs(gram - np.eye(self.dim))))

    def identity_residual(self) -> float:
        return self.residual(np.eye(self.ambient_dim))

    def random_element(self, rng: np.random.Generator, hermitian: bool = False) -> np.ndarray:
        """Random unit-HS-norm element of the span."""
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        x = self.element(c)
        if hermitian:
            x = 0.5 * (x + dagger(x))
        nrm = np.linalg.norm(x)
        return x / nrm if nrm > 0 else x

    def same_span(self, other: "StarAlgebra", tol: float | None = None) -> bool:
        tol = self.tol if tol is None else tol
        if other.ambient_dim != self.ambient_dim:
            return False
        return span_residual(self, other) < tol and span_residual(other, self) < tol


def span_residual(sub: StarAlgebra, sup: StarAlgebra) -> float:
    """max_i dist(sub.B_i, span(sup)); zero iff span(sub) is inside span(sup)."""
    return max(sup.residual(b) for b in sub.basis)


def _check_generators(generators: Sequence) -> list[np.ndarray]:
    gens = [as_matrix(g) for g in generators]
    dims = {g.shape[0] for g in gens}
    if len(dims) > 1:
        raise AlgebraError(f"generators have mismatched dimensions {sorted(dims)}")
    return gens


class _GramSchmidt:
    def __init__(self, n: int, tol: float):
        self.n = n
        self.tol = tol
        self.vecs: list[np.ndarray] = []

    def add(self, x: np.ndarray) -> bool:
        v = x.reshape(-1).astype(complex)
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0:
            return False
        if self.vecs:
            q = np.array(self.vecs)
            for _ in range(2):  # re-orthogonalise once for stability
                v = v - q.T @ (np.conj(q) @ v)
        norm1 = np.linalg.norm(v)
        if norm1 < self.tol * norm0:
            return False
        self.vecs.append(v / norm1)
        return True

    def basis(self) -> np.ndarray:
        return np.array(self.vecs).reshape(len(self.vecs), self.n, self.n)


def generate_algebra(generators: Iterable, tol: float = DEFAULT_TOL, n: int | None = None) -> StarAlgebra:
    """Smallest unital *-algebra containing ``generators``.

    ``n`` is needed only when ``generators`` is empty.
    """
    if tol <= 0:
        raise AlgebraError("tol must be positive")
    gens = _check_generators(list(generators))
    if gens:
        n = gens[0].shape[0]
    elif n is None:
        raise AlgebraError("ambient dimension required for an empty generator set")
    gs = _GramSchmidt(n, tol)
    gs.add(np.eye(n))
    for g in gens:
        gs.add(g)
        gs.add(dagger(g))
    for _ in range(n * n):
        before = len(gs.vecs)
        cur = gs.basis()
        for a in cur:
            for b in cur:
                gs.add(a @ b)
                if len(gs.vecs) == n * n:
                    return StarAlgebra(gs.basis(), tol)
        if len(gs.vecs) == before:
            return StarAlgebra(gs.basis(), tol)
    raise AlgebraError("algebra closure did not converge")


def full_algebra(n: int, tol: float = DEFAULT_TOL) -> StarAlgebra:
    """M_n with the matrix-unit basis."""
    basis = np.zeros((n * n, n, n), dtype=complex)
    for idx in range(n * n):
        basis[idx].flat[idx] = 1.0
    return StarAlgebra(basis, tol)


def diagonal_algebra(n: int, tol: float = DEFAULT_TOL) -> StarAlgebra:
    basis = np.zeros((n, n, n), dtype=complex)
    for i in range(n):
        basis[i, i, i] = 1.0
    return StarAlgebra(basis, tol)


def block_algebra(sizes: Sequence[int], tol: float = DEFAULT_TOL) -> StarAlgebra:
    """Direct sum M_{n1} + M_{n2} + ... embedded block-diagonally."""
    n = int(sum(sizes))
    mats = []
    off = 0
    for m in sizes:
        for i in range(m):
            for j in range(m):
                e = np.zeros((n, n), dtype=complex)
                e[off + i, off + j] = 1.0
                mats.append(e)
        off += m
    return StarAlgebra(np.array(mats), tol)


def conjugate_algebra(alg: StarAlgebra, u: np.ndarray) -> StarAlgebra:
    """The algebra u A u^* (u unitary)."""
    u = as_matrix(u)
    return StarAlgebra(u @ alg.basis @ dagger(u), alg.tol)


def commutant(alg: StarAlgebra) -> StarAlgebra:
    """All X with [X, B] = 0 for every B in ``alg``.

    Null space of the stacked maps X -> X B_k - B_k X acting on row-major vec(X).
    """
    n = alg.ambient_dim
    eye = np.eye(n)
    blocks = [np.kron(eye, b.T) - np.kron(b, eye) for b in alg.basis]
    ns = _null_space(np.vstack(blocks), alg.tol)
    return StarAlgebra(ns.T.reshape(-1, n, n), alg.tol)


def intersect(a: StarAlgebra, b: StarAlgebra) -> StarAlgebra:
    """Intersection of two spans, as an orthonormal basis."""
    fa = a.basis.reshape(a.dim, -1).T  # columns vec(A_i)
    fb = b.basis.reshape(b.dim, -1).T
    outside_b = fa - fb @ (np.conj(fb).T @ fa)
    ns = _null_space(outside_b, a.tol)
    vecs = fa @ ns
    return StarAlgebra(vecs.T.reshape(-1, a.ambient_dim, a.ambient_dim), a.tol)


def center(alg: StarAlgebra) -> StarAlgebra:
    return intersect(alg, commutant(alg))


@dataclass
class LawReport:
    residuals: dict[str, float]
    samples: int
    seed: int
    generator: str = RNG_NAME

    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def passed(self, tol: float) -> bool:
        return all(v < tol for v in self.residuals.values())

    def to_dict(self) -> dict:
        return {
            "residuals": dict(self.residuals),
            "samples": self.samples,
            "seed": self.seed,
            "generator": self.generator,
        }


CSTAR_LAWS = (
    "triangle",
    "homogeneity",
    "submultiplicative",
    "square_norm_hermitian",
    "cstar_identity",
    "square_monotone",
)


def verify_cstar_laws(alg: StarAlgebra, samples: int, seed: int) -> LawReport:
    """Check the C*-norm laws on ``samples`` random elements of the span.

    Residuals are positive parts of inequality violations or absolute gaps of
    equalities, on elements of unit Hilbert-Schmidt norm.
    """
    if samples == 0:
        return LawReport({}, 0, seed)
    rng = np.random.default_rng(seed)
    res = dict.fromkeys(CSTAR_LAWS, 0.0)
    norm = operator_norm
    for _ in range(samples):
        b = alg.random_element(rng)
        c = alg.random_element(rng)
        lam = complex(rng.standard_normal(), rng.standard_normal())
        res["triangle"] = max(res["triangle"], norm(b + c) - norm(b) - norm(c))
        res["homogeneity"] = max(res["homogeneity"], abs(norm(lam * b) - abs(lam) * norm(b)))
        res["submultiplicative"] = max(res["submultiplicative"], norm(b @ c) - norm(b) * norm(c))
        res["cstar_identity"] = max(res["cstar_identity"], abs(norm(dagger(b) @ b) - norm(b) ** 2))
        h = alg.random_element(rng, hermitian=True)
        k = alg.random_element(rng, hermitian=True)
        res["square_norm_hermitian"] = max(res["square_norm_hermitian"], abs(norm(h @ h) - norm(h) ** 2))
        res["square_monotone"] = max(res["square_monotone"], norm(h @ h) - norm(h @ h + k @ k))
    return LawReport({k: max(v, 0.0) for k, v in res.items()}, samples, seed)
