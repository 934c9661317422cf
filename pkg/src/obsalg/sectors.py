"""Superselection structure of a matrix *-algebra.

Sectors are found by splitting the space along eigenspaces of a random
hermitian element of the center (isotypic components) or of the commutant
(irreducible subspaces), recursing until nothing splits further.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matrix_algebra import StarAlgebra, center, commutant, dagger, generate_algebra, operator_norm

KINDS = ("isotypic", "irreducible")


class SectorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SectorDecomposition:
    basis_change: np.ndarray
    blocks: tuple[tuple[int, int], ...]
    kind: str

    def block_basis(self, i: int) -> np.ndarray:
        off, size = self.blocks[i]
        return self.basis_change[:, off : off + size]

    def off_block_residual(self, alg: StarAlgebra) -> float:
        """Largest Frobenius mass outside the diagonal blocks, over the basis."""
        u = self.basis_change
        mask = np.ones((u.shape[0], u.shape[0]), dtype=bool)
        for off, size in self.blocks:
            mask[off : off + size, off : off + size] = False
        conj = dagger(u) @ alg.basis @ u
        return float(max(np.linalg.norm(c[mask]) for c in conj))

    def to_dict(self) -> dict:
        from .serialize import matrix_to_json

        return {
            "basis_change": matrix_to_json(self.basis_change),
            "blocks": [list(b) for b in self.blocks],
            "kind": self.kind,
        }


def _random_hermitian(alg: StarAlgebra, rng: np.random.Generator) -> np.ndarray:
    herm = [0.5 * (b + dagger(b)) for b in alg.basis] + [0.5j * (dagger(b) - b) for b in alg.basis]
    c = rng.standard_normal(len(herm))
    return np.tensordot(c, np.array(herm), axes=1)


def _eigenspaces(h: np.ndarray, rel_gap: float = 1e-8) -> list[np.ndarray]:
    w, v = np.linalg.eigh(h)
    spread = w[-1] - w[0]
    if spread <= 1e-12 * max(1.0, abs(w[-1])):
        return [v]
    out, start = [], 0
    for i in range(1, len(w)):
        if w[i] - w[i - 1] >= rel_gap * spread:
            out.append(v[:, start:i])
            start = i
    out.append(v[:, start:])
    return out


def _split(alg: StarAlgebra, kind: str, rng, depth: int) -> list[np.ndarray]:
    """Orthonormal column blocks (in alg's own coordinates)."""
    n = alg.ambient_dim
    if n == 1 or depth > n:
        return [np.eye(n, dtype=complex)]
    aux = center(alg) if kind == "isotypic" else commutant(alg)
    if aux.dim <= 1:
        return [np.eye(n, dtype=complex)]
    spaces = _eigenspaces(_random_hermitian(aux, rng))
    if len(spaces) == 1:
        return spaces
    out = []
    for p in spaces:
        sub = generate_algebra(dagger(p) @ alg.basis @ p, alg.tol)
        out.extend(p @ q for q in _split(sub, kind, rng, depth + 1))
    return out


def decompose(alg: StarAlgebra, kind: str = "irreducible", seed: int = 0) -> SectorDecomposition:
    if kind not in KINDS:
        raise SectorError(f"kind must be one of {KINDS}")
    rng = np.random.default_rng(seed)
    spaces = _split(alg, kind, rng, 0)

    def weight_key(p):
        diag = np.round(np.sum(np.abs(p) ** 2, axis=1), 8)
        return tuple(-diag)

    spaces.sort(key=weight_key)
    blocks, off = [], 0
    for p in spaces:
        blocks.append((off, p.shape[1]))
        off += p.shape[1]
    return SectorDecomposition(np.hstack(spaces), tuple(blocks), kind)


def is_superselected(q, alg: StarAlgebra, tol: float | None = None) -> bool:
    q = np.asarray(q, dtype=complex)
    if q.shape != (alg.ambient_dim, alg.ambient_dim):
        raise SectorError("charge and algebra dimensions differ")
    tol = alg.tol if tol is None else tol
    return max(operator_norm(q @ b - b @ q) for b in alg.basis) < tol


def phase_variation(observables, psi1, psi2, c1: complex, c2: complex, phases: Sequence[float]):
    """Expectations of each observable in c1 psi1 + c2 e^{i phi} psi2, over phases.

    Returns (variation, mixture_deviation): the largest spread of an expectation
    over the phases, and the largest distance from the incoherent mixture value.
    """
    psi1 = np.asarray(psi1, dtype=complex)
    psi2 = np.asarray(psi2, dtype=complex)
    obs = np.asarray(observables, dtype=complex)
    ph = np.exp(1j * np.asarray(phases, dtype=float))
    vecs = c1 * psi1[None, :] + (c2 * ph)[:, None] * psi2[None, :]
    vals = np.einsum("pi,bij,pj->bp", np.conj(vecs), obs, vecs)
    spread = np.abs(vals[:, :, None] - vals[:, None, :]).max(axis=(1, 2))
    mix = abs(c1) ** 2 * np.einsum("i,bij,j->b", np.conj(psi1), obs, psi1) + abs(c2) ** 2 * np.einsum(
        "i,bij,j->b", np.conj(psi2), obs, psi2
    )
    dev = np.abs(vals - mix[:, None]).max(axis=1)
    return float(spread.max()), float(dev.max())


@dataclass
class PhaseReport:
    blocks: tuple[int, int]
    variation: float
    mixture_deviation: float
    phases: int

    def to_dict(self) -> dict:
        return {
            "blocks": list(self.blocks),
            "variation": self.variation,
            "mixture_deviation": self.mixture_deviation,
            "phases": self.phases,
        }


def _home_block(dec: SectorDecomposition, psi: np.ndarray, tol: float) -> int:
    for i in range(len(dec.blocks)):
        p = dec.block_basis(i)
        outside = np.linalg.norm(psi - p @ (dagger(p) @ psi))
        if outside <= tol:
            return i
    raise SectorError("vector is not supported in a single sector")


def phase_observability(
    alg: StarAlgebra,
    dec: SectorDecomposition,
    psi1,
    psi2,
    c1: complex,
    c2: complex,
    phases: Sequence[float] | None = None,
    tol: float = 1e-9,
) -> PhaseReport:
    """How much the relative phase of a cross-sector superposition shows up in expectations."""
    if abs(abs(c1) ** 2 + abs(c2) ** 2 - 1.0) > tol:
        raise SectorError("|c1|^2 + |c2|^2 must equal 1")
    psi1 = np.asarray(psi1, dtype=complex)
    psi2 = np.asarray(psi2, dtype=complex)
    for v in (psi1, psi2):
        if abs(np.linalg.norm(v) - 1.0) > tol:
            raise SectorError("vectors must be normalised")
    b1 = _home_block(dec, psi1, tol)
    b2 = _home_block(dec, psi2, tol)
    if b1 == b2:
        raise SectorError("vectors lie in the same sector")
    if phases is None:
        phases = np.linspace(0.0, 2 * np.pi, 64, endpoint=False)
    var, dev = phase_variation(alg.basis, psi1, psi2, c1, c2, phases)
    return PhaseReport((b1, b2), var, dev, len(phases))
