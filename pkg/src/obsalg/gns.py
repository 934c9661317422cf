"""GNS representations of (algebra, state) pairs and their direct sums.

The GNS space is built in coordinates: the Gram matrix ``G_ij = omega(B_i^* B_j)``
of the algebra basis defines a semi-inner product whose null directions form the
left ideal of null vectors. Dividing them out leaves the representation space;
left multiplication, resolved through the structure constants of the basis, gives
the representation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

from .matrix_algebra import StarAlgebra, dagger, operator_norm
from .states import State, expectation, separates

GNS_TOL = 1e-10


class GnsError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GnsTriple:
    """Concrete GNS data.

    ``rep[a]`` represents basis element ``B_a``; ``embedding`` has one row per
    orthonormal GNS basis vector, giving its representative in algebra
    coordinates.
    """

    space_dim: int
    rep: np.ndarray
    cyclic_vector: np.ndarray
    embedding: np.ndarray
    tol: float = GNS_TOL
    state_values: np.ndarray | None = None

    def represent(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=complex), self.rep, axes=1)

    def represent_matrix(self, alg: StarAlgebra, x) -> np.ndarray:
        return self.represent(alg.coefficients(x))

    def coordinates(self) -> np.ndarray:
        """Map from algebra coefficients to GNS coordinates, [X] = Q c."""
        return np.linalg.pinv(self.embedding.T)


def gram_matrix(alg: StarAlgebra, s: State) -> np.ndarray:
    g = np.einsum("ml,ikl,jkm->ij", s.rho, np.conj(alg.basis), alg.basis)
    return 0.5 * (g + dagger(g))


def _left_multiplication(alg: StarAlgebra) -> np.ndarray:
    # L[a, j, i] = <B_j, B_a B_i>
    return np.transpose(alg.structure_constants, (0, 2, 1))


def gns_construct(alg: StarAlgebra, s: State, tol: float = GNS_TOL) -> GnsTriple:
    if s.dim != alg.ambient_dim:
        raise GnsError(f"state dimension {s.dim} differs from algebra dimension {alg.ambient_dim}")
    g = gram_matrix(alg, s)
    lam, vec = np.linalg.eigh(g)
    lam, vec = lam[::-1], vec[:, ::-1]
    lmax = lam[0]
    if lmax <= 0:
        raise GnsError("Gram matrix vanishes; state is invalid")
    if lam[-1] < -tol * max(lmax, 1.0):
        raise GnsError(f"Gram matrix has negative eigenvalue {lam[-1]!r}; state is invalid")
    keep = lam > tol * lmax
    lam, vec = lam[keep], vec[:, keep]
    embedding = (vec / np.sqrt(lam)).T
    q = np.sqrt(lam)[:, None] * dagger(vec)
    rep = np.einsum("rj,aji,si->ars", q, _left_multiplication(alg), embedding)
    psi = q @ alg.coefficients(np.eye(alg.ambient_dim))
    values = np.array([expectation(s, b) for b in alg.basis])
    return GnsTriple(int(lam.size), rep, psi, embedding, tol, values)


@dataclass
class RepresentationReport:
    residuals: dict[str, float]
    cyclic_rank: int
    space_dim: int

    def passed(self, tol: float) -> bool:
        return all(v < tol for v in self.residuals.values()) and self.cyclic_rank == self.space_dim

    def to_dict(self) -> dict:
        return {"residuals": dict(self.residuals), "cyclic_rank": self.cyclic_rank, "space_dim": self.space_dim}


def verify_representation(
    t: GnsTriple, alg: StarAlgebra, state: State | None = None, samples: int = 8, seed: int = 0
) -> RepresentationReport:
    """Residuals of the representation properties of ``t`` over ``alg``.

    linearity compares the stored matrices with the left-multiplication action
    computed directly from random algebra elements; the remaining checks use
    the structure constants.
    """
    rep = t.rep
    k = alg.dim
    if rep.shape[0] != k:
        raise GnsError("triple and algebra have different basis sizes")
    c = alg.structure_constants
    res: dict[str, float] = {}

    rng = np.random.default_rng(seed)
    q = t.coordinates()
    lin = 0.0
    for _ in range(samples):
        x = alg.random_element(rng)
        y = alg.random_element(rng)
        alpha, beta = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        z = alpha * x + beta * y
        lz = np.einsum("jmn,mo,ion->ji", np.conj(alg.basis), z, alg.basis)
        direct = q @ lz @ t.embedding.T
        lin = max(lin, float(np.max(np.abs(direct - t.represent_matrix(alg, z)))))
    res["linearity"] = lin

    prod = np.einsum("ars,bst->abrt", rep, rep)
    via_constants = np.einsum("abj,jrt->abrt", c, rep)
    res["multiplicativity"] = float(np.max(np.abs(prod - via_constants)))

    adj = np.einsum("aj,jrs->ars", alg.adjoint_matrix, rep)
    res["star"] = float(np.max(np.abs(adj - dagger(rep))))

    psi = t.cyclic_vector
    res["cyclic_norm"] = abs(float(np.linalg.norm(psi)) - 1.0)
    orbit = np.einsum("ars,s->ra", rep, psi)
    sv = np.linalg.svd(orbit, compute_uv=False)
    rank = int(np.sum(sv > 1e-8 * max(sv[0], 1.0))) if sv.size else 0

    values = t.state_values
    if state is not None:
        values = np.array([expectation(state, b) for b in alg.basis])
    if values is not None:
        recon = np.einsum("r,ars,s->a", np.conj(psi), rep, psi)
        res["expectation"] = float(np.max(np.abs(recon - values)))
    return RepresentationReport(res, rank, t.space_dim)


@dataclass(frozen=True, eq=False)
class DirectSum:
    """Block-diagonal sum of GNS representations of a state family."""

    space_dim: int
    rep: np.ndarray
    summand_dims: tuple[int, ...]
    cyclic_vectors: tuple[np.ndarray, ...]
    separating: bool
    faithful: bool
    norm_deficits: np.ndarray
    summands: tuple[GnsTriple, ...] = field(repr=False, default=())

    def represent(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=complex), self.rep, axes=1)


def kernel_dimension(rep: np.ndarray, rel_tol: float = 1e-8) -> int:
    """Dimension of {c : sum_a c_a rep[a] = 0}."""
    k = rep.shape[0]
    m = rep.reshape(k, -1).T
    sv = np.linalg.svd(m, compute_uv=False)
    scale = max(sv[0], 1.0) if sv.size else 1.0
    return k - int(np.sum(sv > rel_tol * scale))


def gns_direct_sum(alg: StarAlgebra, states: Sequence[State], tol: float = GNS_TOL) -> DirectSum:
    if len(states) == 0:
        raise GnsError("empty state family")
    triples = tuple(gns_construct(alg, s, tol) for s in states)
    dims = tuple(t.space_dim for t in triples)
    total = sum(dims)
    rep = np.array([block_diag(*(t.rep[a] for t in triples)) for a in range(alg.dim)])
    vecs = []
    off = 0
    for t in triples:
        v = np.zeros(total, dtype=complex)
        v[off : off + t.space_dim] = t.cyclic_vector
        vecs.append(v)
        off += t.space_dim
    deficits = np.array([operator_norm(b) - operator_norm(r) for b, r in zip(alg.basis, rep)])
    return DirectSum(
        space_dim=total,
        rep=rep,
        summand_dims=dims,
        cyclic_vectors=tuple(vecs),
        separating=separates(states, alg),
        faithful=kernel_dimension(rep) == 0,
        norm_deficits=deficits,
        summands=triples,
    )


def cyclic_intertwiner(t1: GnsTriple, t2: GnsTriple, index_map: Sequence[int], tol: float = 1e-9) -> np.ndarray:
    """Unitary W with W rep1[a] = rep2[index_map[a]] W and W psi1 = psi2.

    The intertwiner space is found with the generic solver from ``weyl``; the
    cyclic vectors then single out one element of it.
    """
    from .weyl import intertwiner_space

    if t1.space_dim != t2.space_dim:
        raise GnsError("GNS spaces have different dimensions")
    xs = list(t1.rep)
    ys = [t2.rep[j] for j in index_map]
    space = intertwiner_space(xs, ys, tol)
    if space.shape[0] == 0:
        raise GnsError("representations are not equivalent")
    cols = np.array([w @ t1.cyclic_vector for w in space]).T
    coef, *_ = np.linalg.lstsq(cols, t2.cyclic_vector, rcond=None)
    return np.tensordot(coef, space, axes=1)
