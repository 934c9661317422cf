"""Discrete Weyl systems (clock and shift) and unitary intertwiners.

The Z_n clock/shift pair ``U V = eps V U`` with ``eps = exp(2 pi i / n)`` is the
finite stand-in for the Weyl exponentials of a canonical pair. Every
representation is automatically regular here, and uniqueness up to unitary
equivalence of the irreducible pair can be checked by constructing the
intertwiner explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import schur

from .matrix_algebra import dagger, operator_norm

NULL_TOL = 1e-9


class WeylError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DiscreteWeylSystem:
    modulus: int
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        n = self.modulus
        if n < 2:
            raise WeylError("modulus must be at least 2")
        for m in (self.u, self.v):
            if np.shape(m) != (n, n):
                raise WeylError(f"expected {n}x{n} matrices")

    @property
    def phase(self) -> complex:
        return complex(np.exp(2j * np.pi / self.modulus))

    def to_dict(self) -> dict:
        from .serialize import matrix_to_json

        return {"modulus": self.modulus, "u": matrix_to_json(self.u), "v": matrix_to_json(self.v)}


def clock(n: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * np.arange(n) / n))


def shift(n: int) -> np.ndarray:
    """V e_x = e_{x+1 mod n}."""
    return np.roll(np.eye(n, dtype=complex), 1, axis=0)


def fourier_matrix(n: int) -> np.ndarray:
    j = np.arange(n)
    return np.exp(2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def schrodinger_system(n: int) -> DiscreteWeylSystem:
    if n < 2:
        raise WeylError("modulus must be at least 2")
    return DiscreteWeylSystem(n, clock(n), shift(n))


def unitarity_residual(g: np.ndarray) -> float:
    return operator_norm(dagger(g) @ g - np.eye(g.shape[0]))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def conjugated_system(base: DiscreteWeylSystem, g, tol: float = 1e-10) -> DiscreteWeylSystem:
    g = np.asarray(g, dtype=complex)
    if g.shape != (base.modulus, base.modulus):
        raise WeylError("conjugating matrix has the wrong size")
    if unitarity_residual(g) > tol:
        raise WeylError("conjugating matrix is not unitary")
    gh = dagger(g)
    return DiscreteWeylSystem(base.modulus, g @ base.u @ gh, g @ base.v @ gh)


def verify_weyl_relations(sys: DiscreteWeylSystem) -> dict[str, float]:
    n = sys.modulus
    u, v, eps = sys.u, sys.v, sys.phase
    eye = np.eye(n)
    upow = [eye]
    vpow = [eye]
    for _ in range(n):
        upow.append(upow[-1] @ u)
        vpow.append(vpow[-1] @ v)
    res = {
        "u_order": operator_norm(upow[n] - eye),
        "v_order": operator_norm(vpow[n] - eye),
        "commutation": operator_norm(u @ v - eps * v @ u),
        "u_unitary": unitarity_residual(u),
        "v_unitary": unitarity_residual(v),
    }
    ug = vg = 0.0
    for a in range(n):
        for b in range(n):
            ug = max(ug, float(np.max(np.abs(upow[a] @ upow[b] - upow[(a + b) % n]))))
            vg = max(vg, float(np.max(np.abs(vpow[a] @ vpow[b] - vpow[(a + b) % n]))))
    res["u_group_law"] = ug
    res["v_group_law"] = vg
    return res


def stacked_map(xs: Sequence[np.ndarray], ys: Sequence[np.ndarray]) -> np.ndarray:
    """Matrix of W -> (W x_i - y_i W)_i acting on row-major vec(W)."""
    if len(xs) != len(ys) or not xs:
        raise WeylError("need matching non-empty generator lists")
    n = xs[0].shape[0]
    m = ys[0].shape[0]
    return np.vstack([np.kron(np.eye(m), x.T) - np.kron(y, np.eye(n)) for x, y in zip(xs, ys)])


def stacked_singular_values(r1: DiscreteWeylSystem, r2: DiscreteWeylSystem) -> np.ndarray:
    """Singular values of the dense stacked intertwining map, descending, divided by the largest."""
    s = np.linalg.svd(stacked_map([r1.u, r1.v], [r2.u, r2.v]), compute_uv=False)
    return s / s[0]


def intertwiner_space(xs: Sequence[np.ndarray], ys: Sequence[np.ndarray], tol: float = NULL_TOL) -> np.ndarray:
    """Basis (k, m, n) of {W : W x_i = y_i W for all i}.

    Dense null space of the stacked map; meant for small sizes.
    """
    a = stacked_map(xs, ys)
    m, n = ys[0].shape[0], xs[0].shape[0]
    _, s, vh = np.linalg.svd(a)
    rank = int(np.sum(s > tol * max(s[0], 1.0)))
    return np.conj(vh[rank:]).reshape(-1, m, n)


@dataclass
class IntertwinerResult:
    w: np.ndarray
    null_dim: int
    singular_values: np.ndarray
    residuals: dict[str, float]


def _unitary_eigh(u: np.ndarray):
    t, z = schur(u, output="complex")
    return np.diag(t), z


def fix_phase(w: np.ndarray, rel: float = 1e-8) -> np.ndarray:
    """Rotate so the first non-negligible entry of the first column is real positive."""
    col = w[:, 0]
    big = np.flatnonzero(np.abs(col) > rel * max(np.max(np.abs(w)), 1e-300))
    if big.size == 0:
        return w
    z = col[big[0]]
    out = w * (abs(z) / z)
    # pin the pivot to an exact real so a second pass is the identity
    out[big[0], 0] = abs(z)
    return out


def solve_intertwiner(r1: DiscreteWeylSystem, r2: DiscreteWeylSystem, tol: float = NULL_TOL) -> IntertwinerResult:
    """Unitary W with W U1 = U2 W and W V1 = V2 W.

    Both U's are unitary, so in their Schur (eigen) bases the U-equation only
    couples equal eigenvalues; the V-equation is then solved as a null space
    on that reduced set of unknowns.
    """
    if r1.modulus != r2.modulus:
        raise WeylError(f"moduli differ: {r1.modulus} vs {r2.modulus}")
    n = r1.modulus
    lam1, z1 = _unitary_eigh(r1.u)
    lam2, z2 = _unitary_eigh(r2.u)
    pairs = [(i, j) for i in range(n) for j in range(n) if abs(lam2[i] - lam1[j]) < 1e-6]
    if not pairs:
        raise WeylError("U spectra do not overlap; no intertwiner")
    v1 = dagger(z1) @ r1.v @ z1
    v2 = dagger(z2) @ r2.v @ z2
    a = np.zeros((n * n, len(pairs)), dtype=complex)
    for col, (i, j) in enumerate(pairs):
        m = np.zeros((n, n), dtype=complex)
        m[i, :] += v1[j, :]
        m[:, j] -= v2[:, i]
        a[:, col] = m.reshape(-1)
    _, s, vh = np.linalg.svd(a, full_matrices=False)
    null = int(np.sum(s <= tol * s[0]))
    if null == 0:
        raise WeylError("no intertwiner: representations are inequivalent")
    if null > 1:
        raise WeylError(f"intertwiner space has dimension {null}; representations are reducible")
    x = np.conj(vh[-1])
    wp = np.zeros((n, n), dtype=complex)
    for val, (i, j) in zip(x, pairs):
        wp[i, j] = val
    w = z2 @ wp @ dagger(z1)
    w *= np.sqrt(n) / np.linalg.norm(w)
    w = fix_phase(w)
    res = {
        "u_intertwine": operator_norm(w @ r1.u - r2.u @ w),
        "v_intertwine": operator_norm(w @ r1.v - r2.v @ w),
        "unitarity": unitarity_residual(w),
    }
    return IntertwinerResult(w, null, s / s[0], res)


def find_intertwiner(r1: DiscreteWeylSystem, r2: DiscreteWeylSystem, tol: float = NULL_TOL) -> np.ndarray:
    out = solve_intertwiner(r1, r2, tol)
    worst = max(out.residuals.values())
    if worst > max(tol, 1e-8) * r1.modulus:
        raise WeylError(f"intertwiner residual {worst:.3e} above tolerance")
    return out.w


def phase_distance(w: np.ndarray, g: np.ndarray) -> float:
    """min over theta of ||w - e^{i theta} g|| (operator norm)."""
    z = np.vdot(g, w)
    theta = np.angle(z) if abs(z) > 0 else 0.0
    return operator_norm(w - np.exp(1j * theta) * g)
