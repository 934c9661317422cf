"""Shared fixtures-by-function for the test suite: Pauli matrices, random
inputs, and small independent oracles."""
from __future__ import annotations

import numpy as np

from obsalg.matrix_algebra import block_algebra, conjugate_algebra, diagonal_algebra
from obsalg.states import State, tomographic_states
from obsalg.weyl import haar_unitary

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


def random_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def bloch_grid(points: int = 10_000) -> np.ndarray:
    """Unit vectors cos(t/2)|0> + e^{i f} sin(t/2)|1> on a product grid."""
    m = int(round(np.sqrt(points)))
    t, f = np.meshgrid(np.linspace(0, np.pi, m), np.linspace(0, 2 * np.pi, m, endpoint=False), indexing="ij")
    return np.stack([np.cos(t / 2).ravel(), (np.exp(1j * f) * np.sin(t / 2)).ravel()], axis=1)


def faithfulness_case(rng: np.random.Generator):
    """One (algebra, family) pair from the documented battery.

    Either an abelian algebra with a family of characters (pure states on single
    points), or a block algebra with, per block, tomographic states or nothing.
    Each is conjugated by a random unitary. On this battery, linear separation
    and faithfulness of the direct sum coincide.
    """
    if rng.random() < 0.5:
        n = int(rng.integers(2, 6))
        alg = diagonal_algebra(n)
        cover = rng.random(n) < 0.75
        if not cover.any():
            cover[int(rng.integers(n))] = True
        fam = [State.pure(np.eye(n)[i]) for i in np.flatnonzero(cover)]
    else:
        sizes = [int(x) for x in rng.integers(1, 4, size=int(rng.integers(1, 4)))]
        n = sum(sizes)
        alg = block_algebra(sizes)
        cover = rng.random(len(sizes)) < 0.7
        if not cover.any():
            cover[int(rng.integers(len(sizes)))] = True
        fam = []
        off = 0
        for m, use in zip(sizes, cover):
            if use:
                for s in tomographic_states(m):
                    rho = np.zeros((n, n), dtype=complex)
                    rho[off : off + m, off : off + m] = s.rho
                    fam.append(State(rho))
            off += m
    u = haar_unitary(n, rng)
    alg = conjugate_algebra(alg, u)
    fam = [State(u @ s.rho @ u.conj().T) for s in fam]
    return alg, fam, bool(cover.all())


# ---- literal word rewriting for the normal-ordered algebra

def rewrite_word_product(w1, w2, s: int) -> dict:
    """Normal form of a product of letter words by literal rewriting.

    Words are tuples of ('q', i) / ('p', i) / ('Z', 0). The rules applied are
    p_j q_i -> q_i p_j - Z delta_ij, commuting q's and p's among themselves and
    moving Z to the front. Returns {(k, alpha, beta): integer coefficient}.
    """
    todo = {tuple(w1) + tuple(w2): 1}
    done: dict = {}
    order = {"Z": 0, "q": 1, "p": 2}
    while todo:
        word, c = todo.popitem()
        for pos in range(len(word) - 1):
            x, y = word[pos], word[pos + 1]
            if (order[x[0]], x[1]) > (order[y[0]], y[1]):
                swapped = word[:pos] + (y, x) + word[pos + 2 :]
                todo[swapped] = todo.get(swapped, 0) + c
                if x[0] == "p" and y[0] == "q" and x[1] == y[1]:
                    contracted = (("Z", 0),) + word[:pos] + word[pos + 2 :]
                    todo[contracted] = todo.get(contracted, 0) - c
                break
        else:
            k = sum(1 for x in word if x[0] == "Z")
            a = tuple(sum(1 for x in word if x == ("q", i)) for i in range(s))
            b = tuple(sum(1 for x in word if x == ("p", i)) for i in range(s))
            key = (k, a, b)
            done[key] = done.get(key, 0) + c
        todo = {w: v for w, v in todo.items() if v}
    return {m: v for m, v in done.items() if v}


def monomial_word(m) -> tuple:
    k, a, b = m
    word = [("Z", 0)] * k
    for i, e in enumerate(a):
        word += [("q", i)] * e
    for i, e in enumerate(b):
        word += [("p", i)] * e
    return tuple(word)
