"""JSON codecs for matrices, algebras and states."""
from __future__ import annotations

import numpy as np

from .matrix_algebra import DEFAULT_TOL, StarAlgebra
from .states import State


def matrix_to_json(m) -> dict:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def matrix_from_json(d) -> np.ndarray:
    """Accepts the {"rows","cols","entries"} form or a plain nested list of reals."""
    if isinstance(d, list):
        return np.array(d, dtype=complex)
    rows, cols = int(d["rows"]), int(d["cols"])
    ent = d["entries"]
    if len(ent) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(ent)}")
    flat = np.array([complex(re, im) for re, im in ent])
    return flat.reshape(rows, cols)


def vector_to_json(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).reshape(-1)]


def vector_from_json(v) -> np.ndarray:
    if v and isinstance(v[0], list):
        return np.array([complex(re, im) for re, im in v])
    return np.array(v, dtype=complex)


def algebra_to_json(alg: StarAlgebra) -> dict:
    return {
        "ambient_dim": alg.ambient_dim,
        "basis": [matrix_to_json(b) for b in alg.basis],
        "tol": alg.tol,
    }


def algebra_from_json(d) -> StarAlgebra:
    basis = np.array([matrix_from_json(b) for b in d["basis"]])
    alg = StarAlgebra(basis, float(d.get("tol", DEFAULT_TOL)))
    if alg.ambient_dim != int(d["ambient_dim"]):
        raise ValueError("ambient_dim does not match basis")
    return alg


def state_to_json(s: State) -> dict:
    return {"rho": matrix_to_json(s.rho)}


def state_from_json(d) -> State:
    if "psi" in d:
        return State.pure(vector_from_json(d["psi"]))
    return State(matrix_from_json(d["rho"]))


def triple_to_json(t) -> dict:
    return {
        "space_dim": t.space_dim,
        "rep": {str(a): matrix_to_json(m) for a, m in enumerate(t.rep)},
        "cyclic_vector": vector_to_json(t.cyclic_vector),
        "embedding": matrix_to_json(t.embedding),
        "tol": t.tol,
    }


def triple_from_json(d):
    from .gns import GNS_TOL, GnsTriple

    rep = d["rep"]
    keys = sorted(rep, key=int)
    if [int(k) for k in keys] != list(range(len(keys))):
        raise ValueError("rep keys must be the basis indices 0..k-1")
    mats = np.array([matrix_from_json(rep[k]) for k in keys])
    d_space = int(d["space_dim"])
    if mats.shape[1:] != (d_space, d_space):
        raise ValueError("rep matrices do not match space_dim")
    return GnsTriple(
        space_dim=d_space,
        rep=mats,
        cyclic_vector=vector_from_json(d["cyclic_vector"]),
        embedding=matrix_from_json(d["embedding"]),
        tol=float(d.get("tol", GNS_TOL)),
    )


def weyl_from_json(d):
    from .weyl import DiscreteWeylSystem

    return DiscreteWeylSystem(int(d["modulus"]), matrix_from_json(d["u"]), matrix_from_json(d["v"]))
