"""Seeded batteries of exact identity checks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import (
    LambdaElement,
    adjoint,
    commutator,
    dirac_identity_check,
    jacobi_check,
    lie_bracket,
    multiply,
    random_element,
    theorem_check,
)
from .scalars import GaussianRational
from .specialize import classical_poisson, specialize_classical, specialize_quantum

QUANTUM_TEST_POLY = (1, 1, 1)


@dataclass
class BatteryRow:
    name: str
    passed: int
    total: int

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def line(self) -> str:
        return f"{self.name}: {self.passed}/{self.total} {'pass' if self.ok else 'FAIL'}"


def _coords(rng, max_coords: int) -> int:
    return int(rng.integers(1, max_coords + 1))


def run_identity_battery(
    degree: int = 4, pairs: int = 200, seed: int = 0, max_coords: int = 3, hbar=Fraction(1)
) -> list[BatteryRow]:
    """Every identity check on ``pairs`` seeded random samples.

    Random pairs for the commutator identity use ``degree``; quadruples,
    triples and the specializations use degree at most 3.
    """
    rng = np.random.default_rng(seed)
    d3 = min(degree, 3)
    rows = []

    def count(name, trial):
        rows.append(BatteryRow(name, sum(bool(trial()) for _ in range(pairs)), pairs))

    def pair(deg, s=None):
        s = s or _coords(rng, max_coords)
        return random_element(rng, s, deg), random_element(rng, s, deg)

    count("commutator_equals_z_bracket", lambda: theorem_check(*pair(degree)))

    def dirac():
        s = _coords(rng, max_coords)
        return dirac_identity_check(*(random_element(rng, s, d3) for _ in range(4)))

    count("dirac_identity", dirac)

    def jacobi():
        s = _coords(rng, max_coords)
        return jacobi_check(*(random_element(rng, s, d3) for _ in range(3)))

    count("jacobi_identity", jacobi)

    def assoc():
        s = _coords(rng, max_coords)
        a, b, c = (random_element(rng, s, d3) for _ in range(3))
        return multiply(multiply(a, b), c) == multiply(a, multiply(b, c))

    count("associativity", assoc)

    def central():
        s = _coords(rng, max_coords)
        a = random_element(rng, s, degree)
        z = LambdaElement.z(s)
        return commutator(z, a).is_zero() and lie_bracket(z, a).is_zero()

    count("z_central", central)

    def leibniz():
        s = _coords(rng, max_coords)
        a, b, c = (random_element(rng, s, d3) for _ in range(3))
        right = lie_bracket(a, multiply(b, c)) == multiply(lie_bracket(a, b), c) + multiply(b, lie_bracket(a, c))
        left = lie_bracket(multiply(a, b), c) == multiply(a, lie_bracket(b, c)) + multiply(lie_bracket(a, c), b)
        return right and left

    count("leibniz", leibniz)

    def antisym():
        a, b = pair(degree)
        return lie_bracket(a, b) == -lie_bracket(b, a)

    count("antisymmetry", antisym)

    def involution():
        a, b = pair(d3)
        return lie_bracket(adjoint(a), adjoint(b)) == adjoint(lie_bracket(a, b))

    count("involution", involution)

    def classical():
        s = _coords(rng, max_coords)
        a, b = random_element(rng, s, d3), random_element(rng, s, d3)
        lhs = specialize_classical(lie_bracket(a, b))
        rhs = classical_poisson(specialize_classical(a), specialize_classical(b), s)
        return lhs == rhs and not specialize_classical(commutator(a, b))

    count("classical_limit", classical)

    def quantum():
        a, b = pair(d3, s=1)
        lhs = specialize_quantum(commutator(a, b), hbar, QUANTUM_TEST_POLY)
        rhs = specialize_quantum(lie_bracket(a, b).scale(GaussianRational(0, Fraction(hbar))), hbar, QUANTUM_TEST_POLY)
        return lhs == rhs

    count("schroedinger_action", quantum)
    return rows

