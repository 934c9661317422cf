"""Normal-ordered polynomials in q_i, p_i over a central element Z.

A monomial ``(k, alpha, beta)`` stands for Z^k q^alpha p^beta with every q to
the left of every p. Products are reordered with p_i q_i = q_i p_i - Z; the Lie
bracket is the biderivation fixed by {q_i, p_j} = delta_ij, {Z, .} = 0.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import comb, factorial
from typing import Iterable, Mapping

import numpy as np

from .scalars import ONE, GaussianRational

Monomial = tuple  # (k, alpha: tuple[int, ...], beta: tuple[int, ...])


class LambdaError(ValueError):
    pass


def _clean(terms: Mapping) -> dict:
    return {m: c for m, c in terms.items() if not c.is_zero()}


class LambdaElement:
    """Immutable element of the normal-form algebra, with exact coefficients."""

    __slots__ = ("terms", "num_coords", "_hash")

    def __init__(self, terms: Mapping[Monomial, GaussianRational], num_coords: int):
        if num_coords < 1:
            raise LambdaError("need at least one coordinate pair")
        clean = {}
        for (k, a, b), c in terms.items():
            a, b = tuple(a), tuple(b)
            if len(a) != num_coords or len(b) != num_coords:
                raise LambdaError("monomial has the wrong number of coordinates")
            if k < 0 or min(a + b) < 0:
                raise LambdaError("negative exponent")
            c = GaussianRational.coerce(c)
            if not c.is_zero():
                clean[(k, a, b)] = c
        self.terms = clean
        self.num_coords = num_coords
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, s: int) -> "LambdaElement":
        return cls({}, s)

    @classmethod
    def scalar(cls, c, s: int) -> "LambdaElement":
        return cls({(0, (0,) * s, (0,) * s): GaussianRational.coerce(c)}, s)

    @classmethod
    def monomial(cls, k: int, alpha, beta, c=1) -> "LambdaElement":
        return cls({(k, tuple(alpha), tuple(beta)): GaussianRational.coerce(c)}, len(alpha))

    @classmethod
    def z(cls, s: int) -> "LambdaElement":
        return cls.monomial(1, (0,) * s, (0,) * s)

    @classmethod
    def q(cls, i: int, s: int) -> "LambdaElement":
        return cls.monomial(0, _unit(i, s), (0,) * s)

    @classmethod
    def p(cls, i: int, s: int) -> "LambdaElement":
        return cls.monomial(0, (0,) * s, _unit(i, s))

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree with Z counted twice; -1 for the zero element."""
        return max((2 * k + sum(a) + sum(b) for k, a, b in self.terms), default=-1)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: t[0], reverse=True)

    def constant(self) -> GaussianRational | None:
        """The scalar value if the element is a multiple of 1, else None."""
        if not self.terms:
            return GaussianRational(0)
        if len(self.terms) == 1:
            (k, a, b), c = next(iter(self.terms.items()))
            if k == 0 and not any(a) and not any(b):
                return c
        return None

    # arithmetic
    def _check(self, other: "LambdaElement") -> None:
        if not isinstance(other, LambdaElement):
            raise TypeError("expected a LambdaElement")
        if other.num_coords != self.num_coords:
            raise LambdaError(f"coordinate counts differ: {self.num_coords} vs {other.num_coords}")

    def __add__(self, other):
        if not isinstance(other, LambdaElement):
            other = LambdaElement.scalar(other, self.num_coords)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return LambdaElement(out, self.num_coords)

    __radd__ = __add__

    def __neg__(self):
        return LambdaElement({m: -c for m, c in self.terms.items()}, self.num_coords)

    def __sub__(self, other):
        if not isinstance(other, LambdaElement):
            other = LambdaElement.scalar(other, self.num_coords)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LambdaElement":
        c = GaussianRational.coerce(c)
        return LambdaElement({m: c * v for m, v in self.terms.items()}, self.num_coords)

    def __mul__(self, other):
        if isinstance(other, LambdaElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise LambdaError("negative powers are not defined")
        out = LambdaElement.scalar(1, self.num_coords)
        for _ in range(k):
            out = multiply(out, self)
        return out

    def __eq__(self, other):
        if not isinstance(other, LambdaElement):
            return NotImplemented
        return self.num_coords == other.num_coords and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_coords, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        from .text import format_element

        return f"LambdaElement({format_element(self)!r}, s={self.num_coords})"

    def __str__(self):
        from .text import format_element

        return format_element(self)


def _unit(i: int, s: int) -> tuple:
    if not 1 <= i <= s:
        raise LambdaError(f"coordinate index {i} out of range 1..{s}")
    return tuple(1 if j == i - 1 else 0 for j in range(s))


@lru_cache(maxsize=None)
def _reorder_coefficients(a: int, b: int) -> tuple:
    """p^b q^a = sum_j c_j (-Z)^j q^(a-j) p^(b-j) for one coordinate; returns the c_j."""
    return tuple(factorial(j) * comb(a, j) * comb(b, j) for j in range(min(a, b) + 1))


@lru_cache(maxsize=200_000)
def _monomial_product(m1: Monomial, m2: Monomial) -> tuple:
    """Normal form of m1 * m2 as a tuple of (monomial, integer coefficient)."""
    k1, a1, b1 = m1
    k2, a2, b2 = m2
    per_coord = []
    for bi, ai in zip(b1, a2):
        per_coord.append([(j, c * (-1) ** j) for j, c in enumerate(_reorder_coefficients(ai, bi))])
    out: dict = {}
    for choice in product(*per_coord):
        coef = 1
        kz = k1 + k2
        alpha, beta = [], []
        for idx, (j, c) in enumerate(choice):
            coef *= c
            kz += j
            alpha.append(a1[idx] + a2[idx] - j)
            beta.append(b1[idx] - j + b2[idx])
        key = (kz, tuple(alpha), tuple(beta))
        out[key] = out.get(key, 0) + coef
    return tuple((m, c) for m, c in out.items() if c != 0)


def multiply(x: LambdaElement, y: LambdaElement) -> LambdaElement:
    x._check(y)
    out: dict = {}
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            c12 = c1 * c2
            for m, n in _monomial_product(m1, m2):
                term = c12 * n
                out[m] = out[m] + term if m in out else term
    return LambdaElement(_clean(out), x.num_coords)


def commutator(x: LambdaElement, y: LambdaElement) -> LambdaElement:
    return multiply(x, y) - multiply(y, x)


def _letters(m: Monomial) -> list:
    """The q/p word of a monomial in normal order, as ('q', i) / ('p', i) pairs."""
    _, a, b = m
    word = []
    for i, e in enumerate(a):
        word.extend([("q", i)] * e)
    for i, e in enumerate(b):
        word.extend([("p", i)] * e)
    return word


def _generator_bracket(x, y) -> int:
    if x[1] != y[1] or x[0] == y[0]:
        return 0
    return 1 if x[0] == "q" else -1


def _word_element(word: Iterable, k: int, s: int) -> LambdaElement:
    out = LambdaElement.monomial(k, (0,) * s, (0,) * s)
    for kind, i in word:
        g = LambdaElement.q(i + 1, s) if kind == "q" else LambdaElement.p(i + 1, s)
        out = multiply(out, g)
    return out


@lru_cache(maxsize=200_000)
def _monomial_bracket(m1: Monomial, m2: Monomial, s: int) -> LambdaElement:
    # {X1..Xm, Y1..Yl} = sum_{u,v} {X_u, Y_v} X1..X_{u-1} Y1..Y_{v-1} Y_{v+1}..Yl X_{u+1}..Xm,
    # the generator brackets being central scalars.
    xw, yw = _letters(m1), _letters(m2)
    k = m1[0] + m2[0]
    out = LambdaElement.zero(s)
    for u, xu in enumerate(xw):
        for v, yv in enumerate(yw):
            g = _generator_bracket(xu, yv)
            if g:
                word = xw[:u] + yw[:v] + yw[v + 1 :] + xw[u + 1 :]
                out = out + _word_element(word, k, s).scale(g)
    return out


def lie_bracket(x: LambdaElement, y: LambdaElement) -> LambdaElement:
    x._check(y)
    s = x.num_coords
    out: dict = {}
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            c12 = c1 * c2
            for m, c in _monomial_bracket(m1, m2, s).terms.items():
                term = c12 * c
                out[m] = out[m] + term if m in out else term
    return LambdaElement(_clean(out), s)


def adjoint(x: LambdaElement) -> LambdaElement:
    """Involution: q, p self-adjoint, Z* = -Z, products reversed, scalars conjugated."""
    s = x.num_coords
    out = LambdaElement.zero(s)
    for (k, a, b), c in x.terms.items():
        rev = multiply(LambdaElement.monomial(0, (0,) * s, b), LambdaElement.monomial(0, a, (0,) * s))
        zk = LambdaElement.monomial(k, (0,) * s, (0,) * s, (-1) ** k)
        out = out + multiply(rev, zk).scale(c.conjugate())
    return out


def theorem_check(a: LambdaElement, b: LambdaElement) -> bool:
    """[a, b] == Z {a, b}, exactly."""
    return commutator(a, b) == multiply(LambdaElement.z(a.num_coords), lie_bracket(a, b))


def dirac_identity_check(a, b, c, d) -> bool:
    """[a, b] {c, d} == {a, b} [c, d], exactly."""
    return multiply(commutator(a, b), lie_bracket(c, d)) == multiply(lie_bracket(a, b), commutator(c, d))


def jacobi_check(a, b, c) -> bool:
    total = lie_bracket(a, lie_bracket(b, c)) + lie_bracket(c, lie_bracket(a, b)) + lie_bracket(b, lie_bracket(c, a))
    return total.is_zero()


def random_element(
    rng: np.random.Generator, s: int, degree: int, terms: int = 3, complex_coeffs: bool = True
) -> LambdaElement:
    """Random element with at most ``terms`` monomials of degree <= ``degree``.

    Coefficients are small Gaussian rationals with denominators up to 3.
    """
    out: dict = {}
    for _ in range(terms):
        budget = int(rng.integers(0, degree + 1))
        k = int(rng.integers(0, budget // 2 + 1))
        rest = budget - 2 * k
        expo = [0] * (2 * s)
        for _ in range(rest):
            expo[int(rng.integers(0, 2 * s))] += 1
        m = (k, tuple(expo[:s]), tuple(expo[s:]))
        re = GaussianRational(int(rng.integers(-4, 5)), 0) / int(rng.integers(1, 4))
        im = GaussianRational(int(rng.integers(-4, 5)), 0) / int(rng.integers(1, 4)) if complex_coeffs else 0
        c = re + GaussianRational(0, 1) * im
        out[m] = out[m] + c if m in out else c
    return LambdaElement(_clean(out), s)


def one(s: int) -> LambdaElement:
    return LambdaElement.scalar(ONE, s)
