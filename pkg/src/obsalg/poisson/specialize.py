"""Classical (Z -> 0) and Schroedinger (Z -> i hbar) specializations.

Classical polynomials are dicts ``{(alpha, beta): coefficient}`` in commuting
variables; one-variable polynomials in x are dicts ``{power: coefficient}``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import LambdaElement, LambdaError
from .scalars import GaussianRational

ClassicalPoly = dict
XPoly = dict


def _add(out: dict, key, c: GaussianRational) -> None:
    v = out[key] + c if key in out else c
    if v.is_zero():
        out.pop(key, None)
    else:
        out[key] = v


def specialize_classical(x: LambdaElement) -> ClassicalPoly:
    """Drop every monomial carrying a power of Z."""
    return {(a, b): c for (k, a, b), c in x.terms.items() if k == 0}


def _derivative(f: Mapping, slot: int, i: int) -> ClassicalPoly:
    out: dict = {}
    for (a, b), c in f.items():
        e = (a, b)[slot]
        if e[i] == 0:
            continue
        new = list(e)
        new[i] -= 1
        key = (tuple(new), b) if slot == 0 else (a, tuple(new))
        _add(out, key, c * e[i])
    return out


def _classical_mul(f: Mapping, g: Mapping) -> ClassicalPoly:
    out: dict = {}
    for (a1, b1), c1 in f.items():
        for (a2, b2), c2 in g.items():
            key = (tuple(x + y for x, y in zip(a1, a2)), tuple(x + y for x, y in zip(b1, b2)))
            _add(out, key, c1 * c2)
    return out


def classical_poisson(f: Mapping, g: Mapping, s: int) -> ClassicalPoly:
    """sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i by formal differentiation."""
    out: dict = {}
    for i in range(s):
        for key, c in _classical_mul(_derivative(f, 0, i), _derivative(g, 1, i)).items():
            _add(out, key, c)
        for key, c in _classical_mul(_derivative(f, 1, i), _derivative(g, 0, i)).items():
            _add(out, key, -c)
    return out


def as_xpoly(coeffs) -> XPoly:
    """Ascending coefficient list (or a power->coefficient mapping) to a sparse polynomial."""
    items = coeffs.items() if isinstance(coeffs, Mapping) else enumerate(coeffs)
    out: dict = {}
    for k, c in items:
        _add(out, int(k), GaussianRational.coerce(c))
    return out


def specialize_quantum(x: LambdaElement, hbar, test_poly: Sequence | Mapping) -> XPoly:
    """Apply x with Z = i hbar, q = multiplication by x, p = -i hbar d/dx, to ``test_poly``.

    Factors act right to left, so on a normal-ordered monomial the p's act first.
    """
    if x.num_coords != 1:
        raise LambdaError("the differential-operator action needs exactly one coordinate pair")
    h = GaussianRational.coerce(Fraction(hbar))
    ih = GaussianRational(0, 1) * h
    psi = as_xpoly(test_poly)
    out: dict = {}
    for (k, (a,), (b,)), c in x.terms.items():
        cur = dict(psi)
        for _ in range(b):
            nxt: dict = {}
            for e, v in cur.items():
                if e:
                    _add(nxt, e - 1, -ih * v * e)
            cur = nxt
        scale = c * ih**k
        for e, v in cur.items():
            _add(out, e + a, scale * v)
    return out


def format_xpoly(f: Mapping) -> str:
    from .scalars import format_scalar

    if not f:
        return "0"
    parts = []
    for e in sorted(f):
        c = f[e]
        mono = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
        if mono and c == 1:
            parts.append(mono)
        elif mono:
            parts.append(f"{format_scalar(c)}*{mono}")
        else:
            parts.append(format_scalar(c))
    return " + ".join(parts)
