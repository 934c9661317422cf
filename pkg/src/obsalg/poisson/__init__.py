"""Exact normal-ordered polynomial algebra in canonical pairs over a central element Z."""
from .algebra import (
    LambdaElement,
    LambdaError,
    adjoint,
    commutator,
    dirac_identity_check,
    jacobi_check,
    lie_bracket,
    multiply,
    random_element,
    theorem_check,
)
from .battery import BatteryRow, run_identity_battery
from .scalars import GaussianRational
from .specialize import classical_poisson, format_xpoly, specialize_classical, specialize_quantum
from .text import LambdaSyntaxError, format_element, parse

__all__ = [
    "BatteryRow",
    "GaussianRational",
    "LambdaElement",
    "LambdaError",
    "LambdaSyntaxError",
    "adjoint",
    "classical_poisson",
    "commutator",
    "dirac_identity_check",
    "format_element",
    "format_xpoly",
    "jacobi_check",
    "lie_bracket",
    "multiply",
    "parse",
    "random_element",
    "run_identity_battery",
    "specialize_classical",
    "specialize_quantum",
    "theorem_check",
]
