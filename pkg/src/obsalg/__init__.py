"""Finite-dimensional operator algebras: states, GNS representations, sectors,
uncertainty bounds, discrete Weyl systems and an exact canonical-pair algebra."""

__version__ = "0.1.0"
