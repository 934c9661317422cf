"""Relative phases between superselection sectors are invisible; inside one sector they are not."""
import numpy as np

from obsalg.matrix_algebra import block_algebra
from obsalg.sectors import decompose, phase_observability, phase_variation

alg = block_algebra([2, 1])
dec = decompose(alg)
print("blocks:", dec.blocks)
c = 1 / np.sqrt(2)
psi1 = dec.block_basis(0)[:, 0]
psi2 = dec.block_basis(1)[:, 0]
print("cross-sector variation:", phase_observability(alg, dec, psi1, psi2, c, c).variation)
sx = np.array([[0, 1], [1, 0]], dtype=complex)
var, _ = phase_variation([sx], [1, 0], [0, 1], c, c, np.linspace(0, 2 * np.pi, 64, endpoint=False))
print("same-sector variation with sigma_x:", var)
