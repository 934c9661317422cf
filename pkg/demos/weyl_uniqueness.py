"""Recover a hidden unitary from a conjugated clock-and-shift pair, and show the stacked-map gap shrinking with n."""
import numpy as np

from obsalg.weyl import conjugated_system, haar_unitary, phase_distance, schrodinger_system, solve_intertwiner, stacked_singular_values

rng = np.random.default_rng(0)
for n in (3, 8, 16, 32):
    base = schrodinger_system(n)
    g = haar_unitary(n, rng)
    other = conjugated_system(base, g)
    sol = solve_intertwiner(base, other)
    gap = stacked_singular_values(base, other)[-2]
    print(f"n={n:>2}: null dim {sol.null_dim}, phase distance {phase_distance(sol.w, g):.1e}, normalised gap {gap:.3f}")
