"""Deviation functionals for the spin-1/2 pair (S1, S3), compared with the Bloch-sphere closed form."""
import numpy as np

from obsalg.complementarity import certify_complementarity, minimize_deviation_functional, robertson_bound
from obsalg.optimize import OptimizerConfig
from obsalg.states import State

s1 = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
s3 = 0.5 * np.array([[1, 0], [0, -1]], dtype=complex)

rep = minimize_deviation_functional(s1, None, "single", OptimizerConfig(seed=0))
print(f"{'single':>15}: infimum {rep.infimum_estimate:.6f}")
for kind in ("sum", "sum_of_squares", "product"):
    rep = minimize_deviation_functional(s1, s3, kind, OptimizerConfig(seed=0))
    print(f"{kind:>15}: infimum {rep.infimum_estimate:.6f}")

# on a pure state the sum of variances is 1/2 minus the squared Bloch projection onto the x-z plane
print("closed-form minimum of the sum of squares:", 0.5 - 0.25)

ok, cert = certify_complementarity(s1, s3, OptimizerConfig(seed=0))
print(f"certified complementary: {ok} (sum infimum {cert.infimum_estimate:.4f}, threshold {cert.extras['threshold']:.1e})")

up = State.pure([1, 0])
print("Robertson bound at |0>:", robertson_bound(up, s1, s3))
