"""Truncated-oscillator estimate for the cosine pair, at two truncations."""
from obsalg.complementarity import WEYL_COSINE_REFERENCE, build_oscillator, weyl_cosine_experiment
from obsalg.optimize import OptimizerConfig

for n in (20, 40):
    rep = weyl_cosine_experiment(build_oscillator(n, 1.0, 1.0), OptimizerConfig(seed=0), truncation_check=False)
    print(f"N={n}: infimum {rep.infimum_estimate:.4f}  ground state {rep.extras['ground_state_value']:.4f}")
print("reference value:", WEYL_COSINE_REFERENCE)
