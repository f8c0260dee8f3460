"""Fit the two-level surrogate to a handful of noisy realizations and look
at what it believes about the latent objective.

Walks through the core modeling step: observations carry a realization id,
the model learns how much of the signal is shared versus per-realization,
and the joint belief at any point splits into "what would this realization
return" and "what is the true objective here".
"""

import numpy as np

from bosh.benchmarks import SyntheticHGPBenchmark
from bosh.hgp import (
    NEW,
    HGPParams,
    Observation,
    fit_hgp,
    fit_hgp_hyperparameters,
    joint_predict,
    predict_g,
)

rng = np.random.default_rng(0)
bench = SyntheticHGPBenchmark(seed=3, lower_variance=0.4, noise_variance=0.01)

# Two realizations, eight noisy evaluations each.
observations = []
for _ in range(2):
    s = bench.mint_realization()
    for x in rng.uniform(size=8):
        observations.append(Observation(x=[x], s=s, y=bench.evaluate(x, s)))

params = fit_hgp_hyperparameters(observations, n_restarts=4, rng=rng)
print("fitted hyperparameters:")
print(f"  shared lengthscale : {params.shared_lengthscales[0]:.3f}")
print(f"  upper variance     : {params.upper_variance:.3f}   (latent objective)")
print(f"  lower variance     : {params.lower_variance:.3f}   (per-realization deviation)")
print(f"  noise variance     : {params.noise:.4f}")

post = fit_hgp(observations, params)

print("\nbeliefs along the domain (realization 0 vs latent truth):")
print(f"{'x':>5} {'y_mean':>8} {'y_sd':>7} {'g_mean':>8} {'g_sd':>7} {'corr':>6} {'truth':>8}")
for x in np.linspace(0.05, 0.95, 10):
    b = joint_predict(post, [x], 0)
    print(
        f"{x:5.2f} {b.mean_y:8.3f} {np.sqrt(b.var_y):7.3f} "
        f"{b.mean_g:8.3f} {np.sqrt(b.var_g):7.3f} {b.corr:6.3f} {bench.true_value(x):8.3f}"
    )

# A not-yet-instantiated realization has wider observation bands but the
# same latent belief; its correlation with the truth is what the
# acquisition uses to decide whether a fresh realization is worth minting.
x_probe = 0.5
fresh = joint_predict(post, [x_probe], NEW)
member = joint_predict(post, [x_probe], 0)
print(f"\nat x={x_probe}: observation sd member={np.sqrt(member.var_y):.3f} "
      f"vs fresh realization={np.sqrt(fresh.var_y):.3f}")
print(f"latent belief there: mean={predict_g(post, [x_probe])[0]:.3f}, "
      f"sd={np.sqrt(predict_g(post, [x_probe])[1]):.3f}")
