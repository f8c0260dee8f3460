"""One adaptive-pool optimization run against fixed-strategy baselines.

A small head-to-head on the synthetic benchmark: same per-step evaluation
budget, same repetition seed (so all methods face the same latent truth),
different strategies for spending it.
"""

import numpy as np

from bosh.benchmarks import SyntheticHGPBenchmark
from bosh.engine import (
    AcquisitionConfig,
    Method,
    ModelConfig,
    RunConfig,
    benchmark_seed,
    run_method,
)

SEED = 5
STEPS = 12
B = 3

acq = AcquisitionConfig(gstar_grid_per_dim=300, direct_evals_per_dim=40)
model = ModelConfig(n_restarts=2)

print(f"synthetic benchmark, {STEPS} steps, batch/strategy size {B}\n")
for method in (Method.BOSH, Method.FIXED_MES, Method.FIXED_EI, Method.RESAMPLED):
    config = RunConfig(
        method=method, B_or_K=B, budget_steps=STEPS, d=1, seed=SEED, model=model, acquisition=acq
    )
    bench = SyntheticHGPBenchmark(seed=benchmark_seed(SEED), lower_variance=0.5)
    trace = run_method(config, bench)
    last = trace.records[-1]
    marks = " ".join(f"{r.suboptimality:.3f}" for r in trace.records[::3])
    pool_note = f", pool grew to {last.pool_size}" if method is Method.BOSH else ""
    print(f"{method.value:16s} suboptimality every 3rd step: {marks}")
    print(f"{'':16s} final {last.suboptimality:.4f} after {last.cumulative_evals} evaluations{pool_note}\n")
