"""engine module: initialization accounting, step/pool invariants across
methods, and bit-level reproducibility."""

import numpy as np
import pytest

from bosh.benchmarks import SyntheticHGPBenchmark, WarehouseBenchmark
from bosh.engine import (
    AcquisitionConfig,
    Method,
    ModelConfig,
    RunConfig,
    benchmark_seed,
    initialize_bosh,
    initialize_fixed,
    make_benchmark,
    run_method,
    stream_rng,
)

FAST_ACQ = AcquisitionConfig(gstar_samples=5, gstar_grid_per_dim=100, direct_evals_per_dim=25)
FAST_MODEL = ModelConfig(n_restarts=2)


def _config(method, B_or_K=2, steps=3, seed=0, d=1, **kwargs):
    return RunConfig(
        method=method,
        B_or_K=B_or_K,
        budget_steps=steps,
        d=d,
        seed=seed,
        model=FAST_MODEL,
        acquisition=FAST_ACQ,
        **kwargs,
    )


def _bench(seed=0, **kw):
    return SyntheticHGPBenchmark(seed=benchmark_seed(seed), **kw)


class TestInitialization:
    def test_bosh_round_robin_d1(self):
        bench = _bench()
        pool, obs = initialize_bosh(bench, 1, stream_rng(0, "design"))
        assert len(pool) == 2
        assert len(obs) == 6
        counts = {s: sum(1 for o in obs if o.s == s) for s in pool}
        assert sorted(counts.values()) == [3, 3]

    def test_bosh_round_robin_d4(self):
        bench = WarehouseBenchmark(seed=1)
        pool, obs = initialize_bosh(bench, 4, stream_rng(0, "design"))
        assert len(pool) == 2
        assert len(obs) == 9
        counts = {s: sum(1 for o in obs if o.s == s) for s in pool}
        assert sorted(counts.values()) == [4, 5]

    def test_fixed_strategy_costs_K_per_design_point(self):
        bench = _bench()
        realizations, xs, ys = initialize_fixed(bench, 1, 5, stream_rng(0, "design"))
        assert len(realizations) == 5
        assert len(xs) == 4  # d+3 strategy evaluations
        assert bench.realization_count == 5

    def test_fixed_strategy_records_means(self):
        bench = SyntheticHGPBenchmark(seed=3, lower_variance=0.4, noise_variance=0.0)
        realizations, xs, ys = initialize_fixed(bench, 1, 3, stream_rng(1, "design"))
        for x, y in zip(xs, ys):
            per_realization = [bench.evaluate(x, s) for s in realizations]
            assert y == pytest.approx(float(np.mean(per_realization)), abs=1e-12)


class TestBoshRun:
    def test_accounting_pool_and_incumbent(self):
        config = _config(Method.BOSH, B_or_K=2, steps=3)
        trace = run_method(config, _bench())
        assert len(trace.records) == 3
        pool_sizes = [r.pool_size for r in trace.records]
        assert pool_sizes[0] >= 2
        assert all(b >= a for a, b in zip(pool_sizes, pool_sizes[1:]))
        for i, record in enumerate(trace.records, start=1):
            assert record.cumulative_evals == 6 + i * 2
            assert record.batch_size == 2
            assert len(record.observed) == 2
            assert np.all(record.incumbent_x >= 0) and np.all(record.incumbent_x <= 1)
            assert record.suboptimality >= 0

    def test_new_elements_mint_distinct_realizations(self):
        config = _config(Method.BOSH, B_or_K=3, steps=4, seed=5)
        bench = _bench(5, lower_variance=0.8)
        trace = run_method(config, bench)
        for record in trace.records:
            ids = [s for _, s in record.proposed]
            assert all(isinstance(s, int) for s in ids)
        # every pool member is a real benchmark realization
        assert bench.realization_count >= 2

    def test_pool_cap_respected(self):
        config = _config(Method.BOSH, B_or_K=2, steps=3, pool_cap=2)
        trace = run_method(config, _bench())
        assert all(r.pool_size == 2 for r in trace.records)

    def test_bit_reproducibility(self):
        config = _config(Method.BOSH, B_or_K=2, steps=3, seed=7)
        a = run_method(config, _bench(7))
        b = run_method(config, _bench(7))
        for ra, rb in zip(a.records, b.records):
            assert ra.cumulative_evals == rb.cumulative_evals
            np.testing.assert_array_equal(ra.incumbent_x, rb.incumbent_x)
            assert ra.observed == rb.observed
            assert ra.suboptimality == rb.suboptimality


class TestBaselineRuns:
    @pytest.mark.parametrize("method", [Method.FIXED_EI, Method.FIXED_MES])
    def test_fixed_strategy_accounting(self, method):
        K = 3
        config = _config(method, B_or_K=K, steps=3)
        trace = run_method(config, _bench())
        init = K * (1 + 3)
        for i, record in enumerate(trace.records, start=1):
            assert record.cumulative_evals == init + i * K
            assert record.pool_size == K
            assert len(record.proposed) == K  # one location across K realizations
            xs = {tuple(x) for x, _ in record.proposed}
            assert len(xs) == 1
            assert record.suboptimality >= 0

    def test_resampled_redraws_each_step(self):
        config = _config(Method.RESAMPLED, B_or_K=2, steps=3)
        bench = _bench()
        trace = run_method(config, bench)
        seen = [tuple(sorted(s for _, s in r.proposed)) for r in trace.records]
        assert len(set(seen)) == len(seen)  # fresh realization ids every step
        assert bench.realization_count == 2 + 2 * 3

    def test_batch_mes_single_accounting(self):
        B = 3
        config = _config(Method.BATCH_MES_SINGLE, B_or_K=B, steps=3)
        trace = run_method(config, _bench())
        init = 1 * (1 + 3)  # K=1 strategy, d+3 points
        for i, record in enumerate(trace.records, start=1):
            assert record.cumulative_evals == init + i * B
            assert record.pool_size == 1
            assert len(record.proposed) == B
            ids = {s for _, s in record.proposed}
            assert len(ids) == 1  # all on the single fixed realization

    def test_batch_mes_spreads_points(self):
        config = _config(Method.BATCH_MES_SINGLE, B_or_K=2, steps=1, seed=3)
        bench = SyntheticHGPBenchmark(seed=benchmark_seed(3), noise_variance=1e-4)
        trace = run_method(config, bench)
        (x1, _), (x2, _) = trace.records[0].proposed
        assert abs(float(x1[0]) - float(x2[0])) > 1e-3

    def test_equal_per_step_cost_of_unit_strategies(self):
        bosh_trace = run_method(_config(Method.BOSH, B_or_K=1, steps=2), _bench())
        fixed_trace = run_method(_config(Method.FIXED_MES, B_or_K=1, steps=2), _bench())
        bosh_increments = np.diff([r.cumulative_evals for r in bosh_trace.records])
        fixed_increments = np.diff([r.cumulative_evals for r in fixed_trace.records])
        np.testing.assert_array_equal(bosh_increments, fixed_increments)


class TestWarehouseRun:
    def test_two_steps_on_the_simulator(self):
        config = _config(Method.FIXED_MES, B_or_K=2, steps=2, d=4)
        bench = WarehouseBenchmark(seed=benchmark_seed(0))
        trace = run_method(config, bench)
        assert len(trace.records) == 2
        for record in trace.records:
            assert 0.0 <= record.true_value <= 1.0
            assert np.isnan(record.suboptimality)


class TestRecommendIncumbent:
    def test_matches_grid_oracle_on_the_mean_surface(self):
        from bosh.engine import recommend_incumbent
        from bosh.gp import KernelParams, fit_gp
        from bosh.hgp import HGPParams, Observation, fit_hgp

        # A strategy GP with a unique interior maximum of its mean.
        X = np.array([[0.2], [0.45], [0.7]])
        y = np.array([0.1, 1.0, -0.2])
        gp_post = fit_gp(X, y, KernelParams(lengthscales=[0.2], variance=1.0), 0.01)
        grid = np.linspace(0, 1, 100001)[:, None]
        oracle = grid[int(np.argmax(gp_post.predict_batch(grid)[0]))][0]
        got = recommend_incumbent(gp_post, evals_per_dim=200)
        assert abs(float(got[0]) - oracle) < 5e-3

        # Same check through the two-level posterior's latent mean.
        obs = [Observation(x=X[i], s=i % 2, y=float(y[i])) for i in range(3)]
        hgp_post = fit_hgp(
            obs,
            HGPParams(shared_lengthscales=[0.2], upper_variance=1.0, lower_variance=0.1, noise=0.01),
        )
        oracle_g = grid[int(np.argmax(hgp_post.predict_latent_batch(grid)[0]))][0]
        got_g = recommend_incumbent(hgp_post, evals_per_dim=200)
        assert abs(float(got_g[0]) - oracle_g) < 5e-3

    def test_deterministic(self):
        from bosh.engine import recommend_incumbent
        from bosh.gp import KernelParams, fit_gp

        post = fit_gp([[0.3], [0.8]], [1.0, 0.2], KernelParams(lengthscales=[0.3], variance=1.0), 0.05)
        a = recommend_incumbent(post)
        b = recommend_incumbent(post)
        np.testing.assert_array_equal(a, b)


class TestMakeBenchmark:
    def test_kinds(self):
        assert isinstance(make_benchmark("synthetic", seed=1), SyntheticHGPBenchmark)
        assert isinstance(make_benchmark("warehouse", seed=1), WarehouseBenchmark)
        with pytest.raises(ValueError):
            make_benchmark("roulette", seed=1)

    def test_dim_mismatch_rejected(self):
        config = _config(Method.BOSH, d=4)
        with pytest.raises(ValueError):
            run_method(config, _bench())
