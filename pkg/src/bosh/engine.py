"""Optimization controllers.

One entry point, `run_method`, drives either the adaptive-pool optimizer
(hierarchical surrogate, information-theoretic batches, pool growth) or one
of the fixed-evaluation-strategy baselines over a benchmark. Budget
accounting follows one convention everywhere: a whole batch of B points, or
one evaluation of a K-realization strategy, is a single BO step.

Every random draw comes from a labeled sub-stream of the run seed, so a run
is bit-reproducible from its config alone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import qmc
from threadpoolctl import threadpool_limits

from . import acquisition as acq
from .benchmarks import SyntheticHGPBenchmark, WarehouseBenchmark
from .direct import direct_maximize, propose_batch
from .exceptions import GPFitError
from .gp import GPHyperBounds, KernelParams, fit_gp, gp_batch_correlation, optimize_hyperparameters
from .hgp import (
    NEW,
    HGPHyperBounds,
    HGPParams,
    HGPPosterior,
    Observation,
    fit_hgp,
    fit_hgp_hyperparameters,
    predict_g,
)


class Method(str, enum.Enum):
    BOSH = "BOSH"
    FIXED_EI = "FIXED_EI"
    FIXED_MES = "FIXED_MES"
    RESAMPLED = "RESAMPLED"
    BATCH_MES_SINGLE = "BATCH_MES_SINGLE"


# Labeled RNG sub-streams of a run seed.
_STREAMS = {"design": 0, "model": 1, "gstar": 2, "benchmark": 3}


def stream_rng(seed: int, name: str) -> np.random.Generator:
    """Independent generator for one labeled component of a run."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_STREAMS[name],)))


def benchmark_seed(seed: int) -> int:
    """Benchmark-instance seed derived from the run seed. Depends only on
    the run seed, so methods sharing a repetition share the same objective."""
    return int(np.random.SeedSequence(seed, spawn_key=(_STREAMS["benchmark"],)).generate_state(1)[0])


@dataclass(frozen=True)
class ModelConfig:
    """Surrogate refitting options."""

    n_restarts: int = 3
    gp_bounds: GPHyperBounds = field(default_factory=GPHyperBounds)
    hgp_bounds: HGPHyperBounds = field(default_factory=HGPHyperBounds)


@dataclass(frozen=True)
class AcquisitionConfig:
    """Acquisition machinery options."""

    gstar_samples: int = 10
    gstar_grid_per_dim: int = 1000
    direct_evals_per_dim: int = 100


@dataclass(frozen=True)
class RunConfig:
    """Everything one optimization run needs besides the benchmark itself."""

    method: Method
    B_or_K: int
    budget_steps: int
    d: int
    seed: int
    model: ModelConfig = field(default_factory=ModelConfig)
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    pool_cap: int | None = None
    uniform_design: bool = False
    resampled_acquisition: str = "mes"  # "mes" or "ei"

    def __post_init__(self):
        if self.B_or_K < 1:
            raise ValueError("B_or_K must be >= 1")
        if self.budget_steps < 1:
            raise ValueError("budget_steps must be >= 1")


@dataclass(frozen=True)
class StepRecord:
    """One BO step of a finished run."""

    step: int
    cumulative_evals: int
    batch_size: int
    pool_size: int
    proposed: tuple  # ((x, realization id), ...)
    observed: tuple  # observed values, one per batch element
    incumbent_x: np.ndarray
    true_value: float
    suboptimality: float


@dataclass(frozen=True)
class RunTrace:
    config: RunConfig
    records: tuple[StepRecord, ...]


def _design_points(n: int, d: int, rng: np.random.Generator, uniform: bool) -> np.ndarray:
    if uniform:
        return rng.uniform(size=(n, d))
    return qmc.Halton(d, scramble=True, seed=rng).random(n)


def _standardize(y: np.ndarray) -> tuple[np.ndarray, float, float]:
    mean = float(np.mean(y))
    sd = float(np.std(y))
    if sd < 1e-12:
        sd = 1.0
    return (y - mean) / sd, mean, sd


def initialize_bosh(benchmark, d: int, rng: np.random.Generator, uniform_design: bool = False):
    """Mint an initial pair of realizations and spread d+5 evaluations
    across them round-robin at low-discrepancy locations."""
    pool = [benchmark.mint_realization(), benchmark.mint_realization()]
    X = _design_points(d + 5, d, rng, uniform_design)
    observations = []
    for i, x in enumerate(X):
        s = pool[i % 2]
        observations.append(Observation(x=x, s=s, y=benchmark.evaluate(x, s)))
    return pool, observations


def initialize_fixed(benchmark, d: int, K: int, rng: np.random.Generator, uniform_design: bool = False):
    """Mint a K-realization strategy and evaluate its average at d+3
    locations (costing K individual evaluations each)."""
    realizations = [benchmark.mint_realization() for _ in range(K)]
    X = _design_points(d + 3, d, rng, uniform_design)
    xs, ys = [], []
    for x in X:
        xs.append(np.asarray(x, dtype=float))
        ys.append(float(np.mean([benchmark.evaluate(x, s) for s in realizations])))
    return realizations, xs, ys


def _suboptimality(benchmark, incumbent_x):
    true_value = benchmark.true_value(incumbent_x)
    optimum = benchmark.true_optimum()
    if optimum is None:
        return true_value, math.nan
    _, best = optimum
    return true_value, best - true_value


def recommend_incumbent(post, evals_per_dim: int = 100) -> np.ndarray:
    """Current recommended optimizer: the argmax of the posterior's latent
    mean, located with one deterministic DIRECT run. Accepts either the
    two-level posterior or a plain strategy GP."""
    if isinstance(post, HGPPosterior):
        objective = lambda x: predict_g(post, x)[0]
    else:
        objective = lambda x: post.predict(x)[0]
    x, _ = direct_maximize(objective, post.dim, evals_per_dim * post.dim)
    return x


class _BoshRun:
    """Adaptive-pool optimization state and step logic."""

    def __init__(self, config: RunConfig, benchmark):
        self.config = config
        self.benchmark = benchmark
        self.rng_model = stream_rng(config.seed, "model")
        self.rng_gstar = stream_rng(config.seed, "gstar")
        self.pool, self.observations = initialize_bosh(
            benchmark, config.d, stream_rng(config.seed, "design"), config.uniform_design
        )
        self.evals = len(self.observations)
        self.params: HGPParams | None = None

    def _fit(self, refit_hypers: bool):
        y = np.array([o.y for o in self.observations])
        y_std, _, _ = _standardize(y)
        std_obs = [replace(o, y=v) for o, v in zip(self.observations, y_std)]
        if refit_hypers or self.params is None:
            self.params = fit_hgp_hyperparameters(
                std_obs,
                bounds=self.config.model.hgp_bounds,
                n_restarts=self.config.model.n_restarts,
                rng=self.rng_model,
                initial=self.params,
            )
        return fit_hgp(std_obs, self.params)

    def step(self, step_index: int) -> StepRecord:
        cfg = self.config
        try:
            post = self._fit(refit_hypers=True)
        except GPFitError:
            post = self._fit(refit_hypers=True)  # one retry with fresh restarts
        gstar = acq.sample_gstar(
            post,
            n_samples=cfg.acquisition.gstar_samples,
            grid_size=cfg.acquisition.gstar_grid_per_dim * cfg.d,
            rng=self.rng_gstar,
        )
        can_grow = cfg.pool_cap is None or len(self.pool) < cfg.pool_cap
        candidates = tuple(self.pool) + ((NEW,) if can_grow else ())
        ctx = acq.AcquisitionContext(posterior=post, gstar=gstar, candidate_pool=candidates)
        proposal = propose_batch(ctx, cfg.B_or_K, cfg.acquisition.direct_evals_per_dim)

        resolved, observed = [], []
        for x, s in proposal.elements:
            if not isinstance(s, int):
                s = self.benchmark.mint_realization()
                self.pool.append(s)
            y = self.benchmark.evaluate(x, s)
            self.observations.append(Observation(x=x, s=s, y=y))
            resolved.append((np.asarray(x, dtype=float), s))
            observed.append(y)
        self.evals += len(resolved)

        post = self._fit(refit_hypers=False)
        incumbent = recommend_incumbent(post, cfg.acquisition.direct_evals_per_dim)
        true_value, subopt = _suboptimality(self.benchmark, incumbent)
        return StepRecord(
            step=step_index,
            cumulative_evals=self.evals,
            batch_size=cfg.B_or_K,
            pool_size=len(self.pool),
            proposed=tuple(resolved),
            observed=tuple(observed),
            incumbent_x=incumbent,
            true_value=true_value,
            suboptimality=subopt,
        )


class _StrategyRun:
    """Fixed/resampled strategy baselines on a single-output GP, including
    the batch variant on one fixed realization."""

    def __init__(self, config: RunConfig, benchmark):
        self.config = config
        self.benchmark = benchmark
        self.rng_model = stream_rng(config.seed, "model")
        self.rng_gstar = stream_rng(config.seed, "gstar")
        K = 1 if config.method is Method.BATCH_MES_SINGLE else config.B_or_K
        self.K = K
        self.realizations, xs, ys = initialize_fixed(
            benchmark, config.d, K, stream_rng(config.seed, "design"), config.uniform_design
        )
        self.X = [np.asarray(x, dtype=float) for x in xs]
        self.y = list(ys)
        self.evals = K * len(xs)
        self.params: tuple[KernelParams, float] | None = None

    def _fit(self, refit_hypers: bool = True):
        y_std, _, _ = _standardize(np.asarray(self.y))
        X = np.stack(self.X)
        if refit_hypers or self.params is None:
            self.params = optimize_hyperparameters(
                X,
                y_std,
                bounds=self.config.model.gp_bounds,
                n_restarts=self.config.model.n_restarts,
                rng=self.rng_model,
                initial=self.params,
            )
        kernel, noise = self.params
        return fit_gp(X, y_std, kernel, noise)

    def _strategy_value(self, x) -> float:
        return float(np.mean([self.benchmark.evaluate(x, s) for s in self.realizations]))

    def _propose_single(self, post) -> np.ndarray:
        cfg = self.config
        budget = cfg.acquisition.direct_evals_per_dim * cfg.d
        wants_ei = cfg.method is Method.FIXED_EI or (
            cfg.method is Method.RESAMPLED and cfg.resampled_acquisition == "ei"
        )
        if wants_ei:
            incumbent = float(np.max(_standardize(np.asarray(self.y))[0]))
            x, _ = direct_maximize(
                lambda x: acq.expected_improvement(x, post, incumbent), cfg.d, budget
            )
        else:
            gstar = acq.sample_gstar(
                post,
                n_samples=cfg.acquisition.gstar_samples,
                grid_size=cfg.acquisition.gstar_grid_per_dim * cfg.d,
                rng=self.rng_gstar,
            )
            x, _ = direct_maximize(lambda x: acq.mes(x, post, gstar), cfg.d, budget)
        return x

    def _propose_batch_mes(self, post) -> list[np.ndarray]:
        """Greedy B-point batch on one realization: the same determinant-
        penalized bound, with the single-output max-value score as the
        per-point term."""
        cfg = self.config
        budget = cfg.acquisition.direct_evals_per_dim * cfg.d
        gstar = acq.sample_gstar(
            post,
            n_samples=cfg.acquisition.gstar_samples,
            grid_size=cfg.acquisition.gstar_grid_per_dim * cfg.d,
            rng=self.rng_gstar,
        )
        chosen: list[np.ndarray] = []
        chosen_score = 0.0
        for _ in range(cfg.B_or_K):
            def score(x):
                points = chosen + [np.atleast_1d(np.asarray(x, dtype=float))]
                total = acq.mes(x, post, gstar) + chosen_score
                if len(points) > 1:
                    corr = gp_batch_correlation(post, np.stack(points))
                    total += 0.5 * acq.log_det_correlation(corr)
                return total

            x, _ = direct_maximize(score, cfg.d, budget)
            chosen.append(np.atleast_1d(np.asarray(x, dtype=float)))
            chosen_score += acq.mes(x, post, gstar)
        return chosen

    def step(self, step_index: int) -> StepRecord:
        cfg = self.config
        if cfg.method is Method.RESAMPLED:
            self.realizations = [self.benchmark.mint_realization() for _ in range(self.K)]
        try:
            post = self._fit()
        except GPFitError:
            post = self._fit()

        if cfg.method is Method.BATCH_MES_SINGLE:
            xs = self._propose_batch_mes(post)
            proposed, observed = [], []
            s = self.realizations[0]
            for x in xs:
                y = self.benchmark.evaluate(x, s)
                self.X.append(x)
                self.y.append(y)
                proposed.append((x, s))
                observed.append(y)
            self.evals += len(xs)
            pool_size = 1
        else:
            x = self._propose_single(post)
            y = self._strategy_value(x)
            x = np.asarray(x, dtype=float)
            self.X.append(x)
            self.y.append(y)
            proposed = [(x, s) for s in self.realizations]  # one strategy eval = K individual ones
            observed = [y]
            self.evals += self.K
            pool_size = self.K

        post = self._fit(refit_hypers=False)
        incumbent = recommend_incumbent(post, cfg.acquisition.direct_evals_per_dim)
        true_value, subopt = _suboptimality(self.benchmark, incumbent)
        return StepRecord(
            step=step_index,
            cumulative_evals=self.evals,
            batch_size=cfg.B_or_K,
            pool_size=pool_size,
            proposed=tuple(proposed),
            observed=tuple(observed),
            incumbent_x=incumbent,
            true_value=true_value,
            suboptimality=subopt,
        )


def make_benchmark(kind: str, seed: int, **kwargs):
    """Construct a benchmark by name with a given instance seed."""
    if kind == "synthetic":
        return SyntheticHGPBenchmark(seed=seed, **kwargs)
    if kind == "warehouse":
        return WarehouseBenchmark(seed=seed, **kwargs)
    raise ValueError(f"unknown benchmark kind {kind!r}")


def run_method(config: RunConfig, benchmark) -> RunTrace:
    """Execute one full optimization run and return its per-step trace.

    BLAS thread pools are pinned to one thread for the whole run: the dense
    factorizations here are small enough that threading costs more than it
    buys, parallel repetitions would oversubscribe the machine, and a fixed
    thread count keeps runs bit-reproducible everywhere.
    """
    if benchmark.d != config.d:
        raise ValueError(f"config.d={config.d} but benchmark.d={benchmark.d}")
    with threadpool_limits(limits=1):
        if config.method is Method.BOSH:
            run = _BoshRun(config, benchmark)
        else:
            run = _StrategyRun(config, benchmark)
        records = tuple(run.step(i) for i in range(1, config.budget_steps + 1))
    return RunTrace(config=config, records=records)
