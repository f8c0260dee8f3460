"""gp module: kernel closed form, Cholesky conditioning vs a dense oracle,
marginal likelihood, and hyperparameter recovery."""

import math

import numpy as np
import pytest

from bosh.exceptions import GPFitError
from bosh.gp import (
    GPHyperBounds,
    KernelParams,
    fit_gp,
    log_marginal_likelihood,
    matern52,
    matern52_matrix,
    optimize_hyperparameters,
)

from oracles import dense_gp_predict, dense_lml_2x2


class TestMatern52:
    def test_zero_distance_returns_variance(self):
        params = KernelParams(lengthscales=[0.3], variance=2.0)
        assert matern52([0.4], [0.4], params) == pytest.approx(2.0)

    def test_unit_distance_closed_form(self):
        params = KernelParams(lengthscales=[1.0], variance=1.0)
        expected = (1 + math.sqrt(5) + 5 / 3) * math.exp(-math.sqrt(5))
        assert matern52([0.0], [1.0], params) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.5240, abs=5e-5)

    def test_long_range_decay(self):
        params = KernelParams(lengthscales=[1.0], variance=1.0)
        assert matern52([0.0], [50.0], params) < 1e-15

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        params = KernelParams(lengthscales=[0.2, 0.7, 1.3], variance=0.8)
        for _ in range(200):
            x, x2 = rng.uniform(size=3), rng.uniform(size=3)
            assert matern52(x, x2, params) == matern52(x2, x, params)

    def test_kernel_matrix_psd(self):
        rng = np.random.default_rng(1)
        for trial in range(20):
            d = rng.integers(1, 4)
            n = rng.integers(2, 21)
            X = rng.uniform(size=(n, d))
            params = KernelParams(lengthscales=rng.uniform(0.05, 2.0, size=d), variance=1.5)
            eigs = np.linalg.eigvalsh(matern52_matrix(X, X, params))
            assert eigs.min() >= -1e-8

    def test_dimension_mismatch_rejected(self):
        params = KernelParams(lengthscales=[1.0, 1.0], variance=1.0)
        with pytest.raises(ValueError):
            matern52([0.1], [0.1, 0.2], params)
        with pytest.raises(ValueError):
            matern52([0.1], [0.2], params)

    def test_invalid_params_rejected(self):
        with pytest.raises(ValueError):
            KernelParams(lengthscales=[0.0], variance=1.0)
        with pytest.raises(ValueError):
            KernelParams(lengthscales=[1.0], variance=-2.0)


class TestFitPredict:
    def test_single_observation_shrinkage(self):
        variance, noise, y0 = 1.7, 0.3, 2.0
        params = KernelParams(lengthscales=[0.5], variance=variance)
        post = fit_gp([[0.4]], [y0], params, noise)
        mean, _ = post.predict([0.4])
        assert mean == pytest.approx(y0 * variance / (variance + noise), abs=1e-12)

    def test_empty_data_rejected(self):
        params = KernelParams(lengthscales=[0.5], variance=1.0)
        with pytest.raises(ValueError):
            fit_gp(np.empty((0, 1)), [], params, 0.1)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(7)
        for d in (1, 2):
            X = rng.uniform(size=(30, d))
            y = rng.normal(size=30)
            ls = rng.uniform(0.1, 0.8, size=d)
            params = KernelParams(lengthscales=ls, variance=1.3)
            post = fit_gp(X, y, params, 0.05)
            Xs = rng.uniform(size=(12, d))
            mean_ref, cov_ref = dense_gp_predict(X, y, Xs, ls, 1.3, 0.05)
            means, variances = post.predict_batch(Xs)
            np.testing.assert_allclose(means, mean_ref, atol=1e-8)
            np.testing.assert_allclose(variances, np.diag(cov_ref), atol=1e-8)

    def test_factor_reconstructs_regularized_kernel(self):
        rng = np.random.default_rng(3)
        X = rng.uniform(size=(25, 2))
        params = KernelParams(lengthscales=[0.4, 0.4], variance=1.0)
        post = fit_gp(X, rng.normal(size=25), params, 0.01)
        A = matern52_matrix(X, X, params) + (0.01 + post.jitter) * np.eye(25)
        np.testing.assert_allclose(post.chol @ post.chol.T, A, rtol=1e-8)

    def test_prior_reversion_far_from_data(self):
        params = KernelParams(lengthscales=[0.02], variance=2.5)
        post = fit_gp([[0.0]], [5.0], params, 0.1)
        mean, var = post.predict([1.0])
        assert abs(mean) < 1e-6
        assert var == pytest.approx(2.5, abs=1e-6)

    def test_interpolation_with_tiny_noise(self):
        params = KernelParams(lengthscales=[0.3], variance=1.0)
        post = fit_gp([[0.2], [0.8]], [1.0, -0.5], params, 1e-8)
        mean, var = post.predict([0.2])
        assert mean == pytest.approx(1.0, abs=1e-3)
        assert var < 1e-6

    def test_variance_never_grows_with_data(self):
        rng = np.random.default_rng(11)
        params = KernelParams(lengthscales=[0.3, 0.5], variance=1.0)
        X = rng.uniform(size=(20, 2))
        y = rng.normal(size=20)
        test_points = rng.uniform(size=(15, 2))
        prev = np.full(15, np.inf)
        for n in range(1, 21):
            post = fit_gp(X[:n], y[:n], params, 0.05)
            _, variances = post.predict_batch(test_points)
            assert np.all(variances <= prev + 1e-8)
            prev = variances


class TestLogMarginalLikelihood:
    def test_scalar_case(self):
        params = KernelParams(lengthscales=[0.5], variance=1.2)
        got = log_marginal_likelihood([[0.3]], [0.0], params, 0.4)
        expected = -0.5 * math.log(1.2 + 0.4) - 0.5 * math.log(2 * math.pi)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_two_point_closed_form(self):
        X = np.array([[0.2], [0.7]])
        y = [0.5, -1.0]
        got = log_marginal_likelihood(X, y, KernelParams(lengthscales=[0.4], variance=0.9), 0.2)
        assert got == pytest.approx(dense_lml_2x2(X, y, [0.4], 0.9, 0.2), abs=1e-10)

    def test_scaling_targets_reduces_data_fit(self):
        rng = np.random.default_rng(5)
        X = rng.uniform(size=(8, 1))
        y = rng.normal(size=8)
        params = KernelParams(lengthscales=[0.3], variance=1.0)
        base = log_marginal_likelihood(X, y, params, 0.1)
        scaled = log_marginal_likelihood(X, 10 * y, params, 0.1)
        assert scaled < base  # quadratic form grows 100x, the rest is unchanged


class TestOptimizeHyperparameters:
    def test_recovers_lengthscale_within_factor_two(self):
        true_ls, true_var, true_noise = 0.15, 1.0, 0.01
        hits = 0
        for seed in range(20):
            rng = np.random.default_rng(1000 + seed)
            X = rng.uniform(size=(200, 1))
            true = KernelParams(lengthscales=[true_ls], variance=true_var)
            K = matern52_matrix(X, X, true) + true_noise * np.eye(200)
            y = np.linalg.cholesky(K + 1e-12 * np.eye(200)) @ rng.standard_normal(200)
            params, _ = optimize_hyperparameters(X, y, n_restarts=2, rng=rng)
            ratio = params.lengthscales[0] / true_ls
            if 0.5 <= ratio <= 2.0:
                hits += 1
        assert hits >= 16

    def test_never_worse_than_start(self):
        rng = np.random.default_rng(2)
        X = rng.uniform(size=(10, 1))
        y = rng.normal(size=10)
        start = (KernelParams(lengthscales=[0.3], variance=1.0), 0.1)
        params, noise = optimize_hyperparameters(X, y, n_restarts=1, rng=rng, initial=start)
        got = log_marginal_likelihood(X, y, params, noise)
        at_start = log_marginal_likelihood(X, y, start[0], start[1])
        assert got >= at_start - 1e-12

    def test_degenerate_box_returns_the_point(self):
        rng = np.random.default_rng(3)
        X = rng.uniform(size=(5, 1))
        y = rng.normal(size=5)
        bounds = GPHyperBounds(lengthscale=(0.25, 0.25), variance=(0.8, 0.8), noise=(0.05, 0.05))
        params, noise = optimize_hyperparameters(X, y, bounds=bounds, n_restarts=3, rng=rng)
        assert params.lengthscales[0] == pytest.approx(0.25, rel=1e-12)
        assert params.variance == pytest.approx(0.8, rel=1e-12)
        assert noise == pytest.approx(0.05, rel=1e-12)


class TestJitterLadder:
    def test_reports_final_jitter_on_hopeless_matrix(self):
        from bosh.gp import cholesky_with_jitter

        bad = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalues 3 and -1
        with pytest.raises(GPFitError) as err:
            cholesky_with_jitter(bad)
        assert err.value.final_jitter == pytest.approx(1e-6)

    def test_duplicate_rows_rescued_by_jitter(self):
        X = np.array([[0.5], [0.5], [0.5]])
        params = KernelParams(lengthscales=[0.3], variance=1.0)
        post = fit_gp(X, [1.0, 1.0, 1.0], params, 1e-12)
        assert np.isfinite(post.alpha).all()
