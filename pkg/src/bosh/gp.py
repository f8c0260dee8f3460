"""Dense Gaussian-process regression with a Matern 5/2 kernel.

This is the numerical substrate for the rest of the toolkit: kernel
evaluation, Cholesky-based posterior conditioning, the log marginal
likelihood, and multi-start hyperparameter fitting. Inputs live in the unit
box [0, 1]^d (callers normalize; nothing here rescales) and targets are used
exactly as given (callers standardize).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky
from scipy.optimize import minimize
from scipy.spatial.distance import cdist

from .exceptions import GPFitError

# Escalation schedule for regularizing a factorization that fails as given.
JITTER_LADDER = (1e-10, 1e-9, 1e-8, 1e-7, 1e-6)

_SQRT5 = math.sqrt(5.0)


@dataclass(frozen=True)
class KernelParams:
    """Matern 5/2 parameters: one lengthscale per input dimension plus an
    output variance."""

    lengthscales: np.ndarray
    variance: float

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.lengthscales, dtype=float))
        object.__setattr__(self, "lengthscales", ls)
        if ls.ndim != 1 or ls.size == 0:
            raise ValueError("lengthscales must be a non-empty 1-d array")
        if not np.all(ls > 0) or not np.all(np.isfinite(ls)):
            raise ValueError("lengthscales must be positive and finite")
        if not (self.variance > 0 and np.isfinite(self.variance)):
            raise ValueError("variance must be positive and finite")

    @property
    def dim(self) -> int:
        return self.lengthscales.size


def matern52(x, x2, params: KernelParams) -> float:
    """Matern 5/2 covariance between two points.

    Returns variance * (1 + sqrt(5) r + 5 r^2 / 3) * exp(-sqrt(5) r) with
    r the lengthscale-weighted Euclidean distance.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    if x.shape != x2.shape or x.size != params.dim:
        raise ValueError(
            f"dimension mismatch: x has {x.size}, x2 has {x2.size}, "
            f"kernel expects {params.dim}"
        )
    r = math.sqrt(float(np.sum(((x - x2) / params.lengthscales) ** 2)))
    return params.variance * (1.0 + _SQRT5 * r + 5.0 * r * r / 3.0) * math.exp(-_SQRT5 * r)


def matern52_shape(X, X2, lengthscales) -> np.ndarray:
    """Unit-variance Matern 5/2 matrix between two point sets."""
    X = np.atleast_2d(np.asarray(X, dtype=float)) / lengthscales
    X2 = np.atleast_2d(np.asarray(X2, dtype=float)) / lengthscales
    r = cdist(X, X2)
    return (1.0 + _SQRT5 * r + 5.0 * r * r / 3.0) * np.exp(-_SQRT5 * r)


def matern52_matrix(X, X2, params: KernelParams) -> np.ndarray:
    """Kernel matrix between two point sets, shapes (n, d) and (m, d)."""
    return params.variance * matern52_shape(X, X2, params.lengthscales)


def cholesky_with_jitter(A: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of A, escalating diagonal jitter on failure.

    Tries A as given, then A + jitter*I for each rung of JITTER_LADDER.
    Raises GPFitError carrying the final jitter tried.
    """
    for jitter in (0.0,) + JITTER_LADDER:
        try:
            if jitter == 0.0:
                L = cholesky(A, lower=True)
            else:
                L = cholesky(A + jitter * np.eye(A.shape[0]), lower=True)
            return L, jitter
        except np.linalg.LinAlgError:
            continue
        except ValueError:
            continue
    raise GPFitError(
        f"matrix not positive definite after jitter up to {JITTER_LADDER[-1]:g}",
        final_jitter=JITTER_LADDER[-1],
    )


@dataclass(frozen=True)
class GPPosterior:
    """Fitted GP state: training data plus a cached Cholesky factor of
    K + noise*I, giving O(n^2) predictions. Immutable after construction."""

    train_inputs: np.ndarray
    train_targets: np.ndarray
    params: KernelParams
    noise: float
    chol: np.ndarray
    alpha: np.ndarray
    jitter: float = 0.0

    @property
    def dim(self) -> int:
        return self.train_inputs.shape[1]

    def predict(self, x) -> tuple[float, float]:
        """Posterior mean and latent variance (noise excluded) at one point."""
        means, variances = self.predict_batch(np.atleast_2d(np.asarray(x, dtype=float)))
        return float(means[0]), float(variances[0])

    def predict_batch(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized posterior mean and latent variance at each row of X."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise ValueError(f"expected {self.dim}-dimensional inputs, got {X.shape[1]}")
        K_star = matern52_matrix(X, self.train_inputs, self.params)
        means = K_star @ self.alpha
        V = cho_solve((self.chol, True), K_star.T)
        variances = self.params.variance - np.sum(K_star * V.T, axis=1)
        return means, np.maximum(variances, 0.0)

    # Alias used by the max-value sampler, which works on any posterior that
    # exposes the latent objective's marginals.
    predict_latent_batch = predict_batch


def fit_gp(inputs, targets, params: KernelParams, noise: float) -> GPPosterior:
    """Condition a zero-mean GP on (inputs, targets) with observation noise
    variance `noise`."""
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(targets, dtype=float).ravel()
    if X.shape[0] == 0:
        raise ValueError("fit_gp requires at least one observation")
    if X.shape[0] != y.size:
        raise ValueError("inputs and targets disagree on n")
    if not noise > 0:
        raise ValueError("noise variance must be positive")
    A = matern52_matrix(X, X, params) + noise * np.eye(X.shape[0])
    L, jitter = cholesky_with_jitter(A)
    alpha = cho_solve((L, True), y)
    return GPPosterior(
        train_inputs=X,
        train_targets=y,
        params=params,
        noise=float(noise),
        chol=L,
        alpha=alpha,
        jitter=jitter,
    )


def log_marginal_likelihood(inputs, targets, params: KernelParams, noise: float) -> float:
    """Gaussian log evidence of the data under the zero-mean prior."""
    post = fit_gp(inputs, targets, params, noise)
    y = post.train_targets
    n = y.size
    return float(
        -0.5 * y @ post.alpha
        - np.sum(np.log(np.diag(post.chol)))
        - 0.5 * n * math.log(2.0 * math.pi)
    )


@dataclass(frozen=True)
class GPHyperBounds:
    """Box bounds (natural scale) for the hyperparameter search; the search
    itself runs on log parameters."""

    lengthscale: tuple[float, float] = (1e-2, 10.0)
    variance: tuple[float, float] = (1e-4, 1e2)
    noise: tuple[float, float] = (1e-6, 1.0)


def maximize_over_box(
    negative_objective,
    log_lo: np.ndarray,
    log_hi: np.ndarray,
    n_restarts: int,
    rng: np.random.Generator,
    initial: np.ndarray | None = None,
    maxfev: int | None = None,
):
    """Multi-start derivative-free local search over a log-parameter box.

    Runs a direction-set (Powell) search from `initial` (if given) and
    random starts, returning the best point found; never worse than any
    start point. `negative_objective` should return +inf for points it
    cannot evaluate. Raises GPFitError if every start fails to evaluate.
    """
    log_lo = np.asarray(log_lo, dtype=float)
    log_hi = np.asarray(log_hi, dtype=float)
    ndim = log_lo.size
    if maxfev is None:
        maxfev = 200 * ndim

    starts = []
    if initial is not None:
        starts.append(np.clip(np.asarray(initial, dtype=float), log_lo, log_hi))
    while len(starts) < n_restarts:
        starts.append(rng.uniform(log_lo, log_hi))

    best_theta, best_value = None, np.inf
    for theta0 in starts:
        f0 = negative_objective(theta0)
        if f0 < best_value:
            best_theta, best_value = theta0, f0
        if not np.isfinite(f0):
            continue
        if np.all(log_hi == log_lo):
            continue  # degenerate box: the start is the whole feasible set
        result = minimize(
            negative_objective,
            theta0,
            method="Powell",
            bounds=list(zip(log_lo, log_hi)),
            options={"maxfev": maxfev, "xtol": 1e-3, "ftol": 1e-7},
        )
        if np.isfinite(result.fun) and result.fun < best_value:
            best_theta, best_value = np.clip(result.x, log_lo, log_hi), result.fun
    if best_theta is None or not np.isfinite(best_value):
        raise GPFitError("hyperparameter search failed: no restart could be evaluated")
    return best_theta, best_value


def optimize_hyperparameters(
    inputs,
    targets,
    bounds: GPHyperBounds = GPHyperBounds(),
    n_restarts: int = 5,
    rng: np.random.Generator | None = None,
    initial: tuple[KernelParams, float] | None = None,
) -> tuple[KernelParams, float]:
    """Fit (lengthscales, variance, noise) by maximum marginal likelihood.

    Returns the best candidate over `n_restarts` local searches from random
    starts in the log-scale box (plus a warm start when `initial` is given).
    """
    rng = rng if rng is not None else np.random.default_rng()
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(targets, dtype=float).ravel()
    d = X.shape[1]

    log_lo = np.log(np.array([bounds.lengthscale[0]] * d + [bounds.variance[0], bounds.noise[0]]))
    log_hi = np.log(np.array([bounds.lengthscale[1]] * d + [bounds.variance[1], bounds.noise[1]]))

    def negative_lml(theta: np.ndarray) -> float:
        params = KernelParams(lengthscales=np.exp(theta[:d]), variance=float(np.exp(theta[d])))
        try:
            value = log_marginal_likelihood(X, y, params, float(np.exp(theta[d + 1])))
        except GPFitError:
            return np.inf
        return -value if np.isfinite(value) else np.inf

    theta_init = None
    if initial is not None:
        params0, noise0 = initial
        theta_init = np.log(np.concatenate([params0.lengthscales, [params0.variance, noise0]]))

    theta, _ = maximize_over_box(negative_lml, log_lo, log_hi, n_restarts, rng, theta_init)
    return (
        KernelParams(lengthscales=np.exp(theta[:d]), variance=float(np.exp(theta[d]))),
        float(np.exp(theta[d + 1])),
    )


def gp_batch_correlation(post: GPPosterior, X_batch) -> np.ndarray:
    """Posterior correlation matrix of noisy observations at the rows of
    X_batch (observation noise on the diagonal before normalizing)."""
    X = np.atleast_2d(np.asarray(X_batch, dtype=float))
    prior = matern52_matrix(X, X, post.params)
    K_star = matern52_matrix(X, post.train_inputs, post.params)
    V = cho_solve((post.chol, True), K_star.T)
    cov = prior - K_star @ V
    cov = 0.5 * (cov + cov.T) + post.noise * np.eye(X.shape[0])
    sd = np.sqrt(np.maximum(np.diag(cov), 1e-300))
    corr = cov / np.outer(sd, sd)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    return corr
