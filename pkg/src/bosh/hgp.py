"""Two-level GP surrogate over (location, realization) pairs.

The latent objective g carries a shared Matern 5/2 kernel (the "upper"
layer); every realization f_s deviates from g by an independent draw from a
second Matern 5/2 kernel (the "lower" layer). Observations of different
realizations therefore share the upper covariance only, while repeat
observations of one realization share both. Fitting reduces to a standard
GP on augmented inputs, so prediction cost matches an ordinary GP with one
dense factorization per refit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .exceptions import GPFitError, IdentifiabilityError
from .gp import (
    KernelParams,
    cholesky_with_jitter,
    matern52,
    matern52_matrix,
    matern52_shape,
    maximize_over_box,
)

_new_counter = itertools.count()


class NewRealization:
    """Stand-in id for a realization that has not been instantiated yet.

    Instances compare by identity: two fresh draws are distinct realizations
    and share only the upper-layer covariance, while the same handle used
    twice refers to one (still unseen) realization.
    """

    __slots__ = ("_label",)

    def __init__(self):
        self._label = next(_new_counter)

    def __repr__(self):
        return f"NEW#{self._label}"


#: Canonical "evaluate a fresh realization" candidate.
NEW = NewRealization()


class _LatentTag:
    """Reserved tag for the latent objective; its covariance with anything
    is the upper kernel alone."""

    __slots__ = ()

    def __repr__(self):
        return "LATENT"


LATENT = _LatentTag()

RealizationId = int | NewRealization


@dataclass(frozen=True)
class HGPParams:
    """Hyperparameters of the two-level model. Lengthscales are shared
    between the upper and lower kernels; noise is one observation variance
    for every realization."""

    shared_lengthscales: np.ndarray
    upper_variance: float
    lower_variance: float
    noise: float

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.shared_lengthscales, dtype=float))
        object.__setattr__(self, "shared_lengthscales", ls)
        if not np.all(ls > 0):
            raise ValueError("shared lengthscales must be positive")
        for name in ("upper_variance", "lower_variance", "noise"):
            if not (getattr(self, name) > 0 and np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} must be positive and finite")
        object.__setattr__(self, "_upper", KernelParams(ls, float(self.upper_variance)))
        object.__setattr__(self, "_lower", KernelParams(ls, float(self.lower_variance)))

    @property
    def dim(self) -> int:
        return self.shared_lengthscales.size

    def upper_kernel(self) -> KernelParams:
        return self._upper

    def lower_kernel(self) -> KernelParams:
        return self._lower


@dataclass(frozen=True)
class Observation:
    """One noisy evaluation: location in the unit box, realization id, value."""

    x: np.ndarray
    s: int
    y: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        object.__setattr__(self, "x", x)
        if np.any(x < -1e-9) or np.any(x > 1 + 1e-9):
            raise ValueError(f"observation location {x} outside the unit box")
        if isinstance(self.s, NewRealization):
            raise ValueError("observations must reference an instantiated realization")


def _same_realization(s, s2) -> bool:
    if isinstance(s, NewRealization) or isinstance(s2, NewRealization):
        return s is s2
    return s == s2


def hgp_cov(x, s, x2, s2, params: HGPParams) -> float:
    """Prior covariance between f_s(x) and f_{s2}(x2); either id may be
    LATENT to query the latent objective, or a NewRealization handle."""
    upper = matern52(x, x2, params.upper_kernel())
    if s is LATENT or s2 is LATENT:
        return upper
    if _same_realization(s, s2):
        return upper + matern52(x, x2, params.lower_kernel())
    return upper


@dataclass(frozen=True)
class BivariateBelief:
    """Joint Gaussian over (noisy observation of realization s at x,
    latent objective at x)."""

    mean_y: float
    mean_g: float
    var_y: float
    var_g: float
    corr: float


@dataclass(frozen=True)
class HGPPosterior:
    """Fitted surrogate: observations plus a cached factorization of the
    joint kernel matrix. Immutable; reads are thread-safe."""

    observations: tuple[Observation, ...]
    params: HGPParams
    X: np.ndarray
    S: np.ndarray
    y: np.ndarray
    chol: np.ndarray
    alpha: np.ndarray
    jitter: float

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def realizations(self) -> tuple[int, ...]:
        seen = dict.fromkeys(int(s) for s in self.S)
        return tuple(seen)

    def cross_observations(self, x, s) -> np.ndarray:
        """Prior covariance of f_s(x) against each training latent."""
        return self._cross_pair(x, s)[0]

    def _cross_pair(self, x, s) -> tuple[np.ndarray, np.ndarray]:
        """(covariance of f_s(x) with training latents, same for g(x)).

        Both layers share lengthscales, so one shape row serves both.
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        p = self.params
        shape = matern52_shape(x, self.X, p.shared_lengthscales)[0]
        k_g = p.upper_variance * shape
        if isinstance(s, (NewRealization, _LatentTag)):
            return k_g, k_g
        mask = self.S == s
        if not mask.any():
            return k_g, k_g
        k_y = k_g + mask * (p.lower_variance * shape)
        return k_y, k_g

    def solve(self, v: np.ndarray) -> np.ndarray:
        """Apply the inverse of (joint kernel + noise I)."""
        return cho_solve((self.chol, True), v)

    def predict_latent_batch(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Mean and variance of the latent objective at each row of X."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        K = matern52_matrix(X, self.X, self.params.upper_kernel())
        means = K @ self.alpha
        V = cho_solve((self.chol, True), K.T)
        variances = self.params.upper_variance - np.sum(K * V.T, axis=1)
        return means, np.maximum(variances, 0.0)


def _joint_kernel(X: np.ndarray, S: np.ndarray, params: HGPParams) -> np.ndarray:
    """n x n prior covariance over observed latents. The two layers share
    lengthscales, so one shape matrix serves both."""
    shape = matern52_shape(X, X, params.shared_lengthscales)
    same = S[:, None] == S[None, :]
    return (params.upper_variance + same * params.lower_variance) * shape


def _fit_arrays(X: np.ndarray, S: np.ndarray, y: np.ndarray, params: HGPParams):
    A = _joint_kernel(X, S, params) + params.noise * np.eye(X.shape[0])
    L, jitter = cholesky_with_jitter(A)
    alpha = cho_solve((L, True), y)
    return L, alpha, jitter


def fit_hgp(observations, params: HGPParams) -> HGPPosterior:
    """Condition the two-level prior on a list of Observations."""
    obs = tuple(observations)
    if not obs:
        raise ValueError("fit_hgp requires at least one observation")
    X = np.stack([o.x for o in obs])
    S = np.array([o.s for o in obs], dtype=int)
    y = np.array([o.y for o in obs], dtype=float)
    if X.shape[1] != params.dim:
        raise ValueError("observation dimension disagrees with kernel lengthscales")
    L, alpha, jitter = _fit_arrays(X, S, y, params)
    return HGPPosterior(
        observations=obs, params=params, X=X, S=S, y=y, chol=L, alpha=alpha, jitter=jitter
    )


def _belief_with_cache(post: HGPPosterior, x, s) -> tuple[BivariateBelief, np.ndarray, np.ndarray]:
    """Bivariate conditional plus the candidate's cross vector and its
    solved image, which batch scorers reuse."""
    p = post.params
    k_y, k_g = post._cross_pair(x, s)
    solved = cho_solve((post.chol, True), np.stack([k_y, k_g], axis=1), check_finite=False)
    v_y, v_g = solved[:, 0], solved[:, 1]

    mean_y = float(k_y @ post.alpha)
    mean_g = float(k_g @ post.alpha)
    var_f = p.upper_variance + p.lower_variance - float(k_y @ v_y)
    var_y = max(var_f, 0.0) + p.noise
    var_g = max(p.upper_variance - float(k_g @ v_g), 0.0)
    cov_yg = p.upper_variance - float(k_y @ v_g)

    denom = math.sqrt(max(var_y * var_g, 1e-300))
    corr = min(max(cov_yg / denom, -1.0), 1.0)
    if p.noise > 0:
        corr = min(max(corr, -1.0 + 1e-12), 1.0 - 1e-12)
    belief = BivariateBelief(mean_y=mean_y, mean_g=mean_g, var_y=var_y, var_g=var_g, corr=corr)
    return belief, k_y, v_y


def joint_predict(post: HGPPosterior, x, s: RealizationId) -> BivariateBelief:
    """Exact bivariate Gaussian conditional for (noisy observation of
    realization s at x, latent objective at x).

    For a NewRealization handle the cross-covariance to every existing
    observation uses the upper kernel only.
    """
    return _belief_with_cache(post, x, s)[0]


def predict_g(post: HGPPosterior, x) -> tuple[float, float]:
    """Marginal mean and variance of the latent objective at one point."""
    means, variances = post.predict_latent_batch(np.atleast_2d(np.asarray(x, dtype=float)))
    return float(means[0]), float(variances[0])


def batch_correlation(post: HGPPosterior, batch) -> np.ndarray:
    """Posterior correlation matrix of the noisy observations that a batch
    of (x, s) pairs would produce.

    Observation noise enters each diagonal before normalizing, so duplicate
    pairs stay strictly below unit correlation whenever noise is positive.
    """
    batch = list(batch)
    if not batch:
        raise ValueError("batch must contain at least one element")
    p = post.params
    B = len(batch)
    upper, lower = p.upper_kernel(), p.lower_kernel()

    cross = np.stack([post.cross_observations(x, s) for x, s in batch])
    X_b = np.stack([np.atleast_1d(np.asarray(x, dtype=float)) for x, _ in batch])
    prior = matern52_matrix(X_b, X_b, upper)
    same = np.array(
        [[_same_realization(batch[i][1], batch[j][1]) for j in range(B)] for i in range(B)]
    )
    prior = prior + same * matern52_matrix(X_b, X_b, lower)

    cov = prior - cross @ post.solve(cross.T)
    cov = 0.5 * (cov + cov.T) + p.noise * np.eye(B)
    sd = np.sqrt(np.maximum(np.diag(cov), 1e-300))
    if np.any(sd <= 0):
        raise ValueError("zero predictive variance in batch correlation")
    corr = cov / np.outer(sd, sd)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    return corr


@dataclass(frozen=True)
class HGPHyperBounds:
    """Natural-scale box for the d+3 free hyperparameters."""

    lengthscale: tuple[float, float] = (1e-2, 10.0)
    upper_variance: tuple[float, float] = (1e-4, 1e2)
    lower_variance: tuple[float, float] = (1e-4, 1e2)
    noise: tuple[float, float] = (1e-6, 1.0)


def _lml_arrays(X: np.ndarray, S: np.ndarray, y: np.ndarray, params: HGPParams) -> float:
    L, alpha, _ = _fit_arrays(X, S, y, params)
    return float(
        -0.5 * y @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * y.size * math.log(2.0 * math.pi)
    )


def hgp_log_marginal_likelihood(observations, params: HGPParams) -> float:
    """Log evidence of the observations under the two-level prior."""
    obs = tuple(observations)
    X = np.stack([o.x for o in obs])
    S = np.array([o.s for o in obs], dtype=int)
    y = np.array([o.y for o in obs], dtype=float)
    return _lml_arrays(X, S, y, params)


def fit_hgp_hyperparameters(
    observations,
    bounds: HGPHyperBounds = HGPHyperBounds(),
    n_restarts: int = 5,
    rng: np.random.Generator | None = None,
    initial: HGPParams | None = None,
) -> HGPParams:
    """Maximize the joint marginal likelihood over (shared lengthscales,
    upper variance, lower variance, noise).

    Requires observations on at least two distinct realizations; with one,
    the upper and lower variances are not separable.
    """
    rng = rng if rng is not None else np.random.default_rng()
    obs = tuple(observations)
    if len({o.s for o in obs}) < 2:
        raise IdentifiabilityError(
            "hyperparameter fit needs observations on >= 2 realizations to "
            "separate the upper and lower variances"
        )
    X = np.stack([o.x for o in obs])
    S = np.array([o.s for o in obs], dtype=int)
    y = np.array([o.y for o in obs], dtype=float)
    d = X.shape[1]

    log_lo = np.log(
        np.array(
            [bounds.lengthscale[0]] * d
            + [bounds.upper_variance[0], bounds.lower_variance[0], bounds.noise[0]]
        )
    )
    log_hi = np.log(
        np.array(
            [bounds.lengthscale[1]] * d
            + [bounds.upper_variance[1], bounds.lower_variance[1], bounds.noise[1]]
        )
    )

    def to_params(theta: np.ndarray) -> HGPParams:
        return HGPParams(
            shared_lengthscales=np.exp(theta[:d]),
            upper_variance=float(np.exp(theta[d])),
            lower_variance=float(np.exp(theta[d + 1])),
            noise=float(np.exp(theta[d + 2])),
        )

    def negative_lml(theta: np.ndarray) -> float:
        try:
            value = _lml_arrays(X, S, y, to_params(theta))
        except (GPFitError, ValueError):
            return np.inf
        return -value if np.isfinite(value) else np.inf

    theta_init = None
    if initial is not None:
        theta_init = np.log(
            np.concatenate(
                [
                    initial.shared_lengthscales,
                    [initial.upper_variance, initial.lower_variance, initial.noise],
                ]
            )
        )

    theta, _ = maximize_over_box(negative_lml, log_lo, log_hi, n_restarts, rng, theta_init)
    return to_params(theta)
