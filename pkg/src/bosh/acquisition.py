"""Information-theoretic acquisition scores.

The single-point score measures how much a noisy evaluation of one
realization would tell us about the latent maximum value: the bivariate
posterior over (observation, latent objective) is reduced to a correlation,
and the entropy drop from conditioning on sampled maxima is integrated with
one-dimensional quadrature. Batches are scored by the same sum plus half the
log-determinant of the batch's predictive correlation matrix, a lower bound
on the joint information that pays for redundancy. Expected improvement and
the single-output max-value score serve the baselines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import log_ndtr, ndtr
from scipy.stats import qmc

from .exceptions import AcquisitionNumericsError, GstarSamplingError
from .hgp import HGPPosterior, batch_correlation, joint_predict

_H_STD = 0.5 * math.log(2.0 * math.pi * math.e)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_GAMMA_CLAMP = 8.0

# 64-node Gauss-Hermite rule, pre-mapped to the standardized axis: for
# theta ~ N(0,1), E[h(theta)] ~= sum(_GH_WEIGHT * h(_GH_THETA)).
_GH_NODES, _GH_RAW_W = np.polynomial.hermite.hermgauss(64)
_GH_THETA = math.sqrt(2.0) * _GH_NODES
_GH_WEIGHT = _GH_RAW_W / math.sqrt(math.pi)

_TRAPZ_THETA = np.linspace(-10.0, 10.0, 2000)


@dataclass(frozen=True)
class MaxValueSamples:
    """Approximate draws of the latent objective's maximum value, with the
    Gumbel fit they came from."""

    values: np.ndarray
    grid_size: int
    gumbel_location: float
    gumbel_scale: float

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", values)
        if values.size < 1 or not np.all(np.isfinite(values)):
            raise ValueError("max-value samples must be non-empty and finite")
        if np.any(values < self.gumbel_location - 10.0 * self.gumbel_scale):
            raise ValueError("max-value sample implausibly far below the fitted location")


@dataclass(frozen=True)
class AcquisitionContext:
    """Everything a batch proposal needs: the fitted surrogate, fresh
    max-value samples, and the candidate realizations (pool plus NEW)."""

    posterior: HGPPosterior
    gstar: MaxValueSamples
    candidate_pool: tuple


def sample_gstar(
    post,
    n_samples: int = 10,
    grid_size: int = 1000,
    rng: np.random.Generator | None = None,
) -> MaxValueSamples:
    """Sample the posterior maximum of the latent objective.

    Evaluates the latent marginals on a low-discrepancy grid (plus every
    observed location), forms the independence approximation of the max CDF,
    fits a Gumbel by matching the quartile levels 0.25 and 0.75, and draws
    by inverse CDF.
    """
    if n_samples < 1 or grid_size < 1:
        raise ValueError("n_samples and grid_size must be >= 1")
    rng = rng if rng is not None else np.random.default_rng()
    d = post.dim
    grid = qmc.Halton(d, scramble=True, seed=rng).random(grid_size)
    train = post.X if hasattr(post, "X") else post.train_inputs
    grid = np.vstack([grid, np.clip(train, 0.0, 1.0)])

    means, variances = post.predict_latent_batch(grid)
    sd = np.sqrt(np.maximum(variances, 0.0))
    live = sd > 1e-12
    if not live.any():
        raise GstarSamplingError("all grid points have zero predictive deviation")

    mu_l, sd_l = means[live], sd[live]
    mu_dead = means[~live]

    def log_cdf_max(y: float) -> float:
        if mu_dead.size and y < mu_dead.max():
            return -np.inf
        return float(np.sum(log_ndtr((y - mu_l) / sd_l)))

    lo = float(np.min(means - 8.0 * sd))
    hi = float(np.max(means + 8.0 * sd))
    q25 = brentq(lambda y: log_cdf_max(y) - math.log(0.25), lo, hi, xtol=1e-10)
    q75 = brentq(lambda y: log_cdf_max(y) - math.log(0.75), lo, hi, xtol=1e-10)

    scale = (q75 - q25) / (math.log(math.log(4.0)) - math.log(math.log(4.0 / 3.0)))
    location = q25 + scale * math.log(math.log(4.0))
    u = rng.uniform(size=n_samples)
    values = location - scale * np.log(-np.log(u))
    return MaxValueSamples(
        values=values, grid_size=grid_size, gumbel_location=location, gumbel_scale=scale
    )


def _mes_closed_form(gamma: np.ndarray) -> np.ndarray:
    """Entropy reduction for perfect observation/latent correlation: the
    upper-truncated-normal closed form, elementwise over gamma."""
    gamma = np.asarray(gamma, dtype=float)
    log_cdf = log_ndtr(gamma)
    log_pdf = -0.5 * gamma**2 - _LOG_SQRT_2PI
    ratio = np.exp(log_pdf - log_cdf)
    return gamma * ratio / 2.0 - log_cdf


def mumbo_from_moments(
    mean_g: float,
    var_g: float,
    corr: float,
    gstar_values: np.ndarray,
    rule: str = "gauss-hermite",
) -> float:
    """Average information about the latent maximum carried by one noisy
    observation, given its correlation with the latent value at that point.

    For each sampled maximum, the standardized conditional density of the
    observation is phi(theta) * Phi((gamma - rho*theta)/sqrt(1-rho^2)) /
    Phi(gamma); the score averages the entropy gap to the unconditional
    standard normal. Near-unit correlation falls back to the truncated-
    normal closed form.
    """
    sd_g = math.sqrt(max(var_g, 1e-300))
    gamma = np.clip((np.asarray(gstar_values, dtype=float) - mean_g) / sd_g, -_GAMMA_CLAMP, _GAMMA_CLAMP)
    rho = corr
    if abs(rho) >= 1.0 - 1e-9:
        return float(np.mean(_mes_closed_form(gamma)))

    if rule == "gauss-hermite":
        theta, weight = _GH_THETA, _GH_WEIGHT
        log_phi = -0.5 * theta**2 - _LOG_SQRT_2PI
        u = (gamma[:, None] - rho * theta[None, :]) / math.sqrt(1.0 - rho * rho)
        log_q = log_ndtr(u) - log_ndtr(gamma)[:, None]
        log_p = log_phi[None, :] + log_q
        q = np.exp(log_q)
        integrand = np.where(q > 0.0, q * log_p, 0.0)
        entropy = -integrand @ weight
    elif rule == "trapezoid":
        theta = _TRAPZ_THETA
        log_phi = -0.5 * theta**2 - _LOG_SQRT_2PI
        u = (gamma[:, None] - rho * theta[None, :]) / math.sqrt(1.0 - rho * rho)
        log_p = log_phi[None, :] + log_ndtr(u) - log_ndtr(gamma)[:, None]
        p = np.exp(log_p)
        entropy = -np.trapezoid(np.where(p > 0.0, p * log_p, 0.0), theta, axis=1)
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}")

    return float(np.mean(_H_STD - entropy))


def mumbo(z, ctx: AcquisitionContext, rule: str = "gauss-hermite") -> float:
    """Single-pair score for z = (x, realization id) under the context's
    surrogate and max-value samples."""
    x, s = z
    belief = joint_predict(ctx.posterior, x, s)
    return mumbo_from_moments(belief.mean_g, belief.var_g, belief.corr, ctx.gstar.values, rule)


def log_det_correlation(corr: np.ndarray) -> float:
    """Log-determinant of a correlation matrix via its Cholesky factor."""
    corr = 0.5 * (corr + corr.T)
    try:
        L = np.linalg.cholesky(corr)
    except np.linalg.LinAlgError:
        sign, logdet = np.linalg.slogdet(corr)
        if sign <= 0 or not np.isfinite(logdet):
            raise AcquisitionNumericsError(
                "batch correlation matrix is not positive definite after symmetrization"
            )
        return float(logdet)
    return float(2.0 * np.sum(np.log(np.diag(L))))


def bosh_batch_score(batch, ctx: AcquisitionContext, rule: str = "gauss-hermite") -> float:
    """Batch score: half the log-determinant of the predictive correlation
    matrix plus the summed single-pair scores. Never exceeds the plain sum
    (the determinant of a correlation matrix is at most one)."""
    batch = list(batch)
    corr = batch_correlation(ctx.posterior, batch)
    total = 0.5 * log_det_correlation(corr)
    for z in batch:
        total += mumbo(z, ctx, rule)
    return float(total)


def expected_improvement(x, post, incumbent: float) -> float:
    """Expected improvement of the latent prediction at x over the incumbent."""
    mean, variance = post.predict(x)
    sd = math.sqrt(max(variance, 0.0))
    if sd < 1e-15:
        return max(mean - incumbent, 0.0)
    u = (mean - incumbent) / sd
    return float(sd * (u * ndtr(u) + math.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)))


def mes(x, post, gstar: MaxValueSamples) -> float:
    """Max-value entropy score for a single-output GP: the perfect-
    correlation closed form averaged over the sampled maxima."""
    mean, variance = post.predict(x)
    sd = math.sqrt(max(variance, 1e-300))
    gamma = np.clip((gstar.values - mean) / sd, -_GAMMA_CLAMP, _GAMMA_CLAMP)
    return float(np.mean(_mes_closed_form(gamma)))
