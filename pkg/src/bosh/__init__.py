"""Bayesian optimization over a growing pool of stochastic objective
realizations.

The surrogate is a two-level Gaussian process: a latent objective plus
per-realization perturbations, fit jointly over (location, realization)
pairs. Batches of evaluations are chosen by an information-theoretic score
(mutual information with the latent maximum, plus a log-determinant
diversity term) maximized with the DIRECT global optimizer. Fixed- and
resampled-strategy baselines, two stochastic benchmarks, and an experiment
runner round out the toolkit.
"""

__version__ = "0.1.0"

from . import acquisition, benchmarks, direct, engine, gp, hgp

__all__ = ["acquisition", "benchmarks", "direct", "engine", "gp", "hgp", "__version__"]
