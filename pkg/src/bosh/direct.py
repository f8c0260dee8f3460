"""Derivative-free global maximization over the unit box (dividing
rectangles), plus the greedy batch builder that sweeps the discrete
realization choice.

The optimizer trisects potentially optimal rectangles selected by the
classical lower-convex-hull rule; everything is deterministic, ties break
toward the oldest rectangle, and the evaluation sequence for a smaller
budget is a prefix of the sequence for a larger one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .acquisition import (
    AcquisitionContext,
    bosh_batch_score,
    log_det_correlation,
    mumbo,
    mumbo_from_moments,
)
from .exceptions import ObjectiveEvaluationError
from .gp import matern52_shape
from .hgp import NewRealization, _belief_with_cache, batch_correlation

_HULL_SLACK = 1e-4


def _half_diagonal(sides: np.ndarray) -> float:
    # Sum in sorted order so rectangles with the same side multiset get the
    # same float size regardless of which dimensions were divided.
    return 0.5 * math.sqrt(float(np.sum(np.sort(sides) ** 2)))


@dataclass
class Rectangle:
    """One cell of the unit-box partition: its center, per-dimension side
    lengths (exact powers of 1/3), the objective value at the center, and a
    creation index used for deterministic tie-breaking."""

    center: np.ndarray
    sides: np.ndarray
    value: float
    index: int
    size: float = 0.0

    def __post_init__(self):
        self.size = _half_diagonal(self.sides)


class _BudgetExhausted(Exception):
    pass


class _Evaluator:
    """Budgeted objective wrapper tracking the best evaluated center."""

    def __init__(self, objective, max_evals: int):
        self.objective = objective
        self.max_evals = max_evals
        self.count = 0
        self.best_x = None
        self.best_value = -math.inf

    def __call__(self, x: np.ndarray) -> float:
        if self.count >= self.max_evals:
            raise _BudgetExhausted
        value = float(self.objective(x))
        self.count += 1
        if not math.isfinite(value):
            raise ObjectiveEvaluationError(f"objective returned {value} at x={x}", x=x.copy())
        if value > self.best_value:
            self.best_value = value
            self.best_x = x.copy()
        return value


def _potentially_optimal(rects: list[Rectangle], best_value: float) -> list[Rectangle]:
    """Classical selection: per-size best rectangles on the lower convex
    hull of (size, -value), with the slack test against the incumbent."""
    groups: dict[float, Rectangle] = {}
    for r in rects:
        held = groups.get(r.size)
        if held is None or (-r.value, r.index) < (-held.value, held.index):
            groups[r.size] = r
    sizes = sorted(groups)
    f = {s: -groups[s].value for s in sizes}  # minimization view
    f_min = -best_value

    chosen = []
    for i, s in enumerate(sizes):
        fj = f[s]
        left = max(((fj - f[t]) / (s - t) for t in sizes[:i]), default=-math.inf)
        right = min(((f[t] - fj) / (t - s) for t in sizes[i + 1 :]), default=math.inf)
        if left > right:
            continue
        if i + 1 < len(sizes):
            if f_min != 0.0:
                ok = _HULL_SLACK <= (f_min - fj) / abs(f_min) + (s / abs(f_min)) * right
            else:
                ok = fj <= s * right
            if not ok:
                continue
        chosen.append(groups[s])
    return chosen


def _trisect(rect: Rectangle, evaluator: _Evaluator, rects: list[Rectangle], counter: list[int]):
    """Divide a rectangle along each of its longest sides, best probe first."""
    longest = float(np.max(rect.sides))
    dims = [int(i) for i in np.flatnonzero(rect.sides == longest)]
    delta = longest / 3.0

    probes = {}
    for dim in dims:
        for sign in (1.0, -1.0):
            x = rect.center.copy()
            x[dim] += sign * delta
            probes[(dim, sign)] = (x, evaluator(x))  # may raise _BudgetExhausted

    order = sorted(dims, key=lambda dim: (-max(probes[(dim, 1.0)][1], probes[(dim, -1.0)][1]), dim))
    sides = rect.sides.copy()
    for dim in order:
        sides = sides.copy()
        sides[dim] /= 3.0
        for sign in (1.0, -1.0):
            x, value = probes[(dim, sign)]
            counter[0] += 1
            rects.append(Rectangle(center=x, sides=sides.copy(), value=value, index=counter[0]))
    rect.sides = sides
    rect.size = _half_diagonal(sides)


def direct_maximize(objective, d: int, max_evals: int) -> tuple[np.ndarray, float]:
    """Globally maximize `objective` over [0, 1]^d with at most `max_evals`
    objective evaluations; returns (best point, best value)."""
    if max_evals < 1:
        raise ValueError("max_evals must be >= 1")
    evaluator = _Evaluator(objective, max_evals)
    counter = [0]
    rects: list[Rectangle] = []
    try:
        center = np.full(d, 0.5)
        rects.append(Rectangle(center=center, sides=np.ones(d), value=evaluator(center), index=0))
        while evaluator.count < max_evals:
            selected = _potentially_optimal(rects, evaluator.best_value)
            if not selected:
                break
            for rect in selected:
                _trisect(rect, evaluator, rects, counter)
    except _BudgetExhausted:
        pass
    return evaluator.best_x, evaluator.best_value


@dataclass(frozen=True)
class BatchProposal:
    """A proposed batch of (location, realization) pairs and its score."""

    elements: tuple
    score: float


class _GreedyScorer:
    """Incremental batch scoring against a fixed prefix of chosen elements.

    The prefix's summed single-pair scores, correlation block, and solved
    cross-covariance vectors are cached; each candidate then costs one
    bivariate prediction plus one correlation column.
    """

    def __init__(self, ctx: AcquisitionContext):
        self.ctx = ctx
        self.post = ctx.posterior
        self.fixed: list = []
        self.fixed_mumbo = 0.0
        self.fixed_logdet = 0.0
        self._corr_chol = None
        self._cross_solved = None
        self._fixed_sd = None

    def add(self, z, z_mumbo: float):
        self.fixed.append(z)
        self.fixed_mumbo += z_mumbo
        corr = batch_correlation(self.post, self.fixed)
        self.fixed_logdet = log_det_correlation(corr)
        self._corr_chol = np.linalg.cholesky(0.5 * (corr + corr.T))
        p = self.post.params
        cross = np.stack([self.post.cross_observations(x, s) for x, s in self.fixed])
        self._cross_solved = self.post.solve(cross.T)  # (n, B)
        latent_var = np.array(
            [
                p.upper_variance + p.lower_variance - float(cross[i] @ self._cross_solved[:, i])
                for i in range(len(self.fixed))
            ]
        )
        self._fixed_sd = np.sqrt(np.maximum(latent_var, 0.0) + p.noise)
        self._fixed_X = np.stack(
            [np.atleast_1d(np.asarray(x, dtype=float)) for x, _ in self.fixed]
        )

    def _same_mask(self, s) -> np.ndarray:
        if isinstance(s, NewRealization):
            return np.array([sf is s for _, sf in self.fixed])
        return np.array(
            [(not isinstance(sf, NewRealization)) and sf == s for _, sf in self.fixed]
        )

    def score(self, x: np.ndarray, s) -> float:
        """Batch score of fixed + [(x, s)]; for an empty prefix this is just
        the single-pair score."""
        belief, k_new, _ = _belief_with_cache(self.post, x, s)
        z_mumbo = mumbo_from_moments(
            belief.mean_g, belief.var_g, belief.corr, self.ctx.gstar.values
        )
        if not self.fixed:
            return z_mumbo
        p = self.post.params
        sd_new = math.sqrt(max(belief.var_y, 1e-300))

        shape = matern52_shape(np.atleast_2d(x), self._fixed_X, p.shared_lengthscales)[0]
        prior = (p.upper_variance + self._same_mask(s) * p.lower_variance) * shape
        cov = prior - k_new @ self._cross_solved
        corr_col = cov / (self._fixed_sd * sd_new)

        w = solve_triangular(self._corr_chol, corr_col, lower=True, check_finite=False)
        schur = max(1.0 - float(w @ w), 1e-300)
        return self.fixed_mumbo + 0.5 * self.fixed_logdet + 0.5 * math.log(schur) + z_mumbo


def propose_batch(ctx: AcquisitionContext, B: int, max_evals_per_dim: int = 100) -> BatchProposal:
    """Greedily build a batch of B (location, realization) pairs.

    Each slot sweeps every candidate realization (pool members, plus a fresh
    NEW handle whenever the context's candidate pool offers one), maximizing
    over locations with one DIRECT run per realization; the best pair joins
    the batch. NEW handles are distinct across slots, so two NEW picks are
    two different realizations.
    """
    if B < 1:
        raise ValueError("B must be >= 1")
    d = ctx.posterior.dim
    budget = max_evals_per_dim * d
    scorer = _GreedyScorer(ctx)
    wants_new = any(isinstance(c, NewRealization) for c in ctx.candidate_pool)
    pool = [c for c in ctx.candidate_pool if not isinstance(c, NewRealization)]
    if not pool and not wants_new:
        raise ValueError("candidate pool is empty")

    elements = []
    for _ in range(B):
        candidates = pool + ([NewRealization()] if wants_new else [])
        best = None
        for s in candidates:
            x, value = direct_maximize(lambda x, s=s: scorer.score(x, s), d, budget)
            if best is None or value > best[2]:
                best = (x, s, value)
        x, s, _ = best
        elements.append((x, s))
        scorer.add((x, s), mumbo((x, s), ctx))

    return BatchProposal(elements=tuple(elements), score=bosh_batch_score(elements, ctx))
