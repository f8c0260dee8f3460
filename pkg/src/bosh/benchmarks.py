"""Desk-scale stochastic benchmarks.

Two objectives with very different characters share one interface: a
synthetic d=1 family drawn from the surrogate's own generative model (exact
truth available on a dense grid), and a d=4 two-warehouse delivery simulator
(truth estimated by a reserved high-replication run). Realizations are
minted on demand and stay internally consistent: querying the same
realization at the same location twice gives the same underlying value.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve

from .gp import KernelParams, cholesky_with_jitter, matern52_matrix

# Labeled sub-stream offsets under a benchmark's seed.
_STREAM_LATENT = 0
_STREAM_REALIZATION = 1
_STREAM_NOISE = 2
_STREAM_SCENARIO = 3

# Reserved entropy for the warehouse truth oracle, disjoint from every
# optimization stream.
_ORACLE_ENTROPY = 0x7A93_5C21
_ORACLE_DAYS = 100


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


class SyntheticHGPBenchmark:
    """A d=1 stochastic objective drawn from the two-level model itself.

    The latent truth is one draw from the upper kernel on a dense grid
    (linearly interpolated between grid points); each minted realization
    adds an exact sequentially-conditioned draw from the lower kernel, and
    every evaluation adds fresh Gaussian noise. The grid maximum is the
    exact optimum oracle.
    """

    d = 1

    def __init__(
        self,
        seed: int = 0,
        upper_variance: float = 1.0,
        lengthscale: float = 0.1,
        lower_variance: float = 0.5,
        noise_variance: float = 0.01,
        grid_size: int = 1000,
    ):
        if lower_variance < 0 or noise_variance < 0:
            raise ValueError("variances must be non-negative")
        self.seed = int(seed)
        self.upper_variance = float(upper_variance)
        self.lengthscale = float(lengthscale)
        self.lower_variance = float(lower_variance)
        self.noise_variance = float(noise_variance)
        self.grid = np.linspace(0.0, 1.0, grid_size)

        upper = KernelParams(lengthscales=[lengthscale], variance=upper_variance)
        K = matern52_matrix(self.grid[:, None], self.grid[:, None], upper)
        L, _ = cholesky_with_jitter(K + 1e-10 * np.eye(grid_size))
        self.g_values = L @ _stream(self.seed, _STREAM_LATENT).standard_normal(grid_size)

        self._noise_rng = _stream(self.seed, _STREAM_NOISE)
        self._realizations: dict[int, dict] = {}

    def mint_realization(self) -> int:
        sid = len(self._realizations)
        self._realizations[sid] = {
            "rng": _stream(self.seed, _STREAM_REALIZATION, sid),
            "xs": [],
            "deltas": [],
            "cache": {},
        }
        return sid

    @property
    def realization_count(self) -> int:
        return len(self._realizations)

    def _delta(self, sid: int, x: float) -> float:
        """Perturbation of realization sid at x, conditioned exactly on every
        previous query of the same realization."""
        if self.lower_variance == 0.0:
            return 0.0
        state = self._realizations[sid]
        if x in state["cache"]:
            return state["cache"][x]
        lower = KernelParams(lengthscales=[self.lengthscale], variance=self.lower_variance)
        if state["xs"]:
            X = np.asarray(state["xs"])[:, None]
            K = matern52_matrix(X, X, lower) + 1e-12 * np.eye(len(state["xs"]))
            L, _ = cholesky_with_jitter(K)
            k = matern52_matrix([[x]], X, lower)[0]
            solved = cho_solve((L, True), np.asarray(state["deltas"]))
            mean = float(k @ solved)
            var = self.lower_variance - float(k @ cho_solve((L, True), k))
        else:
            mean, var = 0.0, self.lower_variance
        draw = mean + math.sqrt(max(var, 0.0)) * state["rng"].standard_normal()
        state["xs"].append(x)
        state["deltas"].append(draw)
        state["cache"][x] = draw
        return draw

    def evaluate(self, x, s: int) -> float:
        """One noisy evaluation of realization s at x in [0, 1]."""
        if s not in self._realizations:
            raise ValueError(f"unknown realization id {s}")
        x = float(np.atleast_1d(np.asarray(x, dtype=float))[0])
        y = self.true_value(x) + self._delta(s, x)
        if self.noise_variance > 0:
            y += math.sqrt(self.noise_variance) * self._noise_rng.standard_normal()
        return float(y)

    def true_value(self, x) -> float:
        x = float(np.atleast_1d(np.asarray(x, dtype=float))[0])
        return float(np.interp(x, self.grid, self.g_values))

    def true_optimum(self) -> tuple[np.ndarray, float]:
        i = int(np.argmax(self.g_values))
        return np.array([self.grid[i]]), float(self.g_values[i])


def default_order_intensity(t: float) -> float:
    """Orders per minute over a day: quiet overnight, peaking at midday.

    The peak rate, truck speed, and demand spread below are calibrated so
    that well-placed warehouses deliver most (not all) orders on time and
    badly placed ones degrade smoothly: the objective is informative and
    noticeably noisy day to day.
    """
    return 0.6 * (1.0 + math.sin(2.0 * math.pi * t / 1440.0 - math.pi / 2.0))


DEFAULT_INTENSITY_BOUND = 1.2

_MIXTURE_CENTERS = np.array([[0.25, 0.70], [0.75, 0.30]])
_MIXTURE_SD = 0.2


def _sample_order_location(rng: np.random.Generator) -> tuple[float, float]:
    while True:
        center = _MIXTURE_CENTERS[rng.integers(2)]
        point = center + _MIXTURE_SD * rng.standard_normal(2)
        if 0.0 <= point[0] <= 1.0 and 0.0 <= point[1] <= 1.0:
            return float(point[0]), float(point[1])


def poisson_order_stream(
    seed,
    horizon: float = 1440.0,
    intensity=default_order_intensity,
    intensity_bound: float = DEFAULT_INTENSITY_BOUND,
) -> list[tuple[float, tuple[float, float]]]:
    """Draw one day's orders by thinning: homogeneous candidates at the
    bounding rate, accepted with probability intensity(t)/bound, each with a
    location from the two-cluster mixture truncated to the unit square."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    events = []
    t = 0.0
    while True:
        t += rng.exponential(1.0 / intensity_bound)
        if t > horizon:
            break
        rate = intensity(t)
        if rate > intensity_bound * (1.0 + 1e-9):
            raise ValueError(f"intensity {rate} exceeds its stated bound {intensity_bound}")
        if rng.uniform() <= rate / intensity_bound:
            events.append((t, _sample_order_location(rng)))
    return events


@dataclass(frozen=True)
class WarehouseConfig:
    """Two warehouse locations in the unit square plus the fixed fleet
    physics: ten trucks per warehouse, a 60-minute delivery target, a
    one-day horizon, and constant truck speed."""

    locations: np.ndarray  # (2, 2)
    trucks_per_warehouse: int = 10
    deadline: float = 60.0
    horizon: float = 1440.0
    speed: float = 0.02  # distance units per minute; full diagonal ~71 min

    def __post_init__(self):
        locations = np.asarray(self.locations, dtype=float).reshape(2, 2)
        object.__setattr__(self, "locations", locations)
        if np.any(locations < 0) or np.any(locations > 1):
            raise ValueError("warehouse locations must lie in the unit square")

    @staticmethod
    def from_vector(x) -> "WarehouseConfig":
        x = np.asarray(x, dtype=float).ravel()
        if x.size != 4:
            raise ValueError("warehouse decision vector must have 4 entries")
        return WarehouseConfig(locations=x.reshape(2, 2))


@dataclass
class DayResult:
    on_time: int = 0
    late: int = 0
    undelivered: int = 0
    events: list = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.on_time + self.late + self.undelivered


def simulate_day(config: WarehouseConfig, orders, collect_events: bool = False) -> DayResult:
    """Run one day: each order goes to the closest warehouse's FIFO truck
    queue; a truck drives out, delivers, and drives back before its next
    job. An order is on time when wait plus outbound travel is within the
    deadline; deliveries arriving after the horizon count as undelivered."""
    free = [
        [0.0] * config.trucks_per_warehouse,
        [0.0] * config.trucks_per_warehouse,
    ]
    for f in free:
        heapq.heapify(f)
    result = DayResult()
    for t, (ox, oy) in orders:
        d0 = math.hypot(ox - config.locations[0, 0], oy - config.locations[0, 1])
        d1 = math.hypot(ox - config.locations[1, 0], oy - config.locations[1, 1])
        w = 0 if d0 <= d1 else 1
        dist = d0 if w == 0 else d1
        travel = dist / config.speed
        dispatch = max(t, heapq.heappop(free[w]))
        wait = dispatch - t
        arrival = dispatch + travel
        heapq.heappush(free[w], dispatch + 2.0 * travel)
        if arrival > config.horizon:
            result.undelivered += 1
            on_time = False
        elif wait + travel <= config.deadline:
            result.on_time += 1
            on_time = True
        else:
            result.late += 1
            on_time = False
        if collect_events:
            result.events.append((t, ox, oy, w, wait, travel, on_time))
    return result


def warehouse_simulate(config: WarehouseConfig, B_days: int, seed: int, event_log=None) -> float:
    """Estimate the on-time proportion by pooling B_days independent days
    derived from one seed. With zero orders over every day, the proportion
    is vacuously 1. `event_log` may be a writable text handle receiving one
    CSV line per order."""
    if B_days < 1:
        raise ValueError("B_days must be >= 1")
    on_time = total = 0
    for day in range(B_days):
        rng = _stream(seed, day)
        orders = poisson_order_stream(rng)
        result = simulate_day(config, orders, collect_events=event_log is not None)
        on_time += result.on_time
        total += result.total
        if event_log is not None:
            for t, ox, oy, w, wait, travel, ok in result.events:
                event_log.write(f"{day},{t!r},{ox!r},{oy!r},{w},{wait!r},{travel!r},{int(ok)}\n")
    return on_time / total if total else 1.0


def warehouse_true(config: WarehouseConfig) -> float:
    """High-replication truth estimate on a reserved seed stream disjoint
    from every optimization stream; deterministic per config."""
    return warehouse_simulate(config, _ORACLE_DAYS, _ORACLE_ENTROPY)


class WarehouseBenchmark:
    """d=4 simulation objective: place two warehouses to maximize the
    on-time proportion. A realization is one demand scenario (one day's
    order stream); evaluating it replays that same stream against the
    queried locations."""

    d = 4

    def __init__(
        self,
        seed: int = 0,
        trucks_per_warehouse: int = 10,
        deadline: float = 60.0,
        horizon: float = 1440.0,
        speed: float = 0.02,
    ):
        self.seed = int(seed)
        self._fleet = {
            "trucks_per_warehouse": int(trucks_per_warehouse),
            "deadline": float(deadline),
            "horizon": float(horizon),
            "speed": float(speed),
        }
        self._scenarios: dict[int, list] = {}

    def _config(self, x) -> WarehouseConfig:
        x = np.asarray(x, dtype=float).ravel()
        return WarehouseConfig(locations=x.reshape(2, 2), **self._fleet)

    def mint_realization(self) -> int:
        sid = len(self._scenarios)
        self._scenarios[sid] = poisson_order_stream(_stream(self.seed, _STREAM_SCENARIO, sid))
        return sid

    @property
    def realization_count(self) -> int:
        return len(self._scenarios)

    def evaluate(self, x, s: int) -> float:
        if s not in self._scenarios:
            raise ValueError(f"unknown realization id {s}")
        result = simulate_day(self._config(x), self._scenarios[s])
        return result.on_time / result.total if result.total else 1.0

    def true_value(self, x) -> float:
        return warehouse_simulate(self._config(x), _ORACLE_DAYS, _ORACLE_ENTROPY)

    def true_optimum(self):
        return None
