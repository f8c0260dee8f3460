"""Experiment configuration: a JSON file with nested sections, validated
eagerly with every problem reported at once, and echoed back with all
defaults filled in.

Top-level keys:
  benchmark    {"kind": "synthetic" | "warehouse", ...benchmark options}
  methods      [{"method": <name>, "B_or_K": <int>, ...overrides}, ...]
  budget_steps int (required)
  repetitions  int (default 20)
  base_seed    int (default 0)
  model        optional defaults for every method's surrogate refits
  acquisition  optional defaults for every method's acquisition machinery

Each method spec may carry a "label" (the trace's method column; defaults to
"<METHOD>-<B_or_K>") and may override "model", "acquisition", "pool_cap",
"uniform_design", and "resampled_acquisition".
"""

from __future__ import annotations

import json
from pathlib import Path

from .engine import AcquisitionConfig, Method, ModelConfig, RunConfig
from .exceptions import ConfigError
from .gp import GPHyperBounds
from .hgp import HGPHyperBounds

_BENCHMARK_DEFAULTS = {
    "synthetic": {
        "upper_variance": 1.0,
        "lengthscale": 0.1,
        "lower_variance": 0.5,
        "noise_variance": 0.01,
        "grid_size": 1000,
    },
    "warehouse": {
        "trucks_per_warehouse": 10,
        "deadline": 60.0,
        "horizon": 1440.0,
        "speed": 0.02,
    },
}

_BENCHMARK_DIM = {"synthetic": 1, "warehouse": 4}

_MODEL_DEFAULTS = {"n_restarts": 3}
_ACQ_DEFAULTS = {"gstar_samples": 10, "gstar_grid_per_dim": 1000, "direct_evals_per_dim": 100}
_METHOD_DEFAULTS = {"pool_cap": None, "uniform_design": False, "resampled_acquisition": "mes"}


def _check_int(value, name, minimum, problems) -> int | None:
    if not isinstance(value, int) or isinstance(value, bool):
        problems.append(f"{name}: expected an integer, got {value!r}")
        return None
    if value < minimum:
        problems.append(f"{name}: must be >= {minimum}, got {value}")
        return None
    return value


def resolve_config(raw: dict) -> tuple[dict, list[str]]:
    """Fill defaults and collect every validation problem. Returns the
    resolved config (meaningful only when the problem list is empty)."""
    problems: list[str] = []
    if not isinstance(raw, dict):
        return {}, ["top level: expected a JSON object"]
    resolved: dict = {}

    bench = raw.get("benchmark")
    if not isinstance(bench, dict) or "kind" not in bench:
        problems.append('benchmark: required section with a "kind" field')
    else:
        kind = bench["kind"]
        if kind not in _BENCHMARK_DEFAULTS:
            problems.append(
                f"benchmark.kind: unknown kind {kind!r}; allowed: {sorted(_BENCHMARK_DEFAULTS)}"
            )
        else:
            merged = dict(_BENCHMARK_DEFAULTS[kind])
            for key, value in bench.items():
                if key == "kind":
                    continue
                if key not in merged:
                    problems.append(f"benchmark.{key}: unknown option for kind {kind!r}")
                else:
                    merged[key] = value
            resolved["benchmark"] = {"kind": kind, **merged}

    if "budget_steps" not in raw:
        problems.append("budget_steps: required field is missing")
    else:
        value = _check_int(raw["budget_steps"], "budget_steps", 1, problems)
        if value is not None:
            resolved["budget_steps"] = value

    value = _check_int(raw.get("repetitions", 20), "repetitions", 1, problems)
    if value is not None:
        resolved["repetitions"] = value
    value = raw.get("base_seed", 0)
    if not isinstance(value, int) or isinstance(value, bool):
        problems.append(f"base_seed: expected an integer, got {value!r}")
    else:
        resolved["base_seed"] = value

    model_defaults = {**_MODEL_DEFAULTS, **raw.get("model", {})}
    acq_defaults = {**_ACQ_DEFAULTS, **raw.get("acquisition", {})}

    methods = raw.get("methods")
    if not isinstance(methods, list) or not methods:
        problems.append("methods: required non-empty list of method specs")
        methods = []
    resolved_methods = []
    labels = set()
    for i, spec in enumerate(methods):
        where = f"methods[{i}]"
        if not isinstance(spec, dict):
            problems.append(f"{where}: expected an object")
            continue
        name = spec.get("method")
        if name not in Method.__members__:
            problems.append(
                f"{where}.method: unknown method {name!r}; allowed: {sorted(Method.__members__)}"
            )
            continue
        b_or_k = _check_int(spec.get("B_or_K"), f"{where}.B_or_K", 1, problems)
        if b_or_k is None:
            continue
        entry = {
            "method": name,
            "B_or_K": b_or_k,
            "label": spec.get("label", f"{name}-{b_or_k}"),
            "model": {**model_defaults, **spec.get("model", {})},
            "acquisition": {**acq_defaults, **spec.get("acquisition", {})},
        }
        for key, default in _METHOD_DEFAULTS.items():
            entry[key] = spec.get(key, default)
        if entry["resampled_acquisition"] not in ("mes", "ei"):
            problems.append(f'{where}.resampled_acquisition: must be "mes" or "ei"')
        if entry["label"] in labels:
            problems.append(f"{where}.label: duplicate label {entry['label']!r}")
        labels.add(entry["label"])
        resolved_methods.append(entry)
    resolved["methods"] = resolved_methods

    known = {"benchmark", "methods", "budget_steps", "repetitions", "base_seed", "model", "acquisition"}
    for key in raw:
        if key not in known:
            problems.append(f"{key}: unknown top-level field")
    return resolved, problems


def validate_config(path) -> dict:
    """Load, validate, and resolve a config file; raises ConfigError listing
    every problem found."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError([f"cannot read config: {exc}"])
    resolved, problems = resolve_config(raw)
    if problems:
        raise ConfigError(problems)
    return resolved


def build_run_config(method_entry: dict, resolved: dict, rep: int) -> RunConfig:
    """Materialize the RunConfig for one (method, repetition) pair."""
    return RunConfig(
        method=Method[method_entry["method"]],
        B_or_K=method_entry["B_or_K"],
        budget_steps=resolved["budget_steps"],
        d=_BENCHMARK_DIM[resolved["benchmark"]["kind"]],
        seed=resolved["base_seed"] + rep,
        model=ModelConfig(
            n_restarts=method_entry["model"]["n_restarts"],
            gp_bounds=GPHyperBounds(),
            hgp_bounds=HGPHyperBounds(),
        ),
        acquisition=AcquisitionConfig(
            gstar_samples=method_entry["acquisition"]["gstar_samples"],
            gstar_grid_per_dim=method_entry["acquisition"]["gstar_grid_per_dim"],
            direct_evals_per_dim=method_entry["acquisition"]["direct_evals_per_dim"],
        ),
        pool_cap=method_entry["pool_cap"],
        uniform_design=method_entry["uniform_design"],
        resampled_acquisition=method_entry["resampled_acquisition"],
    )
