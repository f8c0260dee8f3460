"""Command-line experiment runner.

    bosh run --config cfg.json --out results/ [--seed N] [--parallel N]
    bosh validate --config cfg.json
    bosh bench-oracle --config cfg.json

`run` executes every (method, repetition) pair, writes one trace.csv row per
BO step (schema below), and a manifest.json from which any run can be
reproduced. Failed runs are recorded in the manifest and skipped in the
trace; the experiment continues.

trace.csv columns, in order:
    method, rep, step, cumulative_evals, batch_size, pool_size, proposed,
    observed_y, incumbent_x, true_value, suboptimality
Vectors are semicolon-joined shortest round-trip decimals; `proposed` joins
(x@s) tokens with "|"; `observed_y` joins values with "|"; unknown
true_value/suboptimality serialize as the empty string. Files are UTF-8
with LF line endings.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import build_run_config, validate_config
from .engine import benchmark_seed, make_benchmark, run_method
from .exceptions import BoshError, ConfigError

TRACE_COLUMNS = (
    "method",
    "rep",
    "step",
    "cumulative_evals",
    "batch_size",
    "pool_size",
    "proposed",
    "observed_y",
    "incumbent_x",
    "true_value",
    "suboptimality",
)


def _fmt(value: float) -> str:
    if isinstance(value, float) and np.isnan(value):
        return ""
    return repr(float(value))


def _fmt_vector(x) -> str:
    return ";".join(repr(float(v)) for v in np.atleast_1d(np.asarray(x, dtype=float)))


def _trace_rows(label: str, rep: int, records) -> list[str]:
    rows = []
    for r in records:
        proposed = "|".join(f"{_fmt_vector(x)}@{s}" for x, s in r.proposed)
        observed = "|".join(repr(float(v)) for v in r.observed)
        rows.append(
            ",".join(
                [
                    label,
                    str(rep),
                    str(r.step),
                    str(r.cumulative_evals),
                    str(r.batch_size),
                    str(r.pool_size),
                    proposed,
                    observed,
                    _fmt_vector(r.incumbent_x),
                    _fmt(r.true_value),
                    _fmt(r.suboptimality),
                ]
            )
        )
    return rows


def _execute_run(job: tuple) -> dict:
    """Run one (method, rep) pair and write its temp trace; returns a
    manifest entry. Top-level so process pools can pickle it."""
    resolved, method_entry, rep, out_dir = job
    label = method_entry["label"]
    run_dir = Path(out_dir) / "runs"
    run_dir.mkdir(parents=True, exist_ok=True)
    final = run_dir / f"{label}_rep{rep}.csv"
    entry = {"method": label, "rep": rep, "seed": resolved["base_seed"] + rep, "status": "ok"}
    try:
        config = build_run_config(method_entry, resolved, rep)
        bench_kwargs = {k: v for k, v in resolved["benchmark"].items() if k != "kind"}
        benchmark = make_benchmark(
            resolved["benchmark"]["kind"], seed=benchmark_seed(config.seed), **bench_kwargs
        )
        trace = run_method(config, benchmark)
        rows = _trace_rows(label, rep, trace.records)
        tmp = final.with_suffix(".csv.tmp")
        tmp.write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")
        os.replace(tmp, final)
        entry["rows"] = len(rows)
    except (BoshError, ValueError) as exc:
        entry["status"] = "error"
        entry["error"] = f"{type(exc).__name__}: {exc}"
    return entry


def run_experiment(resolved: dict, out_dir, parallel: int = 1) -> dict:
    """Execute the full method x repetition grid, concatenate per-run traces
    into trace.csv, and write manifest.json. Returns the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [
        (resolved, method_entry, rep, str(out))
        for method_entry in resolved["methods"]
        for rep in range(resolved["repetitions"])
    ]
    if parallel > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallel) as pool:
            entries = list(pool.map(_execute_run, jobs))
    else:
        entries = [_execute_run(job) for job in jobs]

    lines = [",".join(TRACE_COLUMNS)]
    for (_, method_entry, rep, _), entry in zip(jobs, entries):
        if entry["status"] != "ok":
            continue
        path = out / "runs" / f"{method_entry['label']}_rep{rep}.csv"
        lines.extend(path.read_text(encoding="utf-8").splitlines())
    (out / "trace.csv").write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    manifest = {
        "package_version": __version__,
        "resolved_config": resolved,
        "trace_columns": list(TRACE_COLUMNS),
        "runs": entries,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )
    return manifest


def _cmd_run(args) -> int:
    try:
        resolved = validate_config(args.config)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    if args.seed is not None:
        resolved["base_seed"] = args.seed
    manifest = run_experiment(resolved, args.out, parallel=args.parallel)
    failed = [e for e in manifest["runs"] if e["status"] != "ok"]
    print(f"wrote {args.out}/trace.csv ({len(manifest['runs']) - len(failed)} runs ok, {len(failed)} failed)")
    for entry in failed:
        print(f"  failed: {entry['method']} rep {entry['rep']}: {entry['error']}", file=sys.stderr)
    return 0 if not failed else 1


def _cmd_validate(args) -> int:
    try:
        resolved = validate_config(args.config)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    print(json.dumps(resolved, indent=2, sort_keys=True))
    return 0


def _cmd_bench_oracle(args) -> int:
    try:
        resolved = validate_config(args.config)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    bench_cfg = resolved["benchmark"]
    kind = bench_cfg["kind"]
    bench_kwargs = {k: v for k, v in bench_cfg.items() if k != "kind"}
    if kind == "synthetic":
        print("rep,seed,optimum_x,optimum_value")
        for rep in range(resolved["repetitions"]):
            seed = benchmark_seed(resolved["base_seed"] + rep)
            bench = make_benchmark(kind, seed=seed, **bench_kwargs)
            x_star, v_star = bench.true_optimum()
            print(f"{rep},{seed},{_fmt_vector(x_star)},{v_star!r}")
    else:
        from .benchmarks import WarehouseConfig, warehouse_true

        center = warehouse_true(WarehouseConfig.from_vector([0.25, 0.5, 0.75, 0.5]))
        print("no closed-form optimum for the warehouse benchmark")
        print(f"truth oracle (100-day simulation) at locations (0.25,0.5)/(0.75,0.5): {center!r}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bosh", description="Run optimization experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the configured experiment grid")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--seed", type=int, default=None, help="override base_seed")
    p_run.add_argument("--parallel", type=int, default=1, help="concurrent repetitions")
    p_run.set_defaults(fn=_cmd_run)

    p_val = sub.add_parser("validate", help="check a config and echo resolved defaults")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(fn=_cmd_validate)

    p_oracle = sub.add_parser("bench-oracle", help="print true-optimum values for the benchmark")
    p_oracle.add_argument("--config", required=True)
    p_oracle.set_defaults(fn=_cmd_bench_oracle)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
