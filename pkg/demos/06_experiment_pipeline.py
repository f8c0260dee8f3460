"""The full experiment pipeline: config file -> runner -> trace.csv.

Writes a small experiment config, validates it, runs the grid in-process,
and inspects the emitted trace and manifest. The same flow is available
from the shell:

    bosh validate --config demo_config.json
    bosh run --config demo_config.json --out results/ --parallel 2
    bosh bench-oracle --config demo_config.json

The trace.csv written here is what the plotting frontend consumes.
"""

import json
import tempfile
from pathlib import Path

from bosh.cli import run_experiment
from bosh.config import resolve_config

config = {
    "benchmark": {"kind": "synthetic", "lower_variance": 0.5},
    "methods": [
        {"method": "BOSH", "B_or_K": 3},
        {"method": "FIXED_MES", "B_or_K": 3},
    ],
    "budget_steps": 6,
    "repetitions": 3,
    "base_seed": 11,
    "model": {"n_restarts": 2},
    "acquisition": {"gstar_grid_per_dim": 200, "direct_evals_per_dim": 30},
}

resolved, problems = resolve_config(config)
assert not problems, problems
print("resolved config (defaults filled in):")
print(json.dumps(resolved["methods"][0], indent=2))

out = Path(tempfile.mkdtemp(prefix="bosh_demo_"))
manifest = run_experiment(resolved, out, parallel=2)
print(f"\nwrote {out}/trace.csv and {out}/manifest.json")
print(f"runs: {[(e['method'], e['rep'], e['status']) for e in manifest['runs']]}")

lines = (out / "trace.csv").read_text().splitlines()
print(f"\ntrace.csv: {len(lines) - 1} step rows")
print("  " + lines[0])
for line in lines[1:4]:
    print("  " + line[:110] + ("..." if len(line) > 110 else ""))

final = [line.split(",") for line in lines[1:] if line.split(",")[2] == "6"]
print("\nfinal-step suboptimality by run:")
for parts in final:
    print(f"  {parts[0]:12s} rep {parts[1]}: {float(parts[10]):.4f}")
