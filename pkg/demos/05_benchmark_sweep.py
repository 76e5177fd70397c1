"""A small benchmark sweep driven through the CLI, ready for plotting.

Writes a sweep definition, runs `vcsched bench`, and prints the resulting
CSV. Feed the CSV to the vcplots package (plots/ directory) for figures:

    vcplots out/sp_count.csv --kind runtime-log --out runtime.svg
"""

import json
import tempfile
from pathlib import Path

from vcsched.cli import main

sweep = {
    "axes": [{"name": "sp_count", "values": [5, 6, 7]}],
    "base": {
        "sp_count": 5, "vm_total": 7, "uav_count": 1,
        "task_shapes": ["star-4"], "v2v_radius": 450.0, "uav_radius": 700.0,
    },
    "seeds": [1, 2, 3],
    "methods": ["proposed", "ua"],
    "limit": 40,
}

workdir = Path(tempfile.mkdtemp(prefix="vcsched-bench-"))
sweep_path = workdir / "sweep.json"
sweep_path.write_text(json.dumps(sweep, indent=2), encoding="utf-8")

code = main(["bench", str(sweep_path), "--out", str(workdir / "out")])
assert code == 0

csv_path = workdir / "out" / "sp_count.csv"
print(f"\n{csv_path}:\n")
print(csv_path.read_text())
print("render it with: vcplots", csv_path, "--kind objective-lines --out objective.svg")
