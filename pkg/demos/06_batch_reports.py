"""
Batch verification reports
==========================

The runner samples points from a seeded PCG64 stream, runs the checks in
dependency order and produces a JSON report plus per-point CSV.  The same
run is available on the command line as ``invkahler verify``.
"""
import json
import tempfile
from pathlib import Path

from invkahler.cli import main
from invkahler.report import RunConfig, emit_csv, run

rep = run(RunConfig(group="su2", structure="rescaled:arctan", samples=8, polar_samples=1, steps=400))
print("verdict:", rep["verdict"])
for name, res in rep["checks"].items():
    print(f"  {name:20s} {res['status']}")

out = Path(tempfile.mkdtemp())
print("\n" + emit_csv(rep, out / "arctan.csv").splitlines()[1])

# a negative control exits with code 2
code = main(["verify", "--structure", "fixture:perturbed", "--samples", "4", "--out", str(out / "bad.json")])
print("\nexit code", code, "verdict", json.loads((out / "bad.json").read_text())["verdict"])
