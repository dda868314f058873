"""Runs the CLI on a few problems and validates each machine transcript against the schema."""

import json
import subprocess
import sys

import jsonschema

cli, schema_path = sys.argv[1], sys.argv[2]
schema = json.load(open(schema_path))

RUNNING = {"source": [0.4, 0.3, 0.2, 0.1], "target": [0.55, 0.25, 0.15, 0.05], "squared": True}
cases = [
    (["check"], RUNNING),
    (["check"], {"source": [0.5, 0.3, 0.2], "target": [0.45, 0.45, 0.1], "squared": True}),
    (["check"], {"source": [0.5, -0.3, 0.8], "target": [1, 0, 0], "squared": True}),
    (["plan"], RUNNING),
    (["plan"], {"source": [0.25, 0.25, 0.25, 0.25], "target": [0.3, 0.3, 0.2, 0.2], "squared": True}),
    (["simulate", "--shots", "200", "--seed", "3"], RUNNING),
    (["simulate", "--shots", "0"], RUNNING),
    (["demo-infeasible", "-m", "2"], {"source": [0.4, 0.3, 0.3], "target": [0.7, 0.2, 0.1], "squared": True}),
    (["demo-infeasible"], RUNNING),
]
for args, problem in cases:
    out = subprocess.run([cli, *args, "--format", "machine"], input=json.dumps(problem),
                         capture_output=True, text=True)
    doc = json.loads(out.stdout)
    jsonschema.validate(doc, schema)
    print("ok", " ".join(args), "exit", out.returncode)
