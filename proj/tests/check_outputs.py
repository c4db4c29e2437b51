"""Validate a run directory: results.json against the schema, CSV shapes."""
import csv
import json
import pathlib
import sys

import jsonschema


def main(schema_path, run_dir):
    run_dir = pathlib.Path(run_dir)
    schema = json.loads(pathlib.Path(schema_path).read_text())
    results = json.loads((run_dir / "results.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.validate(results, schema, cls=jsonschema.Draft202012Validator)

    for run in results["runs"]:
        steps = run["steps"]
        assert len(run["per_step"]) == steps + 1, run["id"]
        name = run["id"].replace("/", "__") + ".csv"
        with open(run_dir / "series" / name, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["step", "metric", "value"], rows[0]
        per_metric = {}
        for step, metric, _ in rows[1:]:
            per_metric.setdefault(metric, []).append(int(step))
        for metric, ts in per_metric.items():
            assert ts == list(range(steps + 1)), (metric, ts)

    assert (run_dir / "sweep.csv").exists()
    assert (run_dir / "summary.txt").read_text().strip()
    print(f"ok: {len(results['runs'])} run records valid")


if __name__ == "__main__":
    main(*sys.argv[1:3])
