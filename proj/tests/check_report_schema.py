#!/usr/bin/env python3
"""Runs every report-producing subcommand and validates the reports."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

try:
    import jsonschema
except ImportError:
    print("jsonschema not installed; skipping")
    sys.exit(0)


def run(cli, *args, ok_codes=(0,)):
    p = subprocess.run([cli, *args], capture_output=True, text=True)
    if p.returncode not in ok_codes:
        sys.exit(f"{' '.join(args)} exited {p.returncode}: {p.stderr}")


def main():
    cli, schema_path, corpus = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    with tempfile.TemporaryDirectory() as tmp:
        t = Path(tmp)
        c17 = str(corpus / "c17.bench")
        locked, key = str(t / "c17.locked.bench"), str(t / "c17.key")
        run(cli, "lock", "--input", c17, "--key-size", "4", "--seed", "1", "--output", locked,
            "--key-out", key, "--report", str(t / "lock.json"))
        run(cli, "verify", "--locked", locked, "--original", c17, "--key", key, "--report", str(t / "verify.json"))
        run(cli, "attack", "--locked", locked, "--oracle", c17, "--report", str(t / "attack.json"))
        run(cli, "corrupt", "--locked", locked, "--original", c17, "--key", key, "--report",
            str(t / "corrupt.json"))
        replies = t / "replies.json"
        replies.write_text('["no netlist here"]')
        run(cli, "llm-lock", "--input", c17, "--key-size", "2", "--mock-replies", str(replies),
            "--report", str(t / "llm.json"))
        run(cli, "pipeline", "--input", str(corpus / "full_adder.v"), "--key-size", "3", "--keygate", "mux",
            "--dummy", "random-fn", "--report", str(t / "pipeline.json"))
        # A wrong key still produces a report.
        bad_key = t / "bad.key"
        bad_key.write_text("0000\n")
        run(cli, "verify", "--locked", locked, "--original", c17, "--key", str(bad_key), "--report",
            str(t / "mismatch.json"), ok_codes=(0, 1))

        failures = 0
        reports = sorted(p for p in t.glob("*.json") if p != replies)
        for path in reports:
            errors = list(validator.iter_errors(json.loads(path.read_text())))
            for e in errors:
                print(f"{path.name}: {'/'.join(map(str, e.absolute_path))}: {e.message}")
            failures += bool(errors)
        print(f"{len(reports) - failures}/{len(reports)} reports valid")
        return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
