#!/usr/bin/env python3
"""Independent check of a `qmod simulate` run directory.

Verifies that every failure record carries the classification its kind maps
to, and re-derives the record counts and erasure fraction in metrics.jsonl
from the raw failure stream.

usage: check_records.py RUN_DIR
"""

import json
import sys
from pathlib import Path

EXPECTED = {
    "heralded_timeout_abort": "erasure_marker",
    "heralded_physical_loss": "erasure_marker",
    "unheralded_decoherence": "depolarizing_noise",
    "qubit_degradation": "pauli_frame_update",
}


def read_jsonl(path):
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def main(argv):
    if len(argv) != 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    run_dir = Path(argv[1])
    failures = read_jsonl(run_dir / "failures.jsonl")
    metrics = read_jsonl(run_dir / "metrics.jsonl")
    errors = []

    counts = {kind: 0 for kind in EXPECTED}
    by_class = {"erasure_marker": 0, "depolarizing_noise": 0, "pauli_frame_update": 0}
    for n, rec in enumerate(failures, 1):
        if list(rec)[:2] != ["schema", "type"] or rec["type"] != "failure":
            errors.append(f"line {n}: record does not start with schema, type=failure")
            continue
        kind = rec["kind"]
        if kind not in EXPECTED:
            errors.append(f"line {n}: unknown kind {kind!r}")
            continue
        counts[kind] += 1
        by_class[rec["classification"]] = by_class.get(rec["classification"], 0) + 1
        if rec["classification"] != EXPECTED[kind]:
            errors.append(f"line {n}: {kind} classified as {rec['classification']}")
        if rec["heralded"] != kind.startswith("heralded"):
            errors.append(f"line {n}: heralded flag disagrees with kind {kind}")

    if len(metrics) != 1:
        errors.append(f"metrics.jsonl holds {len(metrics)} records, expected 1")
    else:
        m = metrics[0]
        noise = by_class["erasure_marker"] + by_class["depolarizing_noise"]
        derived = {
            "n_records": len(failures),
            "n_erasure_records": by_class["erasure_marker"],
            "n_depolarizing_records": by_class["depolarizing_noise"],
            "n_pauli_records": by_class["pauli_frame_update"],
        }
        for key, value in derived.items():
            if m[key] != value:
                errors.append(f"metrics {key}={m[key]} but the record stream gives {value}")
        fraction = by_class["erasure_marker"] / noise if noise else None
        if fraction is None:
            if m["erasure_fraction"] is not None:
                errors.append("metrics erasure_fraction set without any noise records")
        elif m["erasure_fraction"] is None or abs(m["erasure_fraction"] - fraction) > 1e-12:
            errors.append(f"metrics erasure_fraction={m['erasure_fraction']} but records give {fraction}")

    for kind, n in counts.items():
        print(f"{kind:24s} {n:8d}")
    for err in errors[:20]:
        print("FAIL:", err)
    if errors:
        print(f"classifier check FAILED ({len(errors)} problems)")
        return 1
    print(f"classifier check PASSED ({len(failures)} records)")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
