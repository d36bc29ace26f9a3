"""Side-by-side table of reproduced and reference aggregates, plus the ordinal check.

usage: compare.py <output dir of reproduce.sh> <reference_values.csv>
Exit status 1 when a supervised selector scores below the random baseline
on link or attribute prediction.
"""

import csv
import json
import sys
from pathlib import Path

# Selector standing in for "supervised" on each task.
SUPERVISED = {"linkpred": "online-weighted", "attribute": "supervised"}


def main() -> int:
    out, ref_path = Path(sys.argv[1]), Path(sys.argv[2])
    reference = {}
    with ref_path.open() as f:
        for row in csv.DictReader(f):
            reference[(row["dataset"], row["task"], row["selector"])] = float(row["value"])

    ok = True
    print(f"{'dataset':<10} {'task':<12} {'selector':<16} {'reproduced':>10} {'reference':>10}")
    for report_path in sorted(out.glob("*/*/report.json")):
        report = json.loads(report_path.read_text())
        dataset, task = report["dataset"], report["task"]
        aggregates = report["aggregates"]
        for selector, value in aggregates.items():
            ref = reference.get((dataset, task, selector))
            shown = "undefined" if value is None else f"{value:.3f}"
            print(f"{dataset:<10} {task:<12} {selector:<16} {shown:>10} {'' if ref is None else f'{ref:.3f}':>10}")
        sup = SUPERVISED.get(task)
        if sup and sup in aggregates and "random" in aggregates:
            s, r = aggregates[sup], aggregates["random"]
            passed = s is not None and r is not None and s >= r
            ok &= passed
            print(f"  {'PASS' if passed else 'FAIL'} {dataset}/{task}: {sup} {s} >= random {r}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
