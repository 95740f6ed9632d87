#!/usr/bin/env python3
"""Run the full default verification plan and persist the reports.

Writes report.csv and report.json next to this script's working directory
and prints a per-family summary.  Equivalent to

    suita-lab verify --out report.csv

but handy when working from a checkout without installing the console
script.
"""

import collections
import sys

from suita_lab import verify as vf
from suita_lab.cli import emit_report


def main() -> int:
    report = vf.run_suite()
    emit_report(report, "report.csv", "csv")
    emit_report(report, "report.json", "json")
    families = collections.Counter(c.name.split("[", 1)[0] for c in report.checks)
    width = max(len(k) for k in families)
    for name, count in sorted(families.items()):
        failed = sum(1 for c in report.checks if c.name.split("[", 1)[0] == name and not c.passed)
        flag = f"  ({failed} FAILED)" if failed else ""
        print(f"{name:<{width}}  {count:4d} checks{flag}")
    meta = report.metadata
    print(
        f"\n{meta['checks_total']} checks, {meta['checks_failed']} failures, "
        f"{meta['wall_time_s']}s; empirical Theorem-2 constant "
        f"{meta['thm2_empirical_max']:.6f} (paper bound {vf.THM2_CONSTANT:.6f})"
    )
    print("reports written: report.csv, report.json")
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
