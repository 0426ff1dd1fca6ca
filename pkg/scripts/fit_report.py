#!/usr/bin/env python3
"""Fit log-log error exponents from a scan CSV.

Reads the scan schema written by `zml scan` (or the other scripts) and
prints a least-squares slope of log(y_field) against log(x_field) per
record kind, e.g.

    python scripts/fit_report.py scan.csv --x T --y normalized_residual
"""

import argparse
import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from zml.errors import InsufficientData, DegenerateFit
from zml.scanlab import fit_error_exponent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv_path")
    ap.add_argument("--x", default="T", help="abscissa column")
    ap.add_argument("--y", default="normalized_residual", help="ordinate column")
    args = ap.parse_args()

    rows_by_kind: dict[str, list[dict]] = {}
    with open(args.csv_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            parsed = {
                k: (float(v) if v not in ("", None) else float("nan"))
                for k, v in row.items()
                if k != "kind"
            }
            rows_by_kind.setdefault(row["kind"], []).append(parsed)

    status = 0
    for kind, rows in sorted(rows_by_kind.items()):
        try:
            fit = fit_error_exponent(rows, args.x, args.y)
            print(f"[{kind}] slope {fit.slope:+.4f}  intercept {fit.intercept:+.3f}  "
                  f"r^2 {fit.r_squared:.4f}  n {fit.n_points}")
        except (InsufficientData, DegenerateFit) as exc:
            print(f"[{kind}] no fit: {exc}")
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
