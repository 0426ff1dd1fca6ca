#!/usr/bin/env python3
"""Run the default theorem desk grid and report the error-envelope fit.

Grid: T in {100, 250, 500, 1000, 2000}, imaginary shifts T^e for
e in {0, 1, 1.25, 1.5, 1.8} with both beta' signs, real shifts 0 and
1/log T; 100 points.  Writes CSV + manifest next to --out and prints the
per-kind summary plus the normalized-residual trend in T.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from zml.complexfn import DEFAULT_POLICY
from zml.moment import DEFAULT_QUADRATURE
from zml.scanlab import (
    desk_grid_specs,
    fit_error_exponent,
    render_summary,
    run_scan,
    summarize,
    write_csv,
    write_manifest,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="desk_grid", help="output path stem")
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--timing", action="store_true")
    args = ap.parse_args()

    t0 = time.time()
    records = []
    specs = desk_grid_specs()
    for spec in specs:
        records.extend(
            run_scan(spec, "theorem", workers=args.workers, measure_time=args.timing)
        )
    elapsed = time.time() - t0

    csv_path = f"{args.out}.csv"
    sha = write_csv(records, csv_path)
    # the manifest records the first spec; the second differs only in
    # re_shift_magnitude, noted in the summary below
    write_manifest(
        f"{args.out}_manifest.json", specs[0], "theorem", DEFAULT_POLICY,
        DEFAULT_QUADRATURE, csv_path, sha, args.timing,
    )
    print(render_summary(summarize(records)))
    ok = [r for r in records if r.error is None]
    fit = fit_error_exponent(ok, "T", "normalized_residual")
    print(f"normalized residual vs T: slope {fit.slope:+.4f} "
          f"(r^2 {fit.r_squared:.3f}, n {fit.n_points})")
    worst = max(ok, key=lambda r: r.normalized_residual)
    print(f"worst point: T={worst.grid_value:g} a={worst.shifts.a:g} "
          f"b={worst.shifts.b:g} -> {worst.normalized_residual:.4f}")
    print(f"{len(records)} records in {elapsed:.0f}s -> {csv_path}")
    return 0 if not any(r.error for r in records) else 1


if __name__ == "__main__":
    sys.exit(main())
