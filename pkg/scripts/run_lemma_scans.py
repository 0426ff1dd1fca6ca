#!/usr/bin/env python3
"""Scan Lemma 1 (divisor main term) and Lemma 2 (chi product) error
scaling and print the fitted exponents.

Lemma 1: x in {1e3 .. 1e7}, 20 hypothesis-satisfying c per x with
|gamma'| log-uniform up to 1e4; reports the normalized-residual ceiling
and its trend in x.  Lemma 2: |c| in [1e-4, 1] x heights [1e2, 1e6];
reports the fitted global K and the per-c slopes in |t + alpha'|.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from zml.scanlab import (
    FixedList,
    GridSpec,
    RandomInBox,
    fit_error_exponent,
    run_scan,
    write_csv,
)


def lemma1_scan(workers):
    spec = GridSpec(
        T_values=(1e3, 1e4, 1e5, 1e6, 1e7),
        shift_generator=RandomInBox(
            seed=4242, count=20, re_lo=-0.99, re_hi=0.99,
            im_lo=0.1, im_hi=1e4, im_log=True, equal_pairs=True,
        ),
    )
    records = run_scan(spec, "lemma1", workers=workers)
    ok = [r for r in records if r.error is None]
    worst = max(r.normalized_residual for r in ok)
    fit = fit_error_exponent(ok, "x", "normalized_residual")
    print(f"[lemma1] n={len(ok)} max normalized residual {worst:.4f}, "
          f"slope vs x {fit.slope:+.4f}")
    return records


def lemma2_scan(workers):
    heights = tuple(float(t) for t in np.geomspace(1e2, 1e6, 9))
    all_records = []
    k_global = 0.0
    for c_mag in np.geomspace(1e-4, 1.0, 7):
        spec = GridSpec(
            T_values=heights,
            shift_generator=FixedList(shifts=((complex(c_mag, 0.0), 0j),)),
        )
        records = run_scan(spec, "lemma2", workers=workers)
        all_records.extend(records)
        ks = [
            r.normalized_residual * abs(r.grid_value + r.shifts.alpha_p)
            / abs(r.shifts.c)
            for r in records
            if r.in_hypothesis
        ]
        k_global = max(k_global, max(ks))
        fit = fit_error_exponent(records, "T", "normalized_residual")
        print(f"[lemma2] |c|={c_mag:.1e}: slope {fit.slope:+.4f}, "
              f"K along this c <= {max(ks):.3f}")
    print(f"[lemma2] fitted global K = {k_global:.4f}")
    return all_records


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="lemma_scans", help="output path stem")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    t0 = time.time()
    records = lemma1_scan(args.workers) + lemma2_scan(args.workers)
    write_csv(records, f"{args.out}.csv")
    print(f"{len(records)} records in {time.time()-t0:.0f}s -> {args.out}.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
