"""Scan runner tests: cardinality, determinism, fits, summaries, replay."""

import hashlib
import math

import numpy as np
import pytest

from zml import scanlab as sl
from zml.errors import DegenerateFit, DomainError, EmptyInput, InsufficientData
from zml.moment import QuadratureConfig

COARSE = QuadratureConfig(panel_width=0.5)


def small_theorem_spec():
    return sl.GridSpec(
        T_values=(16.0,),
        shift_generator=sl.PowerLaw(exponents=(0.0, 1.0), beta_signs=(1, -1)),
    )


# ----------------------------------------------------------------------
# run_scan
# ----------------------------------------------------------------------


def test_single_point_single_record():
    spec = sl.GridSpec(
        T_values=(100.0,),
        shift_generator=sl.FixedList(shifts=(((0.01 + 0j), 0j),)),
    )
    records = sl.run_scan(spec, "lemma2", workers=1)
    assert len(records) == 1
    assert records[0].kind == "lemma2"


def test_powerlaw_cardinality():
    # 3 exponents x 4 T values -> 12 records (default single beta sign)
    spec = sl.GridSpec(
        T_values=(16.0, 32.0, 64.0, 128.0),
        shift_generator=sl.PowerLaw(exponents=(1.0, 1.5, 1.8)),
    )
    records = sl.run_scan(spec, "lemma2", workers=1)
    assert len(records) == 12


def test_replication_cardinality():
    spec = sl.GridSpec(
        T_values=(100.0,),
        shift_generator=sl.FixedList(shifts=(((0.01 + 0j), 0j),)),
        replication=3,
    )
    assert len(sl.run_scan(spec, "lemma2", workers=1)) == 3


def test_same_seed_byte_identical():
    spec = sl.GridSpec(
        T_values=(500.0, 1000.0),
        shift_generator=sl.RandomInBox(seed=11, count=4, im_hi=100.0),
    )
    a = sl.records_to_csv_bytes(sl.run_scan(spec, "lemma2", workers=1))
    b = sl.records_to_csv_bytes(sl.run_scan(spec, "lemma2", workers=1))
    assert a == b


def test_worker_count_does_not_change_bytes():
    spec = small_theorem_spec()
    a = sl.records_to_csv_bytes(sl.run_scan(spec, "theorem", quad=COARSE, workers=1))
    b = sl.records_to_csv_bytes(sl.run_scan(spec, "theorem", quad=COARSE, workers=2))
    assert a == b


def test_errors_become_records():
    # T below the theorem_report domain -> error record, scan continues
    spec = sl.GridSpec(
        T_values=(2.0,),
        shift_generator=sl.FixedList(shifts=(((1.0 + 0j), 0j), ((0.01 + 0j), 0j))),
    )
    quad = QuadratureConfig(panel_width=0.5, max_panels=8)
    records = sl.run_scan(spec, "theorem", quad=quad, workers=1)
    assert len(records) == 2
    assert any(r.error is not None for r in records)


def test_grid_spec_validation():
    with pytest.raises(DomainError):
        sl.GridSpec(T_values=(), shift_generator=sl.PowerLaw(exponents=(1.0,)))
    with pytest.raises(DomainError):
        sl.GridSpec(T_values=(1.0,), shift_generator=sl.PowerLaw(exponents=(1.0,)))
    with pytest.raises(DomainError):
        sl.GridSpec(T_values=(10.0,), shift_generator=sl.PowerLaw(exponents=(2.5,)))
    spec = sl.GridSpec(
        T_values=(10.0,),
        shift_generator=sl.PowerLaw(exponents=(2.5,)),
        allow_beyond_theorem=True,
    )
    assert spec.allow_beyond_theorem


# ----------------------------------------------------------------------
# fit_error_exponent
# ----------------------------------------------------------------------


def test_fit_exact_power_law():
    rows = [{"x": float(v), "y": 2.5 * v**0.5} for v in (1, 2, 4, 8, 16, 32)]
    fit = sl.fit_error_exponent(rows, "x", "y")
    assert abs(fit.slope - 0.5) <= 1e-9
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.n_points == 6


def test_fit_flat_data():
    rows = [{"x": float(v), "y": 7.0} for v in (1, 2, 4, 8)]
    fit = sl.fit_error_exponent(rows, "x", "y")
    assert abs(fit.slope) <= 1e-9


def test_fit_recovers_exponent_property():
    rng = np.random.default_rng(4)
    for p in (-1.0, 0.3, 2.0):
        amp = 10.0 ** rng.uniform(-3, 3)
        rows = [{"x": float(v), "y": amp * v**p} for v in np.geomspace(1, 1e4, 12)]
        fit = sl.fit_error_exponent(rows, "x", "y")
        assert abs(fit.slope - p) <= 1e-9


def test_fit_insufficient_data():
    with pytest.raises(InsufficientData):
        sl.fit_error_exponent([{"x": 1.0, "y": 2.0}], "x", "y")


def test_fit_degenerate():
    rows = [{"x": 3.0, "y": float(v)} for v in (1, 2, 3, 4)]
    with pytest.raises(DegenerateFit):
        sl.fit_error_exponent(rows, "x", "y")


def test_fit_skips_nonpositive():
    rows = [{"x": float(v), "y": v * 1.0} for v in (1, 2, 4, 8)]
    rows.append({"x": 16.0, "y": float("nan")})
    rows.append({"x": 32.0, "y": -1.0})
    fit = sl.fit_error_exponent(rows, "x", "y")
    assert fit.n_points == 4


# ----------------------------------------------------------------------
# summarize
# ----------------------------------------------------------------------


def test_summarize_single_record():
    spec = sl.GridSpec(
        T_values=(100.0,), shift_generator=sl.FixedList(shifts=(((0.01 + 0j), 0j),))
    )
    records = sl.run_scan(spec, "lemma2", workers=1)
    (summary,) = sl.summarize(records)
    assert summary.count == 1
    assert summary.max_normalized_residual == summary.median_normalized_residual


def test_summarize_counts_violations():
    spec = sl.GridSpec(
        T_values=(100.0,),
        shift_generator=sl.FixedList(shifts=(((1.0 + 0j), 0j), ((0.001 + 0j), 0j))),
    )
    records = sl.run_scan(spec, "lemma2", workers=1)
    (summary,) = sl.summarize(records)
    # |t + alpha'| = 100 <= 10|c| fails only for the big c... both shifts
    # have |c| <= 1 so domain holds; craft an out-of-domain point instead
    spec2 = sl.GridSpec(
        T_values=(5.0,), shift_generator=sl.FixedList(shifts=(((1.0 + 0j), 0j),))
    )
    records2 = sl.run_scan(spec2, "lemma2", workers=1)
    (s2,) = sl.summarize(records2)
    assert s2.hypothesis_violations == 1


def test_summarize_partitions_by_kind():
    spec = sl.GridSpec(
        T_values=(100.0,), shift_generator=sl.FixedList(shifts=(((0.01 + 0j), 0j),))
    )
    r1 = sl.run_scan(spec, "lemma2", workers=1)
    r2 = sl.run_scan(spec, "lemma1", workers=1)
    summaries = sl.summarize(r1 + r2)
    assert [s.kind for s in summaries] == ["lemma1", "lemma2"]


def test_summarize_empty():
    with pytest.raises(EmptyInput):
        sl.summarize([])


# ----------------------------------------------------------------------
# persistence and replay
# ----------------------------------------------------------------------


def test_csv_schema_and_17_digits(tmp_path):
    spec = small_theorem_spec()
    records = sl.run_scan(spec, "theorem", quad=COARSE, workers=1)
    path = tmp_path / "scan.csv"
    sl.write_csv(records, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(sl.CSV_FIELDS)
    assert len(lines) == 1 + len(records)
    cell = lines[1].split(",")[9]  # lhs_re
    assert float(cell) == records[0].lhs.real  # 17 significant digits round-trip


def test_manifest_replay_bit_identical(tmp_path):
    spec = sl.GridSpec(
        T_values=(500.0,),
        shift_generator=sl.RandomInBox(seed=3, count=3, im_hi=50.0, equal_pairs=True),
    )
    records = sl.run_scan(spec, "lemma1", workers=1)
    csv_path = tmp_path / "scan.csv"
    sha = sl.write_csv(records, csv_path)
    manifest = sl.write_manifest(
        tmp_path / "scan.json", spec, "lemma1", sl.DEFAULT_POLICY,
        sl.DEFAULT_QUADRATURE, str(csv_path), sha, False,
    )
    _, body = sl.run_from_manifest(manifest, workers=2)
    assert hashlib.sha256(body).hexdigest() == sha


def test_desk_grid_specs_cardinality():
    specs = sl.desk_grid_specs()
    assert len(specs) == 2  # re shifts 0 and 1/log T
    pts = sum(
        len(spec.shift_generator.generate(t, spec.re_shift_magnitude))
        for spec in specs
        for t in spec.T_values
    )
    assert pts == 100  # 5 T x 5 exponents x 2 signs x 2 re-shifts
