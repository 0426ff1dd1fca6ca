"""Grid scans over (T, a, b) and (x, c) with reproducible persistence.

A scan is: a GridSpec (T values x a shift generator), a record kind
(lemma1 | lemma2 | theorem), and a worker pool.  Every grid point becomes
one ScanRecord -- errors included, as NaN-valued records -- and records
serialize to a fixed CSV schema plus a JSON manifest from which the scan
can be replayed bit-identically, independent of the worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import median
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .chiprod import chi_product_report
from .complexfn import DEFAULT_POLICY, EvalMethod, EvalPolicy
from .divisor import DEFAULT_EPSILON, lemma1_report
from .errors import DegenerateFit, DomainError, EmptyInput, InsufficientData, ZmlError
from .moment import DEFAULT_QUADRATURE, QuadratureConfig, theorem_report
from .shifts import ShiftPair

__all__ = [
    "FixedList",
    "PowerLaw",
    "RandomInBox",
    "GridSpec",
    "ScanRecord",
    "FitResult",
    "run_scan",
    "fit_error_exponent",
    "summarize",
    "write_csv",
    "write_manifest",
    "records_to_csv_bytes",
    "run_from_manifest",
    "desk_grid_specs",
    "resolve_workers",
    "CSV_FIELDS",
]

KINDS = ("lemma1", "lemma2", "theorem")

CSV_FIELDS = (
    "kind",
    "T",
    "x",
    "alpha",
    "alpha_p",
    "beta",
    "beta_p",
    "gamma",
    "gamma_p",
    "lhs_re",
    "lhs_im",
    "rhs_re",
    "rhs_im",
    "residual_abs",
    "normalizer",
    "normalized_residual",
    "in_hypothesis",
    "quad_error_est",
    "wall_time_s",
)


# ----------------------------------------------------------------------
# shift generators
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class FixedList:
    """Explicit (a, b) pairs, used verbatim at every grid value."""

    shifts: tuple[tuple[complex, complex], ...]

    def generate(self, grid_value: float, re_shift: float) -> list[ShiftPair]:
        return [ShiftPair(a, b) for a, b in self.shifts]


@dataclass(frozen=True)
class PowerLaw:
    """Imaginary parts |Im| = X^e for each exponent e; real parts are the
    GridSpec's re_shift_magnitude scaled by 1/log X.  beta_signs controls
    the sign of beta' (the theorem's beta' <= 0 cases); default is the
    single +1 branch, matching one record per exponent."""

    exponents: tuple[float, ...]
    beta_signs: tuple[int, ...] = (1,)

    def generate(self, grid_value: float, re_shift: float) -> list[ShiftPair]:
        re = re_shift / math.log(grid_value)
        out = []
        for e in self.exponents:
            im = grid_value**e
            for sign in self.beta_signs:
                out.append(ShiftPair(complex(re, im), complex(re, sign * im)))
        return out


@dataclass(frozen=True)
class RandomInBox:
    """count draws of (a, b) with Re uniform in [re_lo, re_hi] scaled by
    1/log X and Im in [im_lo, im_hi] (log-uniform in magnitude when
    im_log, with random sign).  The seed is combined with the grid index
    so replays are exact."""

    seed: int
    count: int
    re_lo: float = -1.0
    re_hi: float = 1.0
    im_lo: float = 0.1
    im_hi: float = 1e4
    im_log: bool = True
    equal_pairs: bool = False  # draw b = 0 so that c = a

    def generate(self, grid_value: float, re_shift: float) -> list[ShiftPair]:
        rng = np.random.default_rng([self.seed, int(grid_value * 1024) & 0x7FFFFFFF])
        scale = 1.0 / math.log(grid_value)
        out = []
        for _ in range(self.count):
            re = rng.uniform(self.re_lo, self.re_hi) * scale
            if self.im_log:
                mag = 10.0 ** rng.uniform(math.log10(self.im_lo), math.log10(self.im_hi))
                im = mag * (1.0 if rng.random() < 0.5 else -1.0)
            else:
                im = rng.uniform(self.im_lo, self.im_hi)
            a = complex(re, im)
            b = 0.0 + 0.0j if self.equal_pairs else complex(
                rng.uniform(self.re_lo, self.re_hi) * scale,
                rng.uniform(self.im_lo, self.im_hi),
            )
            out.append(ShiftPair(a, b))
        return out


ShiftGenerator = FixedList | PowerLaw | RandomInBox


@dataclass(frozen=True)
class GridSpec:
    """One scan grid: values of T (or x for lemma1), a shift generator,
    and bookkeeping knobs.  Exponents beyond the theorem's T^2 regime are
    rejected unless allow_beyond_theorem marks the run exploratory."""

    T_values: tuple[float, ...]
    shift_generator: ShiftGenerator
    re_shift_magnitude: float = 0.0
    epsilon: float = DEFAULT_EPSILON
    replication: int = 1
    allow_beyond_theorem: bool = False

    def __post_init__(self) -> None:
        if not self.T_values:
            raise DomainError("GridSpec needs at least one T value")
        if any(t < 2.0 for t in self.T_values):
            raise DomainError("all grid values must be >= 2")
        if self.replication < 1:
            raise DomainError("replication must be >= 1")
        if isinstance(self.shift_generator, PowerLaw) and not self.allow_beyond_theorem:
            if any(e > 2.0 for e in self.shift_generator.exponents):
                raise DomainError(
                    "exponents beyond 2 leave the theorem's T^(2-eps) regime; "
                    "set allow_beyond_theorem to run them as exploratory"
                )


@dataclass(frozen=True)
class ScanRecord:
    kind: str
    grid_value: float  # T for lemma2/theorem records, x for lemma1
    shifts: ShiftPair
    lhs: complex
    rhs: complex
    residual_abs: float
    normalizer: float
    normalized_residual: float
    in_hypothesis: bool
    quad_error_est: float
    wall_time_s: float
    error: str | None = None

    def to_row(self) -> dict[str, object]:
        is_lemma1 = self.kind == "lemma1"
        return {
            "kind": self.kind,
            "T": None if is_lemma1 else self.grid_value,
            "x": self.grid_value if is_lemma1 else None,
            "alpha": self.shifts.alpha,
            "alpha_p": self.shifts.alpha_p,
            "beta": self.shifts.beta,
            "beta_p": self.shifts.beta_p,
            "gamma": self.shifts.gamma,
            "gamma_p": self.shifts.gamma_p,
            "lhs_re": self.lhs.real,
            "lhs_im": self.lhs.imag,
            "rhs_re": self.rhs.real,
            "rhs_im": self.rhs.imag,
            "residual_abs": self.residual_abs,
            "normalizer": self.normalizer,
            "normalized_residual": self.normalized_residual,
            "in_hypothesis": self.in_hypothesis,
            "quad_error_est": self.quad_error_est,
            "wall_time_s": self.wall_time_s,
        }


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


# ----------------------------------------------------------------------
# scan execution
# ----------------------------------------------------------------------


def resolve_workers(explicit: int | None = None) -> int:
    """Worker count: explicit argument, capped by the ZML_THREADS env var
    (which also serves as the default)."""
    cap = os.environ.get("ZML_THREADS")
    cap_n = max(1, int(cap)) if cap else (os.cpu_count() or 1)
    if explicit is None:
        return cap_n
    return max(1, min(explicit, cap_n))


def _run_point(task) -> ScanRecord:
    (kind, grid_value, a, b, epsilon, policy, quad, measure) = task
    shifts = ShiftPair(a, b)
    start = time.perf_counter()
    try:
        if kind == "lemma1":
            rep = lemma1_report(grid_value, shifts.c, epsilon, policy=policy)
            lhs, rhs = rep.exact, rep.main_term
            residual_abs = abs(rep.residual)
            normalizer = rep.normalizer
            normalized = rep.normalized_residual
            hyp = rep.hypothesis_ok
            quad_err = 0.0
        elif kind == "lemma2":
            rep = chi_product_report(shifts, grid_value)
            lhs = rep.exact
            rhs = rep.lemma2_value if rep.lemma2_value is not None else complex(
                math.nan, math.nan
            )
            residual_abs = (
                abs(rep.exact - rep.lemma2_value)
                if rep.lemma2_value is not None
                else math.nan
            )
            normalizer = rep.error_budget
            normalized = rep.relative_error
            hyp = rep.in_domain
            quad_err = 0.0
        elif kind == "theorem":
            rep = theorem_report(shifts, grid_value, quad, policy)
            lhs, rhs = rep.lhs, rep.rhs
            residual_abs = abs(rep.residual)
            normalizer = rep.normalizer
            normalized = rep.normalized_residual
            hyp = rep.hypothesis_ok
            quad_err = rep.quad_lhs.error_estimate + rep.quad_rhs.error_estimate
        else:
            raise DomainError(f"unknown scan kind {kind!r}")
        wall = time.perf_counter() - start if measure else 0.0
        return ScanRecord(
            kind, grid_value, shifts, lhs, rhs, residual_abs, normalizer,
            normalized, hyp, quad_err, wall,
        )
    except ZmlError as exc:
        wall = time.perf_counter() - start if measure else 0.0
        nan = complex(math.nan, math.nan)
        return ScanRecord(
            kind, grid_value, shifts, nan, nan, math.nan, math.nan, math.nan,
            False, math.nan, wall, error=str(exc),
        )


def run_scan(
    spec: GridSpec,
    kind: str,
    policy: EvalPolicy = DEFAULT_POLICY,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
    workers: int | None = None,
    measure_time: bool = False,
) -> list[ScanRecord]:
    """One record per grid point per replication, deterministically
    ordered by (grid value, shift components); per-point failures become
    NaN records rather than aborting the scan."""
    if kind not in KINDS:
        raise DomainError(f"kind must be one of {KINDS}, got {kind!r}")
    tasks = []
    for grid_value in spec.T_values:
        for sp in spec.shift_generator.generate(grid_value, spec.re_shift_magnitude):
            for _ in range(spec.replication):
                tasks.append(
                    (kind, grid_value, sp.a, sp.b, spec.epsilon, policy, quad,
                     measure_time)
                )
    n_workers = resolve_workers(workers)
    if n_workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            records = list(pool.map(_run_point, tasks, chunksize=1))
    else:
        records = [_run_point(t) for t in tasks]
    records.sort(
        key=lambda r: (
            r.kind,
            r.grid_value,
            r.shifts.alpha,
            r.shifts.alpha_p,
            r.shifts.beta,
            r.shifts.beta_p,
        )
    )
    return records


# ----------------------------------------------------------------------
# fits and summaries
# ----------------------------------------------------------------------


def _field_of(record, name: str) -> float:
    if isinstance(record, ScanRecord):
        return float(record.to_row()[name])
    return float(record[name])


def fit_error_exponent(records: Sequence, x_field: str, y_field: str) -> FitResult:
    """Least-squares slope of log y against log x over the records with
    positive finite coordinates."""
    xs, ys = [], []
    for r in records:
        x = _field_of(r, x_field)
        y = _field_of(r, y_field)
        if x > 0 and y > 0 and math.isfinite(x) and math.isfinite(y):
            xs.append(math.log(x))
            ys.append(math.log(y))
    if len(xs) < 3:
        raise InsufficientData(
            f"need >= 3 records with positive {x_field}, {y_field}; got {len(xs)}"
        )
    lx = np.array(xs)
    ly = np.array(ys)
    var = float(np.sum((lx - lx.mean()) ** 2))
    if var == 0.0:
        raise DegenerateFit(f"all {x_field} values equal; slope undefined")
    slope = float(np.sum((lx - lx.mean()) * (ly - ly.mean())) / var)
    intercept = float(ly.mean() - slope * lx.mean())
    fitted = intercept + slope * lx
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return FitResult(slope=slope, intercept=intercept, r_squared=r2, n_points=len(xs))


@dataclass(frozen=True)
class KindSummary:
    kind: str
    count: int
    error_count: int
    hypothesis_violations: int
    max_normalized_residual: float
    median_normalized_residual: float
    worst_grid_value: float
    worst_shifts: str


def summarize(records: Sequence[ScanRecord]) -> list[KindSummary]:
    """Per-kind max/median normalized residual, violation counts, and the
    worst point."""
    if not records:
        raise EmptyInput("no records to summarize")
    out = []
    for kind in sorted({r.kind for r in records}):
        sub = [r for r in records if r.kind == kind]
        finite = [r for r in sub if math.isfinite(r.normalized_residual)]
        worst = max(finite, key=lambda r: r.normalized_residual) if finite else sub[0]
        vals = [r.normalized_residual for r in finite]
        out.append(
            KindSummary(
                kind=kind,
                count=len(sub),
                error_count=sum(1 for r in sub if r.error is not None),
                hypothesis_violations=sum(1 for r in sub if not r.in_hypothesis),
                max_normalized_residual=max(vals) if vals else math.nan,
                median_normalized_residual=median(vals) if vals else math.nan,
                worst_grid_value=worst.grid_value,
                worst_shifts=f"a={worst.shifts.a:.6g}, b={worst.shifts.b:.6g}",
            )
        )
    return out


def render_summary(summaries: Iterable[KindSummary]) -> str:
    lines = []
    for s in summaries:
        lines.append(
            f"[{s.kind}] n={s.count} errors={s.error_count} "
            f"hyp_violations={s.hypothesis_violations} "
            f"max_norm_resid={s.max_normalized_residual:.6g} "
            f"median={s.median_normalized_residual:.6g} "
            f"worst at {s.worst_grid_value:g} ({s.worst_shifts})"
        )
    return "\n".join(lines)


# ----------------------------------------------------------------------
# persistence
# ----------------------------------------------------------------------


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, str):
        return value
    return f"{float(value):.17g}"


def records_to_csv_bytes(records: Sequence[ScanRecord]) -> bytes:
    lines = [",".join(CSV_FIELDS)]
    for r in records:
        row = r.to_row()
        lines.append(",".join(_format_cell(row[f]) for f in CSV_FIELDS))
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_csv(records: Sequence[ScanRecord], path: str | Path) -> str:
    """Atomic CSV write; returns the body's sha256 for the manifest."""
    path = Path(path)
    body = records_to_csv_bytes(records)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(body)
    tmp.replace(path)
    return hashlib.sha256(body).hexdigest()


def _spec_to_jsonable(spec: GridSpec) -> dict:
    gen = spec.shift_generator
    gen_dict = {"type": type(gen).__name__}
    for k, v in asdict(gen).items():
        if k == "shifts":
            v = [[[a.real, a.imag], [b.real, b.imag]] for a, b in v]
        gen_dict[k] = v
    return {
        "T_values": list(spec.T_values),
        "shift_generator": gen_dict,
        "re_shift_magnitude": spec.re_shift_magnitude,
        "epsilon": spec.epsilon,
        "replication": spec.replication,
        "allow_beyond_theorem": spec.allow_beyond_theorem,
    }


def _spec_from_jsonable(d: dict) -> GridSpec:
    g = dict(d["shift_generator"])
    gen_type = g.pop("type")
    if gen_type == "FixedList":
        shifts = tuple(
            (complex(a[0], a[1]), complex(b[0], b[1])) for a, b in g["shifts"]
        )
        gen: ShiftGenerator = FixedList(shifts=shifts)
    elif gen_type == "PowerLaw":
        gen = PowerLaw(
            exponents=tuple(g["exponents"]), beta_signs=tuple(g["beta_signs"])
        )
    elif gen_type == "RandomInBox":
        gen = RandomInBox(**g)
    else:
        raise DomainError(f"unknown generator type {gen_type!r} in manifest")
    return GridSpec(
        T_values=tuple(d["T_values"]),
        shift_generator=gen,
        re_shift_magnitude=d["re_shift_magnitude"],
        epsilon=d["epsilon"],
        replication=d["replication"],
        allow_beyond_theorem=d["allow_beyond_theorem"],
    )


def write_manifest(
    path: str | Path,
    spec: GridSpec,
    kind: str,
    policy: EvalPolicy,
    quad: QuadratureConfig,
    csv_path: str,
    csv_sha256: str,
    measure_time: bool,
) -> dict:
    """JSON manifest carrying everything needed to replay the scan."""
    config = {
        "artifact_version": __version__,
        "kind": kind,
        "grid": _spec_to_jsonable(spec),
        "policy": {
            "method": policy.method.value,
            "target_abs_error": policy.target_abs_error,
            "max_terms": policy.max_terms,
        },
        "quadrature": {
            "panel_width": quad.panel_width,
            "nodes_per_panel": quad.nodes_per_panel,
            "refinement_tolerance": quad.refinement_tolerance,
            "max_panels": quad.max_panels,
        },
        "timing_recorded": measure_time,
    }
    fingerprint = hashlib.sha256(
        json.dumps(config, sort_keys=True).encode("utf-8")
    ).hexdigest()
    manifest = dict(config)
    manifest["config_fingerprint"] = fingerprint
    manifest["csv_path"] = str(csv_path)
    manifest["csv_sha256"] = csv_sha256
    body = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    p = Path(path)
    tmp = p.with_suffix(p.suffix + ".tmp")
    tmp.write_text(body, encoding="utf-8")
    tmp.replace(p)
    return manifest


def run_from_manifest(
    manifest: dict, workers: int | None = None
) -> tuple[list[ScanRecord], bytes]:
    """Replay a scan from its manifest; the CSV bytes must reproduce the
    recorded sha256 when the original run was untimed."""
    spec = _spec_from_jsonable(manifest["grid"])
    policy = EvalPolicy(
        method=EvalMethod(manifest["policy"]["method"]),
        target_abs_error=manifest["policy"]["target_abs_error"],
        max_terms=manifest["policy"]["max_terms"],
    )
    quad = QuadratureConfig(**manifest["quadrature"])
    records: list[ScanRecord] = []
    for kind in manifest["kind"].split(","):
        records.extend(
            run_scan(
                spec,
                kind,
                policy,
                quad,
                workers=workers,
                measure_time=manifest["timing_recorded"],
            )
        )
    return records, records_to_csv_bytes(records)


# ----------------------------------------------------------------------
# the default desk grid
# ----------------------------------------------------------------------


def desk_grid_specs(
    T_values: tuple[float, ...] = (100.0, 250.0, 500.0, 1000.0, 2000.0),
    exponents: tuple[float, ...] = (0.0, 1.0, 1.25, 1.5, 1.8),
    re_magnitudes: tuple[float, ...] = (0.0, 1.0),
) -> list[GridSpec]:
    """The default theorem grid: both beta' signs, real shifts 0 and
    1/log T, imaginary shifts T^e below the T^2 regime."""
    gen = PowerLaw(exponents=exponents, beta_signs=(1, -1))
    return [
        GridSpec(T_values=T_values, shift_generator=gen, re_shift_magnitude=mu)
        for mu in re_magnitudes
    ]
