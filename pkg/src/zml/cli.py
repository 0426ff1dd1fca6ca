"""Command-line front end: selftest, dsum, chiprod, moment, scan.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget or
runtime error.  Scans read a flat INI config (sections per module, CLI
flags override) and write a CSV plus a JSON manifest from which the run
replays byte-identically.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from pathlib import Path

from . import __version__
from .complexfn import EvalMethod, EvalPolicy, selftest
from .divisor import (
    DEFAULT_EPSILON,
    PAIRS_CEILING,
    dsum_pairs,
    lemma1_report,
)
from .errors import BudgetExceeded, DomainError, ZmlError
from .moment import QuadratureConfig, theorem_report
from .chiprod import chi_product_report
from .scanlab import (
    FixedList,
    GridSpec,
    PowerLaw,
    RandomInBox,
    ScanRecord,
    render_summary,
    resolve_workers,
    run_scan,
    summarize,
    write_csv,
    write_manifest,
)
from .shifts import ShiftPair

_METHODS = {
    "auto": EvalMethod.AUTO,
    "euler-maclaurin": EvalMethod.EULER_MACLAURIN,
    "em": EvalMethod.EULER_MACLAURIN,
    "riemann-siegel": EvalMethod.RIEMANN_SIEGEL,
    "rs": EvalMethod.RIEMANN_SIEGEL,
}


def _add_shift_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--are", "--a", dest="are", type=float, default=0.0,
                   help="Re(a) (alias --a)")
    p.add_argument("--aim", dest="aim", type=float, default=0.0, help="Im(a)")
    p.add_argument("--bre", "--b", dest="bre", type=float, default=0.0,
                   help="Re(b) (alias --b)")
    p.add_argument("--bim", dest="bim", type=float, default=0.0, help="Im(b)")


def _add_policy_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=sorted(_METHODS), default="auto",
                   help="zeta evaluator selection")
    p.add_argument("--target-abs-error", type=float, default=1e-12)
    p.add_argument("--max-terms", type=int, default=5_000_000)


def _add_quadrature_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--panel-width", type=float, default=0.25)
    p.add_argument("--nodes-per-panel", type=int, default=8)
    p.add_argument("--rtol", type=float, default=1e-6,
                   help="quadrature refinement tolerance")
    p.add_argument("--max-panels", type=int, default=2_000_000)


def _policy_from(args) -> EvalPolicy:
    return EvalPolicy(
        method=_METHODS[args.method],
        target_abs_error=args.target_abs_error,
        max_terms=args.max_terms,
    )


def _quad_from(args) -> QuadratureConfig:
    return QuadratureConfig(
        panel_width=args.panel_width,
        nodes_per_panel=args.nodes_per_panel,
        refinement_tolerance=args.rtol,
        max_panels=args.max_panels,
    )


def _fmt(z: complex) -> str:
    return f"{z.real:+.12e} {z.imag:+.12e}i"


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def cmd_selftest(args) -> int:
    results = selftest(gamma_value=args.inject_gamma_error)
    width = max(len(c.name) for c in results)
    for c in results:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}  {c.name:<{width}}  {c.detail}")
    failed = [c for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        print(f"FAILED: {', '.join(c.name for c in failed)}")
        return 1
    return 0


def cmd_dsum(args) -> int:
    c = complex(args.c, args.cim)
    rep = lemma1_report(args.x, c, args.epsilon, policy=_policy_from(args))
    print(f"x                   = {args.x:.17g}")
    print(f"c                   = {_fmt(rep.c)}")
    print(f"exact D_c(x)        = {_fmt(rep.exact)}")
    print(f"main term           = {_fmt(rep.main_term)}")
    print(f"residual            = {_fmt(rep.residual)}")
    print(f"normalizer          = {rep.normalizer:.17g}")
    print(f"normalized residual = {rep.normalized_residual:.17g}")
    print(f"hypothesis_ok       = {rep.hypothesis_ok}")
    if args.oracle:
        if args.x > PAIRS_CEILING:
            print(f"oracle              = skipped (x above {PAIRS_CEILING:g})")
        else:
            oracle = dsum_pairs(args.x, c)
            diff = abs(rep.exact - oracle)
            print(f"oracle dsum_pairs   = {_fmt(oracle)}")
            print(f"|fast - oracle|     = {diff:.3e}")
    if args.csv:
        record = ScanRecord(
            kind="lemma1",
            grid_value=args.x,
            shifts=ShiftPair(c, 0.0),
            lhs=rep.exact,
            rhs=rep.main_term,
            residual_abs=abs(rep.residual),
            normalizer=rep.normalizer,
            normalized_residual=rep.normalized_residual,
            in_hypothesis=rep.hypothesis_ok,
            quad_error_est=0.0,
            wall_time_s=0.0,
        )
        write_csv([record], args.csv)
        print(f"csv row written to {args.csv}")
    return 0


def cmd_chiprod(args) -> int:
    shifts = ShiftPair(complex(args.are, args.aim), complex(args.bre, args.bim))
    t_values = [float(v) for v in args.t.split(",") if v]
    if not t_values:
        raise DomainError("--t needs at least one value")
    print("t, exact_re, exact_im, lemma2_re, lemma2_im, rel_error, budget, in_domain")
    reports = []
    for t in t_values:
        rep = chi_product_report(shifts, t, budget_constant=args.budget_constant)
        reports.append(rep)
        if rep.in_domain:
            lemma2 = rep.lemma2_value
            print(
                f"{t:.17g}, {rep.exact.real:.12e}, {rep.exact.imag:.12e}, "
                f"{lemma2.real:.12e}, {lemma2.imag:.12e}, "
                f"{rep.relative_error:.6e}, {rep.error_budget:.6e}, true"
            )
        else:
            print(
                f"{t:.17g}, {rep.exact.real:.12e}, {rep.exact.imag:.12e}, "
                f"nan, nan, nan, nan, false"
            )
    in_dom = [r for r in reports if r.in_domain]
    if len(in_dom) >= 2 and in_dom[0].relative_error > 0:
        ratio = in_dom[-1].relative_error / in_dom[0].relative_error
        print(f"error ratio (last/first) = {ratio:.6f}")
    return 0


def cmd_moment(args) -> int:
    shifts = ShiftPair(complex(args.are, args.aim), complex(args.bre, args.bim))
    rep = theorem_report(
        shifts, args.T, _quad_from(args), _policy_from(args),
        hypothesis_constant=args.hypothesis_constant,
    )
    print(f"T                   = {rep.T:.17g}")
    print(f"a                   = {_fmt(shifts.a)}")
    print(f"b                   = {_fmt(shifts.b)}")
    print(f"c                   = {_fmt(shifts.c)}")
    print(f"lhs integral        = {_fmt(rep.lhs)}")
    print(f"rhs integral        = {_fmt(rep.rhs)}")
    print(f"residual            = {_fmt(rep.residual)}")
    print(f"normalizer          = {rep.normalizer:.17g}")
    print(f"normalized residual = {rep.normalized_residual:.17g}")
    print(f"u                   = {rep.u:.17g}")
    print(f"v                   = {rep.v:.17g}")
    print(f"hypothesis_ok       = {rep.hypothesis_ok}")
    print(
        f"quadrature          = lhs: {rep.quad_lhs.evaluated_panels} panels, "
        f"est {rep.quad_lhs.error_estimate:.3e}; "
        f"rhs: {rep.quad_rhs.evaluated_panels} panels, "
        f"est {rep.quad_rhs.error_estimate:.3e}"
    )
    return 0


# ----------------------------------------------------------------------
# scan config
# ----------------------------------------------------------------------

_CONFIG_KEYS = {
    "grid": {
        "kinds", "t_values", "generator", "exponents", "beta_signs",
        "re_shift_magnitude", "epsilon", "replication", "seed", "count",
        "re_lo", "re_hi", "im_lo", "im_hi", "im_log", "equal_pairs",
        "shifts", "allow_beyond_theorem",
    },
    "quadrature": {"panel_width", "nodes_per_panel", "refinement_tolerance",
                   "max_panels"},
    "policy": {"method", "target_abs_error", "max_terms"},
    "output": {"csv", "manifest", "timing"},
}

DEFAULT_CONFIG = """
[grid]
kinds = theorem, lemma1, lemma2
t_values = 100, 250
generator = powerlaw
exponents = 0, 1.0
beta_signs = 1, -1
re_shift_magnitude = 0.0
epsilon = 0.05
replication = 1

[quadrature]
panel_width = 0.25
nodes_per_panel = 8
refinement_tolerance = 1e-6
max_panels = 2000000

[policy]
method = auto
target_abs_error = 1e-12
max_terms = 5000000

[output]
csv = zml_scan.csv
manifest = zml_scan_manifest.json
timing = false
"""


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(v.strip()) for v in text.split(",") if v.strip())


def _load_config(path: str | None) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    cfg.read_string(DEFAULT_CONFIG)
    if path:
        user = configparser.ConfigParser()
        with open(path, "r", encoding="utf-8") as fh:
            user.read_file(fh)
        for section in user.sections():
            if section not in _CONFIG_KEYS:
                raise DomainError(f"unknown config section [{section}]")
            for key, value in user.items(section):
                if key not in _CONFIG_KEYS[section]:
                    raise DomainError(f"unknown config key {key!r} in [{section}]")
                cfg.set(section, key, value)
    return cfg


def _grid_from_config(cfg: configparser.ConfigParser) -> tuple[GridSpec, tuple[str, ...]]:
    g = cfg["grid"]
    kinds = tuple(k.strip() for k in g.get("kinds").split(",") if k.strip())
    generator_name = g.get("generator").strip().lower()
    if generator_name == "powerlaw":
        gen = PowerLaw(
            exponents=_parse_floats(g.get("exponents")),
            beta_signs=tuple(int(v) for v in _parse_floats(g.get("beta_signs"))),
        )
    elif generator_name == "random":
        gen = RandomInBox(
            seed=g.getint("seed", fallback=0),
            count=g.getint("count", fallback=8),
            re_lo=g.getfloat("re_lo", fallback=-1.0),
            re_hi=g.getfloat("re_hi", fallback=1.0),
            im_lo=g.getfloat("im_lo", fallback=0.1),
            im_hi=g.getfloat("im_hi", fallback=1e4),
            im_log=g.getboolean("im_log", fallback=True),
            equal_pairs=g.getboolean("equal_pairs", fallback=False),
        )
    elif generator_name == "fixed":
        pairs = []
        for chunk in g.get("shifts", fallback="").split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            vals = [float(v) for v in chunk.split(",")]
            if len(vals) != 4:
                raise DomainError(
                    "fixed shifts need 4 comma-separated reals per pair "
                    "(are, aim, bre, bim), pairs separated by ';'"
                )
            pairs.append((complex(vals[0], vals[1]), complex(vals[2], vals[3])))
        if not pairs:
            raise DomainError("fixed generator needs a 'shifts' entry")
        gen = FixedList(shifts=tuple(pairs))
    else:
        raise DomainError(f"unknown generator {generator_name!r}")
    spec = GridSpec(
        T_values=_parse_floats(g.get("t_values")),
        shift_generator=gen,
        re_shift_magnitude=g.getfloat("re_shift_magnitude"),
        epsilon=g.getfloat("epsilon"),
        replication=g.getint("replication"),
        allow_beyond_theorem=g.getboolean("allow_beyond_theorem", fallback=False),
    )
    return spec, kinds


def cmd_scan(args) -> int:
    cfg = _load_config(args.config)
    spec, kinds = _grid_from_config(cfg)
    if args.kind:
        kinds = (args.kind,)
    q = cfg["quadrature"]
    quad = QuadratureConfig(
        panel_width=q.getfloat("panel_width"),
        nodes_per_panel=q.getint("nodes_per_panel"),
        refinement_tolerance=q.getfloat("refinement_tolerance"),
        max_panels=q.getint("max_panels"),
    )
    p = cfg["policy"]
    policy = EvalPolicy(
        method=_METHODS[p.get("method").strip()],
        target_abs_error=p.getfloat("target_abs_error"),
        max_terms=p.getint("max_terms"),
    )
    out = cfg["output"]
    csv_path = args.out_csv or out.get("csv")
    manifest_path = args.out_manifest or out.get("manifest")
    timing = args.timing or out.getboolean("timing")
    workers = resolve_workers(args.workers)
    records: list[ScanRecord] = []
    for kind in kinds:
        records.extend(
            run_scan(spec, kind, policy, quad, workers=workers, measure_time=timing)
        )
    sha = write_csv(records, csv_path)
    write_manifest(
        manifest_path, spec, ",".join(kinds), policy, quad, csv_path, sha, timing
    )
    print(render_summary(summarize(records)))
    print(f"{len(records)} records -> {csv_path}")
    print(f"manifest -> {manifest_path} (csv sha256 {sha[:16]}...)")
    return 0


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zml",
        description="Numerical verification lab for the shifted second moment "
        "of the Riemann zeta function.",
    )
    parser.add_argument("--version", action="version", version=f"zml {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("selftest", help="run the special-function identity suite")
    p.add_argument("--inject-gamma-error", type=float, default=None,
                   help=argparse.SUPPRESS)  # fault-injection test hook
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("dsum", help="shifted divisor sum D_c(x) vs its main term")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--c", type=float, default=0.0, help="Re(c)")
    p.add_argument("--cim", type=float, default=0.0, help="Im(c)")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--oracle", action="store_true",
                   help="also run the pair-enumeration oracle")
    p.add_argument("--csv", default=None, help="write the report as a CSV row")
    _add_policy_flags(p)
    p.set_defaults(func=cmd_dsum)

    p = sub.add_parser("chiprod", help="chi product, exact vs Lemma-2 asymptotic")
    _add_shift_flags(p)
    p.add_argument("--t", required=True, help="comma-separated heights")
    p.add_argument("--budget-constant", type=float, default=10.0)
    p.set_defaults(func=cmd_chiprod)

    p = sub.add_parser("moment", help="both Theorem-1 integrals up to height T")
    p.add_argument("--T", type=float, required=True)
    _add_shift_flags(p)
    p.add_argument("--hypothesis-constant", type=float, default=2.0)
    _add_policy_flags(p)
    _add_quadrature_flags(p)
    p.set_defaults(func=cmd_moment)

    p = sub.add_parser("scan", help="grid scan -> CSV + manifest + summary")
    p.add_argument("--config", default=None, help="INI config path")
    p.add_argument("--kind", default=None, choices=("lemma1", "lemma2", "theorem"),
                   help="restrict to one record kind")
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-manifest", default=None)
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (capped by ZML_THREADS)")
    p.add_argument("--timing", action="store_true",
                   help="record wall times (forfeits byte-identical replays)")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ZmlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
