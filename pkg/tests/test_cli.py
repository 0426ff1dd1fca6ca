"""CLI tests: subcommand behavior, exit codes, config handling."""

import math
import re

import pytest

from zml.cli import main

TINY_SCAN_CONFIG = """
[grid]
kinds = lemma2
t_values = 50, 100
generator = powerlaw
exponents = 0
beta_signs = 1, -1
re_shift_magnitude = 0.5

[quadrature]
panel_width = 0.5

[output]
csv = {csv}
manifest = {manifest}
"""


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ----------------------------------------------------------------------
# selftest
# ----------------------------------------------------------------------


def test_selftest_passes(capsys):
    code, out, _ = run_cli(capsys, "selftest")
    assert code == 0
    assert out.count("PASS") >= 10
    assert "FAIL" not in out


def test_selftest_fault_injection(capsys):
    code, out, _ = run_cli(capsys, "selftest", "--inject-gamma-error", "0.58")
    assert code == 1
    assert "FAILED:" in out
    assert "gamma" in out  # the failing identity is named


# ----------------------------------------------------------------------
# dsum
# ----------------------------------------------------------------------


def test_dsum_pair_oracle_value(capsys):
    code, out, _ = run_cli(capsys, "dsum", "--x", "10.5", "--c", "0", "--oracle")
    assert code == 0
    assert "+2.700000000000e+01" in out
    m = re.search(r"\|fast - oracle\|\s+= ([0-9.e+-]+)", out)
    assert m and float(m.group(1)) < 1e-11


def test_dsum_hypothesis_flag_printed(capsys):
    code, out, _ = run_cli(capsys, "dsum", "--x", "1e4", "--c", "0.5")
    assert code == 0
    assert "hypothesis_ok       = False" in out


def test_dsum_small_c_vs_zero(capsys):
    # main terms agree to the true first-order rate (~5e-6 relative at
    # x = 1e5; the displayed value varies like c x log^2 x / 2)
    def main_term(c_flag):
        code, out, _ = run_cli(capsys, "dsum", "--x", "1e5", "--c", c_flag)
        assert code == 0
        m = re.search(r"main term\s+= ([+-][0-9.e+-]+) ", out)
        return float(m.group(1))

    v0 = main_term("0")
    v1 = main_term("1e-6")
    assert abs(v1 - v0) <= 1e-5 * abs(v0)


def test_dsum_csv_row(tmp_path, capsys):
    path = tmp_path / "row.csv"
    code, out, _ = run_cli(capsys, "dsum", "--x", "100", "--c", "0", "--csv", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0].startswith("kind,T,x,")
    assert lines[1].startswith("lemma1,,100,")


# ----------------------------------------------------------------------
# chiprod
# ----------------------------------------------------------------------


def test_chiprod_zero_shifts(capsys):
    code, out, _ = run_cli(capsys, "chiprod", "--a", "0", "--b", "0", "--t", "100")
    assert code == 0
    row = out.splitlines()[1]
    cells = [v.strip() for v in row.split(",")]
    assert float(cells[1]) == 1.0 and float(cells[3]) == 1.0
    assert cells[7] == "true"


def test_chiprod_error_ratio_halves(capsys):
    code, out, _ = run_cli(
        capsys, "chiprod", "--a", "0.01", "--b", "0", "--t", "1e4,2e4"
    )
    assert code == 0
    m = re.search(r"error ratio \(last/first\) = ([0-9.]+)", out)
    assert m and 0.3 <= float(m.group(1)) <= 0.7


def test_chiprod_out_of_domain_row(capsys):
    # |t + alpha'| = 5 <= 10 |c| = 10: no lemma2 value, in_domain false
    code, out, _ = run_cli(capsys, "chiprod", "--a", "1.0", "--b", "0", "--t", "5")
    assert code == 0
    row = out.splitlines()[1]
    assert row.endswith("false")
    assert "nan" in row


# ----------------------------------------------------------------------
# moment
# ----------------------------------------------------------------------


def test_moment_unshifted(capsys):
    code, out, _ = run_cli(capsys, "moment", "--T", "100")
    assert code == 0
    m = re.search(r"lhs integral\s+= ([+-][0-9.e+-]+) ([+-][0-9.e+-]+)i", out)
    re_part, im_part = float(m.group(1)), float(m.group(2))
    assert abs(im_part) <= 1e-6 * abs(re_part)


def test_moment_u_exponent(capsys):
    alpha_p = 500.0**1.5
    code, out, _ = run_cli(
        capsys, "moment", "--T", "500", "--aim", f"{alpha_p}",
        "--panel-width", "1.0",
    )
    assert code == 0
    m = re.search(r"^u\s+= ([0-9.]+)$", out, re.M)
    assert m and abs(float(m.group(1)) - 1.5) < 1e-9


def test_moment_budget_exit_code(capsys):
    code, _, err = run_cli(
        capsys, "moment", "--T", "100", "--max-panels", "4"
    )
    assert code == 3
    assert "budget" in err.lower()


# ----------------------------------------------------------------------
# scan
# ----------------------------------------------------------------------


def test_scan_default_files_and_determinism(tmp_path, capsys):
    cfg = tmp_path / "scan.ini"
    csv1 = tmp_path / "a.csv"
    man1 = tmp_path / "a.json"
    cfg.write_text(TINY_SCAN_CONFIG.format(csv=csv1, manifest=man1))
    code, out, _ = run_cli(capsys, "scan", "--config", str(cfg))
    assert code == 0
    assert csv1.exists() and man1.exists()
    assert "[lemma2]" in out
    csv2 = tmp_path / "b.csv"
    code, _, _ = run_cli(
        capsys, "scan", "--config", str(cfg), "--out-csv", str(csv2),
        "--out-manifest", str(tmp_path / "b.json"), "--workers", "2",
    )
    assert code == 0
    assert csv1.read_bytes() == csv2.read_bytes()


def test_scan_kind_filter(tmp_path, capsys):
    cfg = tmp_path / "scan.ini"
    csv = tmp_path / "c.csv"
    cfg.write_text(
        TINY_SCAN_CONFIG.format(csv=csv, manifest=tmp_path / "c.json").replace(
            "kinds = lemma2", "kinds = lemma1, lemma2"
        )
    )
    code, _, _ = run_cli(capsys, "scan", "--config", str(cfg), "--kind", "lemma1")
    assert code == 0
    kinds = {line.split(",")[0] for line in csv.read_text().splitlines()[1:]}
    assert kinds == {"lemma1"}


def test_scan_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    csv = tmp_path / "never.csv"
    cfg.write_text("[grid]\nbogus_key = 1\n")
    code, _, err = run_cli(capsys, "scan", "--config", str(cfg),
                           "--out-csv", str(csv))
    assert code == 2
    assert "bogus_key" in err
    assert not csv.exists()  # no partial outputs


def test_invalid_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["moment", "--T", "100", "--no-such-flag"])
    assert exc.value.code == 2


def test_scientific_notation_flags(capsys):
    code, out, _ = run_cli(capsys, "dsum", "--x", "1e3", "--c", "1e-2")
    assert code == 0
    assert "x                   = 1000" in out
