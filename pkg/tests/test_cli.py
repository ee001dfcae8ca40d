import csv
import io
import json
import math
import subprocess
import sys

import pytest

from wigmetro.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_verify_small_passes(capsys):
    code, out, _ = run(capsys, "verify", "--max-n", "8")
    assert code == 0
    report = json.loads(out)
    assert report["meta"]["command"] == "verify"
    assert report["data"]["passed"] is True
    names = {r["identity"] for r in report["data"]["identities"]}
    assert names == {"parity_sum", "parity_total", "unitarity", "oracle", "symmetry"}
    parity = next(r for r in report["data"]["identities"] if r["identity"] == "parity_sum")
    assert parity["diagonal_range_m_nonzero"] == pytest.approx([0.5, 0.5], abs=1e-12)


def test_verify_impossible_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "--max-n", "4", "--tol", "1e-18", "--format", "csv")
    assert code == 1
    assert {r["identity"] for r in rows(out)} >= {"unitarity", "oracle"}


def test_dmat_spin_half(capsys):
    code, out, _ = run(capsys, "dmat", "--j", "1/2", "--beta", str(math.pi / 2))
    assert code == 0
    table = rows(out)
    assert [(r["m_row"], r["m_col"]) for r in table] == [
        ("0.5", "0.5"), ("0.5", "-0.5"), ("-0.5", "0.5"), ("-0.5", "-0.5")
    ]
    values = [float(r["real"]) for r in table]
    s = math.sqrt(0.5)
    assert values == pytest.approx([s, -s, s, s], abs=1e-15)


def test_dmat_beyond_support(capsys):
    code, _, err = run(capsys, "dmat", "--j", "101", "--beta", "0.3")
    assert code == 2
    assert "2j" in err


def test_dmat_j_parsing(capsys):
    # decimal text is exact, so 0.5 is accepted; 0.3 is not a half-integer
    assert run(capsys, "dmat", "--j", "0.5", "--beta", "0.3")[0] == 0
    assert run(capsys, "dmat", "--j", "0.3", "--beta", "0.3")[0] == 2


def test_curve_noon(capsys):
    code, out, _ = run(capsys, "curve", "--probe", "noon", "--n", "4", "--steps", "5")
    assert code == 0
    for r in rows(out):
        assert float(r["cfi"]) == pytest.approx(16.0, abs=1e-8)
        assert float(r["qfi"]) == pytest.approx(16.0, abs=1e-12)


def test_curve_parity_json(capsys):
    code, out, _ = run(
        capsys, "curve", "--probe", "noon", "--n", "3", "--measurement", "parity",
        "--steps", "4", "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["measurement"] == "parity"
    assert doc["data"]["cfi"] == pytest.approx([9.0] * 4, rel=1e-8)


def test_curve_missing_alpha(capsys):
    code, _, err = run(capsys, "curve", "--probe", "ec")
    assert code == 2
    assert "--alpha" in err


def test_bad_sweep(capsys):
    assert run(capsys, "curve", "--n", "2", "--steps", "1")[0] == 2
    assert run(capsys, "curve", "--n", "2", "--phi-min", "1", "--phi-max", "0.5")[0] == 2


def test_unknown_command(capsys):
    assert run(capsys, "nonsense")[0] == 2


def test_fig2_columns(capsys, tmp_path):
    path = tmp_path / "fig2.csv"
    code, out, _ = run(capsys, "fig2", "--steps", "7", "--out", str(path))
    assert code == 0 and out == ""
    table = rows(path.read_text())
    assert list(table[0]) == ["phi", "cfi_dpc", "cfi_parity", "qfi_ec", "h_joo"]
    for r in table:
        assert float(r["cfi_dpc"]) == pytest.approx(29.80, abs=5e-3)
        assert float(r["h_joo"]) == pytest.approx(34.93, abs=5e-3)
        assert float(r["cfi_parity"]) <= float(r["cfi_dpc"]) + 1e-8


def test_fig2_json_meta(capsys):
    code, out, _ = run(capsys, "fig2", "--steps", "3", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["meta"]["alpha"] == pytest.approx(math.sqrt(5))
    assert 0 < doc["meta"]["truncation_residual"] < 1e-12


def test_estimate(capsys):
    code, out, _ = run(
        capsys, "estimate", "--probe", "noon", "--n", "2", "--nu", "5000", "--trials", "40",
        "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    assert "PCG64" in doc["meta"]["prng"]
    record = {k: v[0] for k, v in doc["data"].items()}
    assert record["fisher"] == pytest.approx(4.0, abs=1e-8)
    assert 0.3 < record["ratio"] < 3.0


def test_estimate_rejects_single_trial(capsys):
    assert run(capsys, "estimate", "--n", "2", "--trials", "1")[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "wigmetro", "dmat", "--j", "0", "--beta", "1.0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "m_row,m_col,real,imag"
