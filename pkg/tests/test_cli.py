import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from tensor_esd import __version__
from tensor_esd.cli import main


def _run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _snapshot(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_esd_outputs_and_determinism(tmp_path):
    args = ["esd", "--n", "24", "--d", "2", "--gamma", "1", "--trials", "5", "--seed", "7"]
    code, a = _run(tmp_path, *args, name="a")
    assert code == 0
    _, b = _run(tmp_path, *args, name="b")
    assert _snapshot(a) == _snapshot(b)

    summary = json.loads((a / "esd_summary.json").read_text())
    assert len(summary["ks_to_mp"]) == 5
    assert summary["version"] == __version__
    assert summary["config"]["seed"] == 7 and "out" not in summary["config"]
    assert summary["gamma_n"] == 1.0
    assert max(summary["ks_to_mp"]) < 0.1
    assert set(summary["trials"][0]["moments"]) == {"1", "2", "3", "4"}

    eig = _rows(a / "esd_eigenvalues.csv")
    assert list(eig[0]) == ["trial", "index", "eigenvalue"]
    assert len(eig) == 5 * 276
    hist = _rows(a / "esd_histogram.csv")
    assert list(hist[0]) == ["trial", "bin_left", "bin_right", "count", "density"]
    assert sum(int(r["count"]) for r in hist) == 5 * 276
    ref = _rows(a / "esd_reference.csv")
    assert list(ref[0]) == ["bin_left", "bin_right", "density", "mass"]
    assert {(r["bin_left"], r["bin_right"]) for r in ref} == \
        {(r["bin_left"], r["bin_right"]) for r in hist}
    assert sum(float(r["mass"]) for r in ref) == pytest.approx(1.0, abs=1e-6)


def test_seed_changes_output(tmp_path):
    base = ["esd", "--n", "8", "--d", "2", "--p", "20", "--trials", "1"]
    _, a = _run(tmp_path, *base, "--seed", "1", name="a")
    _, b = _run(tmp_path, *base, "--seed", "2", name="b")
    assert (a / "esd_eigenvalues.csv").read_bytes() != (b / "esd_eigenvalues.csv").read_bytes()


@pytest.mark.parametrize("argv", [
    ["esd", "--n", "8", "--d", "2", "--p", "10", "--trials", "0", "--seed", "1"],
    ["esd", "--n", "8", "--d", "2", "--p", "10"],
    ["esd", "--n", "8", "--p", "10", "--seed", "1"],
    ["esd", "--n", "8", "--d", "2", "--seed", "1"],
    ["esd", "--n", "8", "--d", "2", "--p", "10", "--seed", "1", "--dist", "cauchy"],
    ["threshold-scan", "--n", "6", "--p", "10", "--seed", "1", "--d", "7"],
    ["identity-suite", "--seed", "1", "--z-im-floor", "0", "--trials", "2"],
    ["identity-suite", "--seed", "1", "--z-im-floor", "-1", "--trials", "2"],
    ["fixpoint", "--gamma", "1", "--eta", "1e-6"],
    ["fixpoint", "--gamma", "-1"],
    ["fixpoint"],
])
def test_validation_errors_exit_1(tmp_path, argv, capsys):
    code, _ = _run(tmp_path, *argv)
    assert code == 1
    assert capsys.readouterr().err


def test_p_and_gamma_are_exclusive(tmp_path):
    with pytest.raises(SystemExit) as exc:
        _run(tmp_path, "esd", "--n", "8", "--d", "2", "--p", "10", "--gamma", "1")
    assert exc.value.code == 1


def test_resource_cap_exit_1(tmp_path, monkeypatch):
    monkeypatch.setenv("RTP_MAX_ENTRIES", "100")
    code, _ = _run(tmp_path, "esd", "--n", "8", "--d", "2", "--p", "10", "--seed", "1")
    assert code == 1


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 8, "d": [2], "p": 30, "trials": 2, "seed": 3}))
    code, a = _run(tmp_path, "esd", "--config", str(cfg), name="a")
    assert code == 0
    s = json.loads((a / "esd_summary.json").read_text())
    assert s["config"]["p"] == 30 and s["config"]["trials"] == 2
    code, b = _run(tmp_path, "esd", "--config", str(cfg), "--gamma", "2", "--trials", "1",
                   name="b")
    assert code == 0
    s = json.loads((b / "esd_summary.json").read_text())
    assert s["config"]["p"] is None and s["config"]["gamma"] == 2.0
    assert len(s["ks_to_mp"]) == 1


def test_json_format(tmp_path):
    code, out = _run(tmp_path, "threshold-scan", "--n", "8", "--d", "1", "--d", "2",
                     "--p", "20", "--seed", "1", "--trials", "2", "--format", "json")
    assert code == 0
    doc = json.loads((out / "threshold_scan.json").read_text())
    assert doc["columns"] == ["n", "d", "d_over_sqrt_n", "mean_ks", "std_ks",
                              "exact_norm_variance_ratio"]
    assert len(doc["rows"]) == 2 and doc["version"] == __version__


def test_threshold_scan_examples(tmp_path):
    code, out = _run(tmp_path, "threshold-scan", "--n", "36", "--d", "1", "--d", "2", "--d", "3",
                     "--d", "6", "--d", "9", "--gamma", "1", "--seed", "2",
                     "--dist", "gaussian", "--trials", "2")
    assert code == 0
    rows = _rows(out / "threshold_scan.csv")
    assert [int(r["d"]) for r in rows] == [1, 2, 3, 6, 9]
    ratios = [float(r["exact_norm_variance_ratio"]) for r in rows]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    summary = json.loads((out / "threshold_scan_summary.json").read_text())
    # C(36, 6) and C(36, 9) are far beyond a dense eigensolve
    flagged = {f["d"] for f in summary["flags"]}
    assert {6, 9} <= flagged
    assert np.isnan(float(rows[-1]["mean_ks"]))
    assert np.isfinite(float(rows[0]["mean_ks"]))


def test_threshold_scan_degenerate_d_equals_n(tmp_path):
    code, out = _run(tmp_path, "threshold-scan", "--n", "5", "--d", "5", "--p", "3",
                     "--seed", "1", "--trials", "2")
    assert code == 0
    summary = json.loads((out / "threshold_scan_summary.json").read_text())
    assert summary["flags"][0]["reason"] == "degenerate_single_feature"


def test_threshold_scan_empty_d(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"d": []}))
    code, _ = _run(tmp_path, "threshold-scan", "--config", str(cfg), "--p", "10", "--seed", "1")
    assert code == 1


def test_identity_suite_default(tmp_path):
    code, a = _run(tmp_path, "identity-suite", "--seed", "4", "--trials", "40", name="a")
    assert code == 0
    reports = json.loads((a / "identity_suite.json").read_text())["reports"]
    assert len(reports) == 40 * 7
    assert max(r["residual"] for r in reports) < 1e-8
    assert all(r["bound_checked"]["holds"] for r in reports if r["bound_checked"])
    _, b = _run(tmp_path, "identity-suite", "--seed", "4", "--trials", "40", name="b")
    assert _snapshot(a) == _snapshot(b)


def test_fixpoint_isotropic(tmp_path):
    code, out = _run(tmp_path, "fixpoint", "--gamma", "1", "--grid", "0.1:3.9:39")
    assert code == 0
    rows = _rows(out / "fixpoint.csv")
    assert "mp_density" in rows[0] and len(rows) == 39
    assert max(float(r["delta_density"]) for r in rows) <= 3e-2
    assert all(r["converged"] == "true" for r in rows)


def test_fixpoint_population(tmp_path):
    code, out = _run(tmp_path, "fixpoint", "--gamma", "1", "--population", "1,4",
                     "--grid", "0.1:9.9:50")
    assert code == 0
    rows = _rows(out / "fixpoint.csv")
    assert "mp_density" not in rows[0]
    assert max(float(r["residual"]) for r in rows) < 1e-10


def test_variance_check_small_grid(tmp_path):
    code, out = _run(tmp_path, "variance-check", "--n", "10", "--d", "1", "--d", "2",
                     "--seed", "1", "--trials", "2000")
    assert code == 0
    rows = _rows(out / "variance_check.csv")
    assert len(rows) == 6
    rad = [r for r in rows if r["dist"] == "rademacher"]
    assert all(float(r["exact_variance"]) == 0 for r in rad)
    assert all(float(r["mc_estimate"]) == 0 for r in rad)


def test_variance_check_large_row(tmp_path):
    code, out = _run(tmp_path, "variance-check", "--n", "128", "--d", "16",
                     "--dist", "threepoint:9", "--seed", "1")
    assert code == 0
    row = _rows(out / "variance_check.csv")[0]
    assert row["lower_large_d_applicable"] == "true"
    assert float(row["lower_large_d_ratio"]) <= float(row["exact_ratio"])
    assert np.isnan(float(row["mc_estimate"]))


@pytest.mark.slow
def test_moments_check(tmp_path):
    code, out = _run(tmp_path, "moments-check", "--seed", "1", "--trials", "100")
    assert code == 0
    assert _rows(out / "moments_check.csv")
    assert _rows(out / "moments_check_tuples.csv")


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "tensor_esd.cli", "--help"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    for name in ("esd", "threshold-scan", "variance-check", "moments-check",
                 "identity-suite", "fixpoint"):
        assert name in res.stdout
