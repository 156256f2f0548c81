"""Command-line contract: outputs, schema, determinism and exit codes."""

import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from indefspec import cli, validation
from indefspec.fd_oracle import assemble_flux


@pytest.fixture(autouse=True)
def pinned_time(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_records(capsys):
    code, out, _ = run(["spectrum", "--n-max", "1", "--m-max", "2"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert list(doc) == ["manifest", "records"]
    assert list(doc["manifest"])[:4] == ["command", "config", "tool_version", "timestamp"]
    assert doc["manifest"]["timestamp"] == "2023-11-14T22:13:20Z"
    recs = doc["records"]
    assert [(r["n"], r["m"]) for r in recs] == [(1, m) for m in range(-2, 3)]
    assert list(recs[0]) == ["n", "m", "delta", "lambda", "residual", "source"]
    assert recs[2]["lambda"] == {"re": 0, "im": 0}
    assert recs[3]["lambda"]["re"] == pytest.approx(23.646319543193886, rel=1e-14)


def test_spectrum_zero_modes_only(capsys):
    code, out, _ = run(["spectrum", "--m-max", "0", "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [(r["n"], r["m"], float(r["lambda_re"])) for r in rows] == [("1", "0", 0.0), ("2", "0", 0.0), ("3", "0", 0.0)]
    assert "\r" not in out


def test_spectrum_delta_out_of_range(capsys):
    code, _, err = run(["spectrum", "--delta-re", "0.5"], capsys)
    assert code == 2 and "0.38" in err


def test_spectrum_bad_flags(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["spectrum", "--n-max", "x"])
    assert exc.value.code == 2
    code, _, _ = run(["spectrum", "--n-max", "0"], capsys)
    assert code == 2


def test_spectrum_solver_error_names_mode(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# impossible Newton tolerance\nresidual_tol = 1e-30\n")
    code, _, err = run(["spectrum", "--n-max", "1", "--m-max", "1", "--delta-re", "0.1", "--config", str(cfg)], capsys)
    assert code == 3
    assert "n=1, m=-1" in err


def test_json_is_byte_deterministic(tmp_path, monkeypatch):
    paths = []
    for threads in ("1", "3"):
        monkeypatch.setenv("INDEFSPEC_THREADS", threads)
        p = tmp_path / "s.json"
        assert cli.main(["spectrum", "--n-max", "3", "--m-max", "2", "--delta-im", "0.02", "--out", str(p)]) == 0
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]


def test_float_format_round_trips():
    text = cli.dumps({"x": 0.1, "y": [1e-300, -2.5, math.pi]})
    assert json.loads(text) == {"x": 0.1, "y": [1e-300, -2.5, math.pi]}
    assert "0.10000000000000001" in text


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("m_max = 1\nn_max = 2\ncontinuation_steps = 8\n")
    code, out, _ = run(["spectrum", "--config", str(cfg), "--m-max", "0"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["manifest"]["config"]["continuation_steps"] == 8
    assert [(r["n"], r["m"]) for r in doc["records"]] == [(1, 0), (2, 0)]


def test_config_file_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("not a pair\n")
    assert run(["spectrum", "--config", str(cfg)], capsys)[0] == 2
    cfg.write_text("colour = blue\n")
    assert run(["spectrum", "--config", str(cfg)], capsys)[0] == 2
    assert run(["spectrum", "--config", str(tmp_path / "missing.cfg")], capsys)[0] == 2


def test_modes_kernel_profile(tmp_path, capsys):
    out = tmp_path / "m.csv"
    assert cli.main(["modes", "--n", "1", "--m", "0", "--grid", "21", "--out", str(out)]) == 0
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    x, y, val = rows[:, 0], rows[:, 1], rows[:, 2] + 1j * rows[:, 3]
    inner = (np.abs(x) < 1) & (y > 0) & (y < 1)
    ratio = val[inner] / (np.sinh(math.pi * (1 - np.abs(x[inner]))) * np.sin(math.pi * y[inner]))
    assert np.max(np.abs(ratio - ratio[0])) < 1e-10 * abs(ratio[0])
    boundary = (np.abs(x) == 1) | (y == 0) | (y == 1)
    assert np.max(np.abs(val[boundary])) < 1e-12
    man = json.loads(out.with_name("m.csv.manifest.json").read_text())
    assert man["command"] == "modes" and man["mode"]["lambda"] == {"re": 0, "im": 0}
    assert man["mode"]["normalization"]["re"] > 0


def test_modes_complex_delta(capsys):
    code, out, err = run(["modes", "--n", "1", "--m", "1", "--delta-im", "0.01", "--grid", "9"], capsys)
    assert code == 0
    rows = np.loadtxt(io.StringIO(out), delimiter=",", skiprows=1)
    assert rows.shape == (81, 4)
    assert np.max(np.abs(rows[:, 3])) > 0
    assert '"lambda"' in err


def test_modes_usage(capsys):
    assert run(["modes", "--n", "0", "--m", "1"], capsys)[0] == 2
    assert run(["modes", "--n", "1", "--m", "1", "--delta-im", "0.4"], capsys)[0] == 2


@pytest.mark.parametrize("flag", ["--epsilon-sequence", "--eta-sequence"])
def test_trace_families_decrease(flag, capsys):
    code, out, _ = run(["trace", "--n", "1", "--m", "1", flag, "0.1,0.01,0.001", "--format", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    err = [float(r["error"]) for r in rows]
    dist = [float(r["psi_sup_distance"]) for r in rows]
    assert err[0] > err[1] > err[2] > 0
    assert dist[0] > dist[1] > dist[2]


def test_trace_eta_maps_to_lossy_delta(capsys):
    code, out, _ = run(["trace", "--n", "1", "--m", "1", "--eta-sequence", "0.1"], capsys)
    d = json.loads(out)["records"][0]["delta"]
    assert complex(d["re"], d["im"]) == pytest.approx(1 / (1 - 0.1j) - 1, abs=1e-16)


def test_trace_path_and_errors(capsys):
    code, out, _ = run(["trace", "--n", "1", "--m", "0", "--delta-path", "0,0.01;0.05,0"], capsys)
    assert code == 0 and len(json.loads(out)["records"]) == 2
    assert run(["trace", "--n", "1", "--m", "1", "--delta-path", ""], capsys)[0] == 2
    assert run(["trace", "--n", "1", "--m", "1", "--delta-path", "1,2,3"], capsys)[0] == 2
    assert run(["trace", "--n", "1", "--m", "1"], capsys)[0] == 2
    assert run(["trace", "--n", "1", "--m", "1", "--epsilon-sequence", "0.5"], capsys)[0] == 2


def test_validate_quick(tmp_path, capsys):
    report = tmp_path / "report.json"
    code, out, _ = run(["validate", "--level", "quick", "--out", str(report)], capsys)
    assert code == 0
    assert "[FAIL]" not in out and out.count("[PASS]") == len(json.loads(report.read_text())["checks"])
    doc = json.loads(report.read_text())
    assert doc["passed"] is True
    names = [c["name"] for c in doc["checks"]]
    assert "compatibility_bound" in names and "oracle_gap" in names
    compat = next(c for c in doc["checks"] if c["name"] == "compatibility_bound")
    assert "0.32" in compat["detail"]


def test_validate_failure_exit_code(tmp_path, monkeypatch, capsys):
    bad = validation.CheckResult("forced", False, 1.0, 0.0, "injected failure")
    monkeypatch.setattr(validation, "run_suite", lambda level, config=None: [bad])
    report = tmp_path / "r.json"
    code, out, _ = run(["validate", "--out", str(report)], capsys)
    assert code == 1 and "[FAIL] forced" in out
    assert json.loads(report.read_text())["passed"] is False


def unflipped(n, N):
    c = (n * math.pi) ** 2
    return assemble_flux(N, np.ones_like, lambda x: c * np.sign(x))


def test_mutation_unflipped_interface_breaks_gap():
    assert validation.check_oracle_gap((1, 2), 1600).passed
    mutated = validation.check_oracle_gap((1, 2), 1600, assembler=unflipped)
    assert not mutated.passed and mutated.measured >= 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "indefspec", "spectrum", "--m-max", "0", "--n-max", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["records"][0]["m"] == 0
