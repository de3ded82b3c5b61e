import json
import subprocess
import sys

import pytest

from seplsd import validation
from seplsd.cli import main


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    monkeypatch.setenv("SEPLSD_OUTPUT_DIR", str(tmp_path))
    return tmp_path


def test_wigner_spike_forward_prints_value(capsys):
    assert main(["spike-forward", "--theta", "2", "--sigma", "1", "--wigner"]) == 0
    assert capsys.readouterr().out.strip() == "2.5"


def test_shrink_wigner(capsys):
    assert main(["shrink", "--lambda", "2.5", "--lambda", "1.5", "--wigner"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["lambda=2.5 theta_hat=2.0", "lambda=1.5 not recoverable"]


def test_transform_command(capsys):
    assert main(["transform", "--model", "mp", "--kind", "M", "--c", "0.5", "--z", "3"]) == 0
    line = capsys.readouterr().out.strip()
    assert line.startswith("M((3+0j)) = ")
    assert complex(line.split(" = ")[1]) == pytest.approx(1.0, abs=1e-12)


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert main(["lsd", "--lo", "1"]) == 1
    assert "example:" in capsys.readouterr().err
    assert main(["transform", "--model", "composed", "--kind", "G", "--z", "1+1j"]) == 1
    assert main(["spike-forward", "--theta", "1", "--r", "1.5"]) == 1
    assert main(["bogus"]) == 1


def test_engine_error_exit_3(outdir, capsys):
    assert main(["lsd", "--lo", "10", "--hi", "20", "--count", "50"]) == 3
    payload = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert payload["error"] == "GridError"


def test_validation_failure_exit_2(monkeypatch, capsys):
    stub = validation.CheckResult("AC01", "stub", False, 1.0, 0.0)
    monkeypatch.setitem(validation.CHECKS, "AC01", lambda: stub)
    assert main(["validate", "--only", "AC01"]) == 2
    assert capsys.readouterr().out.startswith("[FAIL] AC01")


def test_validation_pass_exit_0(outdir, capsys):
    assert main(["validate", "--only", "AC01", "AC07", "--out", "v.json"]) == 0
    data = json.loads((outdir / "v.json").read_text())
    assert [r["key"] for r in data["results"]] == ["AC01", "AC07"]
    assert (outdir / "v.json.manifest.json").exists()


def test_artifact_manifest_and_output_dir(outdir):
    assert main(["lsd", "--c", "0.5", "--beta", "0", "--r", "0", "--out", "mp.csv"]) == 0
    lines = (outdir / "mp.csv").read_text().splitlines()
    assert lines[0] == "x,density" and len(lines) == 2002
    manifest = json.loads((outdir / "mp.csv.manifest.json").read_text())
    assert manifest["command"] == "lsd" and manifest["artifact"] == "mp.csv"
    assert manifest["config"]["beta"] == 0.0
    assert "rng" in manifest and "version" in manifest


def test_simulate_is_byte_identical_across_runs(outdir):
    args = ["simulate", "--n", "50", "--t", "100", "--seed", "9"]
    assert main(args + ["--out", "a.csv"]) == 0
    assert main(args + ["--out", "b.csv"]) == 0
    a = (outdir / "a.csv").read_bytes()
    assert a == (outdir / "b.csv").read_bytes()
    assert b"\r\n" not in a and a.startswith(b"index,eigenvalue\n")


def test_experiment_shrinkage_small(outdir):
    assert main(["experiment", "--n", "1000", "--t", "2000", "--trials", "1", "--out", "e.csv"]) == 0
    lines = (outdir / "e.csv").read_text().splitlines()
    assert lines[0] == "theta,trial,rel_error" and len(lines) == 1 + 10


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "seplsd.cli", "spike-forward", "--theta", "2", "--wigner"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "2.5"
