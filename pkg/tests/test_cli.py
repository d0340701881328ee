"""Tests for the command-line interface: outputs, seeds, exit codes."""

import json
import subprocess
import sys

import pytest

from gppde.cli import main
from gppde.kernels import DerivativeCheck, DerivativeReport, DerivOrder, KernelFamily


def _solve(out, *extra):
    return main(
        ["solve", "--problem", "wave", "--dt", "0.05", "--T", "0.1", "--out", str(out)]
        + list(extra)
    )


def test_solve_outputs_are_deterministic(tmp_path, monkeypatch):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert _solve(a, "--seed", "0", "--format", "csv,json,svg") == 0

    # no --seed: the NGP_SEED environment variable is picked up
    monkeypatch.setenv("NGP_SEED", "0")
    assert _solve(b) == 0
    # an explicit --seed wins over the environment
    monkeypatch.setenv("NGP_SEED", "123")
    assert _solve(c, "--seed", "0") == 0

    ref_csv = (a / "steps.csv").read_bytes()
    ref_json = (a / "state_final.json").read_bytes()
    for other in (b, c):
        assert (other / "steps.csv").read_bytes() == ref_csv
        assert (other / "state_final.json").read_bytes() == ref_json

    lines = ref_csv.decode().strip().splitlines()
    assert lines[0] == "step,time,rel_l2_error,nlml,trace_cov,wall_ms"
    assert len(lines) == 3
    # without --timings the wall-clock column is zero so reruns match
    assert all(ln.endswith(",0") for ln in lines[1:])
    # numeric fields round-trip exactly at 17 significant digits
    for ln in lines[1:]:
        for field in ln.split(",")[1:]:
            assert "%.17g" % float(field) == field

    state = json.loads(ref_json)
    assert state["problem"] == "wave"
    assert state["n_steps"] == 2
    assert state["rel_l2_error"] < 5e-2
    n = sum(len(state["fields"][f]["mean"]) for f in ("u", "v"))
    assert len(state["cov"]) == n

    for name in ("solution.svg", "error_vs_time.svg"):
        assert (a / name).read_bytes().startswith(b"<?xml")
        assert not (b / name).exists()  # svg not in the default format set


def test_solve_timings_and_overrides(tmp_path):
    out = tmp_path / "t"
    code = main(
        [
            "solve", "--problem", "wave", "--dt", "0.1", "--T", "0.1",
            "--seed", "0", "--out", str(out),
            "--timings", "--n-artificial", "30", "--noise", "0.05",
        ]
    )
    assert code == 0
    row = (out / "steps.csv").read_text().strip().splitlines()[1]
    assert float(row.split(",")[-1]) > 0.0
    state = json.loads((out / "state_final.json").read_text())
    assert len(state["fields"]["u"]["x"]) == 30
    assert len(state["fields"]["v"]["x"]) == 30
    assert state["trace_cov"] > 0.0


def test_converge_writes_fitted_slope(tmp_path):
    out = tmp_path / "conv"
    code = main(
        [
            "converge", "--problem", "wave", "--dt-list", "0.1,0.05",
            "--T", "0.1", "--seed", "0", "--out", str(out), "--jobs", "2",
        ]
    )
    assert code == 0
    lines = (out / "convergence.csv").read_text().strip().splitlines()
    assert lines[0] == "sweep_value,rel_l2_error"
    assert len(lines) == 4
    assert lines[-1].startswith("# fitted_slope=")
    slope = float(lines[-1].split("=", 1)[1])
    assert 0.5 < slope < 4.0


def test_converge_rejects_bad_dt_list(tmp_path, capsys):
    base = ["converge", "--problem", "wave", "--out", str(tmp_path)]
    assert main(base + ["--dt-list", "0.5,abc"]) == 2
    assert main(base + ["--dt-list", "0.5"]) == 2
    assert main(base + ["--dt-list", "0.5,-0.25"]) == 2
    err = capsys.readouterr().err
    assert "dt-list" in err


def test_solve_rejects_bad_values(tmp_path, capsys):
    out = str(tmp_path)
    assert _solve(out, "--dt", "-1") == 2
    assert _solve(out, "--noise", "-0.1") == 2
    assert _solve(out, "--format", "csv,pdf") == 2
    assert _solve(out, "--format", "") == 2
    err = capsys.readouterr().err
    assert "--dt" in err and "--format" in err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--problem", "nosuch"])
    assert exc.value.code == 2


def test_io_error_exit_code(tmp_path, capsys):
    target = tmp_path / "occupied"
    target.write_text("not a directory")
    code = _solve(target, "--seed", "0")
    assert code == 3
    assert "error:" in capsys.readouterr().err


def test_validate_kernels_passes(capsys):
    assert main(["validate-kernels", "--n-samples", "5", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "0 failures" in out


def test_validate_kernels_reports_failures(capsys, monkeypatch):
    bad = DerivativeReport(
        (
            DerivativeCheck(
                KernelFamily.SE1D, DerivOrder.of(1, 0), 0.5, 1e-5, False
            ),
        )
    )
    monkeypatch.setattr("gppde.cli.validate_derivatives", lambda **kw: bad)
    assert main(["validate-kernels"]) == 1
    out = capsys.readouterr().out
    failing = [ln for ln in out.splitlines() if ln.endswith("FAIL")]
    assert len(failing) == 1
    assert failing[0].startswith("se1d") and "(1,)" in failing[0]


def test_module_help_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "gppde.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "solve" in proc.stdout and "converge" in proc.stdout
