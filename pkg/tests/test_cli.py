import json
import subprocess
import sys

import pytest

from lslab.cli import main, parse_list


def test_parse_list():
    assert parse_list("16:256:*2", int) == [16, 32, 64, 128, 256]
    assert parse_list("2,3.5,6") == [2.0, 3.5, 6.0]
    assert parse_list("2,inf") == [2.0, "inf"]


def test_ls2_command(capsys):
    assert main(["ls2", "--region", "all", "--basis", "band:6"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["value"] == pytest.approx(1.0, abs=1e-10) and doc["basis"] == "band:6"


def test_carleson2_command(capsys, tmp_path):
    ext = tmp_path / "f.json"
    assert main(["carleson2", "--measure", "sum(lebesgue, atom(0,0,1))", "--basis", "eig:3", "--extremizer", str(ext)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["value"] == pytest.approx(1 + 7 / (4 * 3.141592653589793), rel=1e-10)
    assert json.loads(ext.read_text())["kind"] == "eigenspace"


def test_density_command(capsys):
    assert main(["density", "--target", "all", "--condition", "dense", "--lambda", "4,8", "--r", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("condition,lambda,r") and len(lines) == 3


def test_interval_command(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["interval", "--experiment", "dirichlet-counterexample", "--lambda", "4,8", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "model,bc,lambda,carleson2,sparsity_ratio"


def test_norms_command_exit_code(tmp_path):
    assert main(["zonal-norms", "--p", "2,6", "--degrees", "16:256:*2", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "zonal-norms__summary.json").exists()


def test_experiment_failing_check_gives_nonzero(tmp_path):
    cfg = tmp_path / "c.toml"
    # a two-point degree list cannot be fitted: reported as an error, not a pass
    cfg.write_text('name = "zonal-norms"\ndegrees = [16, 32]\n')
    assert main(["experiment", "zonal-norms", "--config", str(cfg)]) != 0


def test_parse_error_exit_code(capsys):
    assert main(["ls2", "--region", "cap(0,0", "--basis", "band:4"]) == 2
    assert "position" in capsys.readouterr().err


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "lslab.cli", "heat", "--mode", "real"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "PASS heat-gaussian" in r.stderr
