import json
import subprocess
import sys

import pytest

from chainwalk import __version__
from chainwalk.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- sigma ---------------------------------------------------------------------


def test_sigma_text(capsys):
    code, out, _ = run_cli(capsys, "sigma", "--k", "5")
    assert code == 0
    assert "2/7" in out
    assert "0.285714285714" in out


def test_sigma_json(capsys):
    code, out, _ = run_cli(capsys, "sigma", "--k", "5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["sigma_squared"] == "2/7"
    assert doc["sigma_squared_decimal"] == 0.285714285714
    assert doc["a_dot_grad_f"] == "5/7"
    assert doc["b_norm_squared"] == "2/7"
    assert doc["version"] == __version__
    assert doc["method"] == "solve"


def test_sigma_closed_form_method(capsys):
    code, out, _ = run_cli(capsys, "sigma", "--k", "9", "--method", "closed-form", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["sigma_squared"] == "2/11"
    assert doc["method"] == "closed_form"


# -- graph ---------------------------------------------------------------------


def test_graph_json(capsys):
    code, out, _ = run_cli(capsys, "graph", "--k", "2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["vertices"]) == 4
    assert len(doc["edges"]) == 18
    assert doc["d_k"] == 18
    assert doc["delta_k"] == 3
    assert doc["version"] == __version__


def test_graph_text(capsys):
    code, out, _ = run_cli(capsys, "graph", "--k", "3", "--format", "text")
    assert code == 0
    assert "directed edges (loops included) = 54" in out


# -- hodge ---------------------------------------------------------------------


def test_hodge_json(capsys):
    code, out, _ = run_cli(capsys, "hodge", "--k", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "exact"
    assert doc["a_dot_grad_f"] == "1/2"
    assert doc["sigma_squared"] == "1/2"
    assert doc["b_norm_squared"] == "1/2"
    assert doc["max_divergence_residual"] == "0"
    assert doc["gradient_dot_b"] == "0"
    assert doc["potential"]["++"] == "0"
    assert doc["potential"]["--"] == "2"
    assert len(doc["divergence_free_part"]) == 9


def test_hodge_float(capsys):
    code, out, _ = run_cli(capsys, "hodge", "--k", "3", "--mode", "float")
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "float"
    assert abs(doc["max_divergence_residual"]) < 1e-10
    assert abs(doc["sigma_squared"] - 0.4) < 1e-10


def test_hodge_csv(capsys):
    code, out, _ = run_cli(capsys, "hodge", "--k", "2", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "vertex,f,f1,f2,div_a"
    assert len(out.strip().splitlines()) == 5


def test_hodge_text(capsys):
    code, out, _ = run_cli(capsys, "hodge", "--k", "2", "--format", "text")
    assert code == 0
    assert "sigma^2" in out


# -- simulate ------------------------------------------------------------------


def test_simulate_json_deterministic(capsys):
    args = ("simulate", "--k", "2", "--steps", "200", "--trials", "300", "--seed", "42")
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2  # byte-identical for identical config
    doc = json.loads(out1)
    assert doc["seed"] == 42
    assert doc["trials"] == 300
    assert doc["sigma_squared_closed_form"] == "1/2"
    assert "elapsed_seconds" not in doc


def test_simulate_text(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--k", "1", "--steps", "100", "--trials", "200",
        "--seed", "1", "--format", "text",
    )
    assert code == 0
    assert "estimate" in out and "closed form" in out


def test_simulate_trajectory_out(tmp_path, capsys):
    target = tmp_path / "walk.csv"
    code, out, _ = run_cli(
        capsys, "simulate", "--k", "2", "--steps", "50", "--trials", "10",
        "--seed", "3", "--trajectory-out", str(target),
    )
    assert code == 0
    lines = target.read_text().strip().splitlines()
    assert lines[0] == "step,height,shape"
    assert len(lines) == 52


# -- output handling -------------------------------------------------------------


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out" / "sigma.json"
    code, out, _ = run_cli(capsys, "sigma", "--k", "3", "--format", "json", "--output", str(target))
    assert code == 0
    assert out == ""
    doc = json.loads(target.read_text())
    assert doc["sigma_squared"] == "2/5"


def test_output_env_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CHAINWALK_OUT_DIR", str(tmp_path))
    code, _, _ = run_cli(capsys, "sigma", "--k", "3", "--format", "json", "--output", "sigma.json")
    assert code == 0
    assert (tmp_path / "sigma.json").exists()


# -- verify -----------------------------------------------------------------------


def test_verify_text(capsys):
    code, out, _ = run_cli(capsys, "verify", "--k-max", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert all(line.startswith("PASS") for line in lines[:-1])
    assert "all checks passed" in lines[-1]


def test_verify_json(capsys):
    code, out, _ = run_cli(capsys, "verify", "--k-max", "1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["all_passed"] is True
    assert doc["k_max"] == 1
    assert len(doc["checks"]) >= 25
    assert all(c["passed"] for c in doc["checks"])


# -- errors ------------------------------------------------------------------------


def test_usage_errors(capsys):
    assert run_cli(capsys, "sigma")[0] == 2  # missing --k
    assert run_cli(capsys, "sigma", "--k", "0")[0] == 2
    assert run_cli(capsys, "sigma", "--k", "-3")[0] == 2
    assert run_cli(capsys, "frobnicate")[0] == 2
    assert run_cli(capsys, "simulate", "--k", "1", "--trials", "1")[0] == 2
    assert run_cli(capsys)[0] == 2


def test_capacity_errors(capsys):
    code, _, err = run_cli(capsys, "sigma", "--k", "15")
    assert code == 3
    assert "capacity" in err
    assert run_cli(capsys, "graph", "--k", "25")[0] == 3


def test_version_flag(capsys):
    assert run_cli(capsys, "--version")[0] == 0


def test_module_invocation():
    proc = subprocess.run(
        [sys.executable, "-m", "chainwalk.cli", "sigma", "--k", "4"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "1/3" in proc.stdout
