"""CLI: config parsing, expression language, subcommands, exit codes."""

import json
import os

import numpy as np
import pytest

import dsflow as ds
from dsflow.cli import (ConfigError, build_initial, main, monitor_header,
                        parse_config)
from dsflow.expressions import ExpressionError, evaluate


# --- expression mini-language ------------------------------------------------

def test_expression_values():
    th = np.linspace(0.0, np.pi, 7)
    out = evaluate("1.0+0.1*cos(2*theta)", {"theta": th})
    assert np.allclose(out, 1.0 + 0.1 * np.cos(2 * th))
    assert evaluate("pi", {}) == pytest.approx(np.pi)
    assert evaluate("-2*(3+1)/4", {}) == pytest.approx(-2.0)
    assert evaluate("exp(0)+sinh(0)+cosh(0)", {}) == pytest.approx(2.0)
    assert evaluate("1e-3", {}) == pytest.approx(1e-3)


def test_expression_errors():
    with pytest.raises(ExpressionError):
        evaluate("1 +", {})
    with pytest.raises(ExpressionError):
        evaluate("foo(1)", {})
    with pytest.raises(ExpressionError):
        evaluate("theta", {})          # unknown variable here
    with pytest.raises(ExpressionError):
        evaluate("1 ^ 2", {})          # no power operator
    with pytest.raises(ExpressionError):
        evaluate("__import__", {})


# --- config parsing ----------------------------------------------------------

def write_config(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return str(path)


GOOD_CONFIG = """
# smoke run
n = 3
k = 2
grid = axisym
m = 101
rho0 = 1.0+0.05*cos(2*theta)
t_max = 0.02
monitor_every = 20
conv_tol = 1e-6
"""


def test_parse_config_defaults_and_values(tmp_path):
    cfg = parse_config(write_config(tmp_path, GOOD_CONFIG))
    assert cfg["n"] == 3 and cfg["k"] == 2 and cfg["m"] == 101
    assert cfg["cfl"] == 0.4            # default
    assert cfg["scheme"] == "euler"     # default
    assert cfg["t_max"] == 0.02


def test_parse_config_rejects_unknown_keys(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(write_config(tmp_path, GOOD_CONFIG + "\nwibble = 3\n"))


def test_parse_config_rejects_bad_values(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(write_config(tmp_path, GOOD_CONFIG + "\ncfl = fast\n"))
    with pytest.raises(ConfigError):
        parse_config(write_config(tmp_path, "n = 3\n"))   # missing keys
    with pytest.raises(ConfigError):
        parse_config(write_config(tmp_path, "just some text\n"))
    with pytest.raises(ConfigError):
        parse_config(str(tmp_path / "missing.cfg"))


def test_build_initial_latlong(tmp_path):
    text = """
n = 2
k = 2
grid = latlong
ntheta = 16
nphi = 32
rho0 = 1.0+0.02*sin(theta)*cos(phi)
"""
    M = build_initial(parse_config(write_config(tmp_path, text)))
    assert M.grid.shape == (16, 32)
    assert M.rho.max() > 1.0 > M.rho.min()


# --- subcommands -------------------------------------------------------------

def test_run_writes_artifacts(tmp_path):
    cfg_path = write_config(tmp_path, GOOD_CONFIG)
    out = str(tmp_path / "out")
    code = main(["run", "--config", cfg_path, "--out", out])
    assert code == 0
    with open(os.path.join(out, "monitors.csv")) as fh:
        header = fh.readline().strip().split(",")
    assert header == monitor_header(3)
    assert header[:2] == ["t", "dt"]
    assert "A_-1" in header and "A_3" in header and "gap" in header
    summary = json.load(open(os.path.join(out, "summary.json")))
    assert summary["termination"] in ("converged", "t_max")
    grid, rho = ds.read_snapshot(os.path.join(out, "snapshot_final.txt"))
    assert grid.shape == (101,)
    assert np.all(np.isfinite(rho))


def test_run_periodic_snapshots(tmp_path):
    cfg_path = write_config(tmp_path, GOOD_CONFIG + "\nsnapshot_every = 1\n")
    out = str(tmp_path / "snaps")
    assert main(["run", "--config", cfg_path, "--out", out]) == 0
    snaps = [f for f in os.listdir(out) if f.startswith("snapshot_0")]
    assert len(snaps) >= 2


def test_run_exit_codes(tmp_path):
    bad_cfg = write_config(tmp_path, GOOD_CONFIG + "\nbogus = 1\n")
    assert main(["run", "--config", bad_cfg, "--out", str(tmp_path)]) == 2
    invalid = write_config(
        tmp_path, GOOD_CONFIG.replace("1.0+0.05*cos(2*theta)",
                                      "0.05+0.04*cos(2*theta)"))
    assert main(["run", "--config", invalid, "--out", str(tmp_path)]) == 3


def test_check_passes_on_good_config(tmp_path, capsys):
    cfg_path = write_config(tmp_path, GOOD_CONFIG)
    assert main(["check", "--config", cfg_path]) == 0
    captured = capsys.readouterr().out
    assert "gradient_identity" in captured
    assert "FAIL" not in captured


def test_slice_table_output(tmp_path, capsys):
    assert main(["slice-table", "--n", "3", "--r-min", "0.5",
                 "--r-max", "1.5", "--steps", "5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "r,A0,A1,A2,A3,xi_gap"
    assert len(lines) == 6
    assert main(["slice-table", "--n", "3", "--r-min", "2.0",
                 "--r-max", "1.0", "--steps", "5"]) == 2


def test_inequality_subcommand(tmp_path, capsys):
    g = ds.AxisymGrid(3, 101)
    snap = str(tmp_path / "slice.txt")
    ds.write_snapshot(snap, g, np.full(101, 1.0))
    assert main(["inequality", "--snapshot", snap]) == 0
    out = capsys.readouterr().out
    assert "gap" in out and "A_0" in out

    bad = str(tmp_path / "bad.txt")
    with open(bad, "w") as fh:
        fh.write("not a snapshot\n")
    assert main(["inequality", "--snapshot", bad]) == 2

    # spacelike violation inside a structurally valid snapshot
    g2 = ds.AxisymGrid(2, 201)
    steep = str(tmp_path / "steep.txt")
    ds.write_snapshot(steep, g2, 0.2 + 1.4 * np.cos(g2.theta))
    assert main(["inequality", "--snapshot", steep]) == 3


def test_report_renders_figures(tmp_path):
    cfg_path = write_config(tmp_path, GOOD_CONFIG)
    out = str(tmp_path / "rep")
    assert main(["run", "--config", cfg_path, "--out", out]) == 0
    assert main(["report", "--out", out]) == 0
    pngs = sorted(f for f in os.listdir(out) if f.endswith(".png"))
    assert pngs == ["gap.png", "monitors.png", "quermass.png", "radii.png"]
    for f in pngs:
        assert os.path.getsize(os.path.join(out, f)) > 1000
    assert main(["report", "--out", str(tmp_path / "nowhere")]) == 2
