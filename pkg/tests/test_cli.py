"""Tests for the command-line interface."""
import json

import pytest

from chaintransport.cli import main, parse_grid
from chaintransport.errors import ValidationError


def test_parse_grid_forms():
    g, scale = parse_grid("0:1:5")
    assert scale == "linear"
    assert list(g) == [0.0, 0.25, 0.5, 0.75, 1.0]
    g, scale = parse_grid("0.01:1:3:log")
    assert scale == "log"
    assert g[0] == pytest.approx(0.01) and g[-1] == pytest.approx(1.0)
    g, scale = parse_grid("1,2,5")
    assert list(g) == [1.0, 2.0, 5.0]
    g, scale = parse_grid("symlog:0.01:10:3")
    assert scale == "symlog"
    assert 0.0 in g and -10.0 in g and 10.0 in g
    with pytest.raises(ValidationError):
        parse_grid("0:1:5:cubic")


def test_transfer_time_command(capsys):
    rc = main(
        ["transfer-time", "--n", "2", "--gamma-out", "2", "--state", "localized:1"]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("tau = 1.5 ")


def test_transfer_time_methods_agree(capsys):
    taus = []
    for method in ("spectral", "liouville", "integrate", "auto"):
        rc = main(
            ["transfer-time", "--n", "5", "--e0", "0.3", "--method", method]
        )
        assert rc == 0
        taus.append(float(capsys.readouterr().out.split()[2]))
    assert max(taus) - min(taus) < 1e-6 * taus[0]


def test_spectral_method_rejects_dephasing(capsys):
    rc = main(["transfer-time", "--gamma-phi", "0.5", "--method", "spectral"])
    assert rc == 2
    assert "gamma_phi" in capsys.readouterr().err


def test_spectrum_csv(tmp_path, capsys):
    out = tmp_path / "spec.csv"
    rc = main(["spectrum", "--n", "6", "--gamma-out", "1.5", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0].startswith("# config: {")
    assert lines[1] == "re,gamma,pr"
    assert len(lines) == 2 + 6 + 1
    total = float(lines[-1].split(":")[1])
    assert total == pytest.approx(1.5, abs=1e-9)


def test_sweep_csv_and_config_file(tmp_path, capsys):
    cfg = {
        "command": "sweep",
        "n": 5,
        "param": "E0",
        "grid": "-0.5:0.5:5",
        "state": "localized:2",
        "out": str(tmp_path / "sweep.csv"),
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    rc = main(["sweep", "--config", str(cfg_path)])
    assert rc == 0
    text = (tmp_path / "sweep.csv").read_text()
    assert text.startswith("# config: {")
    assert "# spec: {" in text and "# overlays: {" in text
    # flags override the config file
    rc = main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path / "b.csv")])
    assert rc == 0
    assert (tmp_path / "b.csv").exists()


def test_config_rejects_unknown_keys(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"bogus_key": 1}))
    rc = main(["transfer-time", "--config", str(cfg_path)])
    assert rc == 2
    assert "bogus_key" in capsys.readouterr().err


def test_config_command_mismatch(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"command": "sweep"}))
    rc = main(["transfer-time", "--config", str(cfg_path)])
    assert rc == 2


def test_sweep_rerun_is_byte_identical(tmp_path, capsys):
    args = [
        "sweep",
        "--n",
        "5",
        "--param",
        "gamma_phi",
        "--grid",
        "0.01:1:4:log",
        "--state",
        "flat",
    ]
    a = tmp_path / "a.csv"
    assert main(args + ["--out", str(a)]) == 0
    first = a.read_bytes()
    assert main(args + ["--out", str(a)]) == 0
    assert a.read_bytes() == first


def test_trajectory_command(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    rc = main(
        [
            "trajectory",
            "--n",
            "4",
            "--state",
            "localized:1",
            "--t-max",
            "10",
            "--n-times",
            "11",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0].startswith("# config: {")
    assert lines[1].startswith("# tau: ")
    assert lines[2] == "t,p0,p1,p2,p3,p4"
    assert len(lines) == 3 + 11


def test_optimal_field_command(capsys):
    rc = main(
        [
            "optimal-field",
            "--n",
            "5",
            "--state",
            "localized:2",
            "--grid=-0.4:0.4:9",
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "e0_opt = 0," in out or "e0_opt = 0 " in out or "e0_opt = -0," in out


def test_current_command(capsys):
    rc = main(["current", "--n", "5", "--gamma-phi", "0.5", "--grid=-0.3:0.3:7"])
    assert rc == 0
    assert capsys.readouterr().out.startswith("g = ")


def test_preset_requires_name(capsys):
    rc = main(["preset"])
    assert rc == 2


def test_preset_unknown_name(capsys):
    rc = main(["preset", "not-a-preset"])
    assert rc == 2


def test_preset_writes_files(tmp_path, capsys):
    out = tmp_path / "app1.csv"
    rc = main(["preset", "app1", "--out", str(out)])
    assert rc == 0
    text = out.read_text()
    assert text.splitlines()[0].startswith("#")
    assert "gamma_out,n,tau_num,tau_closed_form" in text
