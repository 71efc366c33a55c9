"""Rendering tests: recipe validation, determinism, figure parity."""
import os
import subprocess
import sys

import pytest

from chainplots.cli import main
from chainplots.errors import SpecMismatchError
from chainplots.render import render

from conftest import sweep_csv, sweep_spec, table_csv, trajectory_csv

SYMLOG = {"parameter": "E0", "grid": [-1.0, -0.01, 0.0, 0.01, 1.0], "scale": "symlog"}
GOUT_LOG = {"parameter": "gamma_out", "grid": [0.5, 2.0, 8.0], "scale": "log"}
GPHI_LOG = {"parameter": "gamma_phi", "grid": [0.01, 0.1, 1.0], "scale": "log"}


def _vals(n, lo=1.0):
    return [lo + 0.1 * k for k in range(n)]


def fixture_inputs(write):
    """One well-formed fixture CSV set per figure recipe."""
    fix = {}
    fix["fig2"] = [
        write("fig2.csv", sweep_csv(sweep_spec("fig2", SYMLOG, GOUT_LOG), _vals(15)))
    ]
    for name in ("fig3a", "fig3b"):
        spec = sweep_spec(
            name,
            {"parameter": "E0", "grid": [0.1, 1.0, 10.0], "scale": "log"},
            observable="delta_gamma",
        )
        fix[name] = [write(f"{name}.csv", sweep_csv(spec, _vals(3)))]
    fix["fig4"] = [
        write("fig4.csv", sweep_csv(sweep_spec("fig4", SYMLOG, GPHI_LOG), _vals(15)))
    ]
    fix["fig5"] = [
        write(
            f"fig5{suffix}.csv",
            sweep_csv(
                sweep_spec(
                    "fig5",
                    {"parameter": "E0", "grid": [0.1, 1.0], "scale": "log"},
                    GOUT_LOG,
                    observable=obs,
                ),
                _vals(6),
            ),
        )
        for suffix, obs in (("_super", "pr_super"), ("_sub", "pr_sub"))
    ]
    fix["fig6"] = [
        write(
            "fig6.csv",
            table_csv(
                "fig6",
                ["N", "e0_opt", "tau_min", "plateau_lo", "plateau_hi", "estimator_e0"],
                [[6, -0.3, 5.0, -0.4, -0.2, -0.35], [8, -0.25, 6.0, -0.3, -0.2, -0.27]],
            ),
        )
    ]
    fix["fig7"] = [
        write(
            "fig7.csv",
            table_csv(
                "fig7",
                ["N", "family", "e0_used", "tau_min"],
                [
                    [4, "localized", 0.0, 5.0],
                    [6, "localized", 0.0, 7.0],
                    [4, "flat", 0.0, 6.0],
                    [6, "flat", 0.0, 9.0],
                ],
            ),
        )
    ]
    fix["fig8"] = [
        write(f"fig8_{i}_{j}.csv", trajectory_csv(e0, gp))
        for i, e0 in enumerate((-0.2, 0.2))
        for j, gp in enumerate((0.001, 0.1, 1.0))
    ]
    fix["fig_disorder"] = [
        write(
            "fig_disorder.csv",
            sweep_csv(
                sweep_spec(
                    "fig_disorder",
                    {"parameter": "W", "grid": [0.0, 1.0, 2.0], "scale": "linear"},
                    GPHI_LOG,
                ),
                _vals(9),
            ),
        )
    ]
    fix["fig_leegwater"] = [
        write(
            "fig_leegwater.csv",
            sweep_csv(sweep_spec("fig_leegwater", SYMLOG, GPHI_LOG), _vals(15)),
        )
    ]
    fix["fig_current"] = [
        write(
            "fig_current.csv",
            sweep_csv(
                sweep_spec(
                    "fig_current",
                    {"parameter": "E0", "grid": [0.0, 0.5, 1.0], "scale": "linear"},
                    {"parameter": "gamma_phi", "grid": [0.001, 1.0], "scale": "log"},
                    observable="current",
                    state="gaussian:5.5,1,0",
                ),
                [0.0, 0.0, 0.05, 0.04, 0.08, 0.06],
            ),
        )
    ]
    fix["fig_conductance"] = [
        write(
            "fig_conductance.csv",
            table_csv(
                "fig_conductance",
                ["gamma_phi", "g"],
                [[0.001, 0.07], [0.1, 0.06], [10.0, 0.001]],
            ),
        )
    ]
    fix["app1"] = [
        write(
            "app1.csv",
            table_csv(
                "app1",
                ["gamma_out", "n", "tau_num", "tau_closed_form"],
                [
                    [0.2, 1, 50.1, 50.0],
                    [2.0, 1, 9.5, 9.5],
                    [0.2, 5, 151.0, 150.9],
                    [2.0, 5, 21.3, 21.25],
                ],
            ),
        )
    ]
    fix["app2"] = [
        write(
            "app2.csv",
            sweep_csv(
                sweep_spec("app2", SYMLOG, GPHI_LOG, state="localized:3"),
                _vals(15),
            ),
        )
    ]
    return fix


def test_figure_parity_and_byte_identical_rerender(write, tmp_path):
    for name, inputs in fixture_inputs(write).items():
        out = tmp_path / f"{name}.png"
        render(name, inputs, str(out))
        assert out.exists() and out.stat().st_size > 0, name
        first = out.read_bytes()
        render(name, inputs, str(out))
        assert out.read_bytes() == first, f"{name}: re-render differs"


def test_spec_mismatch_refused_and_nothing_written(write, tmp_path):
    path = write("fig2.csv", sweep_csv(sweep_spec("fig2", SYMLOG, GOUT_LOG), _vals(15)))
    out = tmp_path / "wrong.png"
    with pytest.raises(SpecMismatchError):
        render("fig4", [path], str(out))
    assert not out.exists()


def test_overlay_mismatch_refused(write, tmp_path):
    import re

    text = sweep_csv(sweep_spec("fig2", SYMLOG, GOUT_LOG), _vals(15))
    broken = re.sub(r'("critical_field":)', r"\g<1>9", text)
    assert broken != text
    path = write("tampered.csv", broken)
    out = tmp_path / "t.png"
    with pytest.raises(Exception, match="overlay"):
        render("fig2", [path], str(out))
    assert not out.exists()


def test_empty_grid_refused(write, tmp_path):
    path = write("empty.csv", "# spec: {}\naxis1,axis2,value,stderr,status\n")
    out = tmp_path / "e.png"
    rc = main(["render", "--preset", "fig2", "--in", path, "--out", str(out)])
    assert rc == 1
    assert not out.exists()


def test_unknown_preset(write, tmp_path):
    path = write("x.csv", "a,b\n1,2\n")
    rc = main(["render", "--preset", "nope", "--in", path, "--out", str(tmp_path / "x.png")])
    assert rc == 1


def test_input_count_enforced(write, tmp_path):
    a = write("a.csv", sweep_csv(sweep_spec("fig2", SYMLOG, GOUT_LOG), _vals(15)))
    with pytest.raises(SpecMismatchError, match="input files"):
        render("fig2", [a, a], str(tmp_path / "x.png"))


def test_cli_render_roundtrip(write, tmp_path):
    path = write("fig7.csv", table_csv(
        "fig7", ["N", "family", "e0_used", "tau_min"], [[4, "flat", 0.0, 6.0]]
    ))
    out = tmp_path / "fig7.png"
    assert main(["render", "--preset", "fig7", "--in", path, "--out", str(out)]) == 0
    assert out.exists()


def test_end_to_end_with_primary_cli(tmp_path):
    """Full pipeline: the simulation CLI emits the CSV, this package renders it."""
    csv_path = tmp_path / "fig3a.csv"
    run = subprocess.run(
        [sys.executable, "-m", "chaintransport.cli", "preset", "fig3a",
         "--out", str(csv_path)],
        capture_output=True, text=True, cwd=str(tmp_path),
    )
    assert run.returncode == 0, run.stderr
    out = tmp_path / "fig3a.png"
    assert main(["render", "--preset", "fig3a", "--in", str(csv_path),
                 "--out", str(out)]) == 0
    first = out.read_bytes()
    assert main(["render", "--preset", "fig3a", "--in", str(csv_path),
                 "--out", str(out)]) == 0
    assert out.read_bytes() == first
