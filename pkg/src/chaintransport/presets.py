"""Named figure presets: each maps to a fully specified, runnable experiment.

Running a preset yields one or more CSV payloads; single-output presets
write straight to the requested path, multi-output ones add a suffix per
panel. Figure parity uses gamma_out = 2 * hopping as the superradiant
operating point.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .analytics import tau_localized_closed_form
from .errors import ValidationError
from .experiments import (
    Axis,
    EnsembleSpec,
    SweepSpec,
    conductance_vs_dephasing,
    n_scaling_comparison,
    optimal_field_search,
    run_sweep,
    transfer_time,
)
from .liouville import propagate_populations
from .model import ChainParams, Gaussian, Localized, build_initial_state

N_DEFAULT = 10
GAMMA_ST = 2.0
GAUSS3 = Gaussian(3.0, 1.0, 0.0)


def symlog_grid(
    inner: float = 0.01, outer: float = 10.0, per_side: int = 13, linear_points: int = 5
) -> tuple[float, ...]:
    """Symmetric grid: log-spaced in |E0| in [inner, outer], linear inside."""
    logs = np.geomspace(inner, outer, per_side)
    lin = np.linspace(-inner, inner, linear_points)
    grid = np.unique(np.concatenate([-logs, lin, logs]))
    return tuple(float(x) for x in grid)


def _sweep_csv(spec: SweepSpec, jobs: int) -> str:
    return run_sweep(spec, jobs=jobs).to_csv()


def _fig2(jobs, ensemble=None):
    spec = SweepSpec(
        base=ChainParams(n_sites=N_DEFAULT, dephasing_rate=1e-3),
        initial_state=GAUSS3,
        axis1=Axis("E0", symlog_grid(), "symlog"),
        axis2=Axis("gamma_out", tuple(np.geomspace(0.05, 50.0, 15)), "log"),
        observable="tau",
        preset="fig2",
    )
    return [("", _sweep_csv(spec, jobs))]


def _fig3(which: str, jobs):
    gamma = 0.1 * GAMMA_ST if which == "a" else 10.0 * GAMMA_ST
    spec = SweepSpec(
        base=ChainParams(n_sites=N_DEFAULT, sink_rate=gamma),
        initial_state=GAUSS3,
        axis1=Axis("E0", tuple(np.geomspace(0.01, 30.0, 41)), "log"),
        observable="delta_gamma",
        preset=f"fig3{which}",
    )
    return [("", _sweep_csv(spec, jobs))]


def _fig4(jobs, ensemble=None):
    spec = SweepSpec(
        base=ChainParams(n_sites=N_DEFAULT, sink_rate=GAMMA_ST),
        initial_state=GAUSS3,
        axis1=Axis("E0", symlog_grid(), "symlog"),
        axis2=Axis("gamma_phi", tuple(np.geomspace(1e-3, 10.0, 13)), "log"),
        observable="tau",
        preset="fig4",
    )
    return [("", _sweep_csv(spec, jobs))]


def _fig5(jobs, ensemble=None):
    out = []
    for suffix, obs in (("_super", "pr_super"), ("_sub", "pr_sub")):
        spec = SweepSpec(
            base=ChainParams(n_sites=N_DEFAULT),
            initial_state=GAUSS3,
            axis1=Axis("E0", tuple(np.geomspace(0.01, 30.0, 21)), "log"),
            axis2=Axis("gamma_out", tuple(np.geomspace(0.05, 50.0, 15)), "log"),
            observable=obs,
            preset="fig5",
        )
        out.append((suffix, _sweep_csv(spec, jobs)))
    return out


def _fig6(jobs, ensemble=None):
    lines = [
        "# preset: fig6",
        "N,e0_opt,tau_min,plateau_lo,plateau_hi,estimator_e0",
    ]
    from .analytics import critical_field

    for n in range(6, 15):
        params = ChainParams(n_sites=n, sink_rate=GAMMA_ST, dephasing_rate=1e-6)
        grid = np.linspace(-critical_field(n), critical_field(n), 41)
        res = optimal_field_search(params, GAUSS3, grid, jobs=jobs)
        lines.append(
            ",".join(
                f"{x:.9g}"
                for x in (
                    n,
                    res.e0_opt,
                    res.tau_min,
                    res.plateau[0],
                    res.plateau[1],
                    res.estimator_e0,
                )
            )
        )
    return [("", "\n".join(lines) + "\n")]


def _fig7(jobs, ensemble=None):
    rows = n_scaling_comparison(range(4, 15), jobs=jobs)
    lines = ["# preset: fig7", "N,family,e0_used,tau_min"]
    for r in rows:
        lines.append(f"{r.n_sites},{r.family},{r.e0_used:.9g},{r.tau_min:.9g}")
    return [("", "\n".join(lines) + "\n")]


def _fig8(jobs, ensemble=None):
    out = []
    psi0 = build_initial_state(GAUSS3, N_DEFAULT)
    for e0 in (-1.0, -0.2, -0.001, 0.001, 0.2, 1.0):
        for gphi in (1e-4, 0.1, 1.0):
            params = ChainParams(
                n_sites=N_DEFAULT,
                field_step=e0,
                sink_rate=GAMMA_ST,
                dephasing_rate=gphi,
            )
            traj = propagate_populations(
                params, psi0, np.linspace(0.0, 60.0, 241)
            )
            meta = json.dumps(
                {
                    "preset": "fig8",
                    "E0": e0,
                    "gamma_phi": gphi,
                    "gamma_out": GAMMA_ST,
                    "n_sites": N_DEFAULT,
                    "tau": traj.transfer_time,
                },
                sort_keys=True,
            )
            suffix = f"_e0_{e0:g}_gphi_{gphi:g}".replace("-", "m").replace(".", "p")
            out.append((suffix, f"# trajectory: {meta}\n" + traj.to_csv()))
    return out


def _fig_disorder(jobs, ensemble=None):
    n_real = ensemble if ensemble is not None else 1000
    spec = SweepSpec(
        base=ChainParams(n_sites=N_DEFAULT, sink_rate=GAMMA_ST),
        initial_state=GAUSS3,
        axis1=Axis("W", (0.0, 0.5, 1.0, 2.0, 3.2, 5.0), "linear"),
        axis2=Axis("gamma_phi", tuple(np.geomspace(1e-3, 10.0, 9)), "log"),
        observable="tau",
        ensemble=EnsembleSpec(n_realizations=n_real, seed=1),
        preset="fig_disorder",
    )
    return [("", _sweep_csv(spec, jobs))]


def _fig_leegwater(jobs, ensemble=None):
    spec = SweepSpec(
        base=ChainParams(n_sites=N_DEFAULT, sink_rate=GAMMA_ST),
        initial_state=GAUSS3,
        axis1=Axis("E0", symlog_grid(outer=20.0), "symlog"),
        axis2=Axis("gamma_phi", (0.01, 0.1, 1.0, 10.0), "log"),
        observable="tau",
        preset="fig_leegwater",
    )
    return [("", _sweep_csv(spec, jobs))]


def _fig_current(jobs, ensemble=None):
    spec = SweepSpec(
        base=ChainParams(n_sites=N_DEFAULT, sink_rate=GAMMA_ST),
        initial_state=Gaussian((N_DEFAULT + 1) / 2.0, 1.0, 0.0),
        axis1=Axis("E0", tuple(np.linspace(0.0, 1.0, 21)), "linear"),
        axis2=Axis("gamma_phi", (1e-3, 1.0), "log"),
        observable="current",
        preset="fig_current",
    )
    return [("", _sweep_csv(spec, jobs))]


def _fig_conductance(jobs, ensemble=None):
    params = ChainParams(n_sites=N_DEFAULT, sink_rate=GAMMA_ST)
    grid, g = conductance_vs_dephasing(
        params, np.geomspace(1e-3, 20.0, 17), jobs=jobs
    )
    lines = ["# preset: fig_conductance", "gamma_phi,g"]
    for gp, gv in zip(grid, g):
        lines.append(f"{gp:.9g},{gv:.9g}")
    return [("", "\n".join(lines) + "\n")]


def _app1(jobs, ensemble=None):
    lines = ["# preset: app1", "gamma_out,n,tau_num,tau_closed_form"]
    for n in (1, 2, 5, 9):
        psi0 = build_initial_state(Localized(n), N_DEFAULT)
        for g in np.geomspace(0.1, 50.0, 25):
            params = ChainParams(n_sites=N_DEFAULT, sink_rate=float(g))
            tau_num = transfer_time(params, psi0)
            tau_form = tau_localized_closed_form(n, N_DEFAULT, float(g))
            lines.append(f"{g:.9g},{n},{tau_num:.9g},{tau_form:.9g}")
    return [("", "\n".join(lines) + "\n")]


def _app2(jobs, ensemble=None):
    spec = SweepSpec(
        base=ChainParams(n_sites=N_DEFAULT, sink_rate=GAMMA_ST),
        initial_state=Localized(3),
        axis1=Axis("E0", symlog_grid(), "symlog"),
        axis2=Axis("gamma_phi", tuple(np.geomspace(1e-3, 10.0, 13)), "log"),
        observable="tau",
        preset="app2",
    )
    return [("", _sweep_csv(spec, jobs))]


PRESETS = {
    "fig2": _fig2,
    "fig3a": lambda jobs, ensemble=None: _fig3("a", jobs),
    "fig3b": lambda jobs, ensemble=None: _fig3("b", jobs),
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig7": _fig7,
    "fig8": _fig8,
    "fig_disorder": _fig_disorder,
    "fig_leegwater": _fig_leegwater,
    "fig_current": _fig_current,
    "fig_conductance": _fig_conductance,
    "app1": _app1,
    "app2": _app2,
}


def run_preset(name: str, jobs: int = 1, ensemble: int | None = None):
    """Run a named preset; returns [(suffix, csv_text), ...]."""
    if name not in PRESETS:
        raise ValidationError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        )
    return PRESETS[name](jobs, ensemble)
