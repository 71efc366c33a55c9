"""Command-line front end.

Every command resolves its configuration from defaults, an optional JSON
config file, and flags (flags win), echoes the resolved config into the
output header, and prints a one-line summary. Exit codes: 0 success,
1 solver failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .analytics import critical_field
from .errors import ChainTransportError, ValidationError
from .experiments import (
    Axis,
    EnsembleSpec,
    SweepSpec,
    current_and_conductance,
    disorder_study,
    optimal_field_search,
    run_sweep,
    state_from_string,
    transfer_time,
)
from .liouville import (
    propagate_populations,
    transfer_time_integrate,
    transfer_time_liouville,
)
from .model import ChainParams, build_initial_state
from .nonhermitian import effective_spectrum, transfer_time_spectral
from .presets import PRESETS, run_preset


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def parse_grid(text: str) -> tuple[np.ndarray, str]:
    """Parse a grid spec: 'lo:hi:num[:lin|log]', 'symlog:inner:outer:per_side',
    or a comma-separated list."""
    if text.startswith("symlog:"):
        _, inner, outer, per_side = text.split(":")
        from .presets import symlog_grid

        return (
            np.asarray(symlog_grid(float(inner), float(outer), int(per_side))),
            "symlog",
        )
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ValidationError(f"bad grid spec {text!r}")
        lo, hi, num = float(parts[0]), float(parts[1]), int(parts[2])
        scale = parts[3] if len(parts) == 4 else "lin"
        if scale == "log":
            return np.geomspace(lo, hi, num), "log"
        if scale == "lin":
            return np.linspace(lo, hi, num), "linear"
        raise ValidationError(f"unknown grid scale {scale!r}")
    return np.asarray([float(x) for x in text.split(",")]), "linear"


def _resolve(args: argparse.Namespace, schema: dict[str, object]) -> dict:
    """defaults < config file < explicit flags; unknown file keys rejected."""
    file_cfg = {}
    if args.config is not None:
        file_cfg = json.loads(Path(args.config).read_text())
        if not isinstance(file_cfg, dict):
            raise ValidationError("config file must hold a JSON object")
        cmd = file_cfg.pop("command", None)
        if cmd is not None and cmd != args.command:
            raise ValidationError(
                f"config file is for command {cmd!r}, not {args.command!r}"
            )
        unknown = set(file_cfg) - set(schema)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    resolved = {"command": args.command}
    for key, default in schema.items():
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
        elif key in file_cfg:
            resolved[key] = file_cfg[key]
        else:
            resolved[key] = default
    return resolved


def _config_header(cfg: dict) -> str:
    return "# config: " + json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def _write(path: str, text: str) -> None:
    Path(path).write_text(text)
    print(f"wrote {path}")


def _params(cfg: dict) -> ChainParams:
    return ChainParams(
        n_sites=int(cfg["n"]),
        hopping=float(cfg["hopping"]),
        field_step=float(cfg["e0"]),
        sink_rate=float(cfg["gamma_out"]),
        dephasing_rate=float(cfg["gamma_phi"]),
    )


_COMMON = {"n": 10, "hopping": 1.0, "e0": 0.0, "gamma_out": 2.0, "gamma_phi": 0.0}


def cmd_spectrum(args) -> int:
    schema = {**_COMMON, "out": None}
    cfg = _resolve(args, schema)
    params = _params(cfg)
    spec = effective_spectrum(params)
    lines = [_config_header(cfg), "re,gamma,pr"]
    for val, w, pr in zip(spec.eigenvalues, spec.widths, spec.participation):
        lines.append(f"{_fmt(val.real)},{_fmt(w)},{_fmt(pr)}")
    total = float(np.sum(spec.widths))
    lines.append(f"# sum_gamma: {_fmt(total)}")
    text = "\n".join(lines) + "\n"
    if cfg["out"]:
        _write(cfg["out"], text)
    else:
        sys.stdout.write(text)
    print(f"sum_gamma = {_fmt(total)} [Omega]")
    return 0


def cmd_transfer_time(args) -> int:
    schema = {**_COMMON, "state": "localized:1", "method": "auto"}
    cfg = _resolve(args, schema)
    params = _params(cfg)
    psi0 = build_initial_state(state_from_string(cfg["state"]), params.n_sites)
    method = cfg["method"]
    if method == "spectral":
        if params.dephasing_rate != 0:
            raise ValidationError("the spectral method requires gamma_phi = 0")
        tau = transfer_time_spectral(
            effective_spectrum(params), psi0, params.sink_rate
        )
    elif method == "liouville":
        tau = transfer_time_liouville(params, psi0)
    elif method == "integrate":
        tau = transfer_time_integrate(params, psi0).value
    elif method == "auto":
        tau = transfer_time(params, psi0)
    else:
        raise ValidationError(f"unknown method {method!r}")
    print(f"tau = {_fmt(tau)} [hbar/Omega]")
    return 0


def cmd_trajectory(args) -> int:
    schema = {
        **_COMMON,
        "state": "gaussian:3,1,0",
        "t_max": 60.0,
        "n_times": 241,
        "out": "trajectory.csv",
    }
    cfg = _resolve(args, schema)
    params = _params(cfg)
    psi0 = build_initial_state(state_from_string(cfg["state"]), params.n_sites)
    times = np.linspace(0.0, float(cfg["t_max"]), int(cfg["n_times"]))
    traj = propagate_populations(params, psi0, times)
    header = _config_header(cfg)
    if traj.transfer_time is not None:
        header += f"\n# tau: {_fmt(traj.transfer_time)}"
    _write(cfg["out"], header + "\n" + traj.to_csv())
    if traj.transfer_time is not None:
        print(f"tau = {_fmt(traj.transfer_time)} [hbar/Omega]")
    return 0


def cmd_sweep(args) -> int:
    schema = {
        **_COMMON,
        "state": "gaussian:3,1,0",
        "observable": "tau",
        "param": "E0",
        "grid": "symlog:0.01:10:13",
        "param2": None,
        "grid2": None,
        "realizations": 100,
        "seed": 0,
        "out": "sweep.csv",
    }
    cfg = _resolve(args, schema)
    params = _params(cfg)
    grid1, scale1 = parse_grid(cfg["grid"])
    axis1 = Axis(cfg["param"], tuple(grid1), scale1)
    axis2 = None
    if cfg["param2"] is not None:
        if cfg["grid2"] is None:
            raise ValidationError("--param2 requires --grid2")
        grid2, scale2 = parse_grid(cfg["grid2"])
        axis2 = Axis(cfg["param2"], tuple(grid2), scale2)
    sweeps_w = axis1.parameter == "W" or (axis2 is not None and axis2.parameter == "W")
    ensemble = (
        EnsembleSpec(int(cfg["realizations"]), int(cfg["seed"])) if sweeps_w else None
    )
    spec = SweepSpec(
        base=params,
        initial_state=state_from_string(cfg["state"]),
        axis1=axis1,
        axis2=axis2,
        observable=cfg["observable"],
        ensemble=ensemble,
    )
    result = run_sweep(spec, jobs=_jobs(args))
    _write(cfg["out"], _config_header(cfg) + "\n" + result.to_csv())
    n_fail = len(result.failures)
    print(f"cells = {result.values.size}, failed = {n_fail}")
    return 0 if n_fail < result.values.size else 1


def cmd_optimal_field(args) -> int:
    schema = {
        **_COMMON,
        "gamma_phi": 1e-6,
        "state": "gaussian:3,1,0",
        "grid": None,
        "out": None,
    }
    cfg = _resolve(args, schema)
    params = _params(cfg)
    if cfg["grid"] is None:
        e_c = critical_field(params.n_sites, params.hopping)
        grid = np.linspace(-e_c, e_c, 41)
    else:
        grid, _ = parse_grid(cfg["grid"])
    state = state_from_string(cfg["state"])
    res = optimal_field_search(params, state, grid, jobs=_jobs(args))
    if cfg["out"]:
        lines = [_config_header(cfg), "e0,tau"]
        for e0, tau in zip(res.e0_grid, res.taus):
            lines.append(f"{_fmt(e0)},{_fmt(tau)}")
        _write(cfg["out"], "\n".join(lines) + "\n")
    print(
        f"e0_opt = {_fmt(res.e0_opt)}, tau_min = {_fmt(res.tau_min)}, "
        f"plateau = [{_fmt(res.plateau[0])}, {_fmt(res.plateau[1])}], "
        f"estimator_e0 = {_fmt(res.estimator_e0)}"
        + (" (unbracketed)" if res.unbracketed else "")
    )
    return 0


def cmd_disorder(args) -> int:
    schema = {
        **_COMMON,
        "state": "gaussian:3,1,0",
        "w_grid": "0,0.5,1,2,3.2,5",
        "gphi_grid": "1e-3:10:9:log",
        "realizations": 200,
        "seed": 0,
        "out": "disorder.csv",
    }
    cfg = _resolve(args, schema)
    params = _params(cfg)
    w_grid, _ = parse_grid(cfg["w_grid"])
    gphi_grid, _ = parse_grid(cfg["gphi_grid"])
    result = disorder_study(
        params,
        state_from_string(cfg["state"]),
        w_grid,
        gphi_grid,
        n_realizations=int(cfg["realizations"]),
        seed=int(cfg["seed"]),
        jobs=_jobs(args),
    )
    _write(cfg["out"], _config_header(cfg) + "\n" + result.to_csv())
    print(
        f"cells = {result.values.size}, failed = {len(result.failures)}, "
        f"dropped realizations = {result.dropped_realizations}"
    )
    return 0


def cmd_current(args) -> int:
    schema = {
        **_COMMON,
        "gamma_phi": 1e-3,
        "grid": "0:1:21",
        "fit_window": None,
        "out": None,
    }
    cfg = _resolve(args, schema)
    params = _params(cfg)
    grid, _ = parse_grid(cfg["grid"])
    window = float(cfg["fit_window"]) if cfg["fit_window"] is not None else None
    res = current_and_conductance(params, grid, fit_window=window, jobs=_jobs(args))
    if cfg["out"]:
        lines = [_config_header(cfg), "e0,current"]
        for e0, cur in zip(res.e0_grid, res.current):
            lines.append(f"{_fmt(e0)},{_fmt(cur)}")
        lines.append(f"# conductance: {_fmt(res.conductance)}")
        _write(cfg["out"], "\n".join(lines) + "\n")
    print(
        f"g = {_fmt(res.conductance)} [e^2/hbar], "
        f"fit_window = {_fmt(res.fit_window)}, residual = {_fmt(res.residual)}"
    )
    return 0


def cmd_preset(args) -> int:
    schema = {"name": None, "out": None, "realizations": None}
    cfg = _resolve(args, schema)
    name = cfg["name"]
    if name is None:
        raise ValidationError("preset name required")
    out = cfg["out"] or f"{name}.csv"
    payloads = run_preset(
        name,
        jobs=_jobs(args),
        ensemble=int(cfg["realizations"]) if cfg["realizations"] else None,
    )
    out_path = Path(out)
    for suffix, text in payloads:
        if suffix:
            path = out_path.with_name(out_path.stem + suffix + out_path.suffix)
        else:
            path = out_path
        _write(str(path), text)
    return 0


def _jobs(args) -> int:
    if getattr(args, "jobs", None):
        return int(args.jobs)
    env = os.environ.get("CHAINTRANSPORT_JOBS")
    if env:
        return int(env)
    return 1


def _add_common(p: argparse.ArgumentParser, keys: tuple[str, ...]) -> None:
    flags = {
        "n": (int, "chain length N"),
        "hopping": (float, "hopping amplitude Omega"),
        "e0": (float, "field step per site"),
        "gamma_out": (float, "sink rate"),
        "gamma_phi": (float, "dephasing rate"),
        "state": (str, "initial state, e.g. localized:1, gaussian:3,1,0, flat"),
        "out": (str, "output CSV path"),
        "grid": (str, "grid spec lo:hi:num[:log] or comma list"),
        "method": (str, "spectral | liouville | integrate | auto"),
        "observable": (str, "tau | delta_gamma | pr_super | pr_sub | current"),
        "param": (str, "swept parameter (E0, gamma_out, gamma_phi, W, N)"),
        "param2": (str, "second swept parameter"),
        "grid2": (str, "grid spec of the second axis"),
        "realizations": (int, "disorder realizations per cell"),
        "seed": (int, "ensemble master seed"),
        "t_max": (float, "final time"),
        "n_times": (int, "number of time samples"),
        "w_grid": (str, "disorder width grid"),
        "gphi_grid": (str, "dephasing grid"),
        "fit_window": (float, "ohmic fit window on E0"),
        "name": (str, "preset name"),
    }
    for key in keys:
        typ, help_text = flags[key]
        p.add_argument(f"--{key.replace('_', '-')}", type=typ, default=None, help=help_text)
    p.add_argument("--config", default=None, help="JSON config file (flags override)")
    p.add_argument("--jobs", type=int, default=None, help="parallel sweep cells")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaintransport",
        description="Quantum transport in tilted, dephased, sink-terminated chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="effective-Hamiltonian spectrum CSV")
    _add_common(p, ("n", "hopping", "e0", "gamma_out", "gamma_phi", "out"))
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("transfer-time", help="average transfer time of one point")
    _add_common(p, ("n", "hopping", "e0", "gamma_out", "gamma_phi", "state", "method"))
    p.set_defaults(func=cmd_transfer_time)

    p = sub.add_parser("trajectory", help="site populations over time")
    _add_common(
        p,
        ("n", "hopping", "e0", "gamma_out", "gamma_phi", "state", "t_max", "n_times", "out"),
    )
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("sweep", help="1D/2D parameter sweep to CSV")
    _add_common(
        p,
        (
            "n",
            "hopping",
            "e0",
            "gamma_out",
            "gamma_phi",
            "state",
            "observable",
            "param",
            "grid",
            "param2",
            "grid2",
            "realizations",
            "seed",
            "out",
        ),
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimal-field", help="grid search for the optimal field step")
    _add_common(p, ("n", "hopping", "e0", "gamma_out", "gamma_phi", "state", "grid", "out"))
    p.set_defaults(func=cmd_optimal_field)

    p = sub.add_parser("disorder", help="disorder ensemble sweep")
    _add_common(
        p,
        (
            "n",
            "hopping",
            "e0",
            "gamma_out",
            "gamma_phi",
            "state",
            "w_grid",
            "gphi_grid",
            "realizations",
            "seed",
            "out",
        ),
    )
    p.set_defaults(func=cmd_disorder)

    p = sub.add_parser("current", help="charge current and conductance fit")
    _add_common(p, ("n", "hopping", "e0", "gamma_out", "gamma_phi", "grid", "fit_window", "out"))
    p.set_defaults(func=cmd_current)

    p = sub.add_parser(
        "preset", help=f"run a named preset ({', '.join(sorted(PRESETS))})"
    )
    p.add_argument("name_pos", nargs="?", default=None, metavar="NAME")
    _add_common(p, ("name", "out", "realizations"))
    p.set_defaults(func=cmd_preset)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "name_pos", None) is not None and getattr(args, "name", None) is None:
        args.name = args.name_pos
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ChainTransportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
