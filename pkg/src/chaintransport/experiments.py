"""Parameter sweeps and figure-level experiments.

Grid cells (and disorder realizations) are independent; evaluation can be
farmed out to worker processes, while aggregation stays sequential so CSV
output is deterministic for a fixed spec.
"""
from __future__ import annotations

import concurrent.futures
import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analytics import critical_dephasing, critical_field, optimal_field_estimate
from .errors import ChainTransportError, ValidationError
from .liouville import transfer_time_integrate, transfer_time_liouville
from .model import (
    ChainParams,
    DisorderSpec,
    Flat,
    Gaussian,
    InitialState,
    Localized,
    build_initial_state,
    sample_disorder,
)
from .nonhermitian import effective_spectrum, superradiance_diagnostics

SWEEP_PARAMETERS = ("E0", "gamma_out", "gamma_phi", "W", "N")
OBSERVABLES = ("tau", "delta_gamma", "pr_super", "pr_sub", "current")
AXIS_SCALES = ("linear", "log", "symlog")


def transfer_time(
    params: ChainParams,
    psi0: np.ndarray,
    disorder_realization: np.ndarray | None = None,
) -> float:
    """Spectral Liouvillian transfer time with time-integration fallback."""
    try:
        return transfer_time_liouville(params, psi0, disorder_realization)
    except ChainTransportError:
        return transfer_time_integrate(params, psi0, disorder_realization).value


@dataclass(frozen=True)
class Axis:
    parameter: str
    grid: tuple[float, ...]
    scale: str = "linear"

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValidationError(f"unknown sweep parameter {self.parameter!r}")
        if self.scale not in AXIS_SCALES:
            raise ValidationError(f"unknown axis scale {self.scale!r}")
        g = np.asarray(self.grid, dtype=float)
        if len(g) == 0:
            raise ValidationError("axis grid must be non-empty")
        if len(g) > 1 and not np.all(np.diff(g) > 0):
            raise ValidationError("axis grid must be strictly increasing")


@dataclass(frozen=True)
class EnsembleSpec:
    n_realizations: int
    seed: int = 0

    def __post_init__(self):
        if self.n_realizations < 1:
            raise ValidationError("ensemble needs at least one realization")


@dataclass(frozen=True)
class SweepSpec:
    base: ChainParams
    initial_state: InitialState
    axis1: Axis
    axis2: Axis | None = None
    observable: str = "tau"
    ensemble: EnsembleSpec | None = None
    preset: str | None = None

    def __post_init__(self):
        if self.observable not in OBSERVABLES:
            raise ValidationError(f"unknown observable {self.observable!r}")
        sweeps_w = self.axis1.parameter == "W" or (
            self.axis2 is not None and self.axis2.parameter == "W"
        )
        has_w = self.base.disorder is not None and self.base.disorder.width > 0
        if (sweeps_w or has_w) and self.ensemble is None:
            raise ValidationError("disordered sweeps require an ensemble spec")

    def shape(self) -> tuple[int, int]:
        n2 = len(self.axis2.grid) if self.axis2 is not None else 1
        return (len(self.axis1.grid), n2)

    def to_dict(self) -> dict:
        return spec_to_dict(self)


def spec_to_dict(spec: SweepSpec) -> dict:
    d = {
        "base": {
            "n_sites": spec.base.n_sites,
            "hopping": spec.base.hopping,
            "field_step": spec.base.field_step,
            "sink_rate": spec.base.sink_rate,
            "dephasing_rate": spec.base.dephasing_rate,
        },
        "initial_state": state_to_string(spec.initial_state),
        "axis1": {
            "parameter": spec.axis1.parameter,
            "grid": list(spec.axis1.grid),
            "scale": spec.axis1.scale,
        },
        "observable": spec.observable,
    }
    if spec.base.disorder is not None:
        d["base"]["disorder"] = {
            "width": spec.base.disorder.width,
            "seed": spec.base.disorder.seed,
        }
    if spec.axis2 is not None:
        d["axis2"] = {
            "parameter": spec.axis2.parameter,
            "grid": list(spec.axis2.grid),
            "scale": spec.axis2.scale,
        }
    if spec.ensemble is not None:
        d["ensemble"] = {
            "n_realizations": spec.ensemble.n_realizations,
            "seed": spec.ensemble.seed,
        }
    if spec.preset is not None:
        d["preset"] = spec.preset
    return d


def spec_from_dict(d: dict) -> SweepSpec:
    base = d["base"]
    disorder = None
    if "disorder" in base:
        disorder = DisorderSpec(
            width=base["disorder"]["width"], seed=base["disorder"].get("seed", 0)
        )
    params = ChainParams(
        n_sites=base["n_sites"],
        hopping=base.get("hopping", 1.0),
        field_step=base.get("field_step", 0.0),
        sink_rate=base.get("sink_rate", 0.0),
        dephasing_rate=base.get("dephasing_rate", 0.0),
        disorder=disorder,
    )

    def axis(a):
        return Axis(a["parameter"], tuple(a["grid"]), a.get("scale", "linear"))

    ensemble = None
    if "ensemble" in d:
        ensemble = EnsembleSpec(
            n_realizations=d["ensemble"]["n_realizations"],
            seed=d["ensemble"].get("seed", 0),
        )
    return SweepSpec(
        base=params,
        initial_state=state_from_string(d["initial_state"]),
        axis1=axis(d["axis1"]),
        axis2=axis(d["axis2"]) if "axis2" in d else None,
        observable=d.get("observable", "tau"),
        ensemble=ensemble,
        preset=d.get("preset"),
    )


def state_to_string(state: InitialState) -> str:
    if isinstance(state, Localized):
        return f"localized:{state.site}"
    if isinstance(state, Flat):
        return "flat"
    if isinstance(state, Gaussian):
        return f"gaussian:{state.center:g},{state.width:g},{state.momentum:g}"
    raise ValidationError(f"unknown state {state!r}")


def state_from_string(text: str) -> InitialState:
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "flat":
        return Flat()
    if kind == "localized":
        return Localized(site=int(rest))
    if kind == "gaussian":
        parts = [float(x) for x in rest.split(",")] if rest else []
        if not 1 <= len(parts) <= 3:
            raise ValidationError(f"gaussian spec needs 1-3 numbers, got {text!r}")
        return Gaussian(*parts)
    raise ValidationError(f"unknown initial state {text!r}")


def _apply_axis(params: ChainParams, name: str, value: float, seed: int) -> ChainParams:
    if name == "E0":
        return params.with_(field_step=float(value))
    if name == "gamma_out":
        return params.with_(sink_rate=float(value))
    if name == "gamma_phi":
        return params.with_(dephasing_rate=float(value))
    if name == "N":
        return params.with_(n_sites=int(round(value)))
    if name == "W":
        return params.with_(disorder=DisorderSpec(width=float(value), seed=seed))
    raise ValidationError(f"unknown sweep parameter {name!r}")


def _evaluate_once(
    params: ChainParams,
    state: InitialState,
    observable: str,
    disorder_realization: np.ndarray | None,
) -> float:
    psi0 = build_initial_state(state, params.n_sites)
    if observable == "tau":
        return transfer_time(params, psi0, disorder_realization)
    if observable == "current":
        e0 = params.field_step
        tau_minus = transfer_time(
            params.with_(field_step=-e0), psi0, disorder_realization
        )
        tau_plus = transfer_time(params, psi0, disorder_realization)
        return 1.0 / tau_minus - 1.0 / tau_plus
    spec = effective_spectrum(params, disorder_realization)
    diag = superradiance_diagnostics(spec, params.sink_rate)
    if observable == "delta_gamma":
        return diag.normalized_gap
    if observable == "pr_super":
        return diag.pr_super
    if observable == "pr_sub":
        return diag.pr_sub_avg
    raise ValidationError(f"unknown observable {observable!r}")


def _evaluate_cell(
    spec: SweepSpec, i: int, j: int
) -> tuple[int, int, float, float, str, int]:
    """One grid cell: (i, j, value, stderr, status, n_failed_realizations)."""
    seed = spec.ensemble.seed if spec.ensemble is not None else (
        spec.base.disorder.seed if spec.base.disorder is not None else 0
    )
    params = _apply_axis(spec.base, spec.axis1.parameter, spec.axis1.grid[i], seed)
    if spec.axis2 is not None:
        params = _apply_axis(params, spec.axis2.parameter, spec.axis2.grid[j], seed)
    width = params.disorder.width if params.disorder is not None else 0.0
    try:
        if width > 0:
            n_real = spec.ensemble.n_realizations
            samples = []
            n_failed = 0
            for k in range(n_real):
                eps = sample_disorder(width, seed, k, params.n_sites)
                try:
                    samples.append(
                        _evaluate_once(params, spec.initial_state, spec.observable, eps)
                    )
                except ChainTransportError:
                    n_failed += 1
            if not samples:
                return (i, j, float("nan"), float("nan"), "failed: all realizations", 0)
            arr = np.asarray(samples)
            stderr = (
                float(np.std(arr, ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
            )
            return (i, j, float(np.mean(arr)), stderr, "ok", n_failed)
        value = _evaluate_once(params, spec.initial_state, spec.observable, None)
        return (i, j, value, 0.0, "ok", 0)
    except ChainTransportError as exc:
        return (i, j, float("nan"), float("nan"), f"failed: {exc}", 0)


@dataclass
class SweepResult:
    spec: SweepSpec
    values: np.ndarray
    stderr: np.ndarray
    status: list[list[str]]
    failures: list[tuple[int, int, str]]
    dropped_realizations: int = 0
    provenance: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        header = canonical_spec_header(self.spec)
        lines = [header, "axis1,axis2,value,stderr,status"]
        a2 = self.spec.axis2.grid if self.spec.axis2 is not None else (float("nan"),)
        for i, x1 in enumerate(self.spec.axis1.grid):
            for j, x2 in enumerate(a2):
                v = self.values[i, j]
                s = self.stderr[i, j]
                x2s = f"{x2:.9g}" if self.spec.axis2 is not None else ""
                vs = f"{v:.9g}" if np.isfinite(v) else "nan"
                ss = f"{s:.9g}" if np.isfinite(s) else "nan"
                lines.append(f"{x1:.9g},{x2s},{vs},{ss},{self.status[i][j]}")
        return "\n".join(lines) + "\n"


def overlay_values(params: ChainParams, state: InitialState) -> dict:
    """Analytic guide lines recomputed by the plotting layer as a cross-check."""
    n = params.n_sites
    site = state.site if isinstance(state, Localized) else (
        int(round(state.center)) if isinstance(state, Gaussian) else 1
    )
    return {
        "critical_field": critical_field(n, params.hopping),
        "gamma_st_reference": 2.0 * params.hopping,
        "critical_dephasing": critical_dephasing(site, n, params.hopping),
    }


def canonical_spec_header(spec: SweepSpec) -> str:
    body = json.dumps(spec_to_dict(spec), sort_keys=True, separators=(",", ":"))
    over = json.dumps(
        overlay_values(spec.base, spec.initial_state),
        sort_keys=True,
        separators=(",", ":"),
    )
    return f"# spec: {body}\n# overlays: {over}"


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate the observable on the whole grid; single cells never abort the sweep."""
    n1, n2 = spec.shape()
    values = np.full((n1, n2), np.nan)
    stderr = np.full((n1, n2), np.nan)
    status = [["pending"] * n2 for _ in range(n1)]
    failures: list[tuple[int, int, str]] = []
    dropped = 0
    cells = [(i, j) for i in range(n1) for j in range(n2)]
    t0 = time.process_time()
    if jobs > 1 and len(cells) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(
                pool.map(
                    _cell_star,
                    [(spec, i, j) for (i, j) in cells],
                    chunksize=max(1, len(cells) // (8 * jobs)),
                )
            )
    else:
        results = [_evaluate_cell(spec, i, j) for (i, j) in cells]
    for i, j, v, s, st, n_failed in results:
        values[i, j] = v
        stderr[i, j] = s
        status[i][j] = st
        dropped += n_failed
        if st != "ok":
            failures.append((i, j, st))
    provenance = {
        "version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "cpu_seconds": time.process_time() - t0,
    }
    return SweepResult(
        spec=spec,
        values=values,
        stderr=stderr,
        status=status,
        failures=failures,
        dropped_realizations=dropped,
        provenance=provenance,
    )


def _cell_star(args):
    return _evaluate_cell(*args)


@dataclass(frozen=True)
class OptimalFieldResult:
    e0_opt: float
    tau_min: float
    plateau: tuple[float, float]
    estimator_e0: float
    e0_grid: np.ndarray
    taus: np.ndarray
    unbracketed: bool = False


def optimal_field_search(
    params: ChainParams,
    state: InitialState,
    e0_grid: np.ndarray,
    jobs: int = 1,
) -> OptimalFieldResult:
    """Grid search for the field step minimizing tau, with a 10% plateau.

    The plateau is scanned outward from the minimizer: the contiguous
    range where tau stays below 1.1 * tau_min.
    """
    e0_grid = np.asarray(e0_grid, dtype=float)
    spec = SweepSpec(
        base=params,
        initial_state=state,
        axis1=Axis("E0", tuple(e0_grid), "linear"),
    )
    result = run_sweep(spec, jobs=jobs)
    taus = result.values[:, 0]
    if not np.all(np.isfinite(taus)):
        raise ChainTransportError("tau evaluation failed inside the field grid")
    best = int(np.argmin(taus))
    tau_min = float(taus[best])
    lo = best
    while lo > 0 and taus[lo - 1] <= 1.1 * tau_min:
        lo -= 1
    hi = best
    while hi < len(taus) - 1 and taus[hi + 1] <= 1.1 * tau_min:
        hi += 1
    psi0 = build_initial_state(state, params.n_sites)
    estimate = optimal_field_estimate(psi0, params, e0_grid)
    return OptimalFieldResult(
        e0_opt=float(e0_grid[best]),
        tau_min=tau_min,
        plateau=(float(e0_grid[lo]), float(e0_grid[hi])),
        estimator_e0=estimate.e0_opt,
        e0_grid=e0_grid,
        taus=taus,
        unbracketed=best in (0, len(taus) - 1),
    )


@dataclass(frozen=True)
class NScalingRow:
    n_sites: int
    family: str
    e0_used: float
    tau_min: float


def n_scaling_comparison(
    n_values,
    families=("localized", "gaussian", "flat"),
    gamma_out: float = 2.0,
    gamma_phi: float = 1e-6,
    hopping: float = 1.0,
    e0_grid_points: int = 41,
    jobs: int = 1,
) -> list[NScalingRow]:
    """Minimal tau per chain length and initial-state family.

    The Gaussian family uses its grid-searched optimal field; localized
    and flat states use zero field.
    """
    rows = []
    for n in n_values:
        params = ChainParams(
            n_sites=int(n),
            hopping=hopping,
            sink_rate=gamma_out,
            dephasing_rate=gamma_phi,
        )
        for family in families:
            if family == "localized":
                state: InitialState = Localized(min(3, int(n)))
            elif family == "gaussian":
                state = Gaussian(3.0, 1.0, 0.0)
            elif family == "flat":
                state = Flat()
            else:
                raise ValidationError(f"unknown state family {family!r}")
            if family == "gaussian":
                grid = np.linspace(
                    -critical_field(int(n), hopping),
                    critical_field(int(n), hopping),
                    e0_grid_points,
                )
                search = optimal_field_search(params, state, grid, jobs=jobs)
                rows.append(
                    NScalingRow(int(n), family, search.e0_opt, search.tau_min)
                )
            else:
                psi0 = build_initial_state(state, int(n))
                rows.append(
                    NScalingRow(int(n), family, 0.0, transfer_time(params, psi0))
                )
    return rows


def disorder_study(
    params: ChainParams,
    state: InitialState,
    w_grid,
    gamma_phi_grid,
    n_realizations: int = 1000,
    seed: int = 0,
    jobs: int = 1,
) -> SweepResult:
    """Ensemble-averaged tau over (W, gamma_phi) at zero field."""
    if params.field_step != 0.0:
        raise ValidationError("the disorder comparison is defined at zero field")
    spec = SweepSpec(
        base=params,
        initial_state=state,
        axis1=Axis("W", tuple(np.asarray(w_grid, dtype=float)), "linear"),
        axis2=Axis("gamma_phi", tuple(np.asarray(gamma_phi_grid, dtype=float)), "log"),
        observable="tau",
        ensemble=EnsembleSpec(n_realizations=n_realizations, seed=seed),
    )
    return run_sweep(spec, jobs=jobs)


@dataclass(frozen=True)
class CurrentResult:
    e0_grid: np.ndarray
    current: np.ndarray
    conductance: float
    fit_window: float
    residual: float


def current_and_conductance(
    params: ChainParams,
    e0_grid,
    gamma_phi: float | None = None,
    fit_window: float | None = None,
    jobs: int = 1,
) -> CurrentResult:
    """Charge current I(E0) = 1/tau(-E0) - 1/tau(E0) and the ohmic fit I = g V.

    Uses a mid-chain Gaussian initial state (electron-hole symmetric) and
    fits g by least squares on 0 < E0 <= fit_window with V = N E0.
    """
    if gamma_phi is not None:
        params = params.with_(dephasing_rate=gamma_phi)
    e0_grid = np.asarray(e0_grid, dtype=float)
    n = params.n_sites
    state = Gaussian((n + 1) / 2.0, 1.0, 0.0)
    if fit_window is None:
        fit_window = 0.5 * critical_field(n, params.hopping)
    spec = SweepSpec(
        base=params,
        initial_state=state,
        axis1=Axis("E0", tuple(e0_grid), "linear"),
        observable="current",
    )
    result = run_sweep(spec, jobs=jobs)
    current = result.values[:, 0]
    mask = (e0_grid > 0) & (e0_grid <= fit_window) & np.isfinite(current)
    if not np.any(mask):
        raise ValidationError("no usable grid points inside the fit window")
    v = n * e0_grid[mask]
    i_fit = current[mask]
    g = float(np.sum(i_fit * v) / np.sum(v * v))
    residual = float(np.sqrt(np.mean((i_fit - g * v) ** 2)))
    return CurrentResult(
        e0_grid=e0_grid,
        current=current,
        conductance=g,
        fit_window=float(fit_window),
        residual=residual,
    )


def conductance_vs_dephasing(
    params: ChainParams,
    gamma_phi_grid,
    e0_grid=None,
    fit_window: float | None = None,
    jobs: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Conductance fit repeated along a dephasing grid."""
    gamma_phi_grid = np.asarray(gamma_phi_grid, dtype=float)
    if e0_grid is None:
        window = fit_window or 0.5 * critical_field(params.n_sites, params.hopping)
        e0_grid = np.linspace(0.0, window, 8)[1:]
    g = np.empty(len(gamma_phi_grid))
    for i, gp in enumerate(gamma_phi_grid):
        g[i] = current_and_conductance(
            params, e0_grid, gamma_phi=float(gp), fit_window=fit_window, jobs=jobs
        ).conductance
    return gamma_phi_grid, g
