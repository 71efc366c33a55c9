"""Deterministic matplotlib rendering of parsed CSVs.

A render is a pure function of the input files: styling is pinned and
the image is written without volatile metadata, so re-running on the
same CSVs produces byte-identical output.
"""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import LogNorm  # noqa: E402

from .csvio import ParsedCSV, parse_csv  # noqa: E402
from .errors import PlotError  # noqa: E402
from .recipes import FigureRecipe, check_inputs, get_recipe  # noqa: E402

SYMLOG_LINTHRESH = 0.01
DPI = 110

_AXIS_LABELS = {
    "E0": "field step",
    "gamma_out": "sink rate",
    "gamma_phi": "dephasing rate",
    "W": "disorder width",
    "N": "chain length",
}


def _set_scale(ax, which: str, scale: str) -> None:
    setter = ax.set_xscale if which == "x" else ax.set_yscale
    if scale == "log":
        setter("log")
    elif scale == "symlog":
        setter("symlog", linthresh=SYMLOG_LINTHRESH)


def _sweep_axes(p: ParsedCSV) -> tuple[dict, dict | None]:
    spec = p.spec
    ax2 = spec.get("axis2")
    return spec["axis1"], ax2


def _grid_values(p: ParsedCSV) -> np.ndarray:
    a1, a2 = _sweep_axes(p)
    n1 = len(a1["grid"])
    n2 = len(a2["grid"]) if a2 else 1
    vals = p.column("value")
    if len(vals) != n1 * n2:
        raise PlotError(
            f"{p.path}: {len(vals)} rows, expected {n1}x{n2} grid"
        )
    return vals.reshape(n1, n2)


def _draw_overlays(ax, recipe: FigureRecipe, overlays: dict, x_param: str) -> None:
    if recipe.vline_overlay and overlays:
        v = overlays[recipe.vline_overlay]
        ax.axvline(v, color="k", linestyle="--", linewidth=1.0)
        xs = [float(s) for s in ax.get_xlim()]
        if xs[0] < -v:
            ax.axvline(-v, color="k", linestyle="--", linewidth=1.0)
    if recipe.hline_overlay and overlays:
        ax.axhline(
            overlays[recipe.hline_overlay],
            color="w" if recipe.kind == "heatmap" else "k",
            linestyle=":",
            linewidth=1.0,
        )


def _render_heatmap(recipe, parsed, overlays):
    fig, axes = plt.subplots(
        1, len(parsed), figsize=(5.2 * len(parsed), 4.0), squeeze=False
    )
    for ax, p, over in zip(axes[0], parsed, overlays):
        a1, a2 = _sweep_axes(p)
        if a2 is None:
            raise PlotError(f"{p.path}: heatmap recipe needs a 2D sweep")
        vals = _grid_values(p)
        x = np.asarray(a1["grid"])
        y = np.asarray(a2["grid"])
        z = vals.T
        norm = None
        if recipe.log_color:
            pos = z[np.isfinite(z) & (z > 0)]
            if len(pos):
                norm = LogNorm(vmin=pos.min(), vmax=pos.max())
        mesh = ax.pcolormesh(
            x, y, np.ma.masked_invalid(z), shading="nearest",
            norm=norm, cmap="viridis",
        )
        fig.colorbar(mesh, ax=ax, label=recipe.value_label)
        _set_scale(ax, "x", a1.get("scale", "linear"))
        _set_scale(ax, "y", a2.get("scale", "linear"))
        ax.set_xlabel(_AXIS_LABELS.get(a1["parameter"], a1["parameter"]))
        ax.set_ylabel(_AXIS_LABELS.get(a2["parameter"], a2["parameter"]))
        ax.set_title(f"{recipe.name}: {p.spec['observable']}")
        _draw_overlays(ax, recipe, over, a1["parameter"])
    return fig


def _render_line(recipe, parsed, overlays):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    p = parsed[0]
    a1, _ = _sweep_axes(p)
    x = np.asarray(a1["grid"])
    ax.plot(x, _grid_values(p)[:, 0], marker="o", markersize=3)
    _set_scale(ax, "x", a1.get("scale", "linear"))
    ax.set_xlabel(_AXIS_LABELS.get(a1["parameter"], a1["parameter"]))
    ax.set_ylabel(recipe.value_label)
    ax.set_title(recipe.name)
    _draw_overlays(ax, recipe, overlays[0], a1["parameter"])
    return fig


def _render_lines_by_axis2(recipe, parsed, overlays):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    p = parsed[0]
    a1, a2 = _sweep_axes(p)
    if a2 is None:
        raise PlotError(f"{p.path}: recipe needs a 2D sweep")
    x = np.asarray(a1["grid"])
    vals = _grid_values(p)
    name2 = _AXIS_LABELS.get(a2["parameter"], a2["parameter"])
    for j, y2 in enumerate(a2["grid"]):
        ax.plot(x, vals[:, j], label=f"{name2} = {y2:g}")
    _set_scale(ax, "x", a1.get("scale", "linear"))
    if recipe.log_color:
        ax.set_yscale("log")
    ax.set_xlabel(_AXIS_LABELS.get(a1["parameter"], a1["parameter"]))
    ax.set_ylabel(recipe.value_label)
    ax.set_title(recipe.name)
    ax.legend(fontsize=7)
    _draw_overlays(ax, recipe, overlays[0], a1["parameter"])
    return fig


def _render_optimal_field_scaling(recipe, parsed, overlays):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    p = parsed[0]
    n = p.column("N")
    ax.fill_between(
        n, p.column("plateau_lo"), p.column("plateau_hi"),
        alpha=0.25, label="10% plateau",
    )
    ax.plot(n, p.column("e0_opt"), marker="o", label="grid optimum")
    ax.plot(
        n, p.column("estimator_e0"), marker="s", linestyle="none",
        label="spectral estimate",
    )
    ax.set_xlabel("chain length")
    ax.set_ylabel("optimal field step")
    ax.set_title(recipe.name)
    ax.legend(fontsize=7)
    return fig


def _render_family_scaling(recipe, parsed, overlays):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    p = parsed[0]
    n = p.column("N")
    tau = p.column("tau_min")
    families = p.text_column("family")
    for fam in sorted(set(families)):
        mask = np.array([f == fam for f in families])
        ax.plot(n[mask], tau[mask], marker="o", label=fam)
    ax.set_yscale("log")
    ax.set_xlabel("chain length")
    ax.set_ylabel("minimal transfer time")
    ax.set_title(recipe.name)
    ax.legend(fontsize=7)
    return fig


def _render_trajectory_grid(recipe, parsed, overlays):
    order = sorted(
        range(len(parsed)),
        key=lambda k: (
            parsed[k].trajectory_meta["E0"],
            parsed[k].trajectory_meta["gamma_phi"],
        ),
    )
    e0s = sorted({p.trajectory_meta["E0"] for p in parsed})
    gps = sorted({p.trajectory_meta["gamma_phi"] for p in parsed})
    fig, axes = plt.subplots(
        len(e0s), len(gps),
        figsize=(2.6 * len(gps), 1.9 * len(e0s)),
        squeeze=False, sharex=True,
    )
    for k in order:
        p = parsed[k]
        meta = p.trajectory_meta
        ax = axes[e0s.index(meta["E0"])][gps.index(meta["gamma_phi"])]
        t = p.column("t")
        site_cols = [c for c in p.columns if c.startswith("p") and c != "p0"]
        z = np.stack([p.column(c) for c in site_cols])
        ax.pcolormesh(
            t, np.arange(1, len(site_cols) + 1), z,
            shading="nearest", cmap="magma", vmin=0.0,
        )
        if meta.get("tau") is not None:
            ax.axvline(meta["tau"], color="c", linewidth=1.0)
        ax.set_title(
            f"E0={meta['E0']:g}, deph={meta['gamma_phi']:g}", fontsize=6
        )
        ax.tick_params(labelsize=6)
    for ax in axes[-1]:
        ax.set_xlabel("t", fontsize=7)
    for row in axes:
        row[0].set_ylabel("site", fontsize=7)
    return fig


def _render_xy_loglog(recipe, parsed, overlays):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    p = parsed[0]
    opt = recipe.options
    ax.loglog(p.column(opt["x"]), p.column(opt["y"]), marker="o", markersize=3)
    ax.set_xlabel(opt["xlabel"])
    ax.set_ylabel(opt["ylabel"])
    ax.set_title(recipe.name)
    return fig


def _render_closed_form_comparison(recipe, parsed, overlays):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    p = parsed[0]
    g = p.column("gamma_out")
    n = p.column("n")
    num = p.column("tau_num")
    form = p.column("tau_closed_form")
    for site in sorted(set(n)):
        mask = n == site
        (line,) = ax.loglog(g[mask], form[mask], label=f"site {int(site)}")
        ax.loglog(
            g[mask], num[mask], linestyle="none", marker="o",
            markersize=3, color=line.get_color(),
        )
    ax.set_xlabel("sink rate")
    ax.set_ylabel("transfer time")
    ax.set_title(recipe.name)
    ax.legend(fontsize=7)
    return fig


_RENDERERS = {
    "heatmap": _render_heatmap,
    "line": _render_line,
    "lines_by_axis2": _render_lines_by_axis2,
    "optimal_field_scaling": _render_optimal_field_scaling,
    "family_scaling": _render_family_scaling,
    "trajectory_grid": _render_trajectory_grid,
    "xy_loglog": _render_xy_loglog,
    "closed_form_comparison": _render_closed_form_comparison,
}


def render(name: str, inputs: list[str], out: str) -> None:
    """Validate the inputs against the named recipe and write the image.

    Nothing is written unless every input passes the spec and overlay
    checks and the figure builds cleanly.
    """
    recipe = get_recipe(name)
    parsed = [parse_csv(path) for path in inputs]
    overlays = check_inputs(recipe, parsed)
    fig = _RENDERERS[recipe.kind](recipe, parsed, overlays)
    try:
        fig.savefig(
            out, dpi=DPI, format=Path(out).suffix.lstrip(".") or "png",
            metadata={"Software": None},
        )
    finally:
        plt.close(fig)
