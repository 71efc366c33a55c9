"""Figure recipes: which CSVs each figure accepts and how it is drawn."""
from __future__ import annotations

from dataclasses import dataclass, field

from .csvio import ParsedCSV
from .errors import SpecMismatchError
from .overlays import verify_overlays


@dataclass(frozen=True)
class FigureRecipe:
    name: str
    kind: str
    n_inputs: tuple[int, int] = (1, 1)
    value_label: str = ""
    log_color: bool = False
    vline_overlay: str | None = None  # drawn at +/- the overlay value on x
    hline_overlay: str | None = None  # drawn at the overlay value on y
    options: dict = field(default_factory=dict)


RECIPES: dict[str, FigureRecipe] = {
    "fig2": FigureRecipe(
        "fig2",
        "heatmap",
        value_label="transfer time",
        log_color=True,
        vline_overlay="critical_field",
        hline_overlay="gamma_st_reference",
    ),
    "fig3a": FigureRecipe(
        "fig3a", "line", value_label="normalized width gap",
        vline_overlay="critical_field",
    ),
    "fig3b": FigureRecipe(
        "fig3b", "line", value_label="normalized width gap",
        vline_overlay="critical_field",
    ),
    "fig4": FigureRecipe(
        "fig4",
        "heatmap",
        value_label="transfer time",
        log_color=True,
        vline_overlay="critical_field",
        hline_overlay="critical_dephasing",
    ),
    "fig5": FigureRecipe(
        "fig5",
        "heatmap",
        n_inputs=(1, 2),
        value_label="participation ratio",
        vline_overlay="critical_field",
        hline_overlay="gamma_st_reference",
    ),
    "fig6": FigureRecipe("fig6", "optimal_field_scaling"),
    "fig7": FigureRecipe("fig7", "family_scaling"),
    "fig8": FigureRecipe("fig8", "trajectory_grid", n_inputs=(1, 18)),
    "fig_disorder": FigureRecipe(
        "fig_disorder",
        "heatmap",
        value_label="transfer time",
        log_color=True,
        hline_overlay="critical_dephasing",
    ),
    "fig_leegwater": FigureRecipe(
        "fig_leegwater", "lines_by_axis2", value_label="transfer time",
        log_color=True, vline_overlay="critical_field",
    ),
    "fig_current": FigureRecipe(
        "fig_current", "lines_by_axis2", value_label="current",
    ),
    "fig_conductance": FigureRecipe(
        "fig_conductance",
        "xy_loglog",
        options={"x": "gamma_phi", "y": "g", "xlabel": "dephasing rate",
                 "ylabel": "conductance"},
    ),
    "app1": FigureRecipe("app1", "closed_form_comparison"),
    "app2": FigureRecipe(
        "app2",
        "heatmap",
        value_label="transfer time",
        log_color=True,
        vline_overlay="critical_field",
        hline_overlay="critical_dephasing",
    ),
}

# recipes whose CSVs carry a serialized sweep spec (and overlay header)
SWEEP_RECIPES = {
    "fig2", "fig3a", "fig3b", "fig4", "fig5",
    "fig_disorder", "fig_leegwater", "fig_current", "app2",
}


def get_recipe(name: str) -> FigureRecipe:
    if name not in RECIPES:
        raise SpecMismatchError(
            f"unknown figure {name!r}; available: {', '.join(sorted(RECIPES))}"
        )
    return RECIPES[name]


def check_inputs(recipe: FigureRecipe, parsed: list[ParsedCSV]) -> list[dict]:
    """Validate every input against the recipe; returns per-file overlay dicts.

    Sweep CSVs must echo the recipe's preset name in their spec and carry
    overlay values that match the locally recomputed ones; trajectory CSVs
    must carry matching trajectory metadata; tabular presets must echo the
    preset name in a comment line.
    """
    lo, hi = recipe.n_inputs
    if not lo <= len(parsed) <= hi:
        raise SpecMismatchError(
            f"{recipe.name} takes {lo}..{hi} input files, got {len(parsed)}"
        )
    overlays = []
    for p in parsed:
        if recipe.name in SWEEP_RECIPES:
            spec = p.spec
            if spec is None:
                raise SpecMismatchError(f"{p.path}: missing sweep spec header")
            if spec.get("preset") != recipe.name:
                raise SpecMismatchError(
                    f"{p.path}: spec is for preset {spec.get('preset')!r}, "
                    f"recipe expects {recipe.name!r}"
                )
            if p.overlays is None:
                raise SpecMismatchError(f"{p.path}: missing overlays header")
            overlays.append(verify_overlays(spec, p.overlays))
        elif recipe.kind == "trajectory_grid":
            meta = p.trajectory_meta
            if meta is None or meta.get("preset") != recipe.name:
                raise SpecMismatchError(
                    f"{p.path}: not a {recipe.name} trajectory file"
                )
            overlays.append({})
        else:
            if p.comments.get("preset") != recipe.name:
                raise SpecMismatchError(
                    f"{p.path}: preset header {p.comments.get('preset')!r} "
                    f"does not match {recipe.name!r}"
                )
            overlays.append({})
    return overlays
