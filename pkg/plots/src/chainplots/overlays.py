"""Local recomputation of the analytic guide-line values.

The formulas are re-derived here on purpose instead of importing the
simulation package: a disagreement with the values echoed in the CSV
header flags a regression on either side and aborts the render.
"""
from __future__ import annotations

import math

from .errors import OverlayMismatchError, PlotError

OVERLAY_TOL = 1e-9


def reference_site(state: str) -> int:
    """Site index the dephasing scale refers to, from the state string."""
    kind, _, rest = state.partition(":")
    kind = kind.strip().lower()
    if kind == "localized":
        return int(rest)
    if kind == "gaussian":
        return int(round(float(rest.split(",")[0])))
    if kind == "flat":
        return 1
    raise PlotError(f"unknown initial state {state!r}")


def compute_overlays(spec: dict) -> dict:
    """Guide-line values from the echoed experiment parameters."""
    base = spec["base"]
    n = int(base["n_sites"])
    hopping = float(base.get("hopping", 1.0))
    site = reference_site(spec["initial_state"])
    return {
        "critical_field": 4.0 * math.sqrt(2.0) * hopping / n,
        "gamma_st_reference": 2.0 * hopping,
        "critical_dephasing": 4.0 * hopping * site / (n + site),
    }


def verify_overlays(spec: dict, echoed: dict) -> dict:
    """Recompute the overlays and compare against the CSV header values."""
    local = compute_overlays(spec)
    if set(local) != set(echoed):
        raise OverlayMismatchError(
            f"overlay keys differ: header {sorted(echoed)}, local {sorted(local)}"
        )
    for key, value in local.items():
        if abs(value - float(echoed[key])) > OVERLAY_TOL:
            raise OverlayMismatchError(
                f"overlay {key}: header {echoed[key]!r} vs recomputed {value!r} "
                f"(tolerance {OVERLAY_TOL:g})"
            )
    return local
