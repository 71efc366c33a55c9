"""Fixture CSV builders matching the chaintransport output format."""
import json

import pytest

from chainplots.overlays import compute_overlays


def sweep_spec(preset, axis1, axis2=None, observable="tau", n_sites=10,
               state="gaussian:3,1,0", **base_kw):
    base = {
        "n_sites": n_sites,
        "hopping": 1.0,
        "field_step": 0.0,
        "sink_rate": 2.0,
        "dephasing_rate": 0.0,
    }
    base.update(base_kw)
    spec = {
        "base": base,
        "initial_state": state,
        "axis1": axis1,
        "observable": observable,
        "preset": preset,
    }
    if axis2 is not None:
        spec["axis2"] = axis2
    return spec


def sweep_csv(spec, values):
    """Serialize a sweep spec plus a value grid the way run_sweep does."""
    over = compute_overlays(spec)
    head = "# spec: " + json.dumps(spec, sort_keys=True, separators=(",", ":"))
    head += "\n# overlays: " + json.dumps(
        over, sort_keys=True, separators=(",", ":")
    )
    lines = [head, "axis1,axis2,value,stderr,status"]
    a1 = spec["axis1"]["grid"]
    a2 = spec["axis2"]["grid"] if "axis2" in spec else [None]
    k = 0
    for x1 in a1:
        for x2 in a2:
            x2s = "" if x2 is None else f"{x2:.9g}"
            lines.append(f"{x1:.9g},{x2s},{values[k]:.9g},0,ok")
            k += 1
    return "\n".join(lines) + "\n"


def trajectory_csv(e0, gphi, tau=5.0, n_sites=4, n_times=6):
    meta = json.dumps(
        {
            "preset": "fig8",
            "E0": e0,
            "gamma_phi": gphi,
            "gamma_out": 2.0,
            "n_sites": n_sites,
            "tau": tau,
        },
        sort_keys=True,
    )
    cols = "t," + ",".join(f"p{j}" for j in range(n_sites + 1))
    lines = [f"# trajectory: {meta}", cols]
    for i in range(n_times):
        t = 2.0 * i
        pops = [min(1.0, 0.1 * i)] + [
            max(0.0, 1.0 - 0.1 * i if j == 1 else 0.02 * i)
            for j in range(1, n_sites + 1)
        ]
        lines.append(",".join(f"{x:.9g}" for x in [t] + pops))
    return "\n".join(lines) + "\n"


def table_csv(preset, columns, rows):
    lines = [f"# preset: {preset}", ",".join(columns)]
    for r in rows:
        lines.append(",".join(str(x) for x in r))
    return "\n".join(lines) + "\n"


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write
