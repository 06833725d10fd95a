"""JSON containers for charts, fields, forms, metrics, and instances.

Grids are stored as flat [re, im] pairs in C order next to their shape,
which keeps the files diff-friendly and the round trip exact.
"""
from __future__ import annotations

import json

import numpy as np

from .endforms import EndForm, MetricField
from .forms import ScalarForm
from .hitchin2d import SU2Config
from .higgs import HiggsInstance
from .lattice import LatticeChart, ScalarField
from .multiindex import MultiIndex


def grid_to_json(arr: np.ndarray) -> dict:
    a = np.asarray(arr, dtype=complex)
    flat = a.reshape(-1)
    return {
        "shape": list(a.shape),
        "data": [[float(v.real), float(v.imag)] for v in flat],
    }


def grid_from_json(obj: dict) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in obj["data"]], dtype=complex)
    return flat.reshape(tuple(obj["shape"]))


def chart_to_json(chart: LatticeChart) -> dict:
    return {
        "n": chart.n,
        "resolution": list(chart.resolution),
        "periods": list(chart.periods),
    }


def chart_from_json(obj: dict) -> LatticeChart:
    return LatticeChart(int(obj["n"]), tuple(int(x) for x in obj["resolution"]), tuple(float(x) for x in obj["periods"]))


def field_to_json(f: ScalarField) -> dict:
    return {"chart": chart_to_json(f.chart), "data": grid_to_json(f.data)}


def field_from_json(obj: dict) -> ScalarField:
    return ScalarField(chart_from_json(obj["chart"]), grid_from_json(obj["data"]))


def form_to_json(phi: ScalarForm) -> dict:
    return {
        "chart": chart_to_json(phi.chart),
        "p": phi.p,
        "q": phi.q,
        "monomials": [
            {"A": list(A.entries), "B": list(B.entries), "grid": grid_to_json(g)}
            for (A, B), g in sorted(phi.coeffs.items(), key=lambda kv: (kv[0][0].entries, kv[0][1].entries))
        ],
    }


def form_from_json(obj: dict) -> ScalarForm:
    chart = chart_from_json(obj["chart"])
    coeffs = {}
    for m in obj["monomials"]:
        A = MultiIndex(tuple(int(x) for x in m["A"]), chart.n)
        B = MultiIndex(tuple(int(x) for x in m["B"]), chart.n)
        coeffs[(A, B)] = grid_from_json(m["grid"])
    return ScalarForm(chart, int(obj["p"]), int(obj["q"]), coeffs)


def endform_to_json(phi: EndForm) -> dict:
    out = form_to_json_like(phi)
    out["r"] = phi.r
    return out


def form_to_json_like(phi) -> dict:
    return {
        "chart": chart_to_json(phi.chart),
        "p": phi.p,
        "q": phi.q,
        "monomials": [
            {"A": list(A.entries), "B": list(B.entries), "grid": grid_to_json(g)}
            for (A, B), g in sorted(phi.coeffs.items(), key=lambda kv: (kv[0][0].entries, kv[0][1].entries))
        ],
    }


def endform_from_json(obj: dict) -> EndForm:
    chart = chart_from_json(obj["chart"])
    coeffs = {}
    for m in obj["monomials"]:
        A = MultiIndex(tuple(int(x) for x in m["A"]), chart.n)
        B = MultiIndex(tuple(int(x) for x in m["B"]), chart.n)
        coeffs[(A, B)] = grid_from_json(m["grid"])
    return EndForm(chart, int(obj["r"]), int(obj["p"]), int(obj["q"]), coeffs)


def metric_to_json(h: MetricField) -> dict:
    return {"chart": chart_to_json(h.chart), "r": h.r, "matrix": grid_to_json(h.matrix)}


def metric_from_json(obj: dict) -> MetricField:
    return MetricField(chart_from_json(obj["chart"]), int(obj["r"]), grid_from_json(obj["matrix"]))


def instance_to_json(inst: HiggsInstance) -> dict:
    out = {
        "chart": chart_to_json(inst.chart),
        "r": inst.r,
        "h": metric_to_json(inst.h),
        "phi": endform_to_json(inst.phi),
        "synthetic_curvature": None,
    }
    if inst.synthetic_curvature is not None:
        out["synthetic_curvature"] = endform_to_json(inst.synthetic_curvature)
    return out


def instance_from_json(obj: dict) -> HiggsInstance:
    sc = obj.get("synthetic_curvature")
    return HiggsInstance(
        chart_from_json(obj["chart"]),
        int(obj["r"]),
        metric_from_json(obj["h"]),
        endform_from_json(obj["phi"]),
        endform_from_json(sc) if sc is not None else None,
    )


def su2config_to_json(cfg: SU2Config) -> dict:
    return {
        "chart": chart_to_json(cfg.chart),
        "A1": grid_to_json(cfg.A1),
        "A2": grid_to_json(cfg.A2),
        "phi1": grid_to_json(cfg.phi1),
        "phi2": grid_to_json(cfg.phi2),
    }


def su2config_from_json(obj: dict) -> SU2Config:
    return SU2Config(
        chart_from_json(obj["chart"]),
        grid_from_json(obj["A1"]),
        grid_from_json(obj["A2"]),
        grid_from_json(obj["phi1"]),
        grid_from_json(obj["phi2"]),
    )


def dump_json(obj: dict, path: str) -> None:
    """Deterministic JSON writer: sorted keys, no timestamps."""
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")
