import json

import numpy as np

from higgstorus.hitchin2d import random_config
from higgstorus.higgs import central_curvature_instance, HiggsInstance
from higgstorus.lattice import LatticeChart, random_field
from higgstorus.sampling import constant_higgs_field, random_end_form, random_metric, random_scalar_form
from higgstorus.serialize import (
    chart_from_json,
    chart_to_json,
    dump_json,
    endform_from_json,
    endform_to_json,
    field_from_json,
    field_to_json,
    form_from_json,
    form_to_json,
    grid_from_json,
    grid_to_json,
    instance_from_json,
    instance_to_json,
    metric_from_json,
    metric_to_json,
    su2config_from_json,
    su2config_to_json,
)


def chart():
    return LatticeChart(1, (8,), (1.0, 1.3))


def test_grid_round_trip_exact():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    assert np.array_equal(grid_from_json(grid_to_json(a)), a)


def test_chart_round_trip():
    c = LatticeChart(2, (8, 6), (1.0, 1.1, 0.9, 1.2))
    assert chart_from_json(chart_to_json(c)) == c


def test_field_round_trip():
    c = chart()
    f = random_field(c, 5, 2)
    g = field_from_json(field_to_json(f))
    assert g.chart == c
    assert np.array_equal(g.data, f.data)


def test_form_round_trip():
    c = LatticeChart(2, (4, 4), (1.0, 1.1, 0.9, 1.2))
    phi = random_scalar_form(c, 1, 1, seed=2)
    psi = form_from_json(form_to_json(phi))
    assert (psi.p, psi.q) == (phi.p, phi.q)
    assert set(psi.coeffs) == set(phi.coeffs)
    for k, v in phi.coeffs.items():
        assert np.array_equal(psi.coeffs[k], v)


def test_endform_and_metric_round_trip():
    c = chart()
    phi = random_end_form(c, 2, 1, 0, 3)
    psi = endform_from_json(endform_to_json(phi))
    assert psi.r == 2
    for k, v in phi.coeffs.items():
        assert np.array_equal(psi.coeffs[k], v)
    h = random_metric(c, 2, 4)
    h2 = metric_from_json(metric_to_json(h))
    assert np.array_equal(h2.matrix, h.matrix)


def test_instance_round_trip_with_and_without_synthetic():
    c = chart()
    inst = HiggsInstance(c, 2, random_metric(c, 2, 7, amplitude=0.3), constant_higgs_field(c, 2, 8, scale=0.5))
    back = instance_from_json(instance_to_json(inst))
    assert np.array_equal(back.h.matrix, inst.h.matrix)
    assert back.synthetic_curvature is None
    synth = central_curvature_instance(c, 1, 2.0 * np.pi)
    back2 = instance_from_json(instance_to_json(synth))
    assert back2.synthetic_curvature is not None
    for k, v in synth.synthetic_curvature.coeffs.items():
        assert np.array_equal(back2.synthetic_curvature.coeffs[k], v)


def test_su2config_round_trip():
    c = chart()
    cfg = random_config(c, 9, amplitude=0.5)
    back = su2config_from_json(su2config_to_json(cfg))
    for name in ("A1", "A2", "phi1", "phi2"):
        assert np.array_equal(getattr(back, name), getattr(cfg, name))


def test_dump_json_deterministic(tmp_path):
    obj = {"b": [1, 2], "a": {"y": 0.5, "x": grid_to_json(np.eye(2, dtype=complex))}}
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    dump_json(obj, str(p1))
    dump_json(obj, str(p2))
    assert p1.read_bytes() == p2.read_bytes()
    json.loads(p1.read_text())
