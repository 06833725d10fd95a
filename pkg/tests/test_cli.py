import csv
import json
import os

import pytest

from higgstorus.cli import ConfigError, main, parse_config, typed_config


def write(path, text):
    path.write_text(text)
    return str(path)


VERIFY = """
n = 1
resolution = 8
periods = 1.0, 1.1
rank = 2
seed = 7
band = 1
tol_route = 1e-10
tol_pointwise = 1e-12
amplitude = 0.3
higgs_scale = 0.7
"""

FLOW = """
n = 1
resolution = 8
periods = 1.0, 1.0
rank = 1
seed = 3
band = 1
target = H
steps = 200
step_size = 0.05
tol = 1e-9
amplitude = 0.5
higgs_scale = 0.0
"""

REDUCE2D = """
resolution = 16
periods = 1.0, 1.3
seed = 11
band = 2
amplitude = 0.8
tol_equiv = 1e-12
tol_sdym = 1e-13
"""

EXAMPLE = """
kind = contraction
n = 1
resolution = 8
periods = 1.0, 1.0
"""


def test_parse_config_comments_and_duplicates(tmp_path):
    p = write(tmp_path / "c.cfg", "a = 1  # trailing\n# full line\nb = x\n")
    assert parse_config(p) == {"a": "1", "b": "x"}
    bad = write(tmp_path / "d.cfg", "a = 1\na = 2\n")
    with pytest.raises(ConfigError):
        parse_config(bad)
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path / "e.cfg", "just words\n"))
    with pytest.raises(ConfigError):
        parse_config(str(tmp_path / "missing.cfg"))


def test_typed_config_strictness():
    with pytest.raises(ConfigError):
        typed_config({"bogus": "1"}, "verify")
    with pytest.raises(ConfigError):
        typed_config({}, "verify")
    with pytest.raises(ConfigError):
        typed_config(
            {
                "n": "one",
                "resolution": "8",
                "periods": "1,1",
                "rank": "1",
                "seed": "0",
                "band": "1",
                "tol_route": "1e-10",
                "tol_pointwise": "1e-12",
            },
            "verify",
        )


def test_verify_runs_and_is_deterministic(tmp_path):
    cfg = write(tmp_path / "v.cfg", VERIFY)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["verify", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["verify", "--config", cfg, "--out", str(out2)]) == 0
    b1 = (out1 / "verify_report.json").read_bytes()
    b2 = (out2 / "verify_report.json").read_bytes()
    assert b1 == b2
    report = json.loads(b1)
    assert report["passed"]
    assert {c["name"] for c in report["checks"]} >= {
        "sign_identities_n1",
        "star_involution_basis",
        "trace_commutator_pointwise",
        "mean_curvature_routes",
        "ymh_decomposition",
    }


def test_verify_bad_config_exits_2(tmp_path):
    cfg = write(tmp_path / "v.cfg", VERIFY + "rogue = 1\n")
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 2
    short = write(tmp_path / "w.cfg", VERIFY.replace("periods = 1.0, 1.1", "periods = 1.0"))
    assert main(["verify", "--config", short, "--out", str(tmp_path)]) == 2
    odd = write(tmp_path / "x.cfg", VERIFY.replace("resolution = 8", "resolution = 7"))
    assert main(["verify", "--config", odd, "--out", str(tmp_path)]) == 2


def test_flow_outputs_and_monotone_trace(tmp_path):
    cfg = write(tmp_path / "f.cfg", FLOW)
    out = tmp_path / "out"
    assert main(["flow", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "flow_summary.json").read_text())
    assert summary["status"] == "converged"
    assert summary["monotone"]
    assert summary["minimum_check"]
    assert summary["final"] < 1e-9
    with open(out / "flow_trace.csv") as fh:
        rows = list(csv.DictReader(fh))
    values = [float(r["value"]) for r in rows]
    assert all(b <= a + 1e-14 for a, b in zip(values, values[1:]))
    assert (out / "flow_trace.png").exists()


def test_flow_zero_steps_single_row(tmp_path):
    cfg = write(tmp_path / "f.cfg", FLOW.replace("steps = 200", "steps = 0"))
    out = tmp_path / "out"
    assert main(["flow", "--config", cfg, "--out", str(out)]) == 0
    with open(out / "flow_trace.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1


def test_reduce2d_report(tmp_path):
    cfg = write(tmp_path / "r.cfg", REDUCE2D)
    out = tmp_path / "out"
    assert main(["reduce2d", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "reduce2d_report.json").read_text())
    assert report["passed"]
    assert set(report["residuals"]) == {"real", "complex", "forms", "kw"}
    assert report["sdym"]["path_gap"] <= 1e-13
    assert all(v <= 1e-12 for v in report["equivalence_gaps"].values())
    assert (out / "reduce2d_residuals.png").exists()


def test_reduce2d_seed_override_changes_report(tmp_path):
    cfg = write(tmp_path / "r.cfg", REDUCE2D)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["reduce2d", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["reduce2d", "--config", cfg, "--seed", "12", "--out", str(out2)]) == 0
    a = json.loads((out1 / "reduce2d_report.json").read_text())
    b = json.loads((out2 / "reduce2d_report.json").read_text())
    assert a["residuals"]["real"] != b["residuals"]["real"]
    assert b["passed"]


def test_example_contraction_and_hodge(tmp_path, capsys):
    cfg = write(tmp_path / "e.cfg", EXAMPLE)
    out = tmp_path / "out"
    assert main(["example", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "example_report.json").read_text())
    assert report["passed"]
    assert report["rank"] == 2
    assert "contraction" in capsys.readouterr().out
    hodge = write(
        tmp_path / "h.cfg",
        "kind = hodge_system\nn = 1\nresolution = 8\nperiods = 1.0, 1.0\nranks = 2, 1\nseed = 4\n",
    )
    assert main(["example", "--config", hodge, "--out", str(out)]) == 0
    report = json.loads((out / "example_report.json").read_text())
    assert report["rank"] == 3
    bad = write(tmp_path / "b.cfg", EXAMPLE.replace("kind = contraction", "kind = mystery"))
    assert main(["example", "--config", bad, "--out", str(out)]) == 2


def test_repo_configs_run(tmp_path):
    base = os.path.join(os.path.dirname(__file__), "..", "configs")
    assert main(["verify", "--config", os.path.join(base, "verify_n2.cfg"), "--out", str(tmp_path)]) == 0
    assert main(["example", "--config", os.path.join(base, "example_contraction.cfg"), "--out", str(tmp_path)]) == 0
