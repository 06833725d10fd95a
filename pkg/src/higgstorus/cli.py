"""Scenario runner: verification suites, metric flows, and 2D reductions.

Configs are flat ``key = value`` text files with strict schemas: unknown
keys are rejected and seeds and tolerances are always explicit.  Reports
are deterministic JSON (sorted keys, no timestamps), traces are CSV, and
each run renders a figure next to its delimited output.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import __version__
from .lattice import LatticeChart
from .serialize import dump_json


class ConfigError(Exception):
    pass


def parse_config(path: str) -> dict[str, str]:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
            key, val = line.split("=", 1)
            key = key.strip()
            if key in out:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = val.strip()
    return out


SCHEMAS = {
    "verify": {
        "required": {
            "n": int,
            "resolution": int,
            "periods": "floats",
            "rank": int,
            "seed": int,
            "band": int,
            "tol_route": float,
            "tol_pointwise": float,
        },
        "optional": {"amplitude": float, "higgs_scale": float},
    },
    "flow": {
        "required": {
            "n": int,
            "resolution": int,
            "periods": "floats",
            "rank": int,
            "seed": int,
            "band": int,
            "target": str,
            "steps": int,
            "step_size": float,
            "tol": float,
        },
        "optional": {"amplitude": float, "higgs_scale": float},
    },
    "reduce2d": {
        "required": {
            "resolution": int,
            "periods": "floats",
            "seed": int,
            "band": int,
            "amplitude": float,
            "tol_equiv": float,
            "tol_sdym": float,
        },
        "optional": {},
    },
    "example": {
        "required": {"kind": str, "n": int, "resolution": int, "periods": "floats"},
        "optional": {"ranks": "ints", "seed": int},
    },
}


def typed_config(raw: dict[str, str], scenario: str) -> dict:
    schema = SCHEMAS[scenario]
    known = {**schema["required"], **schema["optional"]}
    for key in raw:
        if key not in known:
            raise ConfigError(f"unknown key {key!r} for scenario {scenario}")
    missing = [k for k in schema["required"] if k not in raw]
    if missing:
        raise ConfigError(f"missing required keys for {scenario}: {', '.join(missing)}")
    out = {}
    for key, val in raw.items():
        kind = known[key]
        try:
            if kind == "floats":
                out[key] = tuple(float(x) for x in val.split(","))
            elif kind == "ints":
                out[key] = tuple(int(x) for x in val.split(","))
            else:
                out[key] = kind(val)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {val!r} ({exc})")
    return out


def build_chart(cfg: dict) -> LatticeChart:
    n = cfg["n"]
    periods = cfg["periods"]
    if len(periods) != 2 * n:
        raise ConfigError(f"periods needs {2 * n} entries for n={n}, got {len(periods)}")
    try:
        return LatticeChart(n, (cfg["resolution"],) * n, periods)
    except ValueError as exc:
        raise ConfigError(str(exc))


def run_verify(cfg: dict, out_dir: str) -> int:
    from .multiindex import all_indices, verify_sign_identities
    from .forms import hodge_star, inner_global, monomial, star_sign_diagnostic
    from .endforms import commutator, hermitian_conjugate, trace_form, trace_inner_global
    from .higgs import HiggsInstance, mean_curvature
    from .functionals import sw_functional
    from .sampling import constant_higgs_field, random_metric, random_scalar_form

    chart = build_chart(cfg)
    n, r, seed, band = cfg["n"], cfg["rank"], cfg["seed"], cfg["band"]
    amp = cfg.get("amplitude", 0.3)
    checks = []

    def record(name, value, tol):
        checks.append({"name": name, "value": float(value), "tolerance": float(tol), "passed": bool(value <= tol)})

    for k in range(1, n + 1):
        rep = verify_sign_identities(k)
        record(f"sign_identities_n{k}", 0.0 if rep["passed"] else 1.0, 0.5)

    worst = 0.0
    for A in all_indices(n):
        for B in all_indices(n):
            m = monomial(chart, A.entries, B.entries, 1.0)
            ss = hodge_star(hodge_star(m))
            expect = float((-1) ** (len(A) + len(B)))
            gap = np.max(np.abs(ss.coefficient(A, B) - expect))
            others = sum(
                np.max(np.abs(g)) for k2, g in ss.coeffs.items() if k2 != (A, B)
            )
            worst = max(worst, float(gap + others))
    record("star_involution_basis", worst, 1e-14)

    rng = np.random.default_rng(seed)
    gap = 0.0
    for _ in range(10):
        p = int(rng.integers(0, n + 1))
        q = int(rng.integers(0, n + 1))
        phi = random_scalar_form(chart, p, q, int(rng.integers(2**31)), band)
        psi = random_scalar_form(chart, p, q, int(rng.integers(2**31)), band)
        v = inner_global(phi, psi)  # raises on route disagreement
        s = inner_global(phi, phi)
        gap = max(gap, abs(s.imag), 0.0 if s.real >= 0 else -s.real)
    record("scalar_inner_routes_positivity", gap, cfg["tol_route"] * 100)

    h = random_metric(chart, r, seed + 1, amp, band)
    gap = 0.0
    herm = 0.0
    for _ in range(5):
        from .sampling import random_end_form

        p = int(rng.integers(0, n + 1))
        q = int(rng.integers(0, n + 1))
        phi = random_end_form(chart, r, p, q, int(rng.integers(2**31)), band)
        psi = random_end_form(chart, r, p, q, int(rng.integers(2**31)), band)
        a = trace_inner_global(phi, psi, h)
        b = trace_inner_global(psi, phi, h)
        herm = max(herm, abs(a - np.conj(b)))
        s = trace_inner_global(phi, phi, h)
        gap = max(gap, abs(s.imag), 0.0 if s.real >= 0 else -s.real)
    record("end_inner_routes_positivity", gap, cfg["tol_route"] * 1e4)
    record("end_inner_hermiticity", herm, cfg["tol_route"] * 1e4)

    higgs = constant_higgs_field(chart, r, seed + 2, cfg.get("higgs_scale", 0.7))
    C = commutator(higgs, hermitian_conjugate(higgs, h))
    trc = trace_form(C)
    tr_gap = max((float(np.max(np.abs(g))) for g in trc.coeffs.values()), default=0.0)
    record("trace_commutator_pointwise", tr_gap, cfg["tol_pointwise"])

    inst = HiggsInstance(chart, r, h, higgs)
    mean_curvature(inst)  # raises on route disagreement
    record("mean_curvature_routes", 0.0, cfg["tol_route"])

    sw = sw_functional(inst)
    record("ymh_decomposition", sw.identity_residuals["full_vs_H_plus_dphibar"], cfg["tol_route"] * (1.0 + sw.values["norm_full_sq"]))

    diag = star_sign_diagnostic(n)
    report = {
        "scenario": "verify",
        "version": __version__,
        "config": {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()},
        "checks": checks,
        "star_sign_diagnostic": diag,
        "passed": all(c["passed"] for c in checks),
    }
    dump_json(report, os.path.join(out_dir, "verify_report.json"))
    return 0 if report["passed"] else 1


def run_flow(cfg: dict, out_dir: str) -> int:
    from .endforms import MetricField
    from .higgs import HiggsInstance
    from .functionals import flow_minimize, kobayashi, sw_functional
    from .plots import flow_trace_figure
    from .sampling import constant_higgs_field, expm_hermitian, random_hermitian_field

    chart = build_chart(cfg)
    r, seed, band = cfg["rank"], cfg["seed"], cfg["band"]
    amp = cfg.get("amplitude", 0.4)
    target = cfg["target"]
    if target not in ("H", "J"):
        raise ConfigError(f"target must be H or J, got {target!r}")

    h0 = MetricField(chart, r, expm_hermitian(random_hermitian_field(chart, r, seed, amp, band)))
    phi = constant_higgs_field(chart, r, seed + 1, cfg.get("higgs_scale", 0.0))
    inst = HiggsInstance(chart, r, h0, phi)
    final, rep = flow_minimize(
        inst, target, steps=cfg["steps"], step_size=cfg["step_size"], seed=seed, band=band, tol=cfg["tol"]
    )

    csv_path = os.path.join(out_dir, "flow_trace.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["iteration", "value", "step_size", "res_dphi", "res_curvature"])
        writer.writeheader()
        writer.writerows(rep.trace)
    flow_trace_figure(rep.trace, os.path.join(out_dir, "flow_trace.png"), target)

    # minimum check: the final value beats sampled perturbations of h
    evaluate = (lambda i: sw_functional(i).values["H"]) if target == "H" else (lambda i: kobayashi(i).values["J"])
    final_value = rep.values["final"]
    perturbation_ok = True
    for k in range(5):
        bump = expm_hermitian(random_hermitian_field(chart, r, seed + 100 + k, 0.05, band))
        half = expm_hermitian(0.5 * random_hermitian_field(chart, r, seed + 100 + k, 0.05, band))
        hmat = np.matmul(half, np.matmul(final.h.matrix, half))
        hmat = 0.5 * (hmat + np.conj(np.swapaxes(hmat, -1, -2)))
        cand = HiggsInstance(chart, r, MetricField(chart, r, hmat), phi, inst.synthetic_curvature)
        if evaluate(cand) < final_value - 1e-10:
            perturbation_ok = False
    values = [row["value"] for row in rep.trace]
    summary = {
        "scenario": "flow",
        "version": __version__,
        "config": {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()},
        "status": rep.status,
        "initial": rep.values["initial"],
        "final": final_value,
        "accepted_steps": rep.values.get("accepted_steps", 0.0),
        "monotone": all(b <= a + 1e-14 for a, b in zip(values, values[1:])),
        "minimum_check": bool(perturbation_ok and final_value <= rep.values["initial"] + 1e-14),
        "final_residuals": {
            "res_dphi": rep.trace[-1]["res_dphi"],
            "res_curvature": rep.trace[-1]["res_curvature"],
        },
    }
    dump_json(summary, os.path.join(out_dir, "flow_summary.json"))
    return 0


def run_reduce2d(cfg: dict, out_dir: str) -> int:
    from .functionals import residual_2k
    from .hitchin2d import (
        SU2Config,
        det_holomorphy,
        hitchin_residual,
        random_config,
        sdym_residual,
        to_higgs_instance,
    )
    from .lattice import random_field
    from .plots import reduce2d_residual_figure

    periods = cfg["periods"]
    if len(periods) != 2:
        raise ConfigError(f"reduce2d needs 2 periods, got {len(periods)}")
    try:
        chart = LatticeChart(1, (cfg["resolution"],), periods)
    except ValueError as exc:
        raise ConfigError(str(exc))
    seed, band, amp = cfg["seed"], cfg["band"], cfg["amplitude"]
    tol_eq, tol_sd = cfg["tol_equiv"], cfg["tol_sdym"]

    config = random_config(chart, seed, band, amp)
    sd = sdym_residual(config)
    res = {form: hitchin_residual(config, form) for form in ("real", "complex", "forms", "kw")}
    r, c, f, kw = res["real"], res["complex"], res["forms"], res["kw"]
    equiv_gaps = {
        "complex_vs_real_curvature": abs(c[0] - 0.5 * r[0]),
        "complex_vs_real_derivative": abs(c[1] - r[1]),
        "forms_vs_complex_curvature": abs(f[0] - c[0]),
        "forms_vs_complex_derivative": abs(f[1] - 0.5 * c[1]),
        "kw_vs_real_curvature": abs(kw[0] - r[0]),
        "kw_norm_split": abs(kw[1] ** 2 + kw[2] ** 2 - r[1] ** 2) / (1.0 + r[1] ** 2),
    }
    dh = det_holomorphy(config)

    # bridge check on a holomorphic config: constant higgs pair, aligned gauge
    sig3 = 1j * np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    a1 = random_field(chart, seed + 50, band).data.real * (amp / (2 * band + 1.0))
    a2 = random_field(chart, seed + 51, band).data.real * (amp / (2 * band + 1.0))
    shape = chart.shape + (2, 2)
    bridge_cfg = SU2Config(
        chart,
        a1[..., None, None] * sig3,
        a2[..., None, None] * sig3,
        np.broadcast_to(0.7 * sig3, shape).copy(),
        np.broadcast_to(-0.4 * sig3, shape).copy(),
    )
    bridged = to_higgs_instance(bridge_cfg)
    forms_res = hitchin_residual(bridge_cfg, "forms")
    r2k = residual_2k(bridged, "unit").values
    bridge_gaps = {
        "curvature": abs(r2k["res_curvature"] - forms_res[0]),
        "derivative": abs(r2k["res_dphi"] - forms_res[1]),
    }

    passed = (
        sd["path_gap"] <= tol_sd
        and all(v <= tol_eq for v in equiv_gaps.values())
        and all(v <= 1e-10 for v in bridge_gaps.values())
    )
    report = {
        "scenario": "reduce2d",
        "version": __version__,
        "config": {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()},
        "residuals": {form: list(v) for form, v in res.items()},
        "sdym": {"path_gap": sd["path_gap"], "sdym": list(sd["sdym"]), "reduced": list(sd["reduced"])},
        "equivalence_gaps": equiv_gaps,
        "det_holomorphy": dh,
        "bridge_gaps": bridge_gaps,
        "passed": bool(passed),
    }
    dump_json(report, os.path.join(out_dir, "reduce2d_report.json"))
    reduce2d_residual_figure(res, os.path.join(out_dir, "reduce2d_residuals.png"))
    return 0 if passed else 1


def run_example(cfg: dict, out_dir: str) -> int:
    from .higgs import build_example, check_higgs
    from .sampling import random_matrix

    chart = build_chart(cfg)
    kind = cfg["kind"]
    if kind == "contraction":
        inst = build_example("contraction", chart)
    elif kind == "hodge_system":
        ranks = cfg.get("ranks", (1, 1))
        if len(ranks) != 2:
            raise ConfigError("cli hodge_system examples use exactly two blocks")
        seed = cfg.get("seed", 0)
        m = random_matrix(max(ranks), seed, 1.0)[: ranks[0], : ranks[1]]
        inst = build_example("hodge_system", chart, ranks=list(ranks), maps=[m])
    else:
        raise ConfigError(f"unknown example kind {kind!r}")
    rep = check_higgs(inst.phi)
    report = {
        "scenario": "example",
        "version": __version__,
        "config": {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()},
        "rank": inst.r,
        "holomorphy_norm": rep["holomorphy_norm"],
        "commutator_norms": {f"{a},{b}": v for (a, b), v in rep["commutator_norms"].items()},
        "passed": rep["passed"],
    }
    dump_json(report, os.path.join(out_dir, "example_report.json"))
    print(
        f"{kind}: rank {inst.r}, holomorphy {rep['holomorphy_norm']:.3e}, "
        f"wedge condition {'ok' if rep['passed'] else 'violated'}"
    )
    return 0 if rep["passed"] else 1


RUNNERS = {"verify": run_verify, "flow": run_flow, "reduce2d": run_reduce2d, "example": run_example}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="higgstorus",
        description="Numerical workbench for Hodge calculus and Higgs-bundle curvature on flat tori.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a key = value config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=".", help="output directory for reports and figures")
    args = parser.parse_args(argv)
    try:
        raw = parse_config(args.config)
        cfg = typed_config(raw, args.command)
        if args.seed is not None:
            if "seed" not in SCHEMAS[args.command]["required"] and "seed" not in SCHEMAS[args.command]["optional"]:
                raise ConfigError(f"scenario {args.command} takes no seed")
            cfg["seed"] = args.seed
        os.makedirs(args.out, exist_ok=True)
        return RUNNERS[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
