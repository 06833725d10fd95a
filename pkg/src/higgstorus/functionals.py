"""Curvature functionals, the identities relating them, and a descent flow.

Conventions: every global norm is the trace inner product in the
instance's metric; the (2,0) covariant-derivative term is measured in the
form norm (antisymmetrized components), which is what makes the full
curvature norm split exactly as the sum of its three graded pieces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .endforms import (
    EndForm,
    MetricField,
    _mat_h,
    trace_inner_global,
    trace_inner_local,
    zero_end,
)
from .higgs import (
    HiggsInstance,
    RouteDisagreementError,
    chern_degree,
    einstein_constant,
    hs_curvature,
    mean_curvature,
)
from .forms import integrate_top, omega_power, wedge
from .endforms import trace_form, wedge_end
from .lattice import LatticeChart, ScalarField, integrate
from .multiindex import MultiIndex
from .sampling import expm_hermitian

KAPPA = {"quarter": 0.25, "unit": 1.0}


@dataclass
class FunctionalReport:
    """Named scalar outputs of a functional evaluation."""

    values: dict[str, float] = field(default_factory=dict)
    identity_residuals: dict[str, float] = field(default_factory=dict)
    trace: list[dict] = field(default_factory=list)
    status: str = "ok"

    def as_dict(self) -> dict:
        return {
            "values": self.values,
            "identity_residuals": self.identity_residuals,
            "trace": self.trace,
            "status": self.status,
        }


def _sq(x: complex) -> float:
    return float(x.real)


def graded_norms(inst: HiggsInstance) -> dict[str, float]:
    """Squared norms of the three graded curvature pieces and their sum."""
    pieces = hs_curvature(inst)
    n20 = _sq(trace_inner_global(pieces[(2, 0)], pieces[(2, 0)], inst.h))
    n11 = _sq(trace_inner_global(pieces[(1, 1)], pieces[(1, 1)], inst.h))
    n02 = _sq(trace_inner_global(pieces[(0, 2)], pieces[(0, 2)], inst.h))
    return {
        "norm_dphi_sq": n20,
        "norm_f11_sq": n11,
        "norm_dphibar_sq": n02,
        "norm_full_sq": n20 + n11 + n02,
    }


def ymh_full(inst: HiggsInstance) -> FunctionalReport:
    """Full Yang-Mills-Higgs value with its three-piece decomposition."""
    return FunctionalReport(values=graded_norms(inst))


def mean_curvature_norm_sq(inst: HiggsInstance) -> float:
    K = mean_curvature(inst)
    return _sq(trace_inner_global(K, K, inst.h))


def kobayashi(inst: HiggsInstance) -> FunctionalReport:
    """Kobayashi functional, its topological lower bound, and the gap."""
    n = inst.chart.n
    J = 0.5 * math.factorial(n) * mean_curvature_norm_sq(inst)
    deg = chern_degree(inst)["degree"]
    bound = 2.0 * n * (np.pi * deg) ** 2 / (inst.r * math.factorial(n - 1) * inst.chart.volume)
    return FunctionalReport(values={"J": J, "bound": bound, "gap": J - bound})


def sw_functional(inst: HiggsInstance) -> FunctionalReport:
    """The curvature-constraint functional and its relation to the full one."""
    norms = graded_norms(inst)
    value = norms["norm_dphi_sq"] + norms["norm_f11_sq"]
    relation = abs(norms["norm_full_sq"] - value - norms["norm_dphibar_sq"])
    return FunctionalReport(
        values={"H": value, **norms},
        identity_residuals={"full_vs_H_plus_dphibar": relation},
    )


def residual_2k(inst: HiggsInstance, scale: str = "unit") -> FunctionalReport:
    """Residual norms of the reduced system at commutator weight kappa.

    kappa = 1/4 matches the unreduced four-equation transcription, kappa = 1
    the reduced two-equation form; the third and fourth unreduced equations
    hold by construction for a valid instance and their norms are reported.
    """
    if scale not in KAPPA:
        raise ValueError(f"scale must be one of {sorted(KAPPA)}, got {scale}")
    kappa = KAPPA[scale]
    from .endforms import commutator, d_anti_end, hermitian_conjugate
    from .higgs import chern_connection_curvature, curvature_of

    pieces = hs_curvature(inst)
    res1 = math.sqrt(max(_sq(trace_inner_global(pieces[(2, 0)], pieces[(2, 0)], inst.h)), 0.0))
    F = curvature_of(inst)
    C = commutator(inst.phi, hermitian_conjugate(inst.phi, inst.h))
    G = F + kappa * C
    res2 = math.sqrt(max(_sq(trace_inner_global(G, G, inst.h)), 0.0))
    dphi = d_anti_end(inst.phi)
    from .endforms import end_norm, identity_metric

    holo = end_norm(dphi, identity_metric(inst.chart, inst.r))
    return FunctionalReport(
        values={
            "res_dphi": res1,
            "res_curvature": res2,
            "kappa": kappa,
            "holomorphy_norm": holo,
            "f02_norm": 0.0,
        }
    )


def identity_residuals(inst: HiggsInstance) -> FunctionalReport:
    """Normalized residuals of the two curvature-vs-mean-curvature identities.

    Needs n >= 2: both right-hand sides integrate against omega^(n-2).
    """
    chart = inst.chart
    n = chart.n
    if n < 2:
        raise ValueError("identities require complex dimension >= 2")
    from .endforms import commutator, hermitian_conjugate
    from .higgs import curvature_of

    norms = graded_norms(inst)
    Ksq = mean_curvature_norm_sq(inst)
    top = chern_degree(inst)["topological_term"]
    F = curvature_of(inst)
    C = commutator(inst.phi, hermitian_conjugate(inst.phi, inst.h))
    w = omega_power(chart, n - 2) * float(math.factorial(n - 2))
    cross = 2.0 * integrate_top(wedge(trace_form(wedge_end(F, C)), w)).real

    lhs1 = norms["norm_f11_sq"] - Ksq
    rhs1 = top + cross
    lhs2 = norms["norm_full_sq"] - Ksq
    rhs2 = norms["norm_dphi_sq"] + norms["norm_dphibar_sq"] + cross + top
    return FunctionalReport(
        values={
            "lhs_curvature_identity": lhs1,
            "rhs_curvature_identity": rhs1,
            "lhs_full_identity": lhs2,
            "rhs_full_identity": rhs2,
            "topological_term": top,
            "cross_term": cross,
        },
        identity_residuals={
            "curvature_identity": abs(lhs1 - rhs1) / (1.0 + abs(lhs1)),
            "full_identity": abs(lhs2 - rhs2) / (1.0 + abs(lhs2)),
        },
    )


def lagrangian_density(inst: HiggsInstance) -> ScalarField:
    """Pointwise Lagrangian whose volume integral is the functional value.

    Transcribed term by term: covariant-derivative bilinear, minus the
    F.Fbar contraction, minus the commutator-square and cross terms, with
    raised-index conjugates realized through the metric adjoint.
    """
    from .endforms import commutator, hermitian_conjugate
    from .higgs import curvature_of

    chart, h = inst.chart, inst.h
    pieces = hs_curvature(inst)
    dens = trace_inner_local(pieces[(2, 0)], pieces[(2, 0)], h).data.copy()

    F = curvature_of(inst)
    C = commutator(inst.phi, hermitian_conjugate(inst.phi, h))
    n = chart.n
    for alpha in range(1, n + 1):
        a = MultiIndex((alpha,), n)
        for beta in range(1, n + 1):
            b = MultiIndex((beta,), n)
            Fab = F.coefficient(a, b)
            Cab = C.coefficient(a, b)
            # raised-index hermitian conjugates carry a minus sign each
            Fbar_up = -h.adjoint(Fab)
            Cbar_up = -h.adjoint(Cab)
            tr = lambda m: np.trace(m, axis1=-2, axis2=-1)
            dens = dens - tr(np.matmul(Fab, Fbar_up))
            dens = dens - tr(np.matmul(Cab, Cbar_up))
            dens = dens - 2.0 * np.real(tr(np.matmul(Cab, Fbar_up)))
    out = ScalarField(chart, dens)
    total = integrate(out).real
    H = sw_functional(inst).values["H"]
    if abs(total - H) > 1e-8 * (1.0 + abs(H)):
        raise RouteDisagreementError(
            f"Lagrangian integral {total} does not match functional value {H}"
        )
    return out


def _mode_functions(chart: LatticeChart, band: int) -> list[np.ndarray]:
    """Real cos/sin fields for every lattice mode with |k| <= band per axis."""
    axes = len(chart.shape)
    coords = [chart.coordinate(d) / chart.periods[d] for d in range(axes)]
    out = [np.ones(chart.shape)]
    seen = set()
    for k in product(range(-band, band + 1), repeat=axes):
        if all(x == 0 for x in k):
            continue
        neg = tuple(-x for x in k)
        if neg in seen:
            continue
        seen.add(k)
        phase = 2.0 * np.pi * sum(ki * ci for ki, ci in zip(k, coords))
        out.append(np.cos(phase))
        out.append(np.sin(phase))
    return out


def _hermitian_basis(r: int) -> list[np.ndarray]:
    out = []
    for i in range(r):
        m = np.zeros((r, r), dtype=complex)
        m[i, i] = 1.0
        out.append(m)
    for i in range(r):
        for j in range(i + 1, r):
            m = np.zeros((r, r), dtype=complex)
            m[i, j] = m[j, i] = 1.0
            out.append(m)
            m2 = np.zeros((r, r), dtype=complex)
            m2[i, j] = 1j
            m2[j, i] = -1j
            out.append(m2)
    return out


def flow_minimize(
    inst: HiggsInstance,
    target: str = "H",
    steps: int = 200,
    step_size: float = 0.1,
    seed: int = 0,
    band: int = 1,
    tol: float = 1e-14,
) -> tuple[HiggsInstance, FunctionalReport]:
    """Monotone descent over hermitian metrics at fixed Higgs field.

    The metric moves as h = exp(s/2) h0 exp(s/2) with s restricted to a
    band-limited hermitian basis; directions come from central finite
    differences and steps pass an Armijo backtracking test, so the value
    never increases on an accepted step.
    """
    if target not in ("H", "J"):
        raise ValueError(f"target must be 'H' or 'J', got {target}")
    chart, r = inst.chart, inst.r
    modes = _mode_functions(chart, band)
    mats = _hermitian_basis(r)
    basis = [(m, M) for m in modes for M in mats]
    dim = len(basis)
    h0 = inst.h.matrix

    def build(tvec: np.ndarray) -> HiggsInstance:
        S = np.zeros(chart.shape + (r, r), dtype=complex)
        for t, (m, M) in zip(tvec, basis):
            if t != 0.0:
                S = S + t * m[..., None, None] * M
        half = expm_hermitian(0.5 * S)
        hmat = np.matmul(half, np.matmul(h0, half))
        hmat = 0.5 * (hmat + _mat_h(hmat))
        return HiggsInstance(chart, r, MetricField(chart, r, hmat), inst.phi, inst.synthetic_curvature)

    def energy(tvec: np.ndarray) -> float:
        cand = build(tvec)
        if target == "H":
            return sw_functional(cand).values["H"]
        return kobayashi(cand).values["J"]

    def trace_row(k: int, value: float, size: float, cand: HiggsInstance) -> dict:
        res = residual_2k(cand, "unit").values
        return {
            "iteration": k,
            "value": value,
            "step_size": size,
            "res_dphi": res["res_dphi"],
            "res_curvature": res["res_curvature"],
        }

    t = np.zeros(dim)
    current = energy(t)
    report = FunctionalReport(values={"initial": current}, trace=[trace_row(0, current, 0.0, inst)])
    final = inst
    if current <= tol:
        report.status = "at_minimum"
        report.values["final"] = current
        return final, report

    eps = 1e-5
    size = step_size
    accepted = 0
    while accepted < steps:
        grad = np.zeros(dim)
        for i in range(dim):
            dt = np.zeros(dim)
            dt[i] = eps
            grad[i] = (energy(t + dt) - energy(t - dt)) / (2.0 * eps)
        gsq = float(np.dot(grad, grad))
        if gsq == 0.0:
            report.status = "stalled"
            break
        moved = False
        trial = size
        for _ in range(40):
            cand_t = t - trial * grad
            val = energy(cand_t)
            if val <= current - 1e-4 * trial * gsq:
                t = cand_t
                current = val
                accepted += 1
                size = min(trial * 1.5, 10.0 * step_size)
                cand = build(t)
                final = cand
                report.trace.append(trace_row(accepted, current, trial, cand))
                moved = True
                break
            trial *= 0.5
        if not moved:
            report.status = "stalled"
            break
        if current <= tol:
            report.status = "converged"
            break
    report.values["final"] = current
    report.values["accepted_steps"] = float(accepted)
    return final, report
