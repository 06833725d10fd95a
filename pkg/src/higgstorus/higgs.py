"""Higgs-bundle instances and their curvature apparatus.

A HiggsInstance couples a hermitian metric with a holomorphic (1,0)
endomorphism field whose wedge square vanishes.  The connection is the
metric one in a global holomorphic frame, A = h^-1 d'h, and the combined
curvature splits into pure bidegree pieces (2,0), (1,1), (0,2); the mean
curvature is the Kahler contraction of the (1,1) piece, computed by two
routes that must agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .endforms import (
    EndForm,
    MetricField,
    _mat_h,
    commutator,
    d_anti_end,
    end_norm,
    hermitian_conjugate,
    identity_metric,
    trace_form,
    wedge_end,
    zero_end,
)
from .forms import ScalarForm, integrate_top, omega_power, wedge, zero_form
from .lattice import LatticeChart, ScalarField, deriv_real, integrate
from .multiindex import MultiIndex, all_indices, merge_sign

HOLOMORPHY_TOL = 1e-8
WEDGE_TOL = 1e-10
ROUTE_TOL = 1e-10


class RouteDisagreementError(RuntimeError):
    pass


def _mat_d_holo(grid: np.ndarray, chart: LatticeChart, alpha: int) -> np.ndarray:
    ax, ay = chart.real_axes(alpha)
    return 0.5 * (deriv_real(grid, chart, ax) - 1j * deriv_real(grid, chart, ay))


def _mat_d_anti(grid: np.ndarray, chart: LatticeChart, alpha: int) -> np.ndarray:
    ax, ay = chart.real_axes(alpha)
    return 0.5 * (deriv_real(grid, chart, ax) + 1j * deriv_real(grid, chart, ay))


def check_higgs(phi: EndForm, tol_holo: float = HOLOMORPHY_TOL, tol_wedge: float = WEDGE_TOL) -> dict:
    """Report holomorphy and wedge-condition norms of a (1,0) field."""
    if (phi.p, phi.q) != (1, 0):
        raise ValueError(f"Higgs field must be a (1,0) form, got ({phi.p},{phi.q})")
    chart, r = phi.chart, phi.r
    eye = identity_metric(chart, r)
    dphi = d_anti_end(phi)
    holo = end_norm(dphi, eye)
    none_key = MultiIndex((), chart.n)
    comms = {}
    for a in range(1, chart.n + 1):
        Pa = phi.coefficient(MultiIndex((a,), chart.n), none_key)
        for b in range(a + 1, chart.n + 1):
            Pb = phi.coefficient(MultiIndex((b,), chart.n), none_key)
            comm = np.matmul(Pa, Pb) - np.matmul(Pb, Pa)
            comms[(a, b)] = float(
                np.sqrt(integrate(ScalarField(chart, np.sum(np.abs(comm) ** 2, axis=(-2, -1)))).real)
            )
    worst = max(comms.values(), default=0.0)
    return {
        "holomorphy_norm": holo,
        "commutator_norms": comms,
        "passed": holo <= tol_holo and worst <= tol_wedge,
    }


@dataclass
class HiggsInstance:
    """Validated bundle data: chart, rank, metric, Higgs field.

    ``synthetic_curvature`` optionally replaces the metric-derived (1,1)
    curvature, which lets degree-carrying configurations live on the
    topologically trivial torus bundle.
    """

    chart: LatticeChart
    r: int
    h: MetricField
    phi: EndForm
    synthetic_curvature: EndForm | None = None

    def __post_init__(self):
        if self.h.chart != self.chart or self.h.r != self.r:
            raise ValueError("metric does not match the instance chart/rank")
        if self.phi.chart != self.chart or self.phi.r != self.r:
            raise ValueError("Higgs field does not match the instance chart/rank")
        report = check_higgs(self.phi)
        if not report["passed"]:
            raise ValueError(f"invalid Higgs field: {report}")
        if self.synthetic_curvature is not None:
            sc = self.synthetic_curvature
            if sc.chart != self.chart or sc.r != self.r or (sc.p, sc.q) != (1, 1):
                raise ValueError("synthetic curvature must be a (1,1) form on the same bundle")


def flat_instance(chart: LatticeChart, r: int) -> HiggsInstance:
    return HiggsInstance(chart, r, identity_metric(chart, r), zero_end(chart, r, 1, 0))


def chern_connection_curvature(h: MetricField) -> tuple[EndForm, EndForm]:
    """Connection A_a = h^-1 d_a h and curvature F_ab = d_bbar A_a."""
    chart, r = h.chart, h.r
    n = chart.n
    A = zero_end(chart, r, 1, 0)
    F = zero_end(chart, r, 1, 1)
    empty = MultiIndex((), n)
    for alpha in range(1, n + 1):
        Aa = np.matmul(h.inverse, _mat_d_holo(h.matrix, chart, alpha))
        A.add_term(MultiIndex((alpha,), n), empty, Aa)
        for beta in range(1, n + 1):
            F.add_term(
                MultiIndex((alpha,), n),
                MultiIndex((beta,), n),
                _mat_d_anti(Aa, chart, beta),
            )
    return A, F


def curvature_of(inst: HiggsInstance) -> EndForm:
    """The (1,1) curvature in force: synthetic if set, else metric-derived."""
    if inst.synthetic_curvature is not None:
        return inst.synthetic_curvature
    return chern_connection_curvature(inst.h)[1]


def hs_curvature(inst: HiggsInstance) -> dict:
    """Graded curvature pieces keyed by bidegree.

    (2,0): d'phi + [A, phi]; (1,1): F + [phi, phibar_h]; (0,2): d''phibar_h.
    """
    A, F_metric = chern_connection_curvature(inst.h)
    F = inst.synthetic_curvature if inst.synthetic_curvature is not None else F_metric
    phibar = hermitian_conjugate(inst.phi, inst.h)
    piece20 = d_holo_end_form(inst.phi) + commutator(A, inst.phi)
    piece11 = F + commutator(inst.phi, phibar)
    piece02 = d_anti_end(phibar)
    return {(2, 0): piece20, (1, 1): piece11, (0, 2): piece02}


def d_holo_end_form(phi: EndForm) -> EndForm:
    from .endforms import d_holo_end

    return d_holo_end(phi)


def mean_curvature(inst: HiggsInstance) -> EndForm:
    """Kahler contraction of the (1,1) curvature piece, dual-route checked."""
    piece11 = hs_curvature(inst)[(1, 1)]
    return contract_11(piece11)


def contract_11(piece11: EndForm) -> EndForm:
    """Sum of diagonal components of a (1,1) EndForm, checked against
    the wedge route K omega^n = i n (piece ^ omega^(n-1))."""
    chart, r = piece11.chart, piece11.r
    n = chart.n
    K = np.zeros(chart.shape + (r, r), dtype=complex)
    for alpha in range(1, n + 1):
        a = MultiIndex((alpha,), n)
        K = K + piece11.coefficient(a, a)
    # dual route: coefficient of the top monomial in piece ^ omega^(n-1)
    w_end = _scalar_to_end(omega_power(chart, n - 1) * float(math.factorial(n - 1)), r)
    topw = wedge_end(piece11, w_end)
    full = MultiIndex(tuple(range(1, n + 1)), n)
    top_unit = (1j**n) * ((-1) ** (n * (n - 1) // 2)) * math.factorial(n)
    K2 = 1j * n * topw.coefficient(full, full) / top_unit
    scale = 1.0 + float(np.max(np.abs(K)))
    gap = float(np.max(np.abs(K - K2)))
    if gap > ROUTE_TOL * scale:
        raise RouteDisagreementError(f"mean-curvature routes disagree by {gap:.3e}")
    out = zero_end(chart, r, 0, 0)
    out.add_term(MultiIndex((), n), MultiIndex((), n), K)
    return out


def _scalar_to_end(form: ScalarForm, r: int) -> EndForm:
    out = zero_end(form.chart, r, form.p, form.q)
    eye = np.eye(r)
    for (A, B), grid in form.coeffs.items():
        out.add_term(A, B, grid[..., None, None] * eye)
    return out


def hat_mean_curvature(inst: HiggsInstance) -> np.ndarray:
    """Hermitian-form view of the mean curvature: h composed with K."""
    K = mean_curvature(inst)
    empty = MultiIndex((), inst.chart.n)
    return np.matmul(inst.h.matrix, K.coefficient(empty, empty))


def chern_degree(inst: HiggsInstance) -> dict:
    """First and second Chern forms, degree, and the n>=2 topological term."""
    chart = inst.chart
    n = chart.n
    F = curvature_of(inst)
    c1 = trace_form(F) * (1j / (2.0 * np.pi))
    w_power = omega_power(chart, n - 1) * float(math.factorial(n - 1))
    degree = integrate_top(wedge(c1, w_power)).real
    out = {"c1": c1, "degree": degree, "c2": None, "topological_term": None}
    if inst.r >= 1 and n >= 2:
        trFF = trace_form(wedge_end(F, F))
        trF_sq = wedge(trace_form(F), trace_form(F))
        c2 = (trFF - trF_sq) * (1.0 / (8.0 * np.pi**2))
        out["c2"] = c2
        combo = c2 * 2.0 - wedge(c1, c1)
        top = integrate_top(wedge(combo, omega_power(chart, n - 2) * float(math.factorial(n - 2)))).real
        out["topological_term"] = 4.0 * np.pi**2 * top
    return out


def einstein_constant(inst: HiggsInstance) -> float:
    """The constant c = 2 pi deg / (r (n-1)! vol), consistency-checked
    against the integral of the mean-curvature trace."""
    chart = inst.chart
    n = chart.n
    deg = chern_degree(inst)["degree"]
    c = 2.0 * np.pi * deg / (inst.r * math.factorial(n - 1) * chart.volume)
    K = mean_curvature(inst)
    empty = MultiIndex((), n)
    trK = integrate(ScalarField(chart, np.trace(K.coefficient(empty, empty), axis1=-2, axis2=-1)))
    expect = c * inst.r * chart.volume  # both sides divided by n!
    if abs(trK.real - expect) > 1e-8 * (1.0 + abs(expect)):
        raise RouteDisagreementError(
            f"degree/mean-curvature consistency fails: {trK.real} vs {expect}"
        )
    return float(c)


def hym_residual(inst: HiggsInstance) -> float:
    """Global norm of K - c I; zero exactly at a Hermite-Yang-Mills metric."""
    c = einstein_constant(inst)
    K = mean_curvature(inst)
    empty = MultiIndex((), inst.chart.n)
    dev = K.coefficient(empty, empty) - c * np.eye(inst.r)
    devform = zero_end(inst.chart, inst.r, 0, 0)
    devform.add_term(empty, empty, dev)
    return end_norm(devform, inst.h)


def central_curvature_instance(chart: LatticeChart, r: int, mu: float) -> HiggsInstance:
    """Synthetic instance with F = -i mu omega I, i.e. F_ab = mu delta_ab I.

    Satisfies the Hermite-Yang-Mills equation by construction and carries
    nonzero degree, exercising the degree-dependent formulas on the torus.
    """
    F = zero_end(chart, r, 1, 1)
    eye = np.broadcast_to(mu * np.eye(r), chart.shape + (r, r)).copy()
    for alpha in range(1, chart.n + 1):
        a = MultiIndex((alpha,), chart.n)
        F.add_term(a, a, eye)
    return HiggsInstance(chart, r, identity_metric(chart, r), zero_end(chart, r, 1, 0), F)


def build_example(kind: str, chart: LatticeChart, **params) -> HiggsInstance:
    """Constructors for the two stock Higgs-bundle families.

    hodge_system: ranks + constant block maps, each sending block p to
    block p-1, consecutive compositions required to vanish; the Higgs
    field is the assembled lower-shift matrix tensored with the first
    coframe element.

    contraction: the exterior-algebra bundle of rank 2^n with the field
    acting by wedging with the contraction of a constant odd-degree
    holomorphic form lam (default the first coframe element).
    """
    if kind == "hodge_system":
        return _hodge_system(chart, params["ranks"], params["maps"])
    if kind == "contraction":
        return _contraction(chart, params.get("lam"))
    raise ValueError(f"unknown example kind: {kind}")


def _hodge_system(chart: LatticeChart, ranks, maps) -> HiggsInstance:
    ranks = [int(x) for x in ranks]
    maps = [np.asarray(m, dtype=complex) for m in maps]
    if len(maps) != len(ranks) - 1:
        raise ValueError("need one block map per adjacent pair of blocks")
    for j, m in enumerate(maps):
        if m.shape != (ranks[j], ranks[j + 1]):
            raise ValueError(f"map {j} has shape {m.shape}, expected ({ranks[j]},{ranks[j+1]})")
    for j in range(1, len(maps)):
        comp = np.matmul(maps[j - 1], maps[j])
        if np.max(np.abs(comp)) > 1e-12:
            raise ValueError(f"chain condition violated at blocks {j-1},{j},{j+1}")
    r = sum(ranks)
    M = np.zeros((r, r), dtype=complex)
    offs = np.concatenate([[0], np.cumsum(ranks)])
    for j, m in enumerate(maps):
        M[offs[j]:offs[j + 1], offs[j + 1]:offs[j + 2]] = m
    phi = zero_end(chart, r, 1, 0)
    phi.add_term(
        MultiIndex((1,), chart.n),
        MultiIndex((), chart.n),
        np.broadcast_to(M, chart.shape + (r, r)).copy(),
    )
    return HiggsInstance(chart, r, identity_metric(chart, r), phi)


def _contraction(chart: LatticeChart, lam=None) -> HiggsInstance:
    n = chart.n
    if lam is None:
        lam = {(1,): 1.0}
    for key in lam:
        if len(key) % 2 == 0:
            raise ValueError(f"lam must have odd degree terms, got {key}")
    basis = list(all_indices(n))
    index_of = {A.entries: i for i, A in enumerate(basis)}
    r = len(basis)
    phi = zero_end(chart, r, 1, 0)
    for alpha in range(1, n + 1):
        # mu_alpha = contraction of lam with the alpha-th frame vector
        mu: dict[tuple, complex] = {}
        for C, cval in lam.items():
            if alpha not in C:
                continue
            pos = C.index(alpha)
            rest = tuple(x for x in C if x != alpha)
            mu[rest] = mu.get(rest, 0.0) + ((-1) ** pos) * complex(cval)
        M = np.zeros((r, r), dtype=complex)
        for E, mval in mu.items():
            for A in basis:
                s, merged = merge_sign(E, A.entries)
                if s == 0:
                    continue
                M[index_of[merged], index_of[A.entries]] += mval * s
        phi.add_term(
            MultiIndex((alpha,), n),
            MultiIndex((), n),
            np.broadcast_to(M, chart.shape + (r, r)).copy(),
        )
    return HiggsInstance(chart, r, identity_metric(chart, r), phi)
