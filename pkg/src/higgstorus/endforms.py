"""Endomorphism-valued (p,q)-forms and hermitian bundle metrics.

Coefficients are grids of r x r complex matrices.  The metric enters only
through the adjoint: with stored matrix field g, the pointwise adjoint of
an endomorphism M is g^-1 M^H g, which is exactly invariant under the
joint gauge action M -> U M U^H, g -> U g U^H for unitary U.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .forms import ScalarForm, bar_star_sign, zero_form
from .lattice import LatticeChart, ScalarField, deriv_real, integrate
from .multiindex import MultiIndex, merge_sign

Key = tuple[MultiIndex, MultiIndex]

ROUTE_TOL = 1e-10
HERMITICITY_TOL = 1e-13
POSDEF_TOL = 1e-12


class RouteDisagreementError(RuntimeError):
    pass


def _mat_h(m: np.ndarray) -> np.ndarray:
    """Pointwise conjugate transpose over the trailing matrix axes."""
    return np.conj(np.swapaxes(m, -1, -2))


@dataclass
class EndForm:
    """Endomorphism-valued (p,q)-form; grids carry trailing (r, r) axes."""

    chart: LatticeChart
    r: int
    p: int
    q: int
    coeffs: dict[Key, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        n = self.chart.n
        if self.r < 1:
            raise ValueError(f"rank must be >= 1, got {self.r}")
        if not (0 <= self.p <= n and 0 <= self.q <= n):
            raise ValueError(f"bidegree ({self.p},{self.q}) out of range for n={n}")
        want = self.chart.shape + (self.r, self.r)
        for (A, B), grid in list(self.coeffs.items()):
            if len(A) != self.p or len(B) != self.q or A.n != n or B.n != n:
                raise ValueError(f"key ({A.entries},{B.entries}) has wrong shape")
            arr = np.asarray(grid, dtype=complex)
            if arr.shape != want:
                raise ValueError(f"coefficient shape {arr.shape}, expected {want}")
            self.coeffs[(A, B)] = arr

    def coefficient(self, A: MultiIndex, B: MultiIndex) -> np.ndarray:
        got = self.coeffs.get((A, B))
        if got is None:
            return np.zeros(self.chart.shape + (self.r, self.r), dtype=complex)
        return got

    def add_term(self, A: MultiIndex, B: MultiIndex, grid: np.ndarray) -> None:
        key = (A, B)
        if key in self.coeffs:
            self.coeffs[key] = self.coeffs[key] + grid
        else:
            self.coeffs[key] = np.array(grid, dtype=complex)

    def __add__(self, other: "EndForm") -> "EndForm":
        _check_match(self, other)
        out = EndForm(self.chart, self.r, self.p, self.q, dict(self.coeffs))
        for k, v in other.coeffs.items():
            out.add_term(k[0], k[1], v)
        return out

    def __sub__(self, other: "EndForm") -> "EndForm":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "EndForm":
        return EndForm(
            self.chart,
            self.r,
            self.p,
            self.q,
            {k: v * scalar for k, v in self.coeffs.items()},
        )

    __rmul__ = __mul__

    def max_abs(self) -> float:
        """Largest entry magnitude across all coefficients."""
        return max((float(np.max(np.abs(v))) for v in self.coeffs.values()), default=0.0)


def _check_match(a: EndForm, b: EndForm) -> None:
    if a.chart != b.chart or a.r != b.r:
        raise ValueError("forms live on different bundles")
    if (a.p, a.q) != (b.p, b.q):
        raise ValueError(f"bidegree mismatch ({a.p},{a.q}) vs ({b.p},{b.q})")


def zero_end(chart: LatticeChart, r: int, p: int, q: int) -> EndForm:
    return EndForm(chart, r, p, q, {})


def end_monomial(chart: LatticeChart, r: int, A, B, matrix) -> EndForm:
    """matrix * theta^A ^ thetabar^B; matrix may be (r,r) or a full grid."""
    A = A if isinstance(A, MultiIndex) else MultiIndex(tuple(A), chart.n)
    B = B if isinstance(B, MultiIndex) else MultiIndex(tuple(B), chart.n)
    want = chart.shape + (r, r)
    grid = np.broadcast_to(np.asarray(matrix, dtype=complex), want).copy()
    return EndForm(chart, r, len(A), len(B), {(A, B): grid})


@dataclass(frozen=True)
class MetricField:
    """Hermitian positive-definite metric on the rank-r bundle.

    ``matrix`` has shape chart.shape + (r, r).  Validation checks
    hermiticity, positive-definiteness (smallest eigenvalue), and that the
    cached inverse multiplies back to the identity.
    """

    chart: LatticeChart
    r: int
    matrix: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.matrix, dtype=complex)
        want = self.chart.shape + (self.r, self.r)
        if arr.shape != want:
            raise ValueError(f"metric shape {arr.shape}, expected {want}")
        object.__setattr__(self, "matrix", arr)
        herm = float(np.max(np.abs(arr - _mat_h(arr))))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"metric not hermitian: deviation {herm:.3e}")
        eigs = np.linalg.eigvalsh(arr)
        if float(np.min(eigs)) <= POSDEF_TOL:
            raise ValueError(f"metric not positive definite: min eig {np.min(eigs):.3e}")
        inv = np.linalg.inv(arr)
        eye = np.broadcast_to(np.eye(self.r), want)
        resid = float(np.max(np.abs(np.matmul(inv, arr) - eye)))
        if resid > 1e-10:
            raise ValueError(f"metric inversion ill-conditioned: residual {resid:.3e}")
        object.__setattr__(self, "inverse", inv)

    def adjoint(self, m: np.ndarray) -> np.ndarray:
        """Pointwise metric adjoint g^-1 M^H g."""
        return np.matmul(self.inverse, np.matmul(_mat_h(m), self.matrix))


def identity_metric(chart: LatticeChart, r: int) -> MetricField:
    eye = np.broadcast_to(np.eye(r), chart.shape + (r, r)).copy()
    return MetricField(chart, r, eye)


def wedge_end(phi: EndForm, psi: EndForm) -> EndForm:
    """Wedge with matrix multiplication on coefficients."""
    if phi.chart != psi.chart or phi.r != psi.r:
        raise ValueError("forms live on different bundles")
    n = phi.chart.n
    p, q = phi.p + psi.p, phi.q + psi.q
    if p > n or q > n:
        return zero_end(phi.chart, phi.r, min(p, n), min(q, n))
    out = zero_end(phi.chart, phi.r, p, q)
    interchange = (-1) ** (phi.q * psi.p)
    for (A, B), fa in phi.coeffs.items():
        for (C, D), fb in psi.coeffs.items():
            sa, AC = merge_sign(A.entries, C.entries)
            if sa == 0:
                continue
            sb, BD = merge_sign(B.entries, D.entries)
            if sb == 0:
                continue
            sign = interchange * sa * sb
            out.add_term(MultiIndex(AC, n), MultiIndex(BD, n), sign * np.matmul(fa, fb))
    return out


def commutator(phi: EndForm, psi: EndForm) -> EndForm:
    """Graded commutator [phi, psi] = phi^psi - (-1)^(deg deg') psi^phi."""
    sign = (-1) ** ((phi.p + phi.q) * (psi.p + psi.q))
    return wedge_end(phi, psi) - float(sign) * wedge_end(psi, phi)


def hermitian_conjugate(psi: EndForm, h: MetricField) -> EndForm:
    """Metric adjoint form: bidegree (q,p), conjugate-transposed matrices.

    Component at (B, A) is (-1)^pq g^-1 psi_AB^H g; at the identity metric
    this reduces to the plain matrix conjugate transpose per monomial.
    """
    if psi.chart != h.chart or psi.r != h.r:
        raise ValueError("metric and form live on different bundles")
    sign = (-1) ** (psi.p * psi.q)
    out = zero_end(psi.chart, psi.r, psi.q, psi.p)
    for (A, B), grid in psi.coeffs.items():
        out.add_term(B, A, sign * h.adjoint(grid))
    return out


def star_end(phi: EndForm) -> EndForm:
    """Linear Hodge star acting on the form part only."""
    n = phi.chart.n
    out = zero_end(phi.chart, phi.r, n - phi.q, n - phi.p)
    for (A, B), grid in phi.coeffs.items():
        sign = ((-1) ** (len(A) * len(B))) * bar_star_sign(B, A)
        out.add_term(B.complement(), A.complement(), sign * grid)
    return out


def bar_star_h(psi: EndForm, h: MetricField) -> EndForm:
    """Metric duality operator: star of the hermitian conjugate."""
    return star_end(hermitian_conjugate(psi, h))


def trace_form(phi: EndForm) -> ScalarForm:
    """Pointwise matrix trace, yielding a scalar (p,q)-form."""
    out = zero_form(phi.chart, phi.p, phi.q)
    for (A, B), grid in phi.coeffs.items():
        out.add_term(A, B, np.trace(grid, axis1=-2, axis2=-1))
    return out


def trace_inner_local(phi: EndForm, psi: EndForm, h: MetricField) -> ScalarField:
    """Pointwise product sum_AB tr(phi_AB g^-1 psi_AB^H g)."""
    _check_match(phi, psi)
    acc = np.zeros(phi.chart.shape, dtype=complex)
    for key, grid in phi.coeffs.items():
        other = psi.coeffs.get(key)
        if other is not None:
            prod = np.matmul(grid, h.adjoint(other))
            acc = acc + np.trace(prod, axis1=-2, axis2=-1)
    return ScalarField(phi.chart, acc)


def trace_inner_global(phi: EndForm, psi: EndForm, h: MetricField) -> complex:
    """Global trace inner product, checked across both evaluation routes."""
    if phi.chart != psi.chart or phi.r != psi.r:
        raise ValueError("forms live on different bundles")
    if (phi.p, phi.q) != (psi.p, psi.q):
        return 0.0 + 0.0j
    from .forms import integrate_top, wedge

    n = phi.chart.n
    wedge_route = integrate_top(
        _as_scalar_top(wedge_end(phi, bar_star_h(psi, h)))
    )
    point_route = complex(integrate(trace_inner_local(phi, psi, h)))
    scale = 1.0 + abs(wedge_route)
    if abs(wedge_route - point_route) > ROUTE_TOL * scale:
        raise RouteDisagreementError(
            f"trace inner-product routes disagree: {wedge_route} vs {point_route}"
        )
    return point_route


def _as_scalar_top(phi: EndForm) -> ScalarForm:
    return trace_form(phi)


def end_norm(phi: EndForm, h: MetricField) -> float:
    """Global L2 norm in the metric h."""
    return float(np.sqrt(max(trace_inner_global(phi, phi, h).real, 0.0)))


def d_holo_end(phi: EndForm) -> EndForm:
    """Componentwise exterior holomorphic derivative d'."""
    n = phi.chart.n
    if phi.p >= n:
        return zero_end(phi.chart, phi.r, n, phi.q)
    out = zero_end(phi.chart, phi.r, phi.p + 1, phi.q)
    for (A, B), grid in phi.coeffs.items():
        for alpha in range(1, n + 1):
            s, merged = merge_sign((alpha,), A.entries)
            if s == 0:
                continue
            ax, ay = phi.chart.real_axes(alpha)
            dx = deriv_real(grid, phi.chart, ax)
            dy = deriv_real(grid, phi.chart, ay)
            out.add_term(MultiIndex(merged, n), B, s * 0.5 * (dx - 1j * dy))
    return out


def d_anti_end(phi: EndForm) -> EndForm:
    """Componentwise exterior anti-holomorphic derivative d''."""
    n = phi.chart.n
    if phi.q >= n:
        return zero_end(phi.chart, phi.r, phi.p, n)
    out = zero_end(phi.chart, phi.r, phi.p, phi.q + 1)
    front = (-1) ** phi.p
    for (A, B), grid in phi.coeffs.items():
        for beta in range(1, n + 1):
            s, merged = merge_sign((beta,), B.entries)
            if s == 0:
                continue
            ax, ay = phi.chart.real_axes(beta)
            dx = deriv_real(grid, phi.chart, ax)
            dy = deriv_real(grid, phi.chart, ay)
            out.add_term(A, MultiIndex(merged, n), front * s * 0.5 * (dx + 1j * dy))
    return out
