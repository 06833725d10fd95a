"""Scalar (p,q)-form algebra on a flat torus chart.

Forms are sparse maps from ordered basis monomials theta^A wedge
thetabar^B to complex coefficient grids.  The duality operator bar_star
is defined constructively: its basis sign is the unique one making

    (theta^A ^ thetabar^B) ^ bar_star(theta^A ^ thetabar^B) = omega^n / n!

hold exactly, which forces positivity of the induced inner product.  The
printed closed-form exponent is kept as a diagnostic only (it disagrees
with the normalization at odd n; see star_sign_diagnostic).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import LatticeChart, ScalarField, d_anti, d_holo, integrate
from .multiindex import MultiIndex, epsilon, merge_sign

Key = tuple[MultiIndex, MultiIndex]

#: relative tolerance for the wedge-integral vs pointwise-quadrature routes
ROUTE_TOL = 1e-10


class RouteDisagreementError(RuntimeError):
    """The two evaluation routes of an inner product disagreed.

    Signals a sign-convention bug rather than a user error.
    """


@dataclass
class ScalarForm:
    """A (p,q)-form: complex coefficient grid per ordered basis monomial."""

    chart: LatticeChart
    p: int
    q: int
    coeffs: dict[Key, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        n = self.chart.n
        if not (0 <= self.p <= n and 0 <= self.q <= n):
            raise ValueError(f"bidegree ({self.p},{self.q}) out of range for n={n}")
        for (A, B), grid in list(self.coeffs.items()):
            if len(A) != self.p or len(B) != self.q or A.n != n or B.n != n:
                raise ValueError(f"key ({A.entries},{B.entries}) has wrong shape")
            arr = np.asarray(grid, dtype=complex)
            if arr.shape != self.chart.shape:
                raise ValueError("coefficient grid shape mismatch")
            self.coeffs[(A, B)] = arr

    def coefficient(self, A: MultiIndex, B: MultiIndex) -> np.ndarray:
        """Coefficient grid at a key; missing keys are zero."""
        got = self.coeffs.get((A, B))
        if got is None:
            return np.zeros(self.chart.shape, dtype=complex)
        return got

    def add_term(self, A: MultiIndex, B: MultiIndex, grid: np.ndarray) -> None:
        key = (A, B)
        if key in self.coeffs:
            self.coeffs[key] = self.coeffs[key] + grid
        else:
            self.coeffs[key] = np.array(grid, dtype=complex)

    def prune(self, tol: float = 0.0) -> "ScalarForm":
        kept = {
            k: v for k, v in self.coeffs.items() if np.max(np.abs(v)) > tol
        }
        return ScalarForm(self.chart, self.p, self.q, kept)

    def __add__(self, other: "ScalarForm") -> "ScalarForm":
        _check_match(self, other)
        out = ScalarForm(self.chart, self.p, self.q, dict(self.coeffs))
        for k, v in other.coeffs.items():
            out.add_term(k[0], k[1], v)
        return out

    def __sub__(self, other: "ScalarForm") -> "ScalarForm":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "ScalarForm":
        return ScalarForm(
            self.chart, self.p, self.q, {k: v * scalar for k, v in self.coeffs.items()}
        )

    __rmul__ = __mul__


def _check_match(a: ScalarForm, b: ScalarForm) -> None:
    if a.chart != b.chart:
        raise ValueError("forms live on different charts")
    if (a.p, a.q) != (b.p, b.q):
        raise ValueError(f"bidegree mismatch ({a.p},{a.q}) vs ({b.p},{b.q})")


def zero_form(chart: LatticeChart, p: int, q: int) -> ScalarForm:
    return ScalarForm(chart, p, q, {})


def monomial(chart: LatticeChart, A, B, value=1.0) -> ScalarForm:
    """The form value * theta^A ^ thetabar^B; value may be a grid."""
    A = A if isinstance(A, MultiIndex) else MultiIndex(tuple(A), chart.n)
    B = B if isinstance(B, MultiIndex) else MultiIndex(tuple(B), chart.n)
    grid = np.broadcast_to(np.asarray(value, dtype=complex), chart.shape).copy()
    return ScalarForm(chart, len(A), len(B), {(A, B): grid})


def wedge(phi: ScalarForm, psi: ScalarForm) -> ScalarForm:
    """Bilinear associative wedge with graded basis-monomial signs."""
    if phi.chart != psi.chart:
        raise ValueError("forms live on different charts")
    n = phi.chart.n
    p, q = phi.p + psi.p, phi.q + psi.q
    if p > n or q > n:
        return zero_form(phi.chart, min(p, n), min(q, n))
    out = zero_form(phi.chart, p, q)
    interchange = (-1) ** (phi.q * psi.p)  # thetabar^B past theta^C
    for (A, B), fa in phi.coeffs.items():
        for (C, D), fb in psi.coeffs.items():
            sa, AC = merge_sign(A.entries, C.entries)
            if sa == 0:
                continue
            sb, BD = merge_sign(B.entries, D.entries)
            if sb == 0:
                continue
            sign = interchange * sa * sb
            out.add_term(MultiIndex(AC, n), MultiIndex(BD, n), sign * (fa * fb))
    return out


def conjugate(psi: ScalarForm) -> ScalarForm:
    """Complex conjugate: (q,p)-form with the (-1)^pq component sign."""
    n = psi.chart.n
    sign = (-1) ** (psi.p * psi.q)
    out = zero_form(psi.chart, psi.q, psi.p)
    for (A, B), grid in psi.coeffs.items():
        out.add_term(B, A, sign * np.conj(grid))
    return out


def bar_star_sign(A: MultiIndex, B: MultiIndex) -> complex:
    """Constructive basis sign s_AB with (th^A^thbar^B) ^ s_AB th^A'^thbar^B' = omega^n/n!."""
    n = A.n
    p, q = len(A), len(B)
    sign = (-1) ** (q * (n - p) + n * (n - 1) // 2)
    return (1j**n) * sign * A.perm_sign() * B.perm_sign()


def bar_star_sign_printed(A: MultiIndex, B: MultiIndex) -> complex:
    """The closed-form basis sign (-1)^pq i^n epsilon^BA, as printed.

    Diagnostic only; disagrees with the normalization identity at odd n.
    """
    n = A.n
    return ((-1) ** (len(A) * len(B))) * (1j**n) * epsilon(B, A)


def star_sign_diagnostic(n: int) -> dict:
    """Compare the constructive and printed bar-star signs on all monomials."""
    from .multiindex import all_indices

    agree = disagree = 0
    for A in all_indices(n):
        for B in all_indices(n):
            if bar_star_sign(A, B) == bar_star_sign_printed(A, B):
                agree += 1
            else:
                disagree += 1
    return {"n": n, "agree": agree, "disagree": disagree, "match": disagree == 0}


def bar_star(phi: ScalarForm) -> ScalarForm:
    """The antilinear duality operator on (p,q)-forms.

    Sends sum phi_AB th^A^thbar^B to sum conj(phi_AB) s_AB th^A'^thbar^B',
    so that phi ^ bar_star(psi) integrates to the hermitian pairing.
    """
    n = phi.chart.n
    out = zero_form(phi.chart, n - phi.p, n - phi.q)
    for (A, B), grid in phi.coeffs.items():
        out.add_term(A.complement(), B.complement(), bar_star_sign(A, B) * np.conj(grid))
    return out


def hodge_star(phi: ScalarForm) -> ScalarForm:
    """The linear Hodge star, (p,q) -> (n-q, n-p); star = bar_star o conjugate."""
    return bar_star(conjugate(phi))


def star_basis_action(A: MultiIndex, B: MultiIndex) -> tuple[complex, MultiIndex, MultiIndex]:
    """Linear star on a basis monomial: sign and output key (B', A')."""
    sign = ((-1) ** (len(A) * len(B))) * bar_star_sign(B, A)
    return sign, B.complement(), A.complement()


def omega_form(chart: LatticeChart) -> ScalarForm:
    """The Kahler form i sum theta^a ^ thetabar^a."""
    out = zero_form(chart, 1, 1)
    for alpha in range(1, chart.n + 1):
        A = MultiIndex((alpha,), chart.n)
        out.add_term(A, A, np.full(chart.shape, 1j, dtype=complex))
    return out


def omega_power(chart: LatticeChart, k: int) -> ScalarForm:
    """omega^k / k!, the normalized Kahler power (k = 0 gives the constant 1)."""
    if k < 0 or k > chart.n:
        raise ValueError(f"power {k} out of range 0..{chart.n}")
    out = monomial(chart, (), (), 1.0)
    w = omega_form(chart)
    for _ in range(k):
        out = wedge(out, w)
    return out * (1.0 / float(math.factorial(k)))


_TOP_FACTOR_CACHE: dict[int, complex] = {}


def _top_factor(n: int) -> complex:
    # th^(1..n) ^ thbar^(1..n) = (-1)^(n(n-1)/2) / i^n * omega^n/n!
    if n not in _TOP_FACTOR_CACHE:
        _TOP_FACTOR_CACHE[n] = ((-1) ** (n * (n - 1) // 2)) / (1j**n)
    return _TOP_FACTOR_CACHE[n]


def integrate_top(phi: ScalarForm) -> complex:
    """Integrate an (n,n)-form over the torus."""
    n = phi.chart.n
    if (phi.p, phi.q) != (n, n):
        raise ValueError(f"can only integrate ({n},{n})-forms, got ({phi.p},{phi.q})")
    full = MultiIndex(tuple(range(1, n + 1)), n)
    coeff = phi.coefficient(full, full)
    return complex(
        _top_factor(n) * np.sum(coeff) * phi.chart.cell_volume
    )


def d_holo_form(phi: ScalarForm) -> ScalarForm:
    """Exterior holomorphic derivative d' of a scalar form."""
    n = phi.chart.n
    out = zero_form(phi.chart, phi.p + 1, phi.q) if phi.p < n else None
    if out is None:
        return zero_form(phi.chart, n, phi.q)
    for (A, B), grid in phi.coeffs.items():
        f = ScalarField(phi.chart, grid)
        for alpha in range(1, n + 1):
            s, merged = merge_sign((alpha,), A.entries)
            if s == 0:
                continue
            out.add_term(MultiIndex(merged, n), B, s * d_holo(f, alpha).data)
    return out


def d_anti_form(phi: ScalarForm) -> ScalarForm:
    """Exterior anti-holomorphic derivative d'' of a scalar form."""
    n = phi.chart.n
    if phi.q >= n:
        return zero_form(phi.chart, phi.p, n)
    out = zero_form(phi.chart, phi.p, phi.q + 1)
    front = (-1) ** phi.p  # thetabar^b moved past theta^A
    for (A, B), grid in phi.coeffs.items():
        f = ScalarField(phi.chart, grid)
        for beta in range(1, n + 1):
            s, merged = merge_sign((beta,), B.entries)
            if s == 0:
                continue
            out.add_term(A, MultiIndex(merged, n), front * s * d_anti(f, beta).data)
    return out


def inner_local(phi: ScalarForm, psi: ScalarForm) -> ScalarField:
    """Pointwise hermitian product sum phi_AB conj(psi_AB)."""
    _check_match(phi, psi)
    acc = np.zeros(phi.chart.shape, dtype=complex)
    for key, grid in phi.coeffs.items():
        other = psi.coeffs.get(key)
        if other is not None:
            acc = acc + grid * np.conj(other)
    return ScalarField(phi.chart, acc)


def inner_local_physics(phi: ScalarForm, psi: ScalarForm) -> ScalarField:
    """Alternate raised-index route (-1)^pq sum phi_AB psibar^AB.

    With the identity base metric the contravariant components of the
    conjugate form are the plain relabeling psibar^AB = psibar_BA.
    """
    _check_match(phi, psi)
    psibar = conjugate(psi)
    sign = (-1) ** (phi.p * phi.q)
    acc = np.zeros(phi.chart.shape, dtype=complex)
    for (A, B), grid in phi.coeffs.items():
        other = psibar.coeffs.get((B, A))
        if other is not None:
            acc = acc + sign * grid * other
    return ScalarField(phi.chart, acc)


def inner_global(phi: ScalarForm, psi: ScalarForm) -> complex:
    """Global hermitian inner product, checked across both evaluation routes.

    Cross-bidegree pairs return exactly 0 (the diagonal extension).
    """
    if phi.chart != psi.chart:
        raise ValueError("forms live on different charts")
    if (phi.p, phi.q) != (psi.p, psi.q):
        return 0.0 + 0.0j
    wedge_route = integrate_top(wedge(phi, bar_star(psi)))
    density = inner_local(phi, psi)
    omega_top = omega_power(phi.chart, phi.chart.n)
    point_route = integrate_top(
        ScalarForm(
            phi.chart,
            phi.chart.n,
            phi.chart.n,
            {
                k: density.data * v
                for k, v in omega_top.coeffs.items()
            },
        )
    )
    scale = 1.0 + abs(wedge_route)
    if abs(wedge_route - point_route) > ROUTE_TOL * scale:
        raise RouteDisagreementError(
            f"inner-product routes disagree: {wedge_route} vs {point_route}"
        )
    return point_route


def norm(phi: ScalarForm) -> float:
    """Global L2 norm."""
    return float(np.sqrt(max(inner_global(phi, phi).real, 0.0)))
