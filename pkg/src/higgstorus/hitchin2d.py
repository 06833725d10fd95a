"""SU(2) fields on a 2D periodic lattice: self-duality and its reduction.

Fields A1, A2, phi1, phi2 take values in su(2) (traceless anti-hermitian).
The complex packaging is phi = phi1 - i phi2 and A_zbar = A1 + i A2, with
d/dzbar = d/dx1 + i d/dx2 and F_zzbar = (i/2) F_12; those dictionaries tie
the four formulations of the reduced equations together.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import LatticeChart, ScalarField, deriv_real, integrate

SU2_TOL = 1e-13


def _mat_h(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def _check_su2(name: str, m: np.ndarray, tol: float = SU2_TOL) -> None:
    anti = float(np.max(np.abs(m + _mat_h(m))))
    tr = float(np.max(np.abs(np.trace(m, axis1=-2, axis2=-1))))
    if anti > tol or tr > tol:
        raise ValueError(f"{name} not su(2): anti-hermiticity {anti:.2e}, trace {tr:.2e}")


def frobenius_norm(chart: LatticeChart, m: np.ndarray) -> float:
    """L2 lattice norm of a matrix field, sqrt(integral of |entries|^2)."""
    dens = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    return float(np.sqrt(integrate(ScalarField(chart, dens.astype(complex))).real))


@dataclass
class SU2Config:
    """Gauge potentials and Higgs pair on a 2-torus, valued in su(2)."""

    chart: LatticeChart
    A1: np.ndarray
    A2: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray

    def __post_init__(self):
        if self.chart.n != 1:
            raise ValueError("2D configurations use a chart of complex dimension 1")
        want = self.chart.shape + (2, 2)
        for name in ("A1", "A2", "phi1", "phi2"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape != want:
                raise ValueError(f"{name} has shape {arr.shape}, expected {want}")
            _check_su2(name, arr)
            setattr(self, name, arr)

    @property
    def phi(self) -> np.ndarray:
        """Complex Higgs field phi1 - i phi2, recomputed on access."""
        return self.phi1 - 1j * self.phi2

    @property
    def phi_star(self) -> np.ndarray:
        """Pointwise conjugate transpose of phi."""
        return _mat_h(self.phi)

    @property
    def A_zbar(self) -> np.ndarray:
        return self.A1 + 1j * self.A2

    def dx(self, m: np.ndarray, i: int) -> np.ndarray:
        """Spectral derivative along real lattice axis i in {1, 2}."""
        return deriv_real(m, self.chart, i - 1)

    def cov(self, m: np.ndarray, i: int) -> np.ndarray:
        """Covariant derivative D_i m = d_i m + [A_i, m]."""
        A = self.A1 if i == 1 else self.A2
        return self.dx(m, i) + np.matmul(A, m) - np.matmul(m, A)

    def d_zbar(self, m: np.ndarray) -> np.ndarray:
        return self.dx(m, 1) + 1j * self.dx(m, 2)

    def cov_zbar(self, m: np.ndarray) -> np.ndarray:
        """D_zbar m = d_zbar m + [A_zbar, m]."""
        A = self.A_zbar
        return self.d_zbar(m) + np.matmul(A, m) - np.matmul(m, A)


def zero_config(chart: LatticeChart) -> SU2Config:
    z = np.zeros(chart.shape + (2, 2), dtype=complex)
    return SU2Config(chart, z.copy(), z.copy(), z.copy(), z.copy())


def random_su2_field(chart: LatticeChart, seed: int, band: int = 2, amplitude: float = 1.0) -> np.ndarray:
    """Band-limited random su(2) field (Pauli-basis coefficients)."""
    from .lattice import random_field

    sigma = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    num_modes = float((2 * band + 1) ** 2)
    out = np.zeros(chart.shape + (2, 2), dtype=complex)
    for a in range(3):
        c = random_field(chart, seed * 10 + a, band).data.real / np.sqrt(num_modes)
        out = out + (1j * amplitude) * c[..., None, None] * sigma[a]
    return out


def random_config(chart: LatticeChart, seed: int, band: int = 2, amplitude: float = 1.0) -> SU2Config:
    return SU2Config(
        chart,
        random_su2_field(chart, seed * 4 + 1, band, amplitude),
        random_su2_field(chart, seed * 4 + 2, band, amplitude),
        random_su2_field(chart, seed * 4 + 3, band, amplitude),
        random_su2_field(chart, seed * 4 + 4, band, amplitude),
    )


def field_strength(cfg: SU2Config, extended: tuple[np.ndarray, np.ndarray] | None = None) -> dict:
    """F_ij = d_i A_j - d_j A_i + [A_i, A_j].

    With extended (A3, A4), the formally four-dimensional components are
    included using d3 = d4 = 0.
    """
    def comm(a, b):
        return np.matmul(a, b) - np.matmul(b, a)

    F = {}
    F[(1, 2)] = cfg.dx(cfg.A2, 1) - cfg.dx(cfg.A1, 2) + comm(cfg.A1, cfg.A2)
    if extended is not None:
        A3, A4 = extended
        _check_su2("A3", np.asarray(A3, dtype=complex))
        _check_su2("A4", np.asarray(A4, dtype=complex))
        F[(1, 3)] = cfg.dx(A3, 1) + comm(cfg.A1, A3)
        F[(1, 4)] = cfg.dx(A4, 1) + comm(cfg.A1, A4)
        F[(2, 3)] = cfg.dx(A3, 2) + comm(cfg.A2, A3)
        F[(2, 4)] = cfg.dx(A4, 2) + comm(cfg.A2, A4)
        F[(3, 4)] = comm(A3, A4)
    for (i, j) in list(F):
        F[(j, i)] = -F[(i, j)]
    return F


def sdym_residual(cfg: SU2Config) -> dict:
    """Self-duality residuals after the two-coordinate reduction.

    Computes the three component norms twice: from the formally 4D field
    strength with A3 = phi1, A4 = phi2, and from the reduced expressions;
    the two paths are the same arithmetic and must agree to roundoff.
    """
    F = field_strength(cfg, extended=(cfg.phi1, cfg.phi2))
    path1 = (
        F[(1, 2)] - F[(3, 4)],
        F[(1, 3)] - F[(4, 2)],
        F[(1, 4)] - F[(2, 3)],
    )

    def comm(a, b):
        return np.matmul(a, b) - np.matmul(b, a)

    F12 = cfg.dx(cfg.A2, 1) - cfg.dx(cfg.A1, 2) + comm(cfg.A1, cfg.A2)
    path2 = (
        F12 - comm(cfg.phi1, cfg.phi2),
        cfg.cov(cfg.phi1, 1) + cfg.cov(cfg.phi2, 2),
        cfg.cov(cfg.phi2, 1) - cfg.cov(cfg.phi1, 2),
    )
    norms1 = tuple(frobenius_norm(cfg.chart, p) for p in path1)
    norms2 = tuple(frobenius_norm(cfg.chart, p) for p in path2)
    gap = max(frobenius_norm(cfg.chart, a - b) for a, b in zip(path1, path2))
    return {"sdym": norms1, "reduced": norms2, "path_gap": gap}


def hitchin_residual(cfg: SU2Config, form: str = "real") -> tuple[float, ...]:
    """Residual norms of one of the four formulations.

    real:    (|F12 - (i/2)[phi, phi*]|, |(D1 + i D2) phi|)
    complex: (|F_zzbar + (1/4)[phi, phi*]|, |D_zbar phi|)
    forms:   (|F + [Phi_c, Phi_c*]|, |D_zbar Phi_c|) with Phi_c = (1/2) phi dz
    kw:      (|F - Phi ^ Phi|, |D Phi|, |D* Phi|) with Phi = phi1 dx1 + phi2 dx2
    """
    def comm(a, b):
        return np.matmul(a, b) - np.matmul(b, a)

    F12 = cfg.dx(cfg.A2, 1) - cfg.dx(cfg.A1, 2) + comm(cfg.A1, cfg.A2)
    phi, phis = cfg.phi, cfg.phi_star
    nrm = lambda m: frobenius_norm(cfg.chart, m)
    if form == "real":
        return (nrm(F12 - 0.5j * comm(phi, phis)), nrm(cfg.cov(phi, 1) + 1j * cfg.cov(phi, 2)))
    if form == "complex":
        F_zzbar = 0.5j * F12
        return (nrm(F_zzbar + 0.25 * comm(phi, phis)), nrm(cfg.cov_zbar(phi)))
    if form == "forms":
        # coefficients on dz^dzbar and dzbar respectively
        F_zzbar = 0.5j * F12
        phic = 0.5 * phi
        return (nrm(F_zzbar + comm(phic, _mat_h(phic))), nrm(cfg.cov_zbar(phic)))
    if form == "kw":
        # F - Phi^Phi on dx1^dx2; DPhi coefficient D1 phi2 - D2 phi1;
        # D*Phi = -(D1 phi1 + D2 phi2) up to the sign of *D*, norm unaffected
        return (
            nrm(F12 - comm(cfg.phi1, cfg.phi2)),
            nrm(cfg.cov(cfg.phi2, 1) - cfg.cov(cfg.phi1, 2)),
            nrm(cfg.cov(cfg.phi1, 1) + cfg.cov(cfg.phi2, 2)),
        )
    raise ValueError(f"unknown formulation: {form}")


def det_holomorphy(cfg: SU2Config) -> dict:
    """Covariant holomorphy of phi against plain holomorphy of det phi."""
    dphi = cfg.cov_zbar(cfg.phi)
    det = np.linalg.det(cfg.phi)
    ddet = deriv_real(det, cfg.chart, 0) + 1j * deriv_real(det, cfg.chart, 1)
    n1 = frobenius_norm(cfg.chart, dphi)
    n2 = float(np.sqrt(integrate(ScalarField(cfg.chart, np.abs(ddet.astype(complex)) ** 2)).real))
    return {"cov_holomorphy": n1, "det_holomorphy": n2}


def to_higgs_instance(cfg: SU2Config, tol: float = 1e-8):
    """Bridge a 2D configuration to a rank-2 Higgs instance on the same chart.

    Uses the unitary gauge h = I, Higgs field Phi_c = (1/2) phi dz, and the
    gauge curvature F_zzbar supplied as synthetic data, so the reduced
    residual pair matches the forms-formulation residuals.
    """
    from .endforms import EndForm, identity_metric, zero_end
    from .higgs import HiggsInstance
    from .multiindex import MultiIndex

    hol = det_holomorphy(cfg)["cov_holomorphy"]
    plain = frobenius_norm(cfg.chart, cfg.d_zbar(cfg.phi))
    if plain > tol:
        raise ValueError(
            f"phi not holomorphic enough to bridge: d_zbar norm {plain:.3e}, covariant {hol:.3e}"
        )

    def comm(a, b):
        return np.matmul(a, b) - np.matmul(b, a)

    chart = cfg.chart
    one = MultiIndex((1,), 1)
    empty = MultiIndex((), 1)
    phi_c = zero_end(chart, 2, 1, 0)
    phi_c.add_term(one, empty, 0.5 * cfg.phi)
    F12 = cfg.dx(cfg.A2, 1) - cfg.dx(cfg.A1, 2) + comm(cfg.A1, cfg.A2)
    F = zero_end(chart, 2, 1, 1)
    F.add_term(one, one, 0.5j * F12)
    return HiggsInstance(chart, 2, identity_metric(chart, 2), phi_c, F)
