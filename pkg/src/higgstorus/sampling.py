"""Seeded generators for random but well-posed field configurations.

Everything here is deterministic in the seed.  Metric fields are built as
pointwise matrix exponentials of band-limited hermitian fields, so they
are smooth, positive definite, and resolve on coarse grids; amplitudes
default to a range where spectral aliasing sits below 1e-6.
"""
from __future__ import annotations

import numpy as np

from .endforms import EndForm, MetricField, _mat_h, end_monomial, zero_end
from .lattice import LatticeChart, random_field
from .multiindex import MultiIndex, all_indices


def expm_hermitian(H: np.ndarray) -> np.ndarray:
    """Pointwise exp of a hermitian matrix field via eigendecomposition."""
    w, v = np.linalg.eigh(H)
    out = np.matmul(v * np.exp(w)[..., None, :], _mat_h(v))
    # resymmetrize to kill accumulation of eigh roundoff
    return 0.5 * (out + _mat_h(out))


def random_hermitian_field(
    chart: LatticeChart, r: int, seed: int, amplitude: float = 0.3, band: int = 1
) -> np.ndarray:
    """Band-limited hermitian matrix field with entries of unit scale."""
    H = np.zeros(chart.shape + (r, r), dtype=complex)
    # per-mode coefficients are O(1); rescale so the field itself is O(1)
    scale = amplitude / np.sqrt(float((2 * band + 1) ** (2 * chart.n)))
    k = 0
    for i in range(r):
        for j in range(i, r):
            f = random_field(chart, seed * 1000 + k, band).data
            k += 1
            if i == j:
                H[..., i, i] = scale * f.real
            else:
                g = random_field(chart, seed * 1000 + k, band).data
                k += 1
                H[..., i, j] = scale * (f.real + 1j * g.real)
                H[..., j, i] = scale * (f.real - 1j * g.real)
    return H


def random_metric(
    chart: LatticeChart, r: int, seed: int, amplitude: float = 0.3, band: int = 1
) -> MetricField:
    """Smooth positive-definite hermitian metric, exp of a random field."""
    return MetricField(chart, r, expm_hermitian(random_hermitian_field(chart, r, seed, amplitude, band)))


def random_matrix(r: int, seed: int, scale: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return scale * (rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))) / np.sqrt(2.0)


def constant_higgs_field(chart: LatticeChart, r: int, seed: int, scale: float = 1.0) -> EndForm:
    """A holomorphic (1,0) field with commuting wedge square.

    On a compact flat torus holomorphic sections are constant, so the
    components are constant matrices; taking them all proportional to one
    random matrix makes the wedge-square vanish identically.
    """
    rng = np.random.default_rng(seed)
    M = random_matrix(r, seed + 1, scale)
    phi = zero_end(chart, r, 1, 0)
    for alpha in range(1, chart.n + 1):
        c = complex(rng.standard_normal() + 1j * rng.standard_normal())
        phi.add_term(
            MultiIndex((alpha,), chart.n),
            MultiIndex((), chart.n),
            np.broadcast_to(c * M, chart.shape + (r, r)).copy(),
        )
    return phi


def random_end_form(
    chart: LatticeChart, r: int, p: int, q: int, seed: int, band: int = 1
) -> EndForm:
    """Dense random (p,q) endomorphism form with band-limited entries."""
    out = zero_end(chart, r, p, q)
    rng = np.random.default_rng(seed)
    for A in all_indices(chart.n):
        if len(A) != p:
            continue
        for B in all_indices(chart.n):
            if len(B) != q:
                continue
            grids = [
                random_field(chart, int(rng.integers(2**31)), band).data
                for _ in range(r * r)
            ]
            out.add_term(A, B, np.stack(grids, axis=-1).reshape(chart.shape + (r, r)))
    return out


def random_scalar_form(chart: LatticeChart, p: int, q: int, seed: int, band: int = 1):
    """Dense random scalar (p,q)-form."""
    from .forms import zero_form

    out = zero_form(chart, p, q)
    rng = np.random.default_rng(seed)
    for A in all_indices(chart.n):
        if len(A) != p:
            continue
        for B in all_indices(chart.n):
            if len(B) != q:
                continue
            out.add_term(A, B, random_field(chart, int(rng.integers(2**31)), band).data)
    return out
