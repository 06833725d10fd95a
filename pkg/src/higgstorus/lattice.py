"""Discretized flat Kahler torus charts.

A chart of complex dimension n is a periodic grid over 2n real directions
(x^1, y^1, ..., x^n, y^n), with z^a = x^a + i y^a.  Derivatives are
spectral (trigonometric interpolation) and the quadrature is the uniform
trapezoid rule, which is exact for band-limited integrands.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class LatticeChart:
    """Flat Kahler torus: complex dimension, per-axis resolution, periods.

    ``resolution[a]`` is the grid size used for both real directions of
    complex axis a+1; ``periods`` holds the 2n real periods in the order
    (Lx1, Ly1, ..., Lxn, Lyn).  The base metric is the identity in the
    unitary coframe (v1 restriction).
    """

    n: int
    resolution: tuple[int, ...]
    periods: tuple[float, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"complex dimension must be >= 1, got {self.n}")
        if len(self.resolution) != self.n:
            raise ValueError("resolution must have one entry per complex axis")
        if len(self.periods) != 2 * self.n:
            raise ValueError("periods must have 2n entries (Re and Im per axis)")
        for N in self.resolution:
            if N < 4 or N % 2:
                raise ValueError(f"resolution entries must be even and >= 4, got {N}")
        for L in self.periods:
            if L <= 0:
                raise ValueError(f"periods must be positive, got {L}")

    @cached_property
    def shape(self) -> tuple[int, ...]:
        out = []
        for N in self.resolution:
            out.extend([N, N])
        return tuple(out)

    @property
    def volume(self) -> float:
        return float(np.prod(self.periods))

    @property
    def num_points(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return self.volume / self.num_points

    def real_axes(self, alpha: int) -> tuple[int, int]:
        """Grid-axis indices (x, y) for complex axis ``alpha`` in 1..n."""
        if not 1 <= alpha <= self.n:
            raise ValueError(f"axis {alpha} out of range 1..{self.n}")
        return 2 * (alpha - 1), 2 * (alpha - 1) + 1

    def wavenumbers(self, real_axis: int) -> np.ndarray:
        """Angular wavenumbers 2*pi*k/L along one real grid axis."""
        N = self.shape[real_axis]
        L = self.periods[real_axis]
        return 2.0 * np.pi * np.fft.fftfreq(N, d=L / N)

    def coordinate(self, real_axis: int) -> np.ndarray:
        """Grid of the coordinate along one real axis, broadcast to shape."""
        N = self.shape[real_axis]
        L = self.periods[real_axis]
        line = np.arange(N) * (L / N)
        view = [1] * len(self.shape)
        view[real_axis] = N
        return np.broadcast_to(line.reshape(view), self.shape).copy()


@dataclass
class ScalarField:
    """Complex scalar sample grid attached to a chart."""

    chart: LatticeChart
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != self.chart.shape:
            raise ValueError(
                f"grid shape {self.data.shape} does not match chart {self.chart.shape}"
            )

    def __add__(self, other: "ScalarField") -> "ScalarField":
        _same_chart(self, other)
        return ScalarField(self.chart, self.data + other.data)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        _same_chart(self, other)
        return ScalarField(self.chart, self.data - other.data)

    def __mul__(self, other) -> "ScalarField":
        if isinstance(other, ScalarField):
            _same_chart(self, other)
            return ScalarField(self.chart, self.data * other.data)
        return ScalarField(self.chart, self.data * other)

    __rmul__ = __mul__

    def conjugate(self) -> "ScalarField":
        return ScalarField(self.chart, np.conj(self.data))


def _same_chart(a, b) -> None:
    if a.chart != b.chart:
        raise ValueError("fields live on different charts")


def constant_field(chart: LatticeChart, value: complex) -> ScalarField:
    return ScalarField(chart, np.full(chart.shape, value, dtype=complex))


def deriv_real(data: np.ndarray, chart: LatticeChart, real_axis: int) -> np.ndarray:
    """Spectral derivative of a sample grid along one real direction."""
    k = chart.wavenumbers(real_axis)
    view = [1] * data.ndim
    view[real_axis] = len(k)
    spec = np.fft.fft(data, axis=real_axis)
    return np.fft.ifft(1j * k.reshape(view) * spec, axis=real_axis)


def d_holo(f: ScalarField, alpha: int) -> ScalarField:
    """Holomorphic derivative d/dz^alpha = (d/dx - i d/dy)/2."""
    ax, ay = f.chart.real_axes(alpha)
    dx = deriv_real(f.data, f.chart, ax)
    dy = deriv_real(f.data, f.chart, ay)
    return ScalarField(f.chart, 0.5 * (dx - 1j * dy))


def d_anti(f: ScalarField, alpha: int) -> ScalarField:
    """Anti-holomorphic derivative d/dzbar^alpha = (d/dx + i d/dy)/2."""
    ax, ay = f.chart.real_axes(alpha)
    dx = deriv_real(f.data, f.chart, ax)
    dy = deriv_real(f.data, f.chart, ay)
    return ScalarField(f.chart, 0.5 * (dx + 1j * dy))


def integrate(f: ScalarField) -> complex:
    """Uniform-weight quadrature; exact for band-limited periodic integrands.

    numpy's pairwise summation over the fixed lexicographic grid order keeps
    the reduction deterministic.
    """
    return complex(np.sum(f.data) * f.chart.cell_volume)


def random_field(chart: LatticeChart, seed: int, band: int) -> ScalarField:
    """Deterministic band-limited pseudo-random field.

    The Fourier coefficients of all modes with every per-axis index in
    [-band, band] are drawn from a fixed-order stream, so identical seeds
    give bit-identical grids.
    """
    if band < 0:
        raise ValueError("band must be >= 0")
    for N in chart.resolution:
        if band >= N // 2:
            raise ValueError(f"band {band} too large for resolution {N}")
    rng = np.random.default_rng(seed)
    spec = np.zeros(chart.shape, dtype=complex)
    ranges = [range(-band, band + 1) for _ in chart.shape]
    for mode in np.ndindex(*[len(r) for r in ranges]):
        idx = tuple(ranges[d][mode[d]] % chart.shape[d] for d in range(len(mode)))
        re, im = rng.standard_normal(2)
        spec[idx] = (re + 1j * im) / np.sqrt(2.0)
    data = np.fft.ifftn(spec) * chart.num_points
    return ScalarField(chart, data)
