import numpy as np
import pytest

from higgstorus.endforms import (
    EndForm,
    MetricField,
    bar_star_h,
    commutator,
    d_anti_end,
    d_holo_end,
    end_monomial,
    end_norm,
    hermitian_conjugate,
    identity_metric,
    star_end,
    trace_form,
    trace_inner_global,
    trace_inner_local,
    wedge_end,
    zero_end,
)
from higgstorus.lattice import LatticeChart, integrate
from higgstorus.multiindex import MultiIndex
from higgstorus.sampling import random_end_form, random_metric


def chart1():
    return LatticeChart(1, (8,), (1.0, 1.2))


def chart2():
    return LatticeChart(2, (6, 6), (1.0, 1.1, 0.9, 1.2))


def test_metric_validation():
    chart = chart1()
    identity_metric(chart, 2)
    bad = np.broadcast_to(np.array([[1.0, 1.0j], [2.0j, 1.0]]), chart.shape + (2, 2)).copy()
    with pytest.raises(ValueError):
        MetricField(chart, 2, bad)
    negdef = np.broadcast_to(np.diag([1.0, -1.0]).astype(complex), chart.shape + (2, 2)).copy()
    with pytest.raises(ValueError):
        MetricField(chart, 2, negdef)


def test_adjoint_identity_metric_is_dagger():
    chart = chart1()
    h = identity_metric(chart, 2)
    m = np.broadcast_to(np.array([[1.0, 2.0 + 1j], [0.5j, -1.0]]), chart.shape + (2, 2)).copy()
    assert np.max(np.abs(h.adjoint(m) - np.conj(np.swapaxes(m, -1, -2)))) == 0.0


def test_adjoint_is_involutive():
    chart = chart1()
    h = random_metric(chart, 2, 3)
    m = random_end_form(chart, 2, 0, 0, 5).coefficient(MultiIndex((), 1), MultiIndex((), 1))
    again = h.adjoint(h.adjoint(m))
    assert np.max(np.abs(again - m)) < 1e-10


def test_hermitian_conjugate_bidegree_and_identity_case():
    chart = chart2()
    phi = random_end_form(chart, 2, 1, 0, 7)
    hc = hermitian_conjugate(phi, identity_metric(chart, 2))
    assert (hc.p, hc.q) == (0, 1)
    one = MultiIndex((1,), 2)
    empty = MultiIndex((), 2)
    got = hc.coefficient(empty, one)
    expect = np.conj(np.swapaxes(phi.coefficient(one, empty), -1, -2))
    assert np.max(np.abs(got - expect)) == 0.0


def test_trace_inner_routes_positivity_hermiticity():
    chart = chart2()
    h = random_metric(chart, 3, 11, amplitude=0.3, band=1)
    rng = np.random.default_rng(2)
    for _ in range(4):
        p = int(rng.integers(0, 3))
        q = int(rng.integers(0, 3))
        phi = random_end_form(chart, 3, p, q, int(rng.integers(2**31)))
        psi = random_end_form(chart, 3, p, q, int(rng.integers(2**31)))
        a = trace_inner_global(phi, psi, h)  # raises on route disagreement
        b = trace_inner_global(psi, phi, h)
        assert abs(a - np.conj(b)) <= 1e-8 * (1.0 + abs(a))
        s = trace_inner_global(phi, phi, h)
        assert s.real >= 0
        assert abs(s.imag) <= 1e-8 * (1.0 + s.real)


def test_trace_inner_gauge_invariance():
    chart = chart1()
    h = random_metric(chart, 2, 5)
    phi = random_end_form(chart, 2, 1, 0, 6)
    rng = np.random.default_rng(0)
    U = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))[0]
    rot = lambda m: np.einsum("ij,...jk,lk->...il", U, m, np.conj(U))
    hm = rot(h.matrix)
    hm = 0.5 * (hm + np.conj(np.swapaxes(hm, -1, -2)))
    hU = MetricField(chart, 2, hm)
    phiU = EndForm(chart, 2, 1, 0, {k: rot(v) for k, v in phi.coeffs.items()})
    a = trace_inner_global(phi, phi, h)
    b = trace_inner_global(phiU, phiU, hU)
    assert abs(a - b) <= 1e-10 * (1.0 + abs(a))


def test_wedge_end_matrix_order():
    chart = chart1()
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    B = np.array([[0.0, 0.0], [1.0, 0.0]])
    fa = end_monomial(chart, 2, (1,), (), A)
    fb = end_monomial(chart, 2, (), (1,), B)
    w = wedge_end(fa, fb)
    got = w.coefficient(MultiIndex((1,), 1), MultiIndex((1,), 1))
    assert np.max(np.abs(got - A @ B)) == 0.0


def test_commutator_grading():
    chart = chart2()
    a = random_end_form(chart, 2, 1, 0, 1)
    b = random_end_form(chart, 2, 0, 1, 2)
    c = commutator(a, b)  # odd-odd: anticommutator of coefficients
    one1, one2 = MultiIndex((1,), 2), MultiIndex((1,), 2)
    empty = MultiIndex((), 2)
    m1 = a.coefficient(one1, empty)
    m2 = b.coefficient(empty, one2)
    # interchange sign for (0,1)^(1,0) ordering
    expect = m1 @ m2 - m2 @ m1
    assert np.max(np.abs(c.coefficient(one1, one2) - expect)) < 1e-12


def test_trace_of_commutator_scalar_form_vanishes():
    chart = chart2()
    a = random_end_form(chart, 2, 1, 0, 3)
    b = random_end_form(chart, 2, 0, 1, 4)
    tr = trace_form(commutator(a, b))
    worst = max(float(np.max(np.abs(g))) for g in tr.coeffs.values())
    assert worst < 1e-11


def test_star_end_matches_scalar_star():
    from higgstorus.forms import hodge_star, monomial

    chart = chart2()
    for A, B in [((1,), ()), ((1,), (2,)), ((1, 2), (1,))]:
        m = monomial(chart, A, B, 1.0)
        sm = hodge_star(m)
        fe = end_monomial(chart, 2, A, B, np.eye(2))
        se = star_end(fe)
        for (ka, kb), grid in se.coeffs.items():
            expect = sm.coefficient(ka, kb)[..., None, None] * np.eye(2)
            assert np.max(np.abs(grid - expect)) == 0.0


def test_bar_star_h_norm_consistency():
    # pairing with the dual form reproduces the squared norm
    from higgstorus.forms import integrate_top

    chart = chart1()
    h = random_metric(chart, 2, 9)
    phi = random_end_form(chart, 2, 1, 0, 10)
    paired = integrate_top(trace_form(wedge_end(phi, bar_star_h(phi, h))))
    direct = trace_inner_global(phi, phi, h)
    assert abs(paired - direct) <= 1e-10 * (1.0 + abs(direct))


def test_derivatives_square_to_zero():
    chart = chart2()
    phi = random_end_form(chart, 2, 0, 1, 8, band=1)
    assert d_anti_end(d_anti_end(phi)).max_abs() < 1e-10
    assert d_holo_end(d_holo_end(phi)).max_abs() < 1e-10


def test_end_norm_constant_matrix():
    chart = LatticeChart(1, (8,), (2.0, 1.0))
    C = np.array([[0.0, 1.0], [0.0, 0.0]])
    phi = end_monomial(chart, 2, (1,), (), C)
    h = identity_metric(chart, 2)
    assert end_norm(phi, h) == pytest.approx(np.sqrt(chart.volume), rel=1e-12)
