import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crlab.errors import CapabilityError, DomainError
from crlab.fields import poly
from crlab.jets import Jet3, compose1d, fd_jet
from crlab.sphere import SpherePoint, random_points

GENERIC = {(2, 0, 0, 1): 0.5 + 0.2j, (0, 1, 2, 0): 0.3, (1, 1, 1, 0): -0.7j}


def _q():
    return SpherePoint(0.6 + 0.3j,
                       np.sqrt(1 - 0.45) * np.exp(0.4j))


def test_fd_jet_matches_exact_polynomial_jet():
    f = poly(GENERIC)
    q = _q()
    je = f.jet(q, order=3)
    jf = fd_jet(f.value, q, h=8e-3, order=3)
    assert np.max(np.abs(je.d1 - jf.d1)) < 1e-7
    assert np.max(np.abs(je.d2 - jf.d2)) < 1e-6
    assert np.max(np.abs(je.d3 - jf.d3)) < 1e-5


def test_fd_jet_fourth_order_convergence():
    f = poly(GENERIC)
    q = _q()
    je = f.jet(q, order=3)

    def err(h):
        jf = fd_jet(f.value, q, h=h, order=3)
        return max(np.max(np.abs(je.d1 - jf.d1)),
                   np.max(np.abs(je.d2 - jf.d2)),
                   np.max(np.abs(je.d3 - jf.d3)))

    e1, e2 = err(1.6e-2), err(8e-3)
    slope = np.log2(e1 / e2)
    assert slope > 3.7


def test_fd_jet_constant_is_zero():
    q = _q()
    jf = fd_jet(lambda p: 2.5 - 1j, q, h=1e-2, order=3)
    assert abs(jf.value - (2.5 - 1j)) < 1e-14
    assert np.max(np.abs(jf.d1)) < 1e-10
    assert np.max(np.abs(jf.d2)) < 1e-8
    assert np.max(np.abs(jf.d3)) < 1e-6


def test_fd_jet_linear_first_partials():
    # Re(w1) has an exact extension jet.  At the base point the stencil
    # error constant vanishes and the match is far below 1e-10; at generic
    # points the extension's fifth derivatives bound it near 5e-9 at
    # h = 1e-2, shrinking at fourth order.
    from crlab.fields import re_w1
    u = re_w1()
    q0 = SpherePoint(1.0, 0.0)
    assert np.max(np.abs(u.jet(q0, order=1).d1
                         - fd_jet(u.value, q0, h=1e-2, order=1).d1)) < 1e-10
    q = SpherePoint(1 / np.sqrt(2), 1j / np.sqrt(2))
    je = u.jet(q, order=1)
    e1 = np.max(np.abs(je.d1 - fd_jet(u.value, q, h=1e-2, order=1).d1))
    e2 = np.max(np.abs(je.d1 - fd_jet(u.value, q, h=5e-3, order=1).d1))
    assert e1 < 1e-8
    assert np.log2(e1 / e2) > 3.7


def test_fd_jet_step_validation():
    with pytest.raises(DomainError):
        fd_jet(lambda p: 0.0, _q(), h=0.5)
    with pytest.raises(DomainError):
        fd_jet(lambda p: 0.0, _q(), h=0.0)


def test_radial_derivative_of_extension_vanishes():
    f = poly(GENERIC)
    q = _q()
    _, dx, _, _ = f.jet(q, order=1).to_real()
    x = np.array([q.w1.real, q.w1.imag, q.w2.real, q.w2.imag])
    assert abs(np.dot(dx, x)) < 1e-13


def test_jet_capability_error():
    j = Jet3.constant(1.0, order=1)
    with pytest.raises(CapabilityError):
        j.require(2)


def test_real_chart_roundtrip():
    f = poly(GENERIC)
    j = f.jet(_q(), order=3)
    v, dx, dxx, dxxx = j.to_real()
    k = Jet3.from_real(v, dx, dxx, dxxx)
    assert np.max(np.abs(k.d1 - j.d1)) < 1e-14
    assert np.max(np.abs(k.d2 - j.d2)) < 1e-14
    assert np.max(np.abs(k.d3 - j.d3)) < 1e-14


def test_mixed_partial_symmetry():
    j = poly(GENERIC).jet(_q(), order=3)
    assert np.max(np.abs(j.d2 - j.d2.T)) < 1e-14
    for perm in ((0, 2, 1), (1, 0, 2), (2, 1, 0)):
        assert np.max(np.abs(j.d3 - np.transpose(j.d3, perm))) < 1e-13


def test_conj_matches_conjugate_field():
    f = poly(GENERIC)
    q = _q()
    j1 = f.jet(q, order=3).conj()
    j2 = f.conjugated().jet(q, order=3)
    assert abs(j1.value - j2.value) < 1e-14
    assert np.max(np.abs(j1.d3 - j2.d3)) < 1e-13


@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
@settings(max_examples=25, deadline=None)
def test_reciprocal_of_jet(seed):
    rs = np.random.RandomState(seed)
    mono = {tuple(rs.randint(0, 2, size=4)): complex(*rs.normal(size=2))
            for _ in range(3)}
    mono[(0, 0, 0, 0)] = 3.0  # keep the value away from zero
    f = poly(mono)
    q = _q()
    j = f.jet(q, order=3)
    r = j.reciprocal()
    prod = j * r
    assert abs(prod.value - 1.0) < 1e-12
    assert np.max(np.abs(prod.d1)) < 1e-11
    assert np.max(np.abs(prod.d2)) < 1e-10
    assert np.max(np.abs(prod.d3)) < 1e-9


def test_compose1d_square_root():
    # g(u) = sqrt(u) applied to u = |w1|^2 + |w2|^2 reproduces the radius
    q = _q()
    z = np.array([q.w1, q.w2, np.conj(q.w1), np.conj(q.w2)])
    nsq = Jet3(z[0] * z[2] + z[1] * z[3])
    nsq.d1[:] = [z[2], z[3], z[0], z[1]]
    nsq.d2[0, 2] = nsq.d2[2, 0] = 1.0
    nsq.d2[1, 3] = nsq.d2[3, 1] = 1.0
    s = float(nsq.value.real)
    r = np.sqrt(s)
    j = compose1d(nsq, (r, 0.5 / r, -0.25 / r ** 3, 0.375 / r ** 5))
    sq = j * j
    assert abs(sq.value - nsq.value) < 1e-14
    assert np.max(np.abs(sq.d1 - nsq.d1)) < 1e-13
    assert np.max(np.abs(sq.d2 - nsq.d2)) < 1e-13
    assert np.max(np.abs(sq.d3 - nsq.d3)) < 1e-12
