import numpy as np
import pytest

from crlab.errors import ConditionError, DomainError
from crlab.fields import ConstantField, poly, re_w1
from crlab.flows import FlowMap, hamiltonian_field, pullback_quotient
from crlab.sampling import sphere_grid, torus_grid
from crlab.sphere import SpherePoint, clifford_point, random_points
from crlab.structures import DeformationTensor
from crlab.variation import (HamiltonianFamily, breaking_audit,
                             breaking_hamiltonian, coeff_a, coeff_b,
                             first_variation, fit_even_response,
                             hamiltonian_search, measured_abs_slope,
                             measured_slope, second_variation,
                             torus_mean_first_variation)
from oracles import (torus_linear_quotient_coefficient,
                     torus_quadratic_response_oracle)

SQ2 = np.sqrt(2.0)
GENERIC = poly({(2, 0, 0, 1): 0.5, (0, 1, 2, 0): 0.5})  # Re(w1^2 w2b)


# -- series coefficients ------------------------------------------------

def test_coeff_a_constant_vanishes():
    assert abs(coeff_a(ConstantField(3.0), clifford_point(0.1, 0.2))) == 0.0


def test_coeff_a_audit_hamiltonian_torus(audit_u):
    # the polar-coordinate oracle gives |a| = |u_rr - sqrt2 u_r| / 8
    q = clifford_point(0.7, 1.3)
    a = coeff_a(audit_u, q)
    expect = torus_linear_quotient_coefficient(audit_u.slope,
                                               audit_u.curvature)
    assert abs(abs(a) - expect) < 1e-13
    assert abs(expect - SQ2 / 8.0) < 1e-13


def test_coeff_a_flow_oracle(audit_u, family2):
    # |nu_s / s| -> |a| as s -> 0, with the quotient from flow integration
    _, nu = family2
    q = clifford_point(0.7, 1.3)
    fl = FlowMap(hamiltonian_field(audit_u))
    a = coeff_a(audit_u, q)
    for s in (4e-3, 2e-3):
        nus = pullback_quotient(fl.evaluate(q, s), q)
        assert abs(abs(nus / s) - abs(a)) < 1e-4 * abs(a) + 1e-9


def test_coeff_a_generic_fd_oracle(rng):
    from crlab.fields import FiniteDifferenceField
    q = SpherePoint(0.6 + 0.3j, np.sqrt(1 - 0.45) * np.exp(0.4j))
    fd_version = FiniteDifferenceField(GENERIC.value, h=5e-3)
    assert abs(coeff_a(GENERIC, q) - coeff_a(fd_version, q)) < 1e-6


def test_coeff_b_constant():
    assert abs(coeff_b(ConstantField(2.0), clifford_point(0.5, 0.5))) == 0.0


def test_coeff_b_degenerate_for_linear_hamiltonian(rng):
    # every term carries a second conjugate-frame derivative, which
    # vanishes identically for Re(w1)
    for q in random_points(5, rng):
        assert abs(coeff_b(re_w1(), q)) < 1e-14


def test_coeff_b_flow_oracle(audit_u):
    q = clifford_point(0.7, 1.3)
    fl = FlowMap(hamiltonian_field(audit_u))
    ss = np.array([-0.04, -0.02, -0.01, -0.005, 0.005, 0.01, 0.02, 0.04])
    nus = np.array([pullback_quotient(fl.evaluate(q, float(s)), q)
                    for s in ss])
    coefs, *_ = np.linalg.lstsq(np.vander(ss, 4, increasing=True), nus,
                                rcond=None)
    b = coeff_b(audit_u, q)
    assert abs(b) > 1e-6  # resolvable
    assert abs(coefs[2] - b) / abs(b) < 1e-2
    a = coeff_a(audit_u, q)
    assert abs(coefs[1] - a) / abs(a) < 1e-6


def test_coeff_b_fd_jet_oracle():
    from crlab.fields import FiniteDifferenceField
    q = clifford_point(0.9, 0.4)
    fd_version = FiniteDifferenceField(GENERIC.value, h=8e-3)
    b_exact = coeff_b(GENERIC, q)
    b_fd = coeff_b(fd_version, q)
    assert abs(b_exact - b_fd) < 1e-5


# -- first variation ----------------------------------------------------

def test_first_variation_constant_hamiltonian(family2):
    _, nu = family2
    fv = first_variation(nu, ConstantField(1.0), clifford_point(0.3, 0.4))
    assert fv.value == 0.0 and not fv.absolute_law


def test_first_variation_vanishes_for_audit_hamiltonian(family2, audit_u):
    _, nu = family2
    for q in sphere_grid(8, 8):
        if nu.abs_value(q) > 1e-12:
            assert abs(first_variation(nu, audit_u, q).value) < 1e-12


def test_first_variation_flow_oracle(family2, rng):
    _, nu = family2
    fl = FlowMap(hamiltonian_field(GENERIC))
    pts = [q for q in random_points(60, rng) if nu.abs_value(q) > 0.1][:6]
    for q in pts:
        pred = first_variation(nu, GENERIC, q)
        assert not pred.absolute_law
        got = measured_slope(fl, nu, q)
        assert abs(got - pred.value) <= 1e-4 * max(abs(pred.value), 1e-6)


def test_first_variation_abs_law(family2):
    _, nu = family2
    fl = FlowMap(hamiltonian_field(GENERIC))
    r = 0.98
    q = SpherePoint(r * np.exp(0.5j), np.sqrt(1 - r * r) * np.exp(0.1j))
    pred = first_variation(nu, GENERIC, q)
    assert pred.absolute_law and pred.value > 1e-3
    got = measured_abs_slope(fl, nu, q)
    assert abs(got - pred.value) <= 1e-4 * pred.value


# -- second variation ---------------------------------------------------

def test_second_variation_oracle_value(family2, audit_u):
    _, nu = family2
    q = clifford_point(0.7, 1.3)
    got = second_variation(nu, audit_u, q)
    want = torus_quadratic_response_oracle(audit_u.slope, audit_u.curvature,
                                           0.6)
    assert abs(got - want) < 1e-13
    assert abs(want - 1.0 / 375.0) < 1e-15


def test_second_variation_hypotheses(family2, audit_u):
    _, nu = family2
    with pytest.raises(ConditionError, match="nu != 0"):
        second_variation(nu, audit_u,
                         SpherePoint(0.99, np.sqrt(1 - 0.99 ** 2)))
    with pytest.raises(ConditionError, match="Im"):
        second_variation(nu, GENERIC, clifford_point(0.4, 0.8))


def test_second_variation_constant_hamiltonian(family2):
    _, nu = family2
    assert abs(second_variation(nu, ConstantField(2.0),
                                clifford_point(0.2, 0.9))) == 0.0


def test_second_variation_matches_fd_fit(family2, audit_u):
    _, nu = family2
    fl = FlowMap(hamiltonian_field(audit_u))
    q = clifford_point(2.1, 0.6)
    c_an = second_variation(nu, audit_u, q)
    coef, resid, _ = fit_even_response(fl, nu, q, (0.005, 0.01, 0.02, 0.04))
    assert abs(coef[0] - 0.6) < 1e-10
    assert abs(coef[1]) < 1e-10
    assert abs(coef[2] - c_an) / abs(c_an) < 1e-2
    assert resid < 1e-9


# -- audit Hamiltonian --------------------------------------------------

def test_breaking_hamiltonian_constants():
    u = breaking_hamiltonian(2.0)
    assert abs(u.nu_abs - 0.6) < 1e-15
    assert abs(u.h_const - 59.0 / 15.0) < 1e-14
    assert abs(u.slope - 29.0 / 30.0) < 1e-14
    assert abs(u.curvature - SQ2 / 2.0 * 59.0 / 15.0) < 1e-14
    # quadratic-term coefficient of the unscaled profile
    assert abs(0.5 * u.curvature - SQ2 / 4.0 * u.h_const) < 1e-14


def test_breaking_hamiltonian_torus_values():
    u = breaking_hamiltonian(2.0)
    v, d1, d2, d3 = u._stack(np.sqrt(0.5))
    assert v == 0.0
    assert abs(d1 - 29.0 / 30.0) < 1e-12
    assert abs(d2 - SQ2 / 2.0 * 59.0 / 15.0) < 1e-12


def test_breaking_hamiltonian_cutoff_support():
    u = breaking_hamiltonian(2.0)
    for r in (0.02, 0.2, 0.44, 0.96, 0.99):
        assert u._stack(r) == (0.0, 0.0, 0.0, 0.0)
    # plateau: cutoff inert, quadratic profile exact
    v, d1, _, _ = u._stack(0.6)
    expect = u.slope * (0.6 - np.sqrt(0.5)) \
        + 0.5 * u.curvature * (0.6 - np.sqrt(0.5)) ** 2
    assert abs(v - expect) < 1e-15


def test_breaking_hamiltonian_validation():
    with pytest.raises(DomainError):
        breaking_hamiltonian(2.0, cutoff=(0.75, 0.85))
    with pytest.raises(DomainError):
        breaking_hamiltonian(2.0, cutoff=(0.05, 0.85), margin=0.1)
    with pytest.raises(DomainError):
        breaking_hamiltonian(1.0)


def test_torus_mean_examples(family2, audit_u):
    _, nu = family2
    assert abs(torus_mean_first_variation(audit_u, nu, n=16)) < 1e-10
    assert abs(torus_mean_first_variation(GENERIC, nu, n=64)) < 1e-8
    # a pulled-back angular Hamiltonian: pointwise nonzero, zero mean
    from crlab.fields import (PolynomialField, ProductField,
                              RadialProfileField)
    sin_theta = ProductField(
        RadialProfileField(lambda r: (1 / r, -1 / r ** 2, 2 / r ** 3,
                                      -6 / r ** 4)),
        PolynomialField({(1, 0, 0, 0): -0.5j, (0, 0, 1, 0): 0.5j}))
    vals = [np.imag(np.conj(nu.value(q))
                    * (coeff_a(sin_theta, q) / 1j))
            for q in torus_grid(8)]
    assert max(abs(v) for v in vals) > 1e-3
    assert abs(torus_mean_first_variation(sin_theta, nu, n=64)) < 1e-8


# -- audit and search ---------------------------------------------------

def test_breaking_audit_small(family2, audit_u):
    _, nu = family2
    audit = breaking_audit(nu, audit_u, torus_points=4, sphere_n=16,
                           band_n=4, equivariance_samples=2)
    assert audit.condition_residual < 1e-9
    assert max(audit.derivative_gaps) < 1e-12
    assert audit.max_consistency_gap < 1e-2
    assert audit.equivariance_defect < 1e-7
    assert audit.measured_sign in (-1, 0, 1)
    assert audit.expected_sign_reference == -1
    # the response sign is consistent across points and both routes
    for r in audit.reports:
        assert np.sign(r.second_coeff) == audit.measured_sign
        assert abs(r.first_coeff) < 1e-12
        assert abs(r.nu_abs - 0.6) < 1e-14
    # sup |mu_gs| never undershoots sup |nu| by more than roundoff
    for s, v in audit.sup_mu_by_s.items():
        assert v >= audit.sup_nu - 1e-12
    s = audit.summary()
    assert set(s) >= {"measured_sign", "expected_sign_reference",
                      "sign_agrees_with_reference", "sup_mu_by_s"}


def test_search_scaled_family(family2, audit_u):
    _, nu = family2
    grid = torus_grid(2)
    res = hamiltonian_search(HamiltonianFamily.scaled(audit_u), nu, 0.05,
                             grid, steps_per_unit=64, max_sweeps=5)
    base = max(nu.abs_value(q) for q in grid)
    assert res.objective <= base + 1e-15
    objs = [v for _, v in res.trace]
    assert all(y <= x + 1e-15 for x, y in zip(objs, objs[1:]))


def test_search_constants_family(family2):
    _, nu = family2
    grid = torus_grid(2)
    res = hamiltonian_search(HamiltonianFamily.constants(), nu, 0.3, grid,
                             steps_per_unit=64, max_sweeps=4)
    assert abs(res.objective - 0.6) < 1e-9
