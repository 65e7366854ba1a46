import numpy as np
import pytest

from crlab.errors import ConfigurationError, DomainError
from crlab.fields import ConstantField, PolynomialField, poly, re_w1
from crlab.flows import (FlowMap, beltrami, contact_defect,
                         equivariance_defect, hamiltonian_field, integrate,
                         max_dilatation, pullback_quotient)
from crlab.sampling import torus_grid
from crlab.sphere import SpherePoint, clifford_point, frame_at, random_points
from crlab.structures import DeformationTensor

SQ2 = np.sqrt(2.0)
GENERIC = poly({(2, 0, 0, 1): 0.5, (0, 1, 2, 0): 0.5})


def _rotation_flow(steps=512):
    return FlowMap(hamiltonian_field(ConstantField(1.0)),
                   steps_per_unit=steps)


def test_constant_hamiltonian_gives_rotation_field():
    field = hamiltonian_field(ConstantField(1.0))
    q = clifford_point(0.4, 1.7)
    v = field.at(q)
    fp = frame_at(q)
    assert abs(v.a1 - fp.reeb.a1) < 1e-14
    assert abs(v.a2 - fp.reeb.a2) < 1e-14


def test_field_assembly_at_diagonal_point():
    # u = Re(w1): Zb u = w2/2, the psi-pairing is i Zb u and the
    # contact-form pairing returns u itself
    q = SpherePoint(1 / SQ2, 1 / SQ2)
    field = hamiltonian_field(re_w1())
    v = field.at(q)
    fp = frame_at(q)
    assert abs(fp.eta(v) - 1 / SQ2) < 1e-14
    assert abs(fp.psi(v) - 1j * (1 / (2 * SQ2))) < 1e-14


def test_hamiltonian_identity_random(rng):
    field = hamiltonian_field(GENERIC)
    for q in random_points(1000, rng):
        fp = frame_at(q)
        assert abs(fp.eta(field.at(q)) - GENERIC.value(q)) < 1e-12


def test_complex_hamiltonian_rejected(rng):
    bad = PolynomialField({(1, 0, 0, 0): 1.0})  # w1 is complex-valued
    with pytest.raises(DomainError):
        hamiltonian_field(bad, check_points=random_points(8, rng))


def test_rotation_flow_matches_circle_action():
    fl = _rotation_flow()
    q = clifford_point(0.9, 2.2)
    for s in (0.1, 0.5, 1.0):
        assert fl.point(q, s).distance(q.rotate(s)) < 1e-10


def test_zero_time_is_identity():
    fl = FlowMap(hamiltonian_field(GENERIC))
    q = clifford_point(1.1, 0.3)
    res = fl.evaluate(q, 0.0)
    assert res.point.distance(q) == 0.0
    assert np.max(np.abs(res.tangent.matrix - np.eye(4))) == 0.0


def test_group_law():
    fl = FlowMap(hamiltonian_field(re_w1()))
    q = clifford_point(0.25, 1.9)
    ab = fl.point(fl.point(q, 0.2), 0.1)
    c = fl.point(q, 0.3)
    assert ab.distance(c) < 1e-8


def test_steps_validation():
    with pytest.raises(ConfigurationError):
        FlowMap(hamiltonian_field(ConstantField(1.0)), steps_per_unit=8)


def test_s_max_enforced():
    fl = FlowMap(hamiltonian_field(ConstantField(1.0)), s_max=0.5)
    with pytest.raises(ConfigurationError):
        fl.point(clifford_point(0, 0), 0.75)


def test_contact_defect_order():
    fl = FlowMap(hamiltonian_field(GENERIC), min_steps=1)
    q = clifford_point(0.8, 0.3)
    defects = [contact_defect(fl, q, 0.5, n) for n in (8, 16, 32)]
    orders = [np.log2(defects[i] / defects[i + 1]) for i in range(2)]
    assert min(orders) >= 3.5


def test_sphere_drift_order():
    fl = FlowMap(hamiltonian_field(GENERIC))
    q = clifford_point(0.1, 0.6)
    drifts = [fl.raw_step_drift(q, h) for h in (0.2, 0.1, 0.05)]
    orders = [np.log2(drifts[i] / drifts[i + 1]) for i in range(2)]
    assert min(orders) >= 4.5


def test_beltrami_at_zero_equals_nu(family2):
    _, nu = family2
    fl = _rotation_flow()
    q = clifford_point(0.7, 1.3)
    assert abs(abs(beltrami(fl, nu, q, 0.0)) - nu.abs_value(q)) < 1e-15


def test_beltrami_rotation_invariance(family2):
    _, nu = family2
    fl = _rotation_flow()
    for s in (0.1, 0.5, 1.0):
        for q in (clifford_point(0.7, 1.3),
                  SpherePoint(0.75, np.sqrt(1 - 0.75 ** 2) * np.exp(0.9j))):
            assert abs(abs(beltrami(fl, nu, q, s)) - nu.abs_value(q)) < 1e-8


def test_beltrami_standard_structure_rotation():
    nu0 = DeformationTensor.standard()
    fl = _rotation_flow()
    q = clifford_point(0.2, 0.4)
    assert abs(beltrami(fl, nu0, q, 0.7)) < 1e-10


def test_pullback_quotient_zero_at_identity(family2):
    fl = FlowMap(hamiltonian_field(GENERIC))
    q = clifford_point(1.4, 0.2)
    assert abs(pullback_quotient(fl.evaluate(q, 0.0), q)) == 0.0


def test_max_dilatation_identity(family2):
    _, nu = family2
    fl = _rotation_flow()
    res = max_dilatation(fl, nu, torus_grid(4), 0.0)
    assert abs(res.dilatation - 4.0) < 1e-12
    assert abs(res.sup_mu - 0.6) < 1e-13


def test_max_dilatation_empty_grid(family2):
    _, nu = family2
    with pytest.raises(DomainError):
        max_dilatation(_rotation_flow(), nu, [], 0.0)


def test_equivariance_radial_vs_nonradial(audit_u):
    # radial Hamiltonians commute with the circle action; generic ones do not
    fl = FlowMap(hamiltonian_field(audit_u))
    q = clifford_point(0.5, 1.0)
    assert equivariance_defect(fl, q, 1.3, 0.05) < 1e-7
    fl2 = FlowMap(hamiltonian_field(GENERIC))
    assert equivariance_defect(fl2, q, 1.3, 0.5) > 1e-4


def test_integrate_function_wrapper():
    fl = _rotation_flow()
    q = clifford_point(0.0, 0.0)
    res = integrate(fl, q, 0.25)
    assert res.point.distance(q.rotate(0.25)) < 1e-11


def test_tangent_map_pushes_real_to_real(family2):
    fl = FlowMap(hamiltonian_field(GENERIC))
    q = clifford_point(0.3, 0.9)
    res = fl.evaluate(q, 0.3)
    x, _ = frame_at(q).contact_basis()
    out = res.tangent.push(x)
    assert out.is_real(tol=1e-12)
    # projected output is tangent at the image
    assert out.tangency_residual(res.point) < 1e-12
