import numpy as np
import sympy as sp

from crlab.polyfields import (R_FIELD, X_FIELD, Y_FIELD, Z_FIELD, ZB_FIELD,
                              PolyVectorField, lie_bracket)
from crlab.sphere import SpherePoint, frame_at, random_points


def test_commutators_exact():
    assert lie_bracket(Z_FIELD, ZB_FIELD).equals(-sp.I * R_FIELD)
    assert lie_bracket(R_FIELD, Z_FIELD).equals(-2 * sp.I * Z_FIELD)
    assert lie_bracket(R_FIELD, ZB_FIELD).equals(2 * sp.I * ZB_FIELD)


def test_real_basis_commutators_exact():
    assert lie_bracket(X_FIELD, Y_FIELD).equals(-2 * R_FIELD)
    assert lie_bracket(X_FIELD, R_FIELD).equals(2 * Y_FIELD)
    assert lie_bracket(Y_FIELD, R_FIELD).equals(-2 * X_FIELD)


def test_bracket_antisymmetry():
    assert lie_bracket(Z_FIELD, Z_FIELD).is_zero()
    a = lie_bracket(Z_FIELD, R_FIELD)
    b = lie_bracket(R_FIELD, Z_FIELD)
    assert (a + b).is_zero()


def test_bracket_bilinearity():
    s = lie_bracket(Z_FIELD + ZB_FIELD, R_FIELD)
    t = lie_bracket(Z_FIELD, R_FIELD) + lie_bracket(ZB_FIELD, R_FIELD)
    assert s.equals(t)


def test_jacobi_identity():
    j = (lie_bracket(Z_FIELD, lie_bracket(ZB_FIELD, R_FIELD))
         + lie_bracket(ZB_FIELD, lie_bracket(R_FIELD, Z_FIELD))
         + lie_bracket(R_FIELD, lie_bracket(Z_FIELD, ZB_FIELD)))
    assert j.is_zero()


def test_evaluation_matches_frame_packet(rng):
    for q in random_points(25, rng):
        fp = frame_at(q)
        z = Z_FIELD.at(q)
        assert abs(z.a1 - fp.holo.a1) < 1e-14
        assert abs(z.a2 - fp.holo.a2) < 1e-14
        r = R_FIELD.at(q)
        assert abs(r.a1 - fp.reeb.a1) < 1e-14
        assert abs(r.b1 - fp.reeb.b1) < 1e-14


def test_apply_to_scalar():
    from crlab.polyfields import W1, W1B
    u = (W1 + W1B) / 2  # Re w1
    assert sp.expand(Z_FIELD.apply_to(u) - sp.Symbol("w2b") / 2) == 0
