import numpy as np
import pytest

from crlab.errors import ChartError, DomainError
from crlab.hopf import (BaseCurve, IdentityMap, RiemannSpherePoint,
                        RoundMetric, StretchedMetric, ZAxisRotation, cap_area,
                        fiber_angle, hemisphere_area, horizontal_lift,
                        lift_base_map, project, quotient_dilatation,
                        section_point, structure_equation_residual,
                        whole_sphere_area)
from crlab.sphere import SpherePoint, clifford_point, random_points

SQ2 = np.sqrt(2.0)


def test_project_examples():
    assert project(SpherePoint(1.0, 0.0)) == RiemannSpherePoint("south", 0j)
    p = project(SpherePoint(1 / SQ2, 1 / SQ2))
    assert p.chart == "south" and abs(p.coord - 1.0) < 1e-15
    p = project(SpherePoint(0.0, 1.0))
    assert p.chart == "north" and p.coord == 0j


def test_chart_transition():
    p = RiemannSpherePoint("south", 2.0 + 1.0j)
    q = p.in_chart("north")
    assert abs(q.coord - 1.0 / (2.0 + 1.0j)) < 1e-15
    assert p.distance(q) < 1e-12


def test_unit3_roundtrip():
    p = RiemannSpherePoint("south", 0.3 - 0.8j)
    n = p.to_unit3()
    assert abs(np.linalg.norm(n) - 1.0) < 1e-14
    q = RiemannSpherePoint.from_unit3(n)
    assert p.distance(q) < 1e-14


def test_section_is_a_section(rng):
    for q in random_points(20, rng):
        p = project(q)
        s = section_point(p)
        assert project(s).distance(p) < 1e-12


def test_areas():
    assert abs(whole_sphere_area("omega0") - 4 * np.pi) < 1e-8
    assert abs(cap_area(0j, 1.0, "south", "half_omega0") - np.pi) < 1e-8
    assert abs(hemisphere_area("spherical") - 2 * np.pi) < 1e-8
    # closed form for a centered disk: area(R) = 4 pi R^2/(1+R^2)
    for R in (0.5, 1.5):
        assert abs(cap_area(0j, R, "south", "omega0")
                   - 4 * np.pi * R * R / (1 + R * R)) < 1e-8


def test_structure_equation(rng):
    q = SpherePoint(1 / SQ2, 1 / SQ2)
    assert structure_equation_residual(q) < 1e-10
    worst = max(structure_equation_residual(p) for p in random_points(1000, rng))
    assert worst < 1e-9


def test_equator_loop_phase():
    loop = BaseCurve.circle(0j, 1.0)
    lr = horizontal_lift(loop, section_point(loop.start()), steps=10000)
    assert abs(lr.phase_mod_2pi - np.pi) < 1e-4
    assert lr.legendrian_defect < 1e-8
    assert lr.projection_defect < 1e-9
    # the unwrapped phase is -pi: the enclosed half-area is +pi
    assert abs(lr.phase + np.pi) < 1e-9


def test_constant_curve_lift():
    p = RiemannSpherePoint("south", 0.4 + 0.2j)
    curve = BaseCurve.great_arc(p, p)
    start = section_point(p).rotate(0.6)
    lr = horizontal_lift(curve, start, steps=64)
    assert lr.end().distance(start) < 1e-12
    assert abs(lr.phase) < 1e-12


def test_cap_phase_area_identity(rng):
    for _ in range(5):
        c = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        R = rng.uniform(0.2, 0.6)
        area = cap_area(c, R, "south", "half_omega0")
        cap = BaseCurve.circle(c, R)
        lr = horizontal_lift(cap, section_point(cap.start()), steps=4000)
        d = (lr.phase + area) % (2 * np.pi)
        assert min(d, 2 * np.pi - d) < 1e-3
        assert lr.legendrian_defect < 1e-8


def test_phase_additivity():
    c, R = 0.2 + 0.1j, 0.5
    one = BaseCurve.circle(c, R, turns=1.0)
    two = BaseCurve.circle(c, R, turns=2.0)
    s = section_point(one.start())
    p1 = horizontal_lift(one, s, steps=4000).phase
    p2 = horizontal_lift(two, s, steps=8000).phase
    assert abs(p2 - 2 * p1) < 1e-3


def test_lift_equivariance(rng):
    curve = BaseCurve.circle(0.3 + 0j, 0.4)
    start = section_point(curve.start())
    base = horizontal_lift(curve, start, steps=2000)
    for phi in (0.9, 2.4):
        shifted = horizontal_lift(curve, start.rotate(phi), steps=2000)
        for a, b in zip(base.points[::500], shifted.points[::500]):
            assert a.rotate(phi).distance(b) < 1e-9


def test_legendrian_defect_refines_at_fourth_order():
    curve = BaseCurve.circle(0.25 + 0.1j, 0.45)
    s = section_point(curve.start())
    d = [horizontal_lift(curve, s, steps=n).legendrian_defect
         for n in (125, 250)]
    assert np.log2(d[0] / d[1]) > 3.5


def test_lift_wrong_start_rejected():
    curve = BaseCurve.circle(0j, 1.0)
    bad = SpherePoint(1.0, 0.0)
    with pytest.raises(DomainError):
        horizontal_lift(curve, bad)


def test_fiber_angle():
    q = clifford_point(0.3, 1.0)
    assert abs(fiber_angle(q, q.rotate(0.8)) - 0.8) < 1e-13
    with pytest.raises(DomainError):
        fiber_angle(q, SpherePoint(1.0, 0.0))


def test_from_samples_roundtrip():
    ts = np.linspace(0.0, 1.0, 201)
    pts = [RiemannSpherePoint("south", 0.5 * np.exp(2j * np.pi * t))
           for t in ts]
    curve = BaseCurve.from_samples(ts, pts)
    mid = curve.segments[0].point(0.5)
    assert abs(mid.coord - 0.5 * np.exp(1j * np.pi)) < 1e-6


def test_lift_base_map_identity(rng):
    anchor = SpherePoint(1.0, 0.0)
    lift = lift_base_map(IdentityMap(), anchor, anchor, steps=512)
    via = RiemannSpherePoint("south", 0.45 - 0.35j)
    for q in random_points(4, rng):
        assert lift(q).distance(q) < 1e-5
        assert lift.path_independence_defect(q, via) < 1e-5
    assert lift.equivariance_defect(random_points(1, rng)[0], 1.3) < 1e-6


def test_lift_base_map_rotation(rng):
    alpha = 0.8
    anchor = SpherePoint(1.0, 0.0)
    image = SpherePoint(anchor.w1, np.exp(1j * alpha) * anchor.w2)
    lift = lift_base_map(ZAxisRotation(alpha), anchor, image, steps=512)
    for q in random_points(4, rng):
        expect = SpherePoint(q.w1, np.exp(1j * alpha) * q.w2)
        assert lift(q).distance(expect) < 1e-6
    assert lift.equivariance_defect(random_points(1, rng)[0], 0.7) < 1e-6


def test_lift_base_map_anchor_validation():
    anchor = SpherePoint(1.0, 0.0)
    with pytest.raises(DomainError):
        lift_base_map(ZAxisRotation(0.5), anchor,
                      clifford_point(0.1, 0.1))


def test_quotient_dilatation_values(family2):
    prof, _ = family2
    src, tgt = StretchedMetric(prof), RoundMetric()
    eq = RiemannSpherePoint("south", np.exp(0.3j))
    assert abs(quotient_dilatation(IdentityMap(), src, tgt, eq) - 4.0) < 1e-10
    pole = RiemannSpherePoint("south", 0.02 + 0.01j)
    assert abs(quotient_dilatation(IdentityMap(), src, tgt, pole) - 1.0) < 1e-12


def test_quotient_dilatation_lambda_value(family2):
    # at a latitude where the stretch is lam, the ratio is lam^2
    prof, _ = family2
    lam = 1.5
    from scipy.optimize import brentq
    th = brentq(lambda t: prof.at_theta(t) - lam, np.pi / 2, np.pi / 2 + 0.999)
    z = np.tan(th / 2.0)
    x = RiemannSpherePoint("south", z * np.exp(0.2j))
    got = quotient_dilatation(IdentityMap(), StretchedMetric(prof),
                              RoundMetric(), x)
    assert abs(got - lam * lam) < 1e-9


def test_metrics_share_area_density(family2):
    prof, _ = family2
    src, tgt = StretchedMetric(prof), RoundMetric()
    for z in (0.3 + 0.2j, 1.0 + 0j, 2.5j):
        p = RiemannSpherePoint("south", z)
        assert abs(src.area_density(p) - tgt.area_density(p)) < 1e-12


def test_metric_chart_consistency(family2):
    prof, _ = family2
    m = StretchedMetric(prof)
    p = RiemannSpherePoint("south", 1.2 + 0.4j)
    q = p.in_chart("north")
    # lengths of corresponding vectors agree: v in south -> dzeta = -v/z^2
    v = np.array([1.0, 0.5])
    z = p.coord
    fac = -1.0 / z ** 2
    vc = fac * complex(v[0], v[1])
    w = np.array([vc.real, vc.imag])
    ls = v @ m.gram(p) @ v
    ln = w @ m.gram(q) @ w
    assert abs(ls - ln) < 1e-12
