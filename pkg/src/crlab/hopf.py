r"""The quotient fibration of the 3-sphere: projection, horizontal lifts,
areas, equivariant lifting of base maps, and quotient dilatations.

The fibration is p(w1, w2) = w2/w1 onto the Riemann sphere, handled in a
two-chart atlas: the south chart carries z = w2/w1 (|w1| >= |w2|), the
north chart zeta = w1/w2 = 1/z.  The round area form is
omega0 = 4 dx dy / (1 + |z|^2)^2 in either chart, total 4 pi, and the
two-form d eta of the sphere is the pullback of half of it.

A horizontal lift follows a base curve through the contact planes.  With
the local sections

    south: (1, z) / sqrt(1 + |z|^2),    north: (zeta, 1) / sqrt(1 + |zeta|^2),

the fiber angle solves  phi' = -<eta, (U_phi)_* section'(t)>, phi(0) = 0,
integrated here by fixed-step RK4.  For a closed loop the accumulated
phase equals minus the enclosed half-omega0 area mod 2 pi; the sign
convention is fixed by the positively traversed unit circle, whose lift
gains phase -pi against an enclosed area of +pi.

Lifting a base map F:  f(q) transports the anchor along the lifted image
of a connecting great-circle arc and then corrects the fiber position by
appending a small circular loop whose enclosed area realizes the required
phase.  The construction is fiber-equivariant by design; its
path-independence defect measures the failure of F to preserve area.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as _sciint
from scipy import optimize as _sciopt

from .errors import (ChartError, DegeneracyError, DomainError,
                     PathConstructionError, ResamplingError, ToleranceError)
from .sphere import AmbientVector, SpherePoint, frame_at
from .structures import LambdaProfile

SOUTH, NORTH = "south", "north"


@dataclass(frozen=True)
class RiemannSpherePoint:
    """A point of the quotient sphere in one of the two charts."""

    chart: str
    coord: complex

    def __post_init__(self):
        if self.chart not in (SOUTH, NORTH):
            raise ChartError(f"unknown chart {self.chart!r}")

    def to_unit3(self) -> np.ndarray:
        c = self.coord
        d = 1.0 + abs(c) ** 2
        if self.chart == SOUTH:
            return np.array([2 * c.real, 2 * c.imag, 1 - abs(c) ** 2]) / d
        return np.array([2 * c.real, -2 * c.imag, abs(c) ** 2 - 1]) / d

    @staticmethod
    def from_unit3(n: np.ndarray, prefer: str | None = None
                   ) -> "RiemannSpherePoint":
        chart = prefer if prefer is not None else (SOUTH if n[2] >= 0 else NORTH)
        if chart == SOUTH:
            if 1 + n[2] < 1e-14:
                raise ChartError("south chart degenerate at n3 = -1")
            return RiemannSpherePoint(SOUTH, complex(n[0], n[1]) / (1 + n[2]))
        if 1 - n[2] < 1e-14:
            raise ChartError("north chart degenerate at n3 = +1")
        return RiemannSpherePoint(NORTH, complex(n[0], -n[1]) / (1 - n[2]))

    def in_chart(self, chart: str) -> "RiemannSpherePoint":
        if chart == self.chart:
            return self
        if self.coord == 0:
            raise ChartError("chart switch at the chart origin")
        return RiemannSpherePoint(chart, 1.0 / self.coord)

    def distance(self, other: "RiemannSpherePoint") -> float:
        return float(np.linalg.norm(self.to_unit3() - other.to_unit3()))


def project(q: SpherePoint) -> RiemannSpherePoint:
    """Fibration image of a sphere point, chart chosen by magnitude."""
    if abs(q.w1) >= abs(q.w2):
        return RiemannSpherePoint(SOUTH, q.w2 / q.w1)
    return RiemannSpherePoint(NORTH, q.w1 / q.w2)


def section_point(p: RiemannSpherePoint) -> SpherePoint:
    """The local section of the fibration in p's chart."""
    c = p.coord
    n = np.sqrt(1.0 + abs(c) ** 2)
    if p.chart == SOUTH:
        return SpherePoint(1.0 / n, c / n)
    return SpherePoint(c / n, 1.0 / n)


def _section_pair_and_velocity(chart: str, z: complex, zdot: complex):
    """Section point (raw pair) and its velocity along a chart curve."""
    nsq = 1.0 + abs(z) ** 2
    ninv = nsq ** -0.5
    rad = np.real(np.conj(z) * zdot)           # d/dt of |z|^2 / 2
    dninv = -(ninv ** 3) * rad
    if chart == SOUTH:
        pair = np.array([ninv, z * ninv], dtype=complex)
        vel = np.array([dninv, zdot * ninv + z * dninv], dtype=complex)
    else:
        pair = np.array([z * ninv, ninv], dtype=complex)
        vel = np.array([zdot * ninv + z * dninv, dninv], dtype=complex)
    return pair, vel


def fiber_angle(frm: SpherePoint, to: SpherePoint,
                tol: float = 1e-6) -> float:
    """Angle phi with to = U_phi(frm); both points must share a fiber.

    On a common fiber the Hermitian inner product has unit modulus; the
    tolerance absorbs lift integration error.
    """
    inner = to.w1 * np.conj(frm.w1) + to.w2 * np.conj(frm.w2)
    if abs(abs(inner) - 1.0) > tol:
        raise DomainError("points do not lie on a common fiber")
    return float(np.angle(inner))


# ----------------------------------------------------------------------
# Base curves
# ----------------------------------------------------------------------

class CurveSegment:
    """One chart-confined piece of a base curve with an analytic evaluator."""

    def __init__(self, chart: str, z_fn, dz_fn, t0: float, t1: float):
        self.chart = chart
        self.z_fn = z_fn
        self.dz_fn = dz_fn
        self.t0 = float(t0)
        self.t1 = float(t1)

    def point(self, t: float) -> RiemannSpherePoint:
        return RiemannSpherePoint(self.chart, complex(self.z_fn(t)))

    def velocity(self, t: float) -> complex:
        return complex(self.dz_fn(t))


@dataclass
class BaseCurve:
    """Ordered chart segments with an increasing parameter; optionally closed."""

    segments: list
    closed: bool = False

    @property
    def t0(self) -> float:
        return self.segments[0].t0

    @property
    def t1(self) -> float:
        return self.segments[-1].t1

    def start(self) -> RiemannSpherePoint:
        return self.segments[0].point(self.segments[0].t0)

    def end(self) -> RiemannSpherePoint:
        return self.segments[-1].point(self.segments[-1].t1)

    def samples(self, n: int) -> list[tuple[float, RiemannSpherePoint]]:
        out = []
        for seg in self.segments:
            k = max(2, int(round(n * (seg.t1 - seg.t0)
                                 / max(self.t1 - self.t0, 1e-300))))
            for t in np.linspace(seg.t0, seg.t1, k):
                out.append((float(t), seg.point(t)))
        return out

    @staticmethod
    def circle(center: complex, radius: float, chart: str = SOUTH,
               turns: float = 1.0, clockwise: bool = False,
               start_angle: float = 0.0) -> "BaseCurve":
        if radius <= 0:
            raise DomainError("circle radius must be positive")
        sgn = -1.0 if clockwise else 1.0
        T = 2.0 * np.pi * abs(turns)

        def z_fn(t):
            return center + radius * np.exp(1j * (start_angle + sgn * t))

        def dz_fn(t):
            return 1j * sgn * radius * np.exp(1j * (start_angle + sgn * t))

        closed = abs(abs(turns) - round(abs(turns))) < 1e-12
        return BaseCurve([CurveSegment(chart, z_fn, dz_fn, 0.0, T)],
                         closed=closed)

    @staticmethod
    def great_arc(p0: RiemannSpherePoint, p1: RiemannSpherePoint,
                  t0: float = 0.0, t1: float = 1.0) -> "BaseCurve":
        """Great-circle arc, split into chart-confined segments."""
        n0, n1 = p0.to_unit3(), p1.to_unit3()
        c = float(np.clip(np.dot(n0, n1), -1.0, 1.0))
        omega = np.arccos(c)
        if omega < 1e-13:
            chart = p0.chart
            z0 = p0.coord

            def z_fn(t, z0=z0):
                return z0

            def dz_fn(t):
                return 0j

            return BaseCurve([CurveSegment(chart, z_fn, dz_fn, t0, t1)])
        if np.pi - omega < 1e-9:
            raise DomainError("great arc between antipodal points is ambiguous")
        so = np.sin(omega)

        def nvec(t):
            s = (t - t0) / (t1 - t0)
            return (np.sin((1 - s) * omega) * n0 + np.sin(s * omega) * n1) / so

        def ndot(t):
            s = (t - t0) / (t1 - t0)
            ds = 1.0 / (t1 - t0)
            return ((-np.cos((1 - s) * omega) * n0
                     + np.cos(s * omega) * n1) * omega * ds / so)

        def chart_fns(chart):
            if chart == SOUTH:
                def z_fn(t):
                    n = nvec(t)
                    return complex(n[0], n[1]) / (1 + n[2])

                def dz_fn(t):
                    n, nd = nvec(t), ndot(t)
                    return (complex(nd[0], nd[1]) / (1 + n[2])
                            - complex(n[0], n[1]) * nd[2] / (1 + n[2]) ** 2)
            else:
                def z_fn(t):
                    n = nvec(t)
                    return complex(n[0], -n[1]) / (1 - n[2])

                def dz_fn(t):
                    n, nd = nvec(t), ndot(t)
                    return (complex(nd[0], -nd[1]) / (1 - n[2])
                            + complex(n[0], -n[1]) * nd[2] / (1 - n[2]) ** 2)
            return z_fn, dz_fn

        # split [t0, t1] into runs of constant preferred chart
        ts = np.linspace(t0, t1, 129)
        prefs = [SOUTH if nvec(t)[2] >= 0 else NORTH for t in ts]
        cuts = [t0]
        for i in range(1, len(ts)):
            if prefs[i] != prefs[i - 1]:
                lo, hi = ts[i - 1], ts[i]
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    if (nvec(mid)[2] >= 0) == (prefs[i - 1] == SOUTH):
                        lo = mid
                    else:
                        hi = mid
                cuts.append(0.5 * (lo + hi))
        cuts.append(t1)
        segments = []
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b - a < 1e-13:
                continue
            chart = SOUTH if nvec(0.5 * (a + b))[2] >= 0 else NORTH
            z_fn, dz_fn = chart_fns(chart)
            segments.append(CurveSegment(chart, z_fn, dz_fn, a, b))
        if not segments:
            raise ResamplingError("degenerate great arc")
        return BaseCurve(segments)

    @staticmethod
    def from_samples(params, points: list[RiemannSpherePoint],
                     closed: bool = False) -> "BaseCurve":
        """Piecewise-cubic interpolation of sampled chart coordinates.

        Consecutive samples must share a chart; velocities come from
        centered differences, so lifts of sampled curves are limited by the
        sampling density.
        """
        params = [float(t) for t in params]
        if any(b <= a for a, b in zip(params[:-1], params[1:])):
            raise DomainError("parameter values must be strictly increasing")
        if len(points) != len(params) or len(points) < 2:
            raise DomainError("need matching params and at least two samples")
        segs = []
        i = 0
        while i < len(points) - 1:
            j = i
            chart = points[i].chart
            while j + 1 < len(points) and points[j + 1].chart == chart:
                j += 1
            if j == i:
                raise ResamplingError(
                    "isolated sample in its chart; consecutive samples must "
                    "share a chart")
            tt = np.array(params[i:j + 1])
            zz = np.array([p.coord for p in points[i:j + 1]])
            dz = np.gradient(zz, tt)

            def make(tt, zz, dz):
                def z_fn(t):
                    k = int(np.clip(np.searchsorted(tt, t) - 1, 0, len(tt) - 2))
                    h = tt[k + 1] - tt[k]
                    s = (t - tt[k]) / h
                    h00 = 2 * s ** 3 - 3 * s ** 2 + 1
                    h10 = s ** 3 - 2 * s ** 2 + s
                    h01 = -2 * s ** 3 + 3 * s ** 2
                    h11 = s ** 3 - s ** 2
                    return (h00 * zz[k] + h10 * h * dz[k]
                            + h01 * zz[k + 1] + h11 * h * dz[k + 1])

                def dz_fn(t):
                    k = int(np.clip(np.searchsorted(tt, t) - 1, 0, len(tt) - 2))
                    h = tt[k + 1] - tt[k]
                    s = (t - tt[k]) / h
                    d00 = (6 * s ** 2 - 6 * s) / h
                    d10 = 3 * s ** 2 - 4 * s + 1
                    d01 = (-6 * s ** 2 + 6 * s) / h
                    d11 = 3 * s ** 2 - 2 * s
                    return (d00 * zz[k] + d10 * dz[k]
                            + d01 * zz[k + 1] + d11 * dz[k + 1])

                return z_fn, dz_fn

            z_fn, dz_fn = make(tt, zz, dz)
            segs.append(CurveSegment(chart, z_fn, dz_fn, tt[0], tt[-1]))
            i = j
        return BaseCurve(segs, closed=closed)

    def transformed(self, base_map) -> "BaseCurve":
        """Image curve under a base map with derivative evaluator."""
        segs = []
        for seg in self.segments:
            out_chart = base_map.apply(seg.point(seg.t0)).chart

            def z_fn(t, seg=seg, out_chart=out_chart):
                return base_map.apply(seg.point(t)).in_chart(out_chart).coord

            def dz_fn(t, seg=seg, out_chart=out_chart):
                p = seg.point(t)
                fz, fzb = base_map.d_apply(p, out_chart)
                zd = seg.velocity(t)
                return fz * zd + fzb * np.conj(zd)

            segs.append(CurveSegment(out_chart, z_fn, dz_fn, seg.t0, seg.t1))
        return BaseCurve(segs, closed=self.closed)

    def reversed(self) -> "BaseCurve":
        segs = []
        T0, T1 = self.t0, self.t1
        for seg in reversed(self.segments):
            def z_fn(t, seg=seg):
                return seg.z_fn(T0 + T1 - t)

            def dz_fn(t, seg=seg):
                return -seg.dz_fn(T0 + T1 - t)

            segs.append(CurveSegment(seg.chart, z_fn, dz_fn,
                                     T0 + T1 - seg.t1, T0 + T1 - seg.t0))
        return BaseCurve(segs, closed=self.closed)


# ----------------------------------------------------------------------
# Horizontal lifting
# ----------------------------------------------------------------------

@dataclass
class LiftResult:
    times: np.ndarray
    points: list
    phases: np.ndarray           # unwrapped fiber angle at every node
    phase: float                 # unwrapped fiber angle relative to the start
    legendrian_defect: float
    projection_defect: float

    @property
    def phase_mod_2pi(self) -> float:
        return float(np.mod(self.phase, 2.0 * np.pi))

    def end(self) -> SpherePoint:
        return self.points[-1]


def _phase_rhs(chart: str, z: complex, zdot: complex, phi: float) -> float:
    """-<eta at U_phi(section), (U_phi)_* section'>."""
    pair, vel = _section_pair_and_velocity(chart, z, zdot)
    rot = np.exp(1j * phi)
    pr = rot * pair
    vr = rot * vel
    eta = -np.imag(pr[0] * np.conj(vr[0]) + pr[1] * np.conj(vr[1]))
    return float(-eta)


def horizontal_lift(curve: BaseCurve, start: SpherePoint,
                    steps: int = 2048) -> LiftResult:
    """Lift of a base curve through the contact planes, from a fiber point.

    The fiber-angle ODE is integrated per chart segment by RK4 with
    ``steps`` steps spread over the whole parameter range; the lift point
    is reconstructed as U_phi(section).  The Legendrian defect reported is
    the sup of |<eta, lift'>| with the velocity taken by fourth-order
    differences of the stored samples.
    """
    p_start = project(start)
    if p_start.distance(curve.start()) > 1e-9:
        raise DomainError("start point does not sit over the curve's origin")

    total_len = curve.t1 - curve.t0
    current = start
    unwrapped = 0.0
    times = []
    points = []
    phases = []
    seg_nodes = []

    for seg in curve.segments:
        n = max(8, int(round(steps * (seg.t1 - seg.t0) / max(total_len, 1e-300))))
        h = (seg.t1 - seg.t0) / n
        sec0 = section_point(seg.point(seg.t0))
        phi0 = fiber_angle(sec0, current)
        # keep the unwrapped angle continuous across chart switches
        while phi0 - unwrapped > np.pi:
            phi0 -= 2.0 * np.pi
        while phi0 - unwrapped < -np.pi:
            phi0 += 2.0 * np.pi
        offset = unwrapped - phi0
        phi = phi0
        node_ts = [seg.t0 + k * h for k in range(n + 1)]
        node_phis = [phi]
        for k in range(n):
            t = node_ts[k]

            def f(tt, pp):
                return _phase_rhs(seg.chart, complex(seg.z_fn(tt)),
                                  complex(seg.dz_fn(tt)), pp)

            k1 = f(t, phi)
            k2 = f(t + h / 2, phi + h / 2 * k1)
            k3 = f(t + h / 2, phi + h / 2 * k2)
            k4 = f(t + h, phi + h * k3)
            phi += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            node_phis.append(phi)
        for t, ph in zip(node_ts, node_phis):
            pair, _ = _section_pair_and_velocity(seg.chart,
                                                 complex(seg.z_fn(t)), 0j)
            rot = np.exp(1j * ph)
            pt = SpherePoint(rot * pair[0], rot * pair[1])
            times.append(t)
            points.append(pt)
            phases.append(offset + ph)
        current = points[-1]
        unwrapped = offset + phi
        seg_nodes.append((node_ts, seg))

    # defects
    leg = 0.0
    proj = 0.0
    idx = 0
    for node_ts, seg in seg_nodes:
        n = len(node_ts) - 1
        h = node_ts[1] - node_ts[0]
        for k in range(n + 1):
            pt = points[idx + k]
            proj = max(proj, project(pt).distance(seg.point(node_ts[k])))
            if 2 <= k <= n - 2:
                w = [points[idx + k - 2], points[idx + k - 1],
                     points[idx + k + 1], points[idx + k + 2]]
                d1 = (w[0].w1 - 8 * w[1].w1 + 8 * w[2].w1 - w[3].w1) / (12 * h)
                d2 = (w[0].w2 - 8 * w[1].w2 + 8 * w[2].w2 - w[3].w2) / (12 * h)
                v = AmbientVector.real_vector(d1, d2)
                leg = max(leg, abs(frame_at(pt).eta(v)))
        idx += n + 1

    return LiftResult(np.array(times), points, np.array(phases),
                      float(unwrapped), leg, proj)


# ----------------------------------------------------------------------
# Areas
# ----------------------------------------------------------------------

_FORM_FACTORS = {"omega0": 1.0, "half_omega0": 0.5, "spherical": 1.0}


def cap_area(center: complex, radius: float, chart: str = SOUTH,
             form: str = "half_omega0", tol: float = 1e-11) -> float:
    """Area of a chart disk under the chosen form, by adaptive quadrature.

    The "spherical" form sin(theta) dtheta dphi equals omega0 expressed in
    chart coordinates, so both share a density.
    """
    if form not in _FORM_FACTORS:
        raise DomainError(f"unknown area form {form!r}")
    fac = _FORM_FACTORS[form]

    def dens(rho, t):
        z = center + rho * np.exp(1j * t)
        return fac * 4.0 * rho / (1.0 + abs(z) ** 2) ** 2

    val, err = _sciint.dblquad(dens, 0.0, 2.0 * np.pi, 0.0, radius,
                               epsabs=tol, epsrel=tol)
    if err > max(100 * tol, 1e-8):
        raise ToleranceError(f"area quadrature error {err} too large")
    return float(val)


def whole_sphere_area(form: str = "omega0") -> float:
    """Total area: the two closed unit chart disks tile the sphere."""
    return (cap_area(0j, 1.0, SOUTH, form) + cap_area(0j, 1.0, NORTH, form))


def hemisphere_area(form: str = "spherical") -> float:
    return cap_area(0j, 1.0, SOUTH, form)


# ----------------------------------------------------------------------
# Structure equation
# ----------------------------------------------------------------------

def _dproject(q: SpherePoint, v: AmbientVector, chart: str) -> complex:
    """Chart-coordinate pairing <d(chart coord), v> of the projection."""
    w1, w2 = q.w1, q.w2
    if chart == SOUTH:
        if abs(w1) < 1e-12:
            raise ChartError("projection derivative singular: w1 = 0")
        return v.a2 / w1 - (w2 / w1 ** 2) * v.a1
    if abs(w2) < 1e-12:
        raise ChartError("projection derivative singular: w2 = 0")
    return v.a1 / w2 - (w1 / w2 ** 2) * v.a2


def structure_equation_residual(q: SpherePoint) -> float:
    """|<d eta, X ^ Y> - (1/2) omega0(Dp X, Dp Y)| for the contact basis."""
    fp = frame_at(q)
    x, y = fp.contact_basis()
    lhs = fp.deta(x, y)
    chart = SOUTH if abs(q.w1) >= abs(q.w2) else NORTH
    z = (q.w2 / q.w1) if chart == SOUTH else (q.w1 / q.w2)
    zx = _dproject(q, x, chart)
    zy = _dproject(q, y, chart)
    omega = -4.0 * np.imag(zx * np.conj(zy)) / (1.0 + abs(z) ** 2) ** 2
    return float(abs(lhs - 0.5 * omega))


# ----------------------------------------------------------------------
# Base maps and the equivariant lift
# ----------------------------------------------------------------------

class BaseMap:
    """A C1 self-map of the base sphere with a derivative evaluator."""

    def apply(self, p: RiemannSpherePoint) -> RiemannSpherePoint:
        raise NotImplementedError

    def d_apply(self, p: RiemannSpherePoint, out_chart: str
                ) -> tuple[complex, complex]:
        """(dF/dz, dF/dzb) at p, reading p in its own chart and the image
        in ``out_chart``."""
        raise NotImplementedError


class IdentityMap(BaseMap):
    def apply(self, p):
        return p

    def d_apply(self, p, out_chart):
        if out_chart == p.chart:
            return 1.0 + 0j, 0j
        return -1.0 / p.coord ** 2, 0j


class ZAxisRotation(BaseMap):
    """Rotation about the poles: z -> e^{i alpha} z in the south chart."""

    def __init__(self, alpha: float):
        self.alpha = float(alpha)

    def _factor(self, chart):
        return np.exp(1j * self.alpha) if chart == SOUTH else np.exp(-1j * self.alpha)

    def apply(self, p):
        return RiemannSpherePoint(p.chart, self._factor(p.chart) * p.coord)

    def d_apply(self, p, out_chart):
        f = self._factor(p.chart)
        if out_chart == p.chart:
            return f, 0j
        return -f / (f * p.coord) ** 2, 0j


class EquivariantLift:
    """The lift of a base map, anchored at one fiber point pair."""

    def __init__(self, base_map: BaseMap, anchor_source: SpherePoint,
                 anchor_image: SpherePoint, steps: int = 2048,
                 max_loop_area: float = 1.5):
        expected = base_map.apply(project(anchor_source))
        if project(anchor_image).distance(expected) > 1e-9:
            raise DomainError("anchor image does not sit over F(p(anchor))")
        self.base_map = base_map
        self.anchor_source = anchor_source
        self.anchor_image = anchor_image
        self.steps = steps
        self.max_loop_area = max_loop_area

    def _correction_loop(self, at: RiemannSpherePoint, delta: float
                         ) -> BaseCurve | None:
        """Circle(s) through ``at`` whose lift shifts the fiber by delta."""
        delta = float(np.mod(delta, 2.0 * np.pi))
        if delta < 1e-12 or 2.0 * np.pi - delta < 1e-12:
            return None
        ccw_area = 2.0 * np.pi - delta        # lift phase = -area (ccw)
        cw_area = delta                        # lift phase = +area (cw)
        clockwise = cw_area <= ccw_area
        area = cw_area if clockwise else ccw_area
        loops = max(1, int(np.ceil(area / self.max_loop_area)))
        per_loop = area / loops

        z_e = at.coord
        u = z_e / abs(z_e) if abs(z_e) > 1e-9 else 1.0 + 0j

        def area_of(R):
            return cap_area(z_e - R * u, R, at.chart, "half_omega0")

        R_hi = 1.0
        while area_of(R_hi) < per_loop:
            R_hi *= 2.0
            if R_hi > 64.0:
                raise PathConstructionError(
                    f"loop area {per_loop} unrealizable near {z_e}")
        R = _sciopt.brentq(lambda r: area_of(r) - per_loop, 1e-9, R_hi,
                           xtol=1e-13, rtol=1e-14)
        center = z_e - R * u
        start_angle = float(np.angle(z_e - center))
        return BaseCurve.circle(center, R, chart=at.chart, turns=float(loops),
                                clockwise=clockwise, start_angle=start_angle)

    def __call__(self, q: SpherePoint,
                 via: RiemannSpherePoint | None = None) -> SpherePoint:
        p0 = project(self.anchor_source)
        p1 = project(q)
        if via is None:
            if p0.distance(p1) < 1e-13:
                path = None
            else:
                path = BaseCurve.great_arc(p0, p1)
        else:
            a = BaseCurve.great_arc(p0, via)
            b = BaseCurve.great_arc(via, p1, t0=1.0, t1=2.0)
            path = BaseCurve(a.segments + b.segments)

        if path is None:
            transported = self.anchor_source
            image_pt = self.anchor_image
        else:
            transported = horizontal_lift(path, self.anchor_source,
                                          steps=self.steps).end()
            f_path = path.transformed(self.base_map)
            image_pt = horizontal_lift(f_path, self.anchor_image,
                                       steps=self.steps).end()

        delta = fiber_angle(transported, q)
        loop = self._correction_loop(project(image_pt), delta)
        if loop is not None:
            image_pt = horizontal_lift(loop, image_pt, steps=self.steps).end()
        return image_pt

    def path_independence_defect(self, q: SpherePoint,
                                 via: RiemannSpherePoint) -> float:
        return self(q).distance(self(q, via=via))

    def equivariance_defect(self, q: SpherePoint, phi: float) -> float:
        return self(q.rotate(phi)).distance(self(q).rotate(phi))


def lift_base_map(base_map: BaseMap, anchor_source: SpherePoint,
                  anchor_image: SpherePoint, steps: int = 2048
                  ) -> EquivariantLift:
    """Equivariant lift of a base map from one anchored fiber value."""
    return EquivariantLift(base_map, anchor_source, anchor_image, steps=steps)


# ----------------------------------------------------------------------
# Metrics on the base and quotient dilatation
# ----------------------------------------------------------------------

class MetricOnS2:
    """Riemannian metric on the base, evaluated as a chart Gram matrix."""

    def gram(self, p: RiemannSpherePoint) -> np.ndarray:
        raise NotImplementedError

    def area_density(self, p: RiemannSpherePoint) -> float:
        g = self.gram(p)
        return float(np.sqrt(max(np.linalg.det(g), 0.0)))


class RoundMetric(MetricOnS2):
    """The round metric 2|dz|/(1 + |z|^2); area form omega0."""

    def gram(self, p):
        f = 2.0 / (1.0 + abs(p.coord) ** 2)
        return np.diag([f * f, f * f])


class StretchedMetric(MetricOnS2):
    """Meridian stretch by lambda, parallel shrink by 1/lambda.

    Shares the round area form; in a chart it reads
    E |dz + kappa (z/zb) dzb|^2 with kappa = (lambda^2-1)/(lambda^2+1) and
    E = (lambda^2+1)^2 / (lambda^2 (1+|z|^2)^2), the same formula in either
    chart.
    """

    def __init__(self, profile: LambdaProfile):
        self.profile = profile

    def _lambda_at(self, p: RiemannSpherePoint) -> float:
        az = abs(p.coord)
        theta = 2.0 * np.arctan(az) if p.chart == SOUTH \
            else np.pi - 2.0 * np.arctan(az)
        return self.profile.at_theta(theta)

    def gram(self, p):
        lam = self._lambda_at(p)
        z = p.coord
        kappa = (lam * lam - 1.0) / (lam * lam + 1.0)
        E = (lam * lam + 1.0) ** 2 / (lam * lam * (1.0 + abs(z) ** 2) ** 2)
        if kappa != 0.0 and abs(z) < 1e-14:
            raise ChartError("stretched metric needs z != 0 where lambda > 1")
        m = z / np.conj(z) if abs(z) > 0 else 0j

        def bil(v, w):
            return E * np.real((v + kappa * m * np.conj(v))
                               * np.conj(w + kappa * m * np.conj(w)))

        g = np.empty((2, 2))
        g[0, 0] = bil(1.0, 1.0)
        g[0, 1] = g[1, 0] = bil(1.0, 1j)
        g[1, 1] = bil(1j, 1j)
        return g


def quotient_dilatation(base_map: BaseMap, source: MetricOnS2,
                        target: MetricOnS2, x: RiemannSpherePoint) -> float:
    """Ratio of extreme singular values of DF measured in the two metrics."""
    y = base_map.apply(x)
    fz, fzb = base_map.d_apply(x, y.chart)
    J = np.empty((2, 2))
    cx = fz + fzb
    cy = 1j * (fz - fzb)
    J[0, 0], J[0, 1] = cx.real, cy.real
    J[1, 0], J[1, 1] = cx.imag, cy.imag
    if abs(np.linalg.det(J)) < 1e-14:
        raise DegeneracyError("singular differential of the base map")
    gs = source.gram(x)
    gt = target.gram(y)
    m = np.linalg.solve(gs, J.T @ gt @ J)
    ev = np.linalg.eigvals(m).real
    ev = np.sort(np.abs(ev))
    if ev[0] <= 0:
        raise DegeneracyError("degenerate metric pullback")
    return float(np.sqrt(ev[1] / ev[0]))
