r"""Contact Hamiltonian vector fields, flows with tangent maps, Beltrami
coefficients and dilatations of flow maps.

A real function u on the sphere generates the contact field

    V = i (Zb u) Z - i (Z u) Zb + u R,

whose contact-form pairing recovers u.  Its flow g_s is integrated by
fixed-step RK4 on the ambient pair ODE, with the point renormalized onto
the sphere after every step; the 4x4 real tangent map is integrated
alongside from the Jacobian of V and projected to the tangent space only
on read-out.  V has exactly zero radial component for real u, so the only
sphere drift per step is the RK4 truncation, O(h^5).

The Beltrami coefficient of g_s against a deformed structure compares the
pullback quotient

    nu_s = <psi at g_s(q), Dg_s Zb> / <psi at g_s(q), Dg_s Z>

with the structure coefficient nu(q) through

    mu = (nu_s - nu) / (1 - conj(nu) nu_s),     |mu| < 1 required.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (ConfigurationError, DegeneracyError, DomainError,
                     OrientationError)
from .fields import ScalarField, apply_derivation, is_real_field
from .jets import Jet3
from .sphere import AmbientVector, FramePacket, SpherePoint, frame_at
from .structures import DeformationTensor, dilatation


def _zeta_of(w):
    return np.array([w[0], w[1], np.conj(w[0]), np.conj(w[1])], dtype=complex)


class ContactVectorField:
    """The contact field of a real Hamiltonian, with its ambient Jacobian."""

    def __init__(self, hamiltonian: ScalarField, check_points=None):
        self.hamiltonian = hamiltonian
        if check_points:
            if not is_real_field(hamiltonian, check_points):
                raise DomainError("Hamiltonian must be real-valued")

    def ambient_value(self, w: np.ndarray) -> np.ndarray:
        """(1,0) components of V at an ambient pair near the sphere."""
        jet = self.hamiltonian.jet(w, order=1)
        zeta = _zeta_of(w)
        u = jet.value
        g = apply_derivation("Zb", jet, zeta).value       # Zb u
        a1 = 1j * g * zeta[3] + 1j * u * zeta[0]
        a2 = -1j * g * zeta[2] + 1j * u * zeta[1]
        return np.array([a1, a2], dtype=complex)

    def at(self, q: SpherePoint) -> AmbientVector:
        a = self.ambient_value(q.pair)
        return AmbientVector.real_vector(a[0], a[1])

    def value_and_jacobian(self, w: np.ndarray):
        """V and the real 4x4 Jacobian dV/d(x1,y1,x2,y2) at w."""
        jet = self.hamiltonian.jet(w, order=2)
        zeta = _zeta_of(w)
        u = jet.value
        uj = jet.d1
        gj = apply_derivation("Zb", jet, zeta)
        g = gj.value
        a = np.array([1j * g * zeta[3] + 1j * u * zeta[0],
                      -1j * g * zeta[2] + 1j * u * zeta[1]], dtype=complex)
        # dA_i/dzeta_j; the extra delta terms come from the explicit zetas.
        J = np.zeros((2, 4), dtype=complex)
        for j in range(4):
            J[0, j] = 1j * gj.d1[j] * zeta[3] + 1j * uj[j] * zeta[0]
            J[1, j] = -1j * gj.d1[j] * zeta[2] + 1j * uj[j] * zeta[1]
        J[0, 0] += 1j * u
        J[0, 3] += 1j * g
        J[1, 1] += 1j * u
        J[1, 2] += -1j * g
        A = np.zeros((4, 4))
        for i in range(2):
            for j in range(2):
                dax = J[i, j] + J[i, j + 2]
                day = 1j * (J[i, j] - J[i, j + 2])
                A[2 * i, 2 * j] = dax.real
                A[2 * i, 2 * j + 1] = day.real
                A[2 * i + 1, 2 * j] = dax.imag
                A[2 * i + 1, 2 * j + 1] = day.imag
        return a, A


def hamiltonian_field(u: ScalarField, check_points=None) -> ContactVectorField:
    """Contact vector field i(Zb u)Z - i(Z u)Zb + u R of a real Hamiltonian."""
    return ContactVectorField(u, check_points=check_points)


def _to_real4(w: np.ndarray) -> np.ndarray:
    return np.array([w[0].real, w[0].imag, w[1].real, w[1].imag])


def _to_pair(v: np.ndarray) -> np.ndarray:
    return np.array([v[0] + 1j * v[1], v[2] + 1j * v[3]], dtype=complex)


class TangentMap:
    """Real-linear tangent map of a flow, applied through the ambient 4x4
    matrix with tangential projection at the image on read-out."""

    def __init__(self, matrix: np.ndarray, source: SpherePoint,
                 image: SpherePoint, project: bool = True):
        self.matrix = matrix
        self.source = source
        self.image = image
        self.project = project

    def _project(self, pair: np.ndarray) -> np.ndarray:
        w = self.image.pair
        radial = np.real(np.conj(w[0]) * pair[0] + np.conj(w[1]) * pair[1])
        return pair - radial * w

    def _push_real_pair(self, x: np.ndarray) -> np.ndarray:
        out = _to_pair(self.matrix @ _to_real4(x))
        return self._project(out) if self.project else out

    def push(self, v: AmbientVector) -> AmbientVector:
        """Push any complexified vector: split into real vectors r + i s."""
        a = np.array([v.a1, v.a2], dtype=complex)
        b = np.array([v.b1, v.b2], dtype=complex)
        r = (a + np.conj(b)) / 2.0
        s = (a - np.conj(b)) / 2.0j
        pr = self._push_real_pair(r)
        ps = self._push_real_pair(s)
        pa = pr + 1j * ps
        pb = np.conj(pr) + 1j * np.conj(ps)
        return AmbientVector(pa[0], pa[1], pb[0], pb[1])


@dataclass
class FlowResult:
    point: SpherePoint
    tangent: TangentMap


@dataclass
class FlowMap:
    """Time-s contact flow of a Hamiltonian field, point plus tangent map."""

    field: ContactVectorField
    steps_per_unit: int = 512
    s_max: float = 1.0
    min_steps: int = 4

    def __post_init__(self):
        if self.steps_per_unit < 16:
            raise ConfigurationError(
                "steps_per_unit must be at least 16 per unit time")

    def _nsteps(self, s: float) -> int:
        return max(self.min_steps, int(np.ceil(self.steps_per_unit * abs(s))))

    def evaluate(self, q: SpherePoint, s: float,
                 n_steps: int | None = None) -> FlowResult:
        if abs(s) > self.s_max + 1e-15:
            raise ConfigurationError(f"|s| = {abs(s)} exceeds s_max = {self.s_max}")
        w = q.pair
        M = np.eye(4)
        if s == 0.0:
            return FlowResult(q, TangentMap(M, q, q))
        n = n_steps if n_steps is not None else self._nsteps(s)
        h = s / n
        f = self.field.value_and_jacobian
        for _ in range(n):
            a1, A1 = f(w)
            k1w, k1M = a1, A1 @ M
            a2, A2 = f(w + 0.5 * h * k1w)
            k2w, k2M = a2, A2 @ (M + 0.5 * h * k1M)
            a3, A3 = f(w + 0.5 * h * k2w)
            k3w, k3M = a3, A3 @ (M + 0.5 * h * k2M)
            a4, A4 = f(w + h * k3w)
            k4w, k4M = a4, A4 @ (M + h * k3M)
            w = w + (h / 6.0) * (k1w + 2 * k2w + 2 * k3w + k4w)
            M = M + (h / 6.0) * (k1M + 2 * k2M + 2 * k3M + k4M)
            w = w / np.sqrt(abs(w[0]) ** 2 + abs(w[1]) ** 2)
        img = SpherePoint(w[0], w[1])
        return FlowResult(img, TangentMap(M, q, img))

    def point(self, q: SpherePoint, s: float) -> SpherePoint:
        return self.evaluate(q, s).point

    def raw_step_drift(self, q: SpherePoint, h: float) -> float:
        """| |w| - 1 | after a single un-renormalized RK4 step of size h."""
        w = q.pair
        f = self.field.value_and_jacobian
        k1, _ = f(w)
        k2, _ = f(w + 0.5 * h * k1)
        k3, _ = f(w + 0.5 * h * k2)
        k4, _ = f(w + h * k3)
        w = w + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return abs(np.sqrt(abs(w[0]) ** 2 + abs(w[1]) ** 2) - 1.0)


def integrate(flow: FlowMap, q: SpherePoint, s: float,
              n_steps: int | None = None) -> FlowResult:
    """Image point and tangent map of the time-s flow."""
    return flow.evaluate(q, s, n_steps=n_steps)


def pullback_quotient(flow_result: FlowResult, q: SpherePoint) -> complex:
    """nu_s at q: the psi-pairing quotient of the pushed frame vectors."""
    fp_img = frame_at(flow_result.point)
    holo = frame_at(q).holo
    d_holo = flow_result.tangent.push(holo)
    d_anti = flow_result.tangent.push(holo.conjugate())
    den = fp_img.psi(d_holo)
    if abs(den) < 1e-13:
        raise DegeneracyError("psi pairing of the pushed frame vanished")
    return fp_img.psi(d_anti) / den


def beltrami(flow: FlowMap, nu: DeformationTensor, q: SpherePoint,
             s: float, n_steps: int | None = None) -> complex:
    """Beltrami coefficient of the time-s flow map against the structure nu."""
    nu0 = nu.value(q)
    if abs(nu0) >= 1.0:
        raise OrientationError(f"|nu(q)| = {abs(nu0)} >= 1")
    res = flow.evaluate(q, s, n_steps=n_steps)
    nus = pullback_quotient(res, q)
    den = 1.0 - np.conj(nu0) * nus
    if abs(den) < 1e-13:
        raise DegeneracyError("Beltrami denominator 1 - conj(nu) nu_s vanished")
    mu = (nus - nu0) / den
    if abs(mu) >= 1.0:
        raise OrientationError(
            f"|mu| = {abs(mu)} >= 1: map left the quasiconformal regime")
    return complex(mu)


@dataclass
class DilatationResult:
    dilatation: float
    sup_mu: float
    argmax: SpherePoint


def max_dilatation(flow: FlowMap, nu: DeformationTensor, grid,
                   s: float) -> DilatationResult:
    """Grid supremum of the pointwise dilatation of the time-s flow map."""
    if not grid:
        raise DomainError("empty sampling grid")
    sup = -1.0
    argmax = None
    for q in grid:
        try:
            m = abs(beltrami(flow, nu, q, s))
        except (DegeneracyError, OrientationError) as exc:
            raise type(exc)(f"{exc} at grid point {q}") from exc
        if m > sup:
            sup, argmax = m, q
    return DilatationResult(dilatation(sup), sup, argmax)


def contact_defect(flow: FlowMap, q: SpherePoint, s: float,
                   n_steps: int) -> float:
    """max |<eta at g_s(q), Dg_s X>| over the contact basis at q."""
    res = flow.evaluate(q, s, n_steps=n_steps)
    fp = frame_at(res.point)
    x, y = frame_at(q).contact_basis()
    return max(abs(fp.eta(res.tangent.push(x))),
               abs(fp.eta(res.tangent.push(y))))


def equivariance_defect(flow: FlowMap, q: SpherePoint, phi: float,
                        s: float) -> float:
    """Distance between g_s(U_phi q) and U_phi(g_s q)."""
    left = flow.point(q.rotate(phi), s)
    right = flow.point(q, s).rotate(phi)
    return left.distance(right)
