r"""Points, tangent vectors and the standard contact frame on the unit 3-sphere.

The sphere is S3 = {(w1, w2) in C^2 : |w1|^2 + |w2|^2 = 1}.  Its contact
form, characteristic (Reeb) field and holomorphic frame are

    eta  = -Im(w1 dw1b + w2 dw2b)
    R    = -2 Im(w1 d/dw1 + w2 d/dw2)        (generator of w -> e^{i phi} w)
    Z    = w2b d/dw1 - w1b d/dw2             ((1,0) frame field)
    psi  = w2 dw1 - w1 dw2                   ((1,0) coframe)

with `b` marking complex conjugation.  {Z, Zb, R} is dual to
{psi, psib, eta}.

Representation.  A tangent vector is stored by the coefficients of the
derivation it defines,

    a1 d/dw1 + a2 d/dw2 + b1 d/dw1b + b2 d/dw2b,

so a *real* vector has b = conj(a), a (1,0) vector has b = 0 and a (0,1)
vector has a = 0.  Forms pair against (a, b) by plain linear algebra and
the two-form

    d eta = i (dw1 ^ dw1b + dw2 ^ dw2b)

extends to complexified arguments bilinearly.  With this convention
<d eta, Z ^ Zb> = i everywhere, which fixes the sign left open by the
orientation requirement <d eta, X ^ J0 X> > 0 for real X in the contact
plane (the latter evaluates to the constant 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SPHERE_TOL = 1e-12


@dataclass(frozen=True)
class SpherePoint:
    """A point of S3 as a unit pair of complex coordinates."""

    w1: complex
    w2: complex

    def __post_init__(self):
        n = abs(self.w1) ** 2 + abs(self.w2) ** 2
        if abs(n - 1.0) > 1e-9:
            raise DomainError(f"point not on the unit sphere: |w|^2 = {n!r}")

    @property
    def pair(self) -> np.ndarray:
        return np.array([self.w1, self.w2], dtype=complex)

    def rotate(self, phi: float) -> "SpherePoint":
        """Image under the circle action w -> e^{i phi} w."""
        f = complex(np.cos(phi), np.sin(phi))
        return SpherePoint(f * self.w1, f * self.w2)

    def distance(self, other: "SpherePoint") -> float:
        """Ambient chordal distance in C^2."""
        return float(np.hypot(abs(self.w1 - other.w1), abs(self.w2 - other.w2)))

    def on_sphere_residual(self) -> float:
        return abs(abs(self.w1) ** 2 + abs(self.w2) ** 2 - 1.0)


def normalize(v1: complex, v2: complex) -> SpherePoint:
    """Scale a nonzero pair of complex numbers onto the sphere."""
    n = float(np.hypot(abs(v1), abs(v2)))
    if n == 0.0:
        raise DomainError("cannot normalize the zero vector")
    return SpherePoint(v1 / n, v2 / n)


def project_to_sphere(w: np.ndarray) -> np.ndarray:
    """Radial projection of an ambient pair onto the sphere (raw array)."""
    n = np.sqrt(abs(w[0]) ** 2 + abs(w[1]) ** 2)
    if n == 0.0:
        raise DomainError("cannot project the zero vector")
    return w / n


@dataclass(frozen=True)
class AmbientVector:
    """A complexified tangent vector of C^2 at a point.

    ``a1, a2`` are the d/dw coefficients, ``b1, b2`` the d/dwb ones.  Use
    the constructors: `real_vector` (b = conj a), `holomorphic` (b = 0) and
    `antiholomorphic` (a = 0).
    """

    a1: complex
    a2: complex
    b1: complex
    b2: complex

    @staticmethod
    def real_vector(a1: complex, a2: complex) -> "AmbientVector":
        return AmbientVector(a1, a2, np.conj(a1), np.conj(a2))

    @staticmethod
    def holomorphic(a1: complex, a2: complex) -> "AmbientVector":
        return AmbientVector(a1, a2, 0j, 0j)

    @staticmethod
    def antiholomorphic(b1: complex, b2: complex) -> "AmbientVector":
        return AmbientVector(0j, 0j, b1, b2)

    def conjugate(self) -> "AmbientVector":
        return AmbientVector(np.conj(self.b1), np.conj(self.b2),
                             np.conj(self.a1), np.conj(self.a2))

    def __add__(self, other: "AmbientVector") -> "AmbientVector":
        return AmbientVector(self.a1 + other.a1, self.a2 + other.a2,
                             self.b1 + other.b1, self.b2 + other.b2)

    def __sub__(self, other: "AmbientVector") -> "AmbientVector":
        return AmbientVector(self.a1 - other.a1, self.a2 - other.a2,
                             self.b1 - other.b1, self.b2 - other.b2)

    def scale(self, c: complex) -> "AmbientVector":
        """Complex-linear scaling of the derivation."""
        return AmbientVector(c * self.a1, c * self.a2, c * self.b1, c * self.b2)

    def norm(self) -> float:
        return float(np.sqrt(abs(self.a1) ** 2 + abs(self.a2) ** 2
                             + abs(self.b1) ** 2 + abs(self.b2) ** 2))

    def is_real(self, tol: float = 1e-12) -> bool:
        return (abs(self.b1 - np.conj(self.a1)) <= tol
                and abs(self.b2 - np.conj(self.a2)) <= tol)

    def tangency_residual(self, q: SpherePoint) -> float:
        """|Re(w1b a1 + w2b a2)| for a real vector; 0 means tangent at q."""
        return abs(np.real(np.conj(q.w1) * self.a1 + np.conj(q.w2) * self.a2))


class FramePacket:
    """The standard frame and coframe at one point.

    Carries the frame vectors and closures evaluating psi, psib, eta
    against an AmbientVector and d eta against a pair of them.
    """

    def __init__(self, q: SpherePoint):
        self.point = q
        w1, w2 = q.w1, q.w2
        self.holo = AmbientVector.holomorphic(np.conj(w2), -np.conj(w1))
        self.anti = self.holo.conjugate()
        self.reeb = AmbientVector.real_vector(1j * w1, 1j * w2)
        self._w1, self._w2 = w1, w2

    # Short aliases used throughout the package.
    @property
    def W0(self) -> AmbientVector:
        return self.holo

    @property
    def T(self) -> AmbientVector:
        return self.reeb

    def psi(self, v: AmbientVector) -> complex:
        return self._w2 * v.a1 - self._w1 * v.a2

    def psib(self, v: AmbientVector) -> complex:
        return np.conj(self._w2) * v.b1 - np.conj(self._w1) * v.b2

    def eta(self, v: AmbientVector) -> complex:
        w1, w2 = self._w1, self._w2
        return 0.5j * (w1 * v.b1 + w2 * v.b2
                       - np.conj(w1) * v.a1 - np.conj(w2) * v.a2)

    def deta(self, v: AmbientVector, w: AmbientVector) -> complex:
        return 1j * ((v.a1 * w.b1 - w.a1 * v.b1)
                     + (v.a2 * w.b2 - w.a2 * v.b2))

    def contact_basis(self) -> tuple[AmbientVector, AmbientVector]:
        """The real basis (X, Y) = (2 Re Z, -2 Im Z) of the contact plane."""
        x = AmbientVector.real_vector(self.holo.a1, self.holo.a2)
        y = AmbientVector.real_vector(1j * self.holo.a1, 1j * self.holo.a2)
        return x, y


def frame_at(q: SpherePoint) -> FramePacket:
    """Frame and coframe pairings at a sphere point."""
    return FramePacket(q)


def orientation_check(q: SpherePoint) -> float:
    """<d eta, X ^ J0 X> with X = 2 Re Z; positive for the standard structure."""
    fp = frame_at(q)
    x, y = fp.contact_basis()
    val = fp.deta(x, y)
    return float(np.real(val))


def random_points(n: int, rng: np.random.Generator) -> list[SpherePoint]:
    """Deterministic (seeded) uniform sample of sphere points."""
    g = rng.normal(size=(n, 4))
    g /= np.linalg.norm(g, axis=1)[:, None]
    return [SpherePoint(complex(r[0], r[1]), complex(r[2], r[3])) for r in g]


def clifford_point(theta1: float, theta2: float) -> SpherePoint:
    """Point of the torus |w1|^2 = |w2|^2 = 1/2 with the given fiber angles."""
    r = np.sqrt(0.5)
    return SpherePoint(r * np.exp(1j * theta1), r * np.exp(1j * theta2))
