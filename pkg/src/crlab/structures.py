r"""Deformation tensors, the invariant structure family and dilatations.

A CR structure deformed from the standard one is recorded by the complex
coefficient nu of mu = nu Z (x) psib, so the deformed (0,1) direction is
Zb - nu Z; same orientation means |nu| < 1.

The invariant family is generated by a smooth stretch profile
lambda(theta) on the quotient sphere, 1 <= lambda <= Lambda, equal to
Lambda exactly on the equator theta = pi/2, identically 1 outside a bump
of the given half-width.  Its pullback along the fibration depends only
on r = |w1| (theta and r are tied by cos(theta) = 2 r^2 - 1) and the
deformation coefficient is

    nu = (lt^2 - 1)/(lt^2 + 1) * (w1 w2)/(w1b w2b),   lt = lambda(theta(r)),

a product of an exact radial factor and a unit-modulus angular monomial.
The angular factor is undefined where w1 w2 = 0, but the radial factor
vanishes identically there, and the product short-circuits to zero.
Invariance reads R nu = 4i nu.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy as sp

from .errors import ChartError, DomainError, OrientationError
from .fields import (AngularMonomialField, ConstantField, ProductField,
                     RadialProfileField, ScalarField, frame_derivative)
from .sphere import AmbientVector, SpherePoint

_EDGE = 1e-8  # treat |t| >= 1 - _EDGE as outside the bump


@dataclass(frozen=True)
class InvariantFamilyParams:
    """Maximal stretch and bump half-width of the profile."""

    lambda_max: float
    bump_width: float = 1.0

    def __post_init__(self):
        if not self.lambda_max >= 1.0:
            raise DomainError("lambda_max must be >= 1")
        if not (0.0 < self.bump_width < np.pi / 2):
            raise DomainError("bump_width must lie in (0, pi/2)")

    @property
    def torus_nu_abs(self) -> float:
        L = self.lambda_max
        return (L * L - 1.0) / (L * L + 1.0)


def _lambdify_stack(expr, var):
    exprs = [expr]
    for _ in range(3):
        exprs.append(sp.diff(exprs[-1], var))
    return sp.lambdify(var, exprs, modules="numpy")


class LambdaProfile:
    """The stretch profile lambda, on the base (as a function of theta) and
    pulled back to the sphere (as a radial field in r = |w1|)."""

    def __init__(self, params: InvariantFamilyParams):
        self.params = params
        L, W = params.lambda_max, params.bump_width

        th = sp.Symbol("theta", positive=True)
        t_of_th = (th - sp.pi / 2) / W
        chi = sp.exp(1 - 1 / (1 - t_of_th ** 2))
        lam_th = 1 + (L - 1) * chi
        self._theta_stack = _lambdify_stack(lam_th, th)

        r = sp.Symbol("r", positive=True)
        th_of_r = sp.acos(2 * r ** 2 - 1)
        lam_r = lam_th.subs(th, th_of_r)
        self._r_stack = _lambdify_stack(lam_r, r)
        nu_r = (lam_r ** 2 - 1) / (lam_r ** 2 + 1)
        self._nu_r_stack = _lambdify_stack(nu_r, r)

    def _t_of_theta(self, theta: float) -> float:
        return (theta - np.pi / 2) / self.params.bump_width

    def _t_of_r(self, r: float) -> float:
        r = min(max(r, 0.0), 1.0)
        return self._t_of_theta(float(np.arccos(2 * r * r - 1)))

    def at_theta(self, theta: float) -> float:
        if abs(self._t_of_theta(theta)) >= 1.0 - _EDGE:
            return 1.0
        return float(self._theta_stack(theta)[0])

    def theta_stack(self, theta: float) -> tuple:
        if abs(self._t_of_theta(theta)) >= 1.0 - _EDGE:
            return (1.0, 0.0, 0.0, 0.0)
        return tuple(float(v) for v in self._theta_stack(theta))

    def radial_stack(self, r: float) -> tuple:
        if abs(self._t_of_r(r)) >= 1.0 - _EDGE:
            return (1.0, 0.0, 0.0, 0.0)
        return tuple(float(v) for v in self._r_stack(r))

    def nu_radial_stack(self, r: float) -> tuple:
        if abs(self._t_of_r(r)) >= 1.0 - _EDGE:
            return (0.0, 0.0, 0.0, 0.0)
        return tuple(float(v) for v in self._nu_r_stack(r))

    @property
    def field(self) -> ScalarField:
        """The pullback along the fibration, as a field on the sphere."""
        return RadialProfileField(self.radial_stack)


def lambda_profile(params: InvariantFamilyParams) -> LambdaProfile:
    return LambdaProfile(params)


class DeformationTensor:
    """Coefficient nu of the deformation mu = nu Z (x) psib."""

    def __init__(self, coeff: ScalarField, abs_field: ScalarField | None = None,
                 params: InvariantFamilyParams | None = None):
        self.coeff = coeff
        self._abs_field = abs_field
        self.params = params

    @staticmethod
    def standard() -> "DeformationTensor":
        return DeformationTensor(ConstantField(0.0))

    def value(self, q) -> complex:
        return complex(self.coeff.value(q))

    def abs_value(self, q) -> float:
        if self._abs_field is not None:
            return float(np.real(self._abs_field.value(q)))
        return abs(self.value(q))

    def jet(self, q, order: int = 3):
        return self.coeff.jet(q, order=order)

    def invariance_residual(self, q) -> float:
        """|R nu - 4i nu| at q; zero characterizes circle invariance."""
        return abs(frame_derivative(self.coeff, ("R",), q)
                   - 4j * self.value(q))

    def check_orientation(self, grid) -> float:
        """sup |nu| over a grid; raises if orientation compatibility fails."""
        sup = max(self.abs_value(q) for q in grid)
        if sup >= 1.0:
            raise OrientationError(f"sup |nu| = {sup} >= 1 on grid")
        return sup


def nu_from_lambda(profile: LambdaProfile) -> DeformationTensor:
    """Deformation coefficient of the invariant family member."""
    radial = RadialProfileField(profile.nu_radial_stack)
    coeff = ProductField(radial, AngularMonomialField())
    return DeformationTensor(coeff, abs_field=radial, params=profile.params)


def invariant_family(lambda_max: float, bump_width: float = 1.0
                     ) -> tuple[LambdaProfile, DeformationTensor]:
    prof = lambda_profile(InvariantFamilyParams(lambda_max, bump_width))
    return prof, nu_from_lambda(prof)


def dilatation(mu_abs: float) -> float:
    """Pointwise conformal distortion from the Beltrami magnitude."""
    if mu_abs < 0:
        raise DomainError("|mu| must be nonnegative")
    if mu_abs >= 1.0:
        raise OrientationError(f"|mu| = {mu_abs} >= 1 violates orientation")
    return (1.0 + mu_abs) / (1.0 - mu_abs)


def pushforward_consistency(nu: DeformationTensor, q: SpherePoint) -> float:
    """Residual of the quotient of the deformed (0,1) direction.

    Pushes -w1b^2 (Zb - nu Z) down the fibration and compares with the
    chart field d/dzb - |nu| (z/zb) d/dz at z = w2/w1.
    """
    w1, w2 = q.w1, q.w2
    if abs(w1) < 1e-8:
        raise ChartError("w1 = 0: use the other chart")
    nv = nu.value(q)
    scale = -np.conj(w1) ** 2
    v = AmbientVector(scale * (-nv * np.conj(w2)), scale * (nv * np.conj(w1)),
                      scale * w2, scale * (-w1))
    dz = v.a2 / w1 - (w2 / w1 ** 2) * v.a1
    dzb = v.b2 / np.conj(w1) - (np.conj(w2) / np.conj(w1) ** 2) * v.b1
    z = w2 / w1
    kappa = nu.abs_value(q)
    target_dz = -kappa * z / np.conj(z) if abs(z) > 0 else 0.0
    return float(abs(dz - target_dz) + abs(dzb - 1.0))
