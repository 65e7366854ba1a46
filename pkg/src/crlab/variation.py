r"""Analytic variation coefficients of the flow-map Beltrami magnitude and
the cross-validated symmetry-breaking audit.

For a contact flow g_s with Hamiltonian u, the pullback quotient expands
as nu_s = a s + b s^2 + O(s^3) with

    a = i Zb^2 u,
    b = -1/2 (Zb u)(Z Zb^2 u) + 1/2 (Z u)(Zb^3 u) + i/2 u (R Zb^2 u)
        + i/2 (Zb^2 u)(R u) + (Zb^2 u)(Z Zb u) + 2 u (Zb^2 u).

Against a structure coefficient nu this gives, for the magnitude of the
Beltrami coefficient of g_s,

  * first order (nu != 0):   |nu| + (1-|nu|^2)/|nu| Im(conj(nu) Zb^2 u) s,
  * first order (nu == 0):   |Zb^2 u| |s|,
  * second order, valid where nu != 0, Im(conj(nu) Zb^2 u) = 0 and nu is
    circle invariant (R nu = 4 i nu):

        |nu| + (1-|nu|^2)/(2|nu|) { (1+|nu|^2)|Zb^2 u|^2
              - (conj(nu) Zb^2 u) [ Lap u
              + Re( (Zb nu)(Z u)/nu - (Z nu)(Zb u)/nu ) ] } s^2.

The audit Hamiltonian is radial: with A = sqrt(2)/2 and
H = (2 + m^2)/m at the torus value m of |nu|,

    u(r) = (H/2 - 1)(r - A) + (sqrt(2)/4) H (r - A)^2,

multiplied by a smooth cutoff that is identically one on a plateau around
A and vanishes near r = 0 and r = 1.  Its first-variation integrand
Im(conj(nu) Zb^2 u) vanishes identically, so the quadratic response
applies on the torus; the audit evaluates that response analytically and,
independently, by a symmetric cubic fit to flow-integrated magnitudes,
and reports both together with the measured sign and the equivariance
defect of the flow (a radial Hamiltonian commutes with the circle action,
so the defect should sit at integrator level).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .errors import ConditionError, DomainError
from .fields import (ConstantField, RadialProfileField, ScalarField,
                     ScaledField, apply_derivation, frame_derivative,
                     laplacian)
from .flows import (FlowMap, beltrami, equivariance_defect,
                    hamiltonian_field, max_dilatation)
from .sampling import sphere_grid, torus_band_grid, torus_grid
from .sphere import SpherePoint, clifford_point
from .structures import DeformationTensor

_TORUS_R = float(np.sqrt(0.5))
_GOLD = 0.6180339887498949


class _Words:
    """Frame-derivative words of one field at one point, from a single jet."""

    def __init__(self, u: ScalarField, q):
        from .fields import _point_pair, _zeta_of
        self._w = _point_pair(q)
        self._zeta = _zeta_of(self._w)
        self._jet = u.jet(self._w, order=3)
        self._cache = {}

    def __call__(self, word: tuple[str, ...]) -> complex:
        if word in self._cache:
            return self._cache[word]
        jet = self._jet
        for sym in reversed(word):
            jet = apply_derivation(sym, jet, self._zeta)
        val = complex(jet.value)
        self._cache[word] = val
        return val


def coeff_a(u: ScalarField, q) -> complex:
    """Linear coefficient of the pullback quotient: i Zb^2 u."""
    return 1j * frame_derivative(u, ("Zb", "Zb"), q)


def coeff_b(u: ScalarField, q) -> complex:
    """Quadratic coefficient of the pullback quotient."""
    w = _Words(u, q)
    u0 = w(())
    return (-0.5 * w(("Zb",)) * w(("Z", "Zb", "Zb"))
            + 0.5 * w(("Z",)) * w(("Zb", "Zb", "Zb"))
            + 0.5j * u0 * w(("R", "Zb", "Zb"))
            + 0.5j * w(("Zb", "Zb")) * w(("R",))
            + w(("Zb", "Zb")) * w(("Z", "Zb"))
            + 2.0 * w(("Zb", "Zb")) * u0)


@dataclass(frozen=True)
class FirstVariation:
    """Linear response of the Beltrami magnitude; ``absolute_law`` marks the
    |s|-type expansion valid where the structure coefficient vanishes."""

    value: float
    absolute_law: bool


def first_variation(nu: DeformationTensor, u: ScalarField, q) -> FirstVariation:
    nv = nu.value(q)
    zb2 = frame_derivative(u, ("Zb", "Zb"), q)
    if abs(nv) < 1e-14:
        return FirstVariation(abs(zb2), absolute_law=True)
    m = abs(nv)
    val = (1.0 - m * m) / m * float(np.imag(np.conj(nv) * zb2))
    return FirstVariation(val, absolute_law=False)


def second_variation(nu: DeformationTensor, u: ScalarField, q,
                     im_tol: float = 1e-9, inv_tol: float = 1e-8) -> float:
    """Quadratic response of the Beltrami magnitude where it applies.

    Hypotheses checked numerically: nu(q) != 0, Im(conj(nu) Zb^2 u) = 0,
    and circle invariance R nu = 4 i nu.
    """
    nv = nu.value(q)
    if abs(nv) < 1e-12:
        raise ConditionError("nu != 0", f"|nu| = {abs(nv)} at {q}")
    zb2 = frame_derivative(u, ("Zb", "Zb"), q)
    im_part = float(np.imag(np.conj(nv) * zb2))
    if abs(im_part) > im_tol:
        raise ConditionError("Im(conj(nu) Zb^2 u) = 0",
                             f"residual {im_part}")
    inv_res = nu.invariance_residual(q)
    if inv_res > inv_tol:
        raise ConditionError("R nu = 4 i nu", f"residual {inv_res}")

    m = abs(nv)
    rho = float(np.real(np.conj(nv) * zb2))
    lap = float(np.real(laplacian(u, q)))
    znu = frame_derivative(nu.coeff, ("Z",), q)
    zbnu = frame_derivative(nu.coeff, ("Zb",), q)
    zu = frame_derivative(u, ("Z",), q)
    zbu = frame_derivative(u, ("Zb",), q)
    cross = float(np.real((zbnu * zu - znu * zbu) / nv))
    bracket = (1.0 + m * m) * abs(zb2) ** 2 - rho * (lap + cross)
    return (1.0 - m * m) / (2.0 * m) * bracket


# ----------------------------------------------------------------------
# The audit Hamiltonian
# ----------------------------------------------------------------------

def _smoothstep_stack():
    t = sp.Symbol("t", positive=True)
    sig = sp.exp(-1 / t)
    step = sig / (sig + sig.subs(t, 1 - t))
    exprs = [step]
    for _ in range(3):
        exprs.append(sp.diff(exprs[-1], t))
    return sp.lambdify(t, exprs, modules="numpy")


_STEP_STACK = _smoothstep_stack()


def smoothstep(t: float) -> tuple:
    """C-infinity ramp 0 -> 1 on [0, 1] with its first three derivatives."""
    if t <= 5e-3:
        return (0.0, 0.0, 0.0, 0.0)
    if t >= 1.0 - 5e-3:
        return (1.0, 0.0, 0.0, 0.0)
    return tuple(float(v) for v in _STEP_STACK(t))


def _mul_stacks(a: tuple, b: tuple) -> tuple:
    return (a[0] * b[0],
            a[1] * b[0] + a[0] * b[1],
            a[2] * b[0] + 2 * a[1] * b[1] + a[0] * b[2],
            a[3] * b[0] + 3 * a[2] * b[1] + 3 * a[1] * b[2] + a[0] * b[3])


def _rescale_stack(s: tuple, scale: float) -> tuple:
    return (s[0], s[1] * scale, s[2] * scale ** 2, s[3] * scale ** 3)


class BreakingHamiltonian(RadialProfileField):
    """The radial audit Hamiltonian with its cutoff and torus constants."""

    def __init__(self, lambda_max: float, cutoff: tuple = (0.55, 0.85),
                 margin: float = 0.1):
        lo, hi = cutoff
        if not (lo < _TORUS_R < hi):
            raise DomainError("cutoff plateau must contain sqrt(2)/2")
        if not (0.0 < lo - margin and hi + margin < 1.0 and margin > 0):
            raise DomainError("cutoff window must stay inside (0, 1)")
        m = (lambda_max ** 2 - 1.0) / (lambda_max ** 2 + 1.0)
        if m <= 0:
            raise DomainError("lambda_max must exceed 1 for a nonzero profile")
        self.nu_abs = m
        self.h_const = (2.0 + m * m) / m
        self.slope = self.h_const / 2.0 - 1.0           # du/dr at the torus
        self.curvature = np.sqrt(2.0) / 2.0 * self.h_const
        self.cutoff = (lo, hi)
        self.margin = margin
        super().__init__(self._stack)

    def _stack(self, r: float) -> tuple:
        lo, hi = self.cutoff
        m = self.margin
        d = r - _TORUS_R
        p = (self.slope * d + 0.5 * self.curvature * d * d,
             self.slope + self.curvature * d,
             self.curvature, 0.0)
        up = _rescale_stack(smoothstep((r - (lo - m)) / m), 1.0 / m)
        down = _rescale_stack(smoothstep(((hi + m) - r) / m), -1.0 / m)
        return _mul_stacks(p, _mul_stacks(up, down))


def breaking_hamiltonian(lambda_max: float, cutoff: tuple = (0.55, 0.85),
                         margin: float = 0.1) -> BreakingHamiltonian:
    """Radial Hamiltonian whose linear response vanishes identically."""
    return BreakingHamiltonian(lambda_max, cutoff, margin)


def torus_mean_first_variation(u: ScalarField, nu: DeformationTensor,
                               n: int = 64) -> float:
    """Mean of Im(conj(nu) Zb^2 u) over the torus angles.

    Periodic trapezoidal quadrature over both angles; doubly periodic
    smooth integrands average to zero here even when they are not
    pointwise zero.
    """
    total = 0.0
    for q in torus_grid(n):
        nv = nu.value(q)
        zb2 = frame_derivative(u, ("Zb", "Zb"), q)
        total += float(np.imag(np.conj(nv) * zb2))
    return total / (n * n)


# ----------------------------------------------------------------------
# Flow-side measurements
# ----------------------------------------------------------------------

def fit_even_response(flow: FlowMap, nu: DeformationTensor, q,
                      s_grid) -> tuple[np.ndarray, float, dict]:
    """Cubic fit of |mu_{g_s}|(q) on the symmetric grid +-s_grid.

    Returns (coefficients a0..a3, rms residual, samples).  The symmetric
    grid suppresses the quartic term's contamination of the quadratic
    coefficient.
    """
    ss = np.concatenate([-np.asarray(s_grid)[::-1], np.asarray(s_grid)])
    vals = np.array([abs(beltrami(flow, nu, q, float(s))) for s in ss])
    design = np.vander(ss, 4, increasing=True)
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - vals) ** 2)))
    return coef, resid, {"s": ss.tolist(), "mu_abs": vals.tolist()}


def measured_slope(flow: FlowMap, nu: DeformationTensor, q,
                   s0: float = 4e-3) -> float:
    """Richardson-extrapolated derivative of |mu_{g_s}|(q) at s = 0."""

    def f(s):
        return abs(beltrami(flow, nu, q, s))

    def central(s):
        return (f(s) - f(-s)) / (2.0 * s)

    m1, m2 = central(s0), central(s0 / 2.0)
    return float((4.0 * m2 - m1) / 3.0)


def measured_abs_slope(flow: FlowMap, nu: DeformationTensor, q,
                       s0: float = 4e-3) -> float:
    """One-sided slope of |mu_{g_s}|(q) against |s| at 0, extrapolated."""

    def m(s):
        return (abs(beltrami(flow, nu, q, s))
                - abs(beltrami(flow, nu, q, 0.0))) / s

    r1 = 2.0 * m(s0 / 2.0) - m(s0)
    r2 = 2.0 * m(s0 / 4.0) - m(s0 / 2.0)
    return float((4.0 * r2 - r1) / 3.0)


# ----------------------------------------------------------------------
# Reports and the audit
# ----------------------------------------------------------------------

@dataclass
class VariationReport:
    """Per-point record of the two routes to the quadratic response."""

    point: SpherePoint
    nu_abs: float
    first_coeff: float
    second_coeff: float | None
    fd_fit: dict
    consistency: float | None
    equivariance_defect: float

    def to_dict(self) -> dict:
        return {
            "w1": [self.point.w1.real, self.point.w1.imag],
            "w2": [self.point.w2.real, self.point.w2.imag],
            "nu_abs": self.nu_abs,
            "first_coeff": self.first_coeff,
            "second_coeff": self.second_coeff,
            "fd_fit": self.fd_fit,
            "consistency": self.consistency,
            "equivariance_defect": self.equivariance_defect,
        }


@dataclass
class BreakingAudit:
    """Result of the symmetry-breaking audit.

    ``expected_sign_reference`` records the sign the construction was
    designed to produce on the torus; ``measured_sign`` is what the two
    numerical routes actually agree on.  The audit never errors on a sign
    disagreement; it reports it.
    """

    lambda_max: float
    s_grid: list
    condition_residual: float
    derivative_gaps: tuple
    reports: list
    sup_mu_by_s: dict
    sup_nu: float
    equivariance_defect: float
    measured_sign: int
    expected_sign_reference: int = -1

    @property
    def max_consistency_gap(self) -> float:
        vals = [r.consistency for r in self.reports if r.consistency is not None]
        return max(vals) if vals else float("nan")

    def summary(self) -> dict:
        return {
            "lambda": self.lambda_max,
            "s_grid": list(self.s_grid),
            "first_variation_residual": self.condition_residual,
            "radial_derivative_gaps": list(self.derivative_gaps),
            "points": len(self.reports),
            "max_two_route_gap": self.max_consistency_gap,
            "measured_sign": self.measured_sign,
            "expected_sign_reference": self.expected_sign_reference,
            "sign_agrees_with_reference":
                self.measured_sign == self.expected_sign_reference,
            "sup_mu_by_s": self.sup_mu_by_s,
            "sup_nu": self.sup_nu,
            "equivariance_defect": self.equivariance_defect,
        }


def breaking_audit(nu: DeformationTensor, u: BreakingHamiltonian,
                   s_grid=(0.005, 0.01, 0.02, 0.04),
                   torus_points: int = 16, sphere_n: int = 64,
                   steps_per_unit: int = 512, band_n: int = 8,
                   equivariance_samples: int = 4) -> BreakingAudit:
    """Cross-validated audit of the symmetry-breaking construction.

    Checks the vanishing of the first-variation integrand on a full-sphere
    grid, the radial derivative values at the torus radius, and, at each
    torus point, the agreement of the analytic quadratic response with a
    symmetric cubic fit of flow-integrated Beltrami magnitudes.
    """
    if u.nu_abs <= 0:
        raise DomainError("audit requires a nontrivial family")
    flow = FlowMap(hamiltonian_field(u), steps_per_unit=steps_per_unit,
                   s_max=1.0)

    cond = max(abs(np.imag(np.conj(nu.value(q))
                           * frame_derivative(u, ("Zb", "Zb"), q)))
               for q in sphere_grid(sphere_n))

    stack = u._stack(_TORUS_R)
    gaps = (abs(stack[1] - u.slope), abs(stack[2] - u.curvature))

    side = max(1, int(round(np.sqrt(torus_points))))
    pts = torus_grid(side, max(1, torus_points // side))[:torus_points]
    smax = float(max(s_grid))

    reports = []
    signs = []
    for i, q in enumerate(pts):
        fv = first_variation(nu, u, q)
        c_an = second_variation(nu, u, q)
        coef, resid, samples = fit_even_response(flow, nu, q, s_grid)
        c_fd = float(coef[2])
        cons = abs(c_fd - c_an) / max(abs(c_an), 1e-300)
        eq = equivariance_defect(flow, q, 2.0 * np.pi * ((i + 1) * _GOLD % 1.0),
                                 smax)
        signs.append(int(np.sign(c_fd)))
        reports.append(VariationReport(
            point=q, nu_abs=nu.abs_value(q), first_coeff=fv.value,
            second_coeff=c_an,
            fd_fit={"coefficients": coef.tolist(), "rms_residual": resid,
                    "samples": samples},
            consistency=cons, equivariance_defect=eq))

    measured_sign = signs[0] if len(set(signs)) == 1 else 0

    band = torus_band_grid(band_n, band_n)
    sup_nu = max(nu.abs_value(q) for q in band + pts)
    sup_mu_by_s = {}
    for s in s_grid:
        res = max_dilatation(flow, nu, band + pts, float(s))
        sup_mu_by_s[float(s)] = res.sup_mu

    eq_defect = 0.0
    for k in range(equivariance_samples):
        q = pts[k % len(pts)]
        phi = 2.0 * np.pi * ((k + 1) * _GOLD % 1.0)
        eq_defect = max(eq_defect, equivariance_defect(flow, q, phi, smax))

    return BreakingAudit(
        lambda_max=(nu.params.lambda_max if nu.params is not None else
                    float("nan")),
        s_grid=list(float(s) for s in s_grid),
        condition_residual=float(cond),
        derivative_gaps=gaps,
        reports=reports,
        sup_mu_by_s=sup_mu_by_s,
        sup_nu=float(sup_nu),
        equivariance_defect=float(eq_defect),
        measured_sign=measured_sign,
    )


# ----------------------------------------------------------------------
# Search over Hamiltonian families
# ----------------------------------------------------------------------

@dataclass
class HamiltonianFamily:
    """Finitely parameterized Hamiltonians for the descent search."""

    names: list
    x0: np.ndarray
    build: callable

    @staticmethod
    def scaled(base: ScalarField, name: str = "c") -> "HamiltonianFamily":
        return HamiltonianFamily([name], np.array([0.0]),
                                 lambda x: ScaledField(base, float(x[0])))

    @staticmethod
    def constants() -> "HamiltonianFamily":
        return HamiltonianFamily(["c"], np.array([0.0]),
                                 lambda x: ConstantField(float(x[0])))


@dataclass
class SearchResult:
    params: np.ndarray
    objective: float
    trace: list
    excluded: list


def hamiltonian_search(family: HamiltonianFamily, nu: DeformationTensor,
                       s: float, grid, steps_per_unit: int = 128,
                       step0: float = 0.5, min_step: float = 1e-3,
                       max_sweeps: int = 40) -> SearchResult:
    """Coordinate descent on the grid supremum of |mu_{g_s}|.

    The objective sequence is non-increasing by construction; parameter
    values whose flow leaves the quasiconformal regime are flagged and
    excluded rather than compared.
    """
    excluded = []

    def objective(x):
        try:
            u = family.build(x)
            flow = FlowMap(hamiltonian_field(u),
                           steps_per_unit=steps_per_unit, s_max=max(1.0, abs(s)))
            val = max_dilatation(flow, nu, grid, s).sup_mu
        except Exception as exc:  # noqa: BLE001 - flagged, not compared
            excluded.append({"params": np.asarray(x).tolist(),
                             "reason": str(exc)})
            return float("inf")
        if not np.isfinite(val):
            excluded.append({"params": np.asarray(x).tolist(),
                             "reason": "non-finite objective"})
            return float("inf")
        return float(val)

    x = np.array(family.x0, dtype=float)
    best = objective(x)
    trace = [(x.copy().tolist(), best)]
    step = step0
    for _ in range(max_sweeps):
        improved = False
        for i in range(len(x)):
            for sgn in (+1.0, -1.0):
                cand = x.copy()
                cand[i] += sgn * step
                val = objective(cand)
                if val < best - 1e-15:
                    x, best = cand, val
                    trace.append((x.copy().tolist(), best))
                    improved = True
        if not improved:
            step *= 0.5
            if step < min_step:
                break
    return SearchResult(params=x, objective=best, trace=trace,
                        excluded=excluded)
