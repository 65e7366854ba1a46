r"""Exact polynomial vector-field algebra on C^2 with Lie brackets.

Fields are derivations with polynomial coefficients in the four formal
variables (w1, w2, w1b, w2b), one coefficient per d/dw1, d/dw2, d/dw1b,
d/dw2b.  Coefficients are sympy expressions over Q(i), so brackets of the
standard frame fields verify with zero residual, not merely to roundoff.

The standard fields:

    Z  = w2b d/dw1 - w1b d/dw2
    Zb = w2  d/dw1b - w1 d/dw2b
    R  = i(w1 d/dw1 + w2 d/dw2) - i(w1b d/dw1b + w2b d/dw2b)
    X  = Z + Zb,  Y = i Z - i Zb        (real contact basis)

whose commutators are [Z, Zb] = -iR, [R, Z] = -2iZ, [R, Zb] = 2iZb and
[X, Y] = -2R, [X, R] = 2Y, [Y, R] = -2X.
"""

from __future__ import annotations

import sympy as sp

from .sphere import AmbientVector, SpherePoint

W1, W2, W1B, W2B = sp.symbols("w1 w2 w1b w2b")
_VARS = (W1, W2, W1B, W2B)


class PolyVectorField:
    """Derivation with exact polynomial coefficients in (w1, w2, w1b, w2b)."""

    def __init__(self, c_w1=0, c_w2=0, c_w1b=0, c_w2b=0):
        self.coeffs = tuple(sp.expand(sp.sympify(c)) for c in (c_w1, c_w2, c_w1b, c_w2b))
        self._lam = None

    def __repr__(self):
        return f"PolyVectorField{self.coeffs}"

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        return PolyVectorField(*(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        return PolyVectorField(*(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, scalar) -> "PolyVectorField":
        s = sp.sympify(scalar)
        return PolyVectorField(*(s * a for a in self.coeffs))

    __rmul__ = __mul__

    def __neg__(self) -> "PolyVectorField":
        return self * -1

    def is_zero(self) -> bool:
        return all(sp.expand(c) == 0 for c in self.coeffs)

    def equals(self, other: "PolyVectorField") -> bool:
        return (self - other).is_zero()

    def apply_to(self, expr):
        """Apply the derivation to a sympy expression."""
        expr = sp.sympify(expr)
        return sp.expand(sum(c * sp.diff(expr, v) for c, v in zip(self.coeffs, _VARS)))

    def at(self, q: SpherePoint) -> AmbientVector:
        """Numeric evaluation of the coefficients at a sphere point."""
        if self._lam is None:
            self._lam = sp.lambdify(_VARS, list(self.coeffs), modules="numpy")
        vals = self._lam(q.w1, q.w2, complex(q.w1).conjugate(), complex(q.w2).conjugate())
        return AmbientVector(*(complex(v) for v in vals))


def lie_bracket(a: PolyVectorField, b: PolyVectorField) -> PolyVectorField:
    """Exact commutator [a, b] via polynomial differentiation."""
    new = []
    for k in range(4):
        new.append(sp.expand(a.apply_to(b.coeffs[k]) - b.apply_to(a.coeffs[k])))
    return PolyVectorField(*new)


Z_FIELD = PolyVectorField(W2B, -W1B, 0, 0)
ZB_FIELD = PolyVectorField(0, 0, W2, -W1)
R_FIELD = PolyVectorField(sp.I * W1, sp.I * W2, -sp.I * W1B, -sp.I * W2B)
X_FIELD = Z_FIELD + ZB_FIELD
Y_FIELD = sp.I * Z_FIELD - sp.I * ZB_FIELD
