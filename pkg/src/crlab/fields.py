r"""Scalar fields on the 3-sphere with exact iterated frame derivatives.

A `ScalarField` supplies third-order jets of its degree-zero homogeneous
extension u(w/|w|) at (or near) sphere points.  Exact evaluator kinds:

* `PolynomialField`   -- polynomial in (w1, w2, w1b, w2b);
* `RadialProfileField`-- g(|w1|) from a caller-supplied 1D derivative stack;
* `AngularMonomialField` -- the unit-modulus factor (w1 w2)/(w1b w2b);
* `SumField` / `ProductField` / `QuotientField` / `ScaledField` combinators;
* `FiniteDifferenceField` -- wraps any pointwise evaluator, jets by stencils.

Iterated frame derivatives are assembled by exact expansion over the jet:
the frame fields Z, Zb, R have linear coefficient functions, so applying
one of them maps an order-k jet to the exact order-(k-1) jet of the
derivative.  Words are written left to right with the rightmost symbol
applied first, e.g. ("Z", "Zb", "Zb") is Z(Zb(Zb u)); order matters since
[Z, Zb] != 0.
"""

from __future__ import annotations

import numpy as np

from .errors import (CapabilityError, DomainError, SingularityError,
                     UnsupportedOrderError)
from .jets import Jet3, compose1d, extension_jet, fd_jet
from .sphere import SpherePoint

# Coefficient matrices of the frame derivations: c_a(zeta) = L[a, :] . zeta.
_L_Z = np.zeros((4, 4), dtype=complex)
_L_Z[0, 3] = 1.0
_L_Z[1, 2] = -1.0
_L_ZB = np.zeros((4, 4), dtype=complex)
_L_ZB[2, 1] = 1.0
_L_ZB[3, 0] = -1.0
_L_R = np.diag([1j, 1j, -1j, -1j]).astype(complex)

DERIVATIONS = {"Z": _L_Z, "Zb": _L_ZB, "R": _L_R}


def _point_pair(q) -> np.ndarray:
    if isinstance(q, SpherePoint):
        return q.pair
    return np.asarray(q, dtype=complex)


def _zeta_of(w: np.ndarray) -> np.ndarray:
    return np.array([w[0], w[1], np.conj(w[0]), np.conj(w[1])], dtype=complex)


def apply_derivation(symbol: str, jet: Jet3, zeta: np.ndarray) -> Jet3:
    """Exact jet of (A u) from the jet of u, one order lower."""
    if symbol not in DERIVATIONS:
        raise DomainError(f"unknown frame symbol {symbol!r}")
    jet.require(1)
    L = DERIVATIONS[symbol]
    c = L @ zeta
    value = c @ jet.d1
    d1 = L.T @ jet.d1 + np.einsum("a,ai->i", c, jet.d2)
    m = np.einsum("ai,aj->ij", L, jet.d2)
    d2 = m + m.T + np.einsum("a,aij->ij", c, jet.d3)
    return Jet3(value, d1, d2, np.zeros((4, 4, 4), dtype=complex),
                order=jet.order - 1)


def parse_word(word) -> tuple[str, ...]:
    if isinstance(word, str):
        word = word.replace(",", " ").split()
    return tuple(word)


def frame_derivative(u: "ScalarField", word, q) -> complex:
    """Iterated frame derivative of u at q; word length at most 3."""
    syms = parse_word(word)
    if len(syms) > 3:
        raise UnsupportedOrderError(f"word of length {len(syms)} > 3")
    w = _point_pair(q)
    zeta = _zeta_of(w)
    jet = u.jet(w, order=max(len(syms), 1) if syms else 0)
    for sym in reversed(syms):
        jet = apply_derivation(sym, jet, zeta)
    return complex(jet.value)


def frame_word_jet(u: "ScalarField", word, q, order: int = 3) -> Jet3:
    """Jet (to the requested order) of an iterated frame derivative."""
    syms = parse_word(word)
    w = _point_pair(q)
    zeta = _zeta_of(w)
    jet = u.jet(w, order=min(3, order + len(syms)))
    for sym in reversed(syms):
        jet = apply_derivation(sym, jet, zeta)
    return jet


def laplacian(u: "ScalarField", q) -> complex:
    """(Z Zb + Zb Z)u at q; real whenever u is real."""
    w = _point_pair(q)
    zeta = _zeta_of(w)
    jet = u.jet(w, order=2)
    a = apply_derivation("Z", apply_derivation("Zb", jet, zeta), zeta)
    b = apply_derivation("Zb", apply_derivation("Z", jet, zeta), zeta)
    return complex(a.value + b.value)


# ----------------------------------------------------------------------
# Field kinds
# ----------------------------------------------------------------------

class ScalarField:
    """Base class; subclasses provide `raw_jet` of an ambient representative."""

    def raw_jet(self, w: np.ndarray) -> Jet3:
        raise NotImplementedError

    def jet(self, q, order: int = 3) -> Jet3:
        w = _point_pair(q)
        return extension_jet(self.raw_jet, w, order=order)

    def value(self, q) -> complex:
        w = _point_pair(q)
        n = np.sqrt(abs(w[0]) ** 2 + abs(w[1]) ** 2)
        return complex(self.raw_jet(w / n).value)

    def __add__(self, other: "ScalarField") -> "ScalarField":
        return SumField(self, other)

    def __mul__(self, other: "ScalarField") -> "ScalarField":
        return ProductField(self, other)

    def __truediv__(self, other: "ScalarField") -> "ScalarField":
        return QuotientField(self, other)

    def scale(self, c: complex) -> "ScalarField":
        return ScaledField(self, c)

    def conjugated(self) -> "ScalarField":
        return ConjField(self)


class ConstantField(ScalarField):
    def __init__(self, c: complex):
        self.c = complex(c)

    def raw_jet(self, w):
        return Jet3.constant(self.c)

    def value(self, q):
        return self.c


class PolynomialField(ScalarField):
    """Polynomial in (w1, w2, w1b, w2b); monomials map exponent tuples to
    complex coefficients."""

    def __init__(self, monomials: dict):
        self.monomials = {tuple(k): complex(v) for k, v in monomials.items()
                          if v != 0}
        self._derivs = {}
        self._build_derivatives()

    def _build_derivatives(self):
        import itertools
        base = self.monomials

        def diff(poly, i):
            out = {}
            for exps, c in poly.items():
                if exps[i] == 0:
                    continue
                e = list(exps)
                cc = c * e[i]
                e[i] -= 1
                key = tuple(e)
                out[key] = out.get(key, 0.0) + cc
            return out

        self._derivs[()] = base
        for r in range(1, 4):
            for idx in itertools.combinations_with_replacement(range(4), r):
                parent = self._derivs[idx[:-1]]
                self._derivs[idx] = diff(parent, idx[-1])

    @staticmethod
    def _eval(poly, zeta):
        total = 0.0 + 0.0j
        for exps, c in poly.items():
            v = c
            for z, e in zip(zeta, exps):
                if e:
                    v *= z ** e
            total += v
        return total

    def raw_jet(self, w):
        zeta = _zeta_of(w)
        jet = Jet3(self._eval(self._derivs[()], zeta))
        for i in range(4):
            jet.d1[i] = self._eval(self._derivs[(i,)], zeta)
        for i in range(4):
            for j in range(i, 4):
                v = self._eval(self._derivs[(i, j)], zeta)
                jet.d2[i, j] = jet.d2[j, i] = v
        import itertools
        for i, j, k in itertools.combinations_with_replacement(range(4), 3):
            v = self._eval(self._derivs[(i, j, k)], zeta)
            for perm in set(itertools.permutations((i, j, k))):
                jet.d3[perm] = v
        return jet

    def conjugated(self) -> "PolynomialField":
        out = {}
        for (e0, e1, e2, e3), c in self.monomials.items():
            out[(e2, e3, e0, e1)] = np.conj(c)
        return PolynomialField(out)

    def real_part(self) -> "ScalarField":
        merged = dict(self.monomials)
        for k, v in self.conjugated().monomials.items():
            merged[k] = merged.get(k, 0.0) + v
        return PolynomialField({k: 0.5 * v for k, v in merged.items()})


class RadialProfileField(ScalarField):
    """g(r) with r = |w1|; the caller supplies exact 1D derivatives.

    ``stack(r)`` must return (g, g', g'', g''') and must itself be safe for
    any r in (0, 1).  Within ``pole_guard`` of r = 0 the chain rule through
    r breaks down, so evaluation there is only allowed when the profile is
    locally constant (all supplied derivatives zero).
    """

    def __init__(self, stack, pole_guard: float = 0.05):
        self.stack = stack
        self.pole_guard = pole_guard

    def raw_jet(self, w):
        r = float(abs(w[0]))
        g = self.stack(r)
        if r < self.pole_guard:
            if any(abs(x) > 0.0 for x in g[1:]):
                raise SingularityError(
                    f"radial profile not locally constant at r = {r:.3g}")
            return Jet3.constant(g[0])
        zeta = _zeta_of(w)
        rsq = Jet3(zeta[0] * zeta[2])
        rsq.d1[0], rsq.d1[2] = zeta[2], zeta[0]
        rsq.d2[0, 2] = rsq.d2[2, 0] = 1.0
        s = r * r
        sqrt_stack = (r, 0.5 / r, -0.25 / (s * r), 0.375 / (s * s * r))
        rjet = compose1d(rsq, sqrt_stack)
        return compose1d(rjet, g)

    def value(self, q):
        w = _point_pair(q)
        n = np.sqrt(abs(w[0]) ** 2 + abs(w[1]) ** 2)
        return complex(self.stack(float(abs(w[0])) / n)[0])


class AngularMonomialField(ScalarField):
    """The unit-modulus factor (w1 w2) / (w1b w2b); undefined on w1 w2 = 0."""

    _num = None
    _den = None

    def __init__(self):
        if AngularMonomialField._num is None:
            AngularMonomialField._num = PolynomialField({(1, 1, 0, 0): 1.0})
            AngularMonomialField._den = PolynomialField({(0, 0, 1, 1): 1.0})

    def raw_jet(self, w):
        if w[0] == 0 or w[1] == 0:
            raise DomainError("angular factor undefined where w1 w2 = 0")
        return self._num.raw_jet(w) * self._den.raw_jet(w).reciprocal()


class SumField(ScalarField):
    def __init__(self, left, right):
        self.left, self.right = left, right

    def raw_jet(self, w):
        return self.left.raw_jet(w) + self.right.raw_jet(w)


class ProductField(ScalarField):
    """Product with a short-circuit: if the left factor's jet vanishes
    identically at the point, the right factor is never evaluated.  This is
    what makes profiles times a pole-singular angular factor total."""

    def __init__(self, left, right):
        self.left, self.right = left, right

    def raw_jet(self, w):
        lj = self.left.raw_jet(w)
        if lj.is_zero():
            return lj
        return lj * self.right.raw_jet(w)


class QuotientField(ScalarField):
    def __init__(self, num, den):
        self.num, self.den = num, den

    def raw_jet(self, w):
        return self.num.raw_jet(w) / self.den.raw_jet(w)


class ScaledField(ScalarField):
    def __init__(self, inner, c):
        self.inner, self.c = inner, complex(c)

    def raw_jet(self, w):
        return self.inner.raw_jet(w).scale(self.c)

    def value(self, q):
        return self.c * self.inner.value(q)


class ConjField(ScalarField):
    def __init__(self, inner):
        self.inner = inner

    def raw_jet(self, w):
        return self.inner.raw_jet(w).conj()


class FiniteDifferenceField(ScalarField):
    """Jets by fourth-order stencils around a pointwise sphere evaluator."""

    def __init__(self, evaluator, h: float = 1e-2, max_order: int = 3):
        self.evaluator = evaluator
        self.h = h
        self.max_order = max_order

    def raw_jet(self, w):
        raise CapabilityError("finite-difference fields have no ambient "
                              "representative; use jet()")

    def jet(self, q, order: int = 3):
        if order > self.max_order:
            raise CapabilityError(
                f"field capped at order {self.max_order}, requested {order}")
        w = _point_pair(q)
        n = np.sqrt(abs(w[0]) ** 2 + abs(w[1]) ** 2)
        pt = SpherePoint(w[0] / n, w[1] / n)
        return fd_jet(self.evaluator, pt, h=self.h, order=order)

    def value(self, q):
        w = _point_pair(q)
        n = np.sqrt(abs(w[0]) ** 2 + abs(w[1]) ** 2)
        return complex(self.evaluator(SpherePoint(w[0] / n, w[1] / n)))


# Convenience constructors used across the package and tests.

def poly(monomials: dict) -> PolynomialField:
    return PolynomialField(monomials)


def re_w1() -> ScalarField:
    return PolynomialField({(1, 0, 0, 0): 0.5, (0, 0, 1, 0): 0.5})


def abs_w1_sq() -> ScalarField:
    return PolynomialField({(1, 0, 1, 0): 1.0})


def is_real_field(u: ScalarField, points, tol: float = 1e-10) -> bool:
    return all(abs(np.imag(u.value(q))) <= tol for q in points)
