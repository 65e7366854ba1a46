r"""Truncated third-order jets of functions on C^2 and their algebra.

A `Jet3` holds the value and the partial derivatives, up to order three, of
a complex-valued function at one ambient point.  Internally derivatives are
indexed by the four Wirtinger coordinates

    zeta = (w1, w2, w1b, w2b),        indices 0..3,

with symmetric arrays d1[4], d2[4,4], d3[4,4,4].  The equivalent real-chart
view (partials in x1, y1, x2, y2 with w = x + iy) is available through
`to_real` / `from_real`; the two encodings are exact linear images of each
other, so either may be treated as the canonical one.

Every scalar field in this package is evaluated through its degree-zero
homogeneous extension u(w/|w|).  Consequently jets are well defined
slightly off the sphere and the radial derivative vanishes identically.
`extension_jet` performs the exact chain rule through the radial
projection; `fd_jet` produces the same object by fourth-order central
finite differences of a pointwise evaluator and is the reference the exact
path is tested against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, DomainError

N = 4

# Wirtinger <-> real chart transforms.  Rows are w-indices, columns
# x-indices: d/dw = C . d/dx and d/dx = D . d/dw.
_C = 0.5 * np.array([
    [1, -1j, 0, 0],
    [0, 0, 1, -1j],
    [1, 1j, 0, 0],
    [0, 0, 1, 1j],
], dtype=complex)
_D = np.array([
    [1, 0, 1, 0],
    [1j, 0, -1j, 0],
    [0, 1, 0, 1],
    [0, 1j, 0, -1j],
], dtype=complex)

_CONJ_PERM = np.array([2, 3, 0, 1])


def _zeros(order: int):
    d1 = np.zeros(N, dtype=complex)
    d2 = np.zeros((N, N), dtype=complex)
    d3 = np.zeros((N, N, N), dtype=complex)
    return d1, d2, d3


@dataclass
class Jet3:
    """Value and symmetric partial-derivative arrays at a point.

    ``order`` records how many derivative levels are trustworthy; asking
    for a level beyond it raises CapabilityError.
    """

    value: complex
    d1: np.ndarray = field(default_factory=lambda: np.zeros(N, dtype=complex))
    d2: np.ndarray = field(default_factory=lambda: np.zeros((N, N), dtype=complex))
    d3: np.ndarray = field(default_factory=lambda: np.zeros((N, N, N), dtype=complex))
    order: int = 3

    # -- constructors -------------------------------------------------

    @staticmethod
    def constant(c: complex, order: int = 3) -> "Jet3":
        return Jet3(complex(c), *_zeros(order), order=order)

    @staticmethod
    def coordinate(index: int, zeta: np.ndarray, order: int = 3) -> "Jet3":
        j = Jet3.constant(zeta[index], order)
        j.d1[index] = 1.0
        return j

    @staticmethod
    def from_real(value, dx, dxx, dxxx, order: int = 3) -> "Jet3":
        """Build from partials in the real chart (x1, y1, x2, y2)."""
        d1 = _C @ np.asarray(dx, dtype=complex)
        d2 = _C @ np.asarray(dxx, dtype=complex) @ _C.T
        d3 = np.einsum("ai,bj,ck,ijk->abc", _C, _C, _C,
                       np.asarray(dxxx, dtype=complex))
        return Jet3(complex(value), d1, d2, d3, order=order)

    def to_real(self):
        """Partials in the real chart; inverse of `from_real`."""
        dx = _D @ self.d1
        dxx = _D @ self.d2 @ _D.T
        dxxx = np.einsum("ia,jb,kc,abc->ijk", _D, _D, _D, self.d3)
        return self.value, dx, dxx, dxxx

    # -- capability ----------------------------------------------------

    def require(self, order: int):
        if order > self.order:
            raise CapabilityError(
                f"jet of order {self.order} cannot provide order {order}")

    # -- algebra -------------------------------------------------------

    def __add__(self, other: "Jet3") -> "Jet3":
        o = min(self.order, other.order)
        return Jet3(self.value + other.value, self.d1 + other.d1,
                    self.d2 + other.d2, self.d3 + other.d3, order=o)

    def __sub__(self, other: "Jet3") -> "Jet3":
        o = min(self.order, other.order)
        return Jet3(self.value - other.value, self.d1 - other.d1,
                    self.d2 - other.d2, self.d3 - other.d3, order=o)

    def scale(self, c: complex) -> "Jet3":
        return Jet3(c * self.value, c * self.d1, c * self.d2, c * self.d3,
                    order=self.order)

    def __mul__(self, other: "Jet3") -> "Jet3":
        o = min(self.order, other.order)
        f, g = self, other
        value = f.value * g.value
        d1 = f.d1 * g.value + f.value * g.d1
        d2 = (f.d2 * g.value + f.value * g.d2
              + np.outer(f.d1, g.d1) + np.outer(g.d1, f.d1))
        d3 = (f.d3 * g.value + f.value * g.d3
              + np.einsum("ij,k->ijk", f.d2, g.d1)
              + np.einsum("ik,j->ijk", f.d2, g.d1)
              + np.einsum("jk,i->ijk", f.d2, g.d1)
              + np.einsum("ij,k->ijk", g.d2, f.d1)
              + np.einsum("ik,j->ijk", g.d2, f.d1)
              + np.einsum("jk,i->ijk", g.d2, f.d1))
        return Jet3(value, d1, d2, d3, order=o)

    def reciprocal(self) -> "Jet3":
        if self.value == 0:
            raise DomainError("reciprocal of a jet with zero value")
        t = self.scale(1.0 / self.value)
        t = t - Jet3.constant(1.0, self.order)          # zero-value remainder
        one = Jet3.constant(1.0, self.order)
        inv = one - t + t * t - t * t * t
        return inv.scale(1.0 / self.value)

    def __truediv__(self, other: "Jet3") -> "Jet3":
        return self * other.reciprocal()

    def conj(self) -> "Jet3":
        p = _CONJ_PERM
        return Jet3(np.conj(self.value), np.conj(self.d1)[p],
                    np.conj(self.d2)[np.ix_(p, p)],
                    np.conj(self.d3)[np.ix_(p, p, p)], order=self.order)

    def real(self) -> "Jet3":
        return (self + self.conj()).scale(0.5)

    def imag(self) -> "Jet3":
        return (self - self.conj()).scale(-0.5j)

    def is_zero(self, tol: float = 0.0) -> bool:
        return (abs(self.value) <= tol and np.all(np.abs(self.d1) <= tol)
                and np.all(np.abs(self.d2) <= tol)
                and np.all(np.abs(self.d3) <= tol))


def compose1d(inner: Jet3, g: tuple) -> Jet3:
    """Jet of g(inner) from the 1D derivative stack g = (g0, g1, g2, g3)."""
    g0, g1, g2, g3 = (complex(x) for x in g)
    u1, u2, u3 = inner.d1, inner.d2, inner.d3
    d1 = g1 * u1
    d2 = g2 * np.outer(u1, u1) + g1 * u2
    d3 = (g3 * np.einsum("i,j,k->ijk", u1, u1, u1)
          + g2 * (np.einsum("i,jk->ijk", u1, u2)
                  + np.einsum("j,ik->ijk", u1, u2)
                  + np.einsum("k,ij->ijk", u1, u2))
          + g1 * u3)
    return Jet3(g0, d1, d2, d3, order=inner.order)


def compose(outer: Jet3, coords: list[Jet3]) -> Jet3:
    """Jet of F(P(zeta)) from the jet of F at P and the coordinate jets P."""
    o = min([outer.order] + [c.order for c in coords])
    P1 = np.stack([c.d1 for c in coords])            # [a, i]
    P2 = np.stack([c.d2 for c in coords])            # [a, i, j]
    P3 = np.stack([c.d3 for c in coords])            # [a, i, j, k]
    F1, F2, F3 = outer.d1, outer.d2, outer.d3
    d1 = np.einsum("a,ai->i", F1, P1)
    d2 = (np.einsum("ab,ai,bj->ij", F2, P1, P1)
          + np.einsum("a,aij->ij", F1, P2))
    d3 = (np.einsum("abc,ai,bj,ck->ijk", F3, P1, P1, P1)
          + np.einsum("ab,aij,bk->ijk", F2, P2, P1)
          + np.einsum("ab,aik,bj->ijk", F2, P2, P1)
          + np.einsum("ab,ajk,bi->ijk", F2, P2, P1)
          + np.einsum("a,aijk->ijk", F1, P3))
    return Jet3(outer.value, d1, d2, d3, order=o)


# -- homogeneous extension ---------------------------------------------

def _zeta(w: np.ndarray) -> np.ndarray:
    return np.array([w[0], w[1], np.conj(w[0]), np.conj(w[1])], dtype=complex)


def _inv_sqrt_stack(s: float) -> tuple:
    r = s ** -0.5
    return (r, -0.5 * r / s, 0.75 * r / s ** 2, -1.875 * r / s ** 3)


def projection_jets(w: np.ndarray) -> list[Jet3]:
    """Exact jets at w of the coordinates of the radial projection w/|w|."""
    zeta = _zeta(w)
    nsq = Jet3(zeta[0] * zeta[2] + zeta[1] * zeta[3])
    nsq.d1[:] = [zeta[2], zeta[3], zeta[0], zeta[1]]
    nsq.d2[0, 2] = nsq.d2[2, 0] = 1.0
    nsq.d2[1, 3] = nsq.d2[3, 1] = 1.0
    inv_norm = compose1d(nsq, _inv_sqrt_stack(float(np.real(nsq.value))))
    return [Jet3.coordinate(a, zeta) * inv_norm for a in range(N)]


def extension_jet(raw_jet_at, w: np.ndarray, order: int = 3) -> Jet3:
    """Jet at w of the degree-zero homogeneous extension of a field.

    ``raw_jet_at`` returns the jet of the field's own ambient representative
    at a given on-sphere point; the chain rule through w/|w| is exact.
    """
    nrm = np.sqrt(abs(w[0]) ** 2 + abs(w[1]) ** 2)
    if nrm == 0.0:
        raise DomainError("extension jet at the origin")
    base = np.array([w[0] / nrm, w[1] / nrm], dtype=complex)
    raw = raw_jet_at(base)
    raw.require(order)
    return compose(raw, projection_jets(np.asarray(w, dtype=complex)))


# -- finite-difference jets --------------------------------------------

# Fourth-order central stencils: (offset/weight pairs, denominator, order).
_D1_STENCIL = (((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)), 12.0, 1)
_D2_STENCIL = (((-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)),
               12.0, 2)
_D3_STENCIL = (((-3, 1.0), (-2, -8.0), (-1, 13.0),
                (1, -13.0), (2, 8.0), (3, -1.0)), 8.0, 3)


def _apply_stencil(f, h, base, axes):
    """Tensor-product application of per-axis stencils.

    ``axes`` lists (axis, stencil) pairs; the function is evaluated on the
    product grid of offsets and contracted with the product weights.
    """
    total = 0.0 + 0.0j
    offsets = [s[0] for _, s in axes]
    denoms = [s[1] for _, s in axes]
    order = sum(s[2] for _, s in axes)
    for combo in itertools.product(*offsets):
        x = np.array(base, dtype=float)
        wgt = 1.0
        for (axis, _), (off, ww) in zip(axes, combo):
            x[axis] += off * h
            wgt *= ww
        total += wgt * f(x)
    return total / (np.prod(denoms) * h ** order)


def fd_jet(evaluator, q, h: float = 1e-2, order: int = 3) -> Jet3:
    """Finite-difference jet of the homogeneous extension of an evaluator.

    ``evaluator`` maps a SpherePoint to a complex number; the stencil points
    are projected back onto the sphere, which realizes u(w/|w|).  Accuracy
    is O(h^4) per derivative.
    """
    if not (0.0 < h < 0.1):
        raise DomainError(f"finite-difference step out of range: {h}")
    from .sphere import SpherePoint  # local import to avoid a cycle

    base = np.array([q.w1.real, q.w1.imag, q.w2.real, q.w2.imag], dtype=float)

    def f(x):
        n = np.linalg.norm(x)
        return complex(evaluator(SpherePoint(complex(x[0], x[1]) / n,
                                             complex(x[2], x[3]) / n)))

    value = f(base)
    dx = np.zeros(N, dtype=complex)
    dxx = np.zeros((N, N), dtype=complex)
    dxxx = np.zeros((N, N, N), dtype=complex)

    if order >= 1:
        for i in range(N):
            dx[i] = _apply_stencil(f, h, base, [(i, _D1_STENCIL)])
    if order >= 2:
        for i in range(N):
            for j in range(i, N):
                if i == j:
                    v = _apply_stencil(f, h, base, [(i, _D2_STENCIL)])
                else:
                    v = _apply_stencil(f, h, base,
                                       [(i, _D1_STENCIL), (j, _D1_STENCIL)])
                dxx[i, j] = dxx[j, i] = v
    if order >= 3:
        for i in range(N):
            for j in range(i, N):
                for k in range(j, N):
                    if i == j == k:
                        v = _apply_stencil(f, h, base, [(i, _D3_STENCIL)])
                    elif i == j:
                        v = _apply_stencil(f, h, base,
                                           [(i, _D2_STENCIL), (k, _D1_STENCIL)])
                    elif j == k:
                        v = _apply_stencil(f, h, base,
                                           [(j, _D2_STENCIL), (i, _D1_STENCIL)])
                    else:
                        v = _apply_stencil(f, h, base,
                                           [(i, _D1_STENCIL), (j, _D1_STENCIL),
                                            (k, _D1_STENCIL)])
                    for perm in set(itertools.permutations((i, j, k))):
                        dxxx[perm] = v

    return Jet3.from_real(value, dx, dxx, dxxx, order=order)
