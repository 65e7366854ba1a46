"""Deterministic sampling grids on the 3-sphere and the square torus.

The "N x M sphere grid" takes N radii with area-uniform midpoint spacing in
r^2 and M fiber-angle pairs per radius placed by a golden-angle sequence,
so the N*M points cover all three dimensions of the sphere without any
random state.  Torus grids are plain product grids on |w1| = |w2| = 1/sqrt2.
"""

from __future__ import annotations

import numpy as np

from .sphere import SpherePoint, clifford_point

_GOLDEN = 0.6180339887498949


def sphere_grid(n_r: int, n_ang: int | None = None) -> list[SpherePoint]:
    if n_ang is None:
        n_ang = n_r
    pts = []
    for j in range(n_r):
        r = np.sqrt((j + 0.5) / n_r)
        rho = np.sqrt(1.0 - r * r)
        for k in range(n_ang):
            th = 2.0 * np.pi * k / n_ang
            ph = 2.0 * np.pi * (((j * n_ang + k) * _GOLDEN) % 1.0)
            pts.append(SpherePoint(r * np.exp(1j * th), rho * np.exp(1j * ph)))
    return pts


def torus_grid(n: int, m: int | None = None) -> list[SpherePoint]:
    if m is None:
        m = n
    return [clifford_point(2.0 * np.pi * i / n, 2.0 * np.pi * j / m)
            for i in range(n) for j in range(m)]


def torus_band_grid(n_r: int, n_ang: int, halfwidth: float = 0.15
                    ) -> list[SpherePoint]:
    """Product grid on radii within ``halfwidth`` of the torus radius.

    The radius count is forced odd so the exact torus radius is a grid
    line; suprema attained on the torus are then grid-exact.
    """
    r0 = np.sqrt(0.5)
    if n_r % 2 == 0:
        n_r += 1
    pts = []
    for r in np.linspace(r0 - halfwidth, r0 + halfwidth, n_r):
        rho = np.sqrt(1.0 - r * r)
        for k in range(n_ang):
            th = 2.0 * np.pi * k / n_ang
            ph = 2.0 * np.pi * (((k + 1) * _GOLDEN) % 1.0)
            pts.append(SpherePoint(r * np.exp(1j * th), rho * np.exp(1j * ph)))
    return pts
