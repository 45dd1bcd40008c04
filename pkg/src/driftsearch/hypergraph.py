"""Finite-time mixing classes from the averaged velocity gradient.

For the interval [t1, t2] the averaged velocity is
``(T(x) - x) / (t2 - t1)``. Its gradient determinant ``d`` splits the
domain: ``0 <= d <= 4 / (t2 - t1)**2`` is mesoelliptic (rotation
dominated), anything else mesohyperbolic (stretching dominated).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import flow as flowmod
from .grid import Domain, GridSpec
from .util import atomic_write_text, num

MESOELLIPTIC = 0
MESOHYPERBOLIC = 1
LABEL_NAMES = {MESOELLIPTIC: "mesoelliptic", MESOHYPERBOLIC: "mesohyperbolic"}


@dataclass(frozen=True, eq=False)
class HypergraphField:
    grid: GridSpec
    det: np.ndarray
    labels: np.ndarray
    t1: float
    t2: float

    def __post_init__(self):
        if not self.t2 > self.t1:
            raise ValueError("hypergraph interval must have t2 > t1")

    @property
    def hyperbolic_fraction(self) -> float:
        return float(np.mean(self.labels == MESOHYPERBOLIC))

    def to_csv(self) -> str:
        lines = ["x_km,y_km,det_value,label"]
        xc, yc = self.grid.xc, self.grid.yc
        for j in range(self.grid.ny):
            for i in range(self.grid.nx):
                lines.append(f"{num(xc[i])},{num(yc[j])},{num(self.det[i, j])},{LABEL_NAMES[int(self.labels[i, j])]}")
        return "\n".join(lines) + "\n"

    def save_csv(self, path):
        atomic_write_text(path, self.to_csv())


def classify_det(det, span: float) -> np.ndarray:
    upper = 4.0 / span ** 2
    elliptic = (det >= 0) & (det <= upper)
    return np.where(elliptic, MESOELLIPTIC, MESOHYPERBOLIC).astype(np.int8)


def classify(velocity, domain: Domain, grid: GridSpec, t1: float, t2: float, h: float = 0.5,
             tol: float = 1e-6) -> HypergraphField:
    """Label every cell center of ``grid`` over the interval [t1, t2].

    Stencil points within ``h`` of the boundary fall back to one-sided
    differences.
    """
    if not t2 > t1:
        raise ValueError("classify requires t2 > t1")
    if h <= 0:
        raise ValueError("stencil h must be positive")
    span = t2 - t1
    c = grid.centers().reshape(-1, 2)
    n = len(c)
    plus_x, minus_x = c.copy(), c.copy()
    plus_y, minus_y = c.copy(), c.copy()
    plus_x[:, 0] += h
    minus_x[:, 0] -= h
    plus_y[:, 1] += h
    minus_y[:, 1] -= h
    # one-sided where the stencil would leave the domain
    for hi_pt, lo_pt, axis, lo, hi in ((plus_x, minus_x, 0, domain.x_min, domain.x_max),
                                       (plus_y, minus_y, 1, domain.y_min, domain.y_max)):
        over = hi_pt[:, axis] > hi
        under = lo_pt[:, axis] < lo
        hi_pt[over, axis] = c[over, axis]
        lo_pt[under, axis] = c[under, axis]

    pts = np.vstack([plus_x, minus_x, plus_y, minus_y])
    end = flowmod.integrate(velocity, pts, t1, t2, tol)
    vbar = (end - pts) / span
    vpx, vmx, vpy, vmy = np.split(vbar, 4)
    wx = plus_x[:, 0] - minus_x[:, 0]
    wy = plus_y[:, 1] - minus_y[:, 1]
    dvx = (vpx - vmx) / wx[:, None]   # d vbar / dx
    dvy = (vpy - vmy) / wy[:, None]   # d vbar / dy
    det = dvx[:, 0] * dvy[:, 1] - dvy[:, 0] * dvx[:, 1]
    det = det.reshape(grid.nx, grid.ny)
    return HypergraphField(grid, det, classify_det(det, span), t1, t2)
