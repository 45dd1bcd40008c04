"""Truncated-Gaussian splatting of weighted particles onto a grid."""
import math

import numpy as np

from .grid import GridSpec

TRUNCATION = 4.0
_CHUNK = 4096


def splat(points, weights, grid: GridSpec, sigma: float, truncate: float = TRUNCATION) -> np.ndarray:
    """Deposit each particle as a truncated Gaussian of scale ``sigma``.

    Every particle's footprint is renormalized over the cells it actually
    reaches, so the grid integral of the result equals ``sum(weights)``
    regardless of truncation or the domain edge. A particle with no cell
    within reach drops its whole weight into the nearest cell.
    """
    if sigma <= 0:
        raise ValueError("kernel scale must be positive")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    w = np.broadcast_to(np.asarray(weights, dtype=float), (len(pts),))
    out = np.zeros(grid.nx * grid.ny)
    if len(pts) == 0:
        return out.reshape(grid.nx, grid.ny)

    d = grid.domain
    dx, dy = grid.dx, grid.dy
    reach = truncate * sigma
    mx, my = math.ceil(reach / dx), math.ceil(reach / dy)
    ox, oy = np.meshgrid(np.arange(-mx, mx + 1), np.arange(-my, my + 1), indexing="ij")
    ox, oy = ox.ravel(), oy.ravel()

    for start in range(0, len(pts), _CHUNK):
        p = pts[start:start + _CHUNK]
        wc = w[start:start + _CHUNK]
        ix0 = np.clip(np.floor((p[:, 0] - d.x_min) / dx).astype(int), 0, grid.nx - 1)
        iy0 = np.clip(np.floor((p[:, 1] - d.y_min) / dy).astype(int), 0, grid.ny - 1)
        ix = ix0[:, None] + ox[None, :]
        iy = iy0[:, None] + oy[None, :]
        rx = d.x_min + (ix + 0.5) * dx - p[:, 0:1]
        ry = d.y_min + (iy + 0.5) * dy - p[:, 1:2]
        r2 = rx * rx + ry * ry
        k = np.exp(-0.5 * r2 / sigma**2)
        valid = (ix >= 0) & (ix < grid.nx) & (iy >= 0) & (iy < grid.ny) & (r2 <= reach * reach)
        k = np.where(valid, k, 0.0)
        total = k.sum(axis=1)
        lost = total == 0
        if lost.any():
            centre = ox.size // 2
            k[lost, centre] = 1.0
            valid[lost, centre] = True
            total[lost] = 1.0
        k *= (wc / (total * grid.cell_area))[:, None]
        flat = np.where(valid, ix * grid.ny + iy, 0)
        out += np.bincount(flat[valid], weights=k[valid], minlength=out.size)
    return out.reshape(grid.nx, grid.ny)
