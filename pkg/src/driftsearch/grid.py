"""Rectangular domain, cell-centered scalar fields and the cosine spectral basis.

Field arrays are indexed ``values[ix, iy]`` (x first). All lengths are km.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class Domain:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ConfigurationError(f"degenerate domain {self}")

    @property
    def lx(self) -> float:
        return self.x_max - self.x_min

    @property
    def ly(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.lx * self.ly

    def contains(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return ((p[..., 0] >= self.x_min) & (p[..., 0] <= self.x_max)
                & (p[..., 1] >= self.y_min) & (p[..., 1] <= self.y_max))

    def clamp(self, points) -> np.ndarray:
        p = np.array(points, dtype=float)
        p[..., 0] = np.clip(p[..., 0], self.x_min, self.x_max)
        p[..., 1] = np.clip(p[..., 1], self.y_min, self.y_max)
        return p


@dataclass(frozen=True)
class GridSpec:
    """Cell-centered ``nx`` by ``ny`` grid over a domain."""

    domain: Domain
    nx: int = 128
    ny: int = 128

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ConfigurationError("grid needs at least 2 cells per axis")

    @property
    def dx(self) -> float:
        return self.domain.lx / self.nx

    @property
    def dy(self) -> float:
        return self.domain.ly / self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def xc(self) -> np.ndarray:
        return self.domain.x_min + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def yc(self) -> np.ndarray:
        return self.domain.y_min + (np.arange(self.ny) + 0.5) * self.dy

    def centers(self) -> np.ndarray:
        """Cell centers, shape (nx, ny, 2)."""
        X, Y = np.meshgrid(self.xc, self.yc, indexing="ij")
        return np.stack([X, Y], axis=-1)

    def zeros(self) -> "ScalarField":
        return ScalarField(self, np.zeros((self.nx, self.ny)))


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: GridSpec
    values: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.nx, self.grid.ny):
            raise ConfigurationError(
                f"values shape {v.shape} does not match grid {(self.grid.nx, self.grid.ny)}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def domain(self) -> Domain:
        return self.grid.domain

    def integrate(self) -> float:
        return float(self.values.sum() * self.grid.cell_area)

    def with_values(self, values) -> "ScalarField":
        return ScalarField(self.grid, values)

    def to_rows(self):
        """Yield ``(x_km, y_km, value)`` per cell, x fastest."""
        xc, yc = self.grid.xc, self.grid.yc
        for j in range(self.grid.ny):
            for i in range(self.grid.nx):
                yield float(xc[i]), float(yc[j]), float(self.values[i, j])


def require_same_grid(*fields: ScalarField):
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise ConfigurationError("fields live on different grids")


def sobolev_weights(k_squared, beta: float) -> np.ndarray:
    return np.power(1.0 + np.asarray(k_squared, dtype=float), beta)


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Separable, L2-orthonormal cosine basis with K modes per axis.

    ``f_k(x, y) = a_kx a_ky cos(kx pi (x - x_min) / Lx) cos(ky pi (y - y_min) / Ly)``
    with ``a_0 = 1/sqrt(L)`` and ``a_k = sqrt(2/L)`` otherwise.
    """

    domain: Domain
    K: int = 32
    beta: float = -0.5
    lam: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.K < 1:
            raise ConfigurationError("K must be positive")
        if not self.beta < 0:
            raise ConfigurationError("Sobolev index beta must be negative")
        k = np.arange(self.K)
        k2 = k[:, None] ** 2 + k[None, :] ** 2
        lam = sobolev_weights(k2, self.beta)
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    def _axis(self, L):
        k = np.arange(self.K)
        amp = np.where(k == 0, np.sqrt(1.0 / L), np.sqrt(2.0 / L))
        return k * np.pi / L, amp

    def axis_functions(self, x, axis: int):
        """Return (values, derivatives) of the 1-D factors, each shape (K, len(x))."""
        d = self.domain
        origin, L = (d.x_min, d.lx) if axis == 0 else (d.y_min, d.ly)
        wn, amp = self._axis(L)
        arg = wn[:, None] * (np.asarray(x, dtype=float)[None, :] - origin)
        return amp[:, None] * np.cos(arg), -(amp * wn)[:, None] * np.sin(arg)

    def evaluate(self, points) -> np.ndarray:
        """f_k at points; shape (K, K, n)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        fx, _ = self.axis_functions(p[:, 0], 0)
        fy, _ = self.axis_functions(p[:, 1], 1)
        return fx[:, None, :] * fy[None, :, :]

    def mode_field(self, grid: GridSpec, kx: int, ky: int) -> np.ndarray:
        fx, _ = self.axis_functions(grid.xc, 0)
        fy, _ = self.axis_functions(grid.yc, 1)
        return np.outer(fx[kx], fy[ky])


def transform(field: ScalarField, basis: SpectralBasis) -> np.ndarray:
    """Midpoint-rule projection ``s_k = sum f_k * field * dA``; returns a (K, K) array."""
    if field.domain != basis.domain:
        raise ConfigurationError("field and basis domains differ")
    g = field.grid
    fx, _ = basis.axis_functions(g.xc, 0)
    fy, _ = basis.axis_functions(g.yc, 1)
    return (fx @ field.values @ fy.T) * g.cell_area


def sobolev_norm(coeffs, basis: SpectralBasis) -> float:
    return float(np.sum(basis.lam * np.asarray(coeffs) ** 2))


def synthesize_potential(coeffs, basis: SpectralBasis, points):
    """Potential ``u = sum lam_k s_k f_k`` and its analytic gradient at points.

    Points outside the domain are clamped to the boundary. Returns
    ``(u, grad, clamped)`` with shapes (n,), (n, 2), (n,). A single point
    (shape (2,)) gives scalar ``u`` and a (2,) gradient.
    """
    p = np.asarray(points, dtype=float)
    single = p.ndim == 1
    p = np.atleast_2d(p)
    inside = basis.domain.contains(p)
    p = basis.domain.clamp(p)
    w = basis.lam * np.asarray(coeffs, dtype=float)
    fx, dfx = basis.axis_functions(p[:, 0], 0)
    fy, dfy = basis.axis_functions(p[:, 1], 1)
    wfy = w @ fy          # (K, n): sum over ky
    wdfy = w @ dfy
    u = np.einsum("an,an->n", fx, wfy)
    gx = np.einsum("an,an->n", dfx, wfy)
    gy = np.einsum("an,an->n", fx, wdfy)
    grad = np.stack([gx, gy], axis=-1)
    if single:
        return float(u[0]), grad[0], bool(~inside[0])
    return u, grad, ~inside
