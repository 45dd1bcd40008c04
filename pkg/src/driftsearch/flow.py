"""Velocity fields and numerical flow maps.

Positions are km, times are hours, velocities km/h. Every field is a
vectorized callable ``field(points, t) -> velocities`` with ``points`` of
shape (n, 2).
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import ConfigurationError, IntegrationError
from .grid import Domain

MAX_STEPS = 10**6
KM_PER_DEG = math.pi * 6371.0 / 180.0
MS_TO_KMH = 3.6


class VelocityField:
    t_range = (-math.inf, math.inf)

    def __call__(self, points: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class UniformFlow(VelocityField):
    u: float = 0.0
    v: float = 0.0

    def __call__(self, points, t):
        out = np.empty_like(points, dtype=float)
        out[:, 0] = self.u
        out[:, 1] = self.v
        return out


def zero_flow() -> UniformFlow:
    return UniformFlow(0.0, 0.0)


@dataclass(frozen=True)
class RotationFlow(VelocityField):
    """Rigid rotation ``v = omega * (-(y - yc), x - xc)``; omega in rad/h."""

    omega: float = 1.0
    xc: float = 0.0
    yc: float = 0.0

    def __call__(self, points, t):
        out = np.empty_like(points, dtype=float)
        out[:, 0] = -self.omega * (points[:, 1] - self.yc)
        out[:, 1] = self.omega * (points[:, 0] - self.xc)
        return out


@dataclass(frozen=True)
class SaddleFlow(VelocityField):
    """Hyperbolic point ``v = rate * (x - xc, -(y - yc))``; rate in 1/h."""

    rate: float = 0.1
    xc: float = 0.0
    yc: float = 0.0

    def __call__(self, points, t):
        out = np.empty_like(points, dtype=float)
        out[:, 0] = self.rate * (points[:, 0] - self.xc)
        out[:, 1] = -self.rate * (points[:, 1] - self.yc)
        return out


@dataclass(frozen=True)
class DoubleGyre(VelocityField):
    """Periodically perturbed double gyre stretched over a 2:1 box.

    ``amplitude`` is the peak speed scale in km/h, ``period`` the
    perturbation period in hours. The box is [x0, x0 + 2L] x [y0, y0 + L].
    """

    x0: float = 0.0
    y0: float = 0.0
    length: float = 200.0
    amplitude: float = 3.0
    eps: float = 0.25
    period: float = 48.0

    def __call__(self, points, t):
        L = self.length
        X = (points[:, 0] - self.x0) / L
        Y = (points[:, 1] - self.y0) / L
        a = self.eps * math.sin(2.0 * math.pi * t / self.period)
        b = 1.0 - 2.0 * a
        f = a * X * X + b * X
        dfdx = 2.0 * a * X + b
        # stream function psi = (A L / pi) sin(pi f) sin(pi Y); u = -dpsi/dy, v = dpsi/dx
        out = np.empty_like(points, dtype=float)
        out[:, 0] = -self.amplitude * np.sin(np.pi * f) * np.cos(np.pi * Y)
        out[:, 1] = self.amplitude * np.cos(np.pi * f) * np.sin(np.pi * Y) * dfdx
        return out


ANALYTIC_FLOWS = {
    "uniform": UniformFlow,
    "rotation": RotationFlow,
    "saddle": SaddleFlow,
    "double_gyre": DoubleGyre,
}


def analytic_flow(name: str, **params) -> VelocityField:
    try:
        cls = ANALYTIC_FLOWS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown analytic flow {name!r}; expected one of {sorted(ANALYTIC_FLOWS)}") from None
    try:
        return cls(**{k: float(v) for k, v in params.items()})
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for flow {name!r}: {exc}") from None


# ---------------------------------------------------------------------------
# gridded data

OVF_MAGIC = b"OVF1"
_OVF_HEADER = struct.Struct("<4s3i7d")


class GriddedVelocity(VelocityField):
    """Frames of (u, v) on a regular lon/lat grid, held in local km and km/h.

    Bilinear in space, linear in time. Times outside the record clamp to
    the first/last frame; points off the grid get zero velocity (see
    :meth:`inside`).
    """

    def __init__(self, u, v, *, lon0, lat0, dlon, dlat, ref_lat, t0, dt):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if u.ndim != 3 or u.shape != v.shape:
            raise ConfigurationError("u and v must both have shape (nt, ny, nx)")
        nt, ny, nx = u.shape
        if nx < 2 or ny < 2 or nt < 1 or dt <= 0 and nt > 1:
            raise ConfigurationError("gridded velocity needs nx, ny >= 2 and a positive time step")
        self.lon0, self.lat0, self.dlon, self.dlat = lon0, lat0, dlon, dlat
        self.ref_lat, self.t0, self.dt = ref_lat, t0, dt
        self.nx, self.ny, self.nt = nx, ny, nt
        self.dx_km = dlon * KM_PER_DEG * math.cos(math.radians(ref_lat))
        self.dy_km = dlat * KM_PER_DEG
        self.x = np.arange(nx) * self.dx_km
        self.y = np.arange(ny) * self.dy_km
        self.times = t0 + np.arange(nt) * dt
        self.t_range = (float(self.times[0]), float(self.times[-1]))
        self.u_ms = u
        self.v_ms = v
        uv = np.stack([u, v], axis=-1) * MS_TO_KMH
        times = self.times
        if nt == 1:
            uv = np.concatenate([uv, uv])
            times = np.array([t0, t0 + 1.0])
        self._interp = RegularGridInterpolator(
            (times, self.y, self.x), uv, method="linear", bounds_error=False, fill_value=None)
        self._t_clip = (float(times[0]), float(times[-1]))

    @property
    def domain(self) -> Domain:
        return Domain(0.0, float(self.x[-1]), 0.0, float(self.y[-1]))

    def inside(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        return ((p[:, 0] >= 0) & (p[:, 0] <= self.x[-1])
                & (p[:, 1] >= 0) & (p[:, 1] <= self.y[-1]))

    def to_km(self, lon, lat):
        return ((np.asarray(lon) - self.lon0) * KM_PER_DEG * math.cos(math.radians(self.ref_lat)),
                (np.asarray(lat) - self.lat0) * KM_PER_DEG)

    def __call__(self, points, t):
        points = np.asarray(points, dtype=float)
        tc = min(max(t, self._t_clip[0]), self._t_clip[1])
        q = np.column_stack([np.full(len(points), tc), points[:, 1], points[:, 0]])
        out = self._interp(q)
        out[~self.inside(points)] = 0.0
        return out


def write_ovf(path, field: GriddedVelocity):
    """Write an OVF1 file: header then per frame u (float32, m/s) and v."""
    header = _OVF_HEADER.pack(OVF_MAGIC, field.nx, field.ny, field.nt,
                              field.lon0, field.lat0, field.dlon, field.dlat,
                              field.ref_lat, field.t0, field.dt)
    with open(path, "wb") as fh:
        fh.write(header)
        for k in range(field.nt):
            fh.write(field.u_ms[k].astype("<f4").tobytes())
            fh.write(field.v_ms[k].astype("<f4").tobytes())


def read_ovf(path) -> GriddedVelocity:
    data = Path(path).read_bytes()
    if len(data) < _OVF_HEADER.size or data[:4] != OVF_MAGIC:
        raise ConfigurationError(f"{path}: not an OVF1 file")
    _, nx, ny, nt, lon0, lat0, dlon, dlat, ref_lat, t0, dt = _OVF_HEADER.unpack_from(data)
    n = nx * ny
    expected = _OVF_HEADER.size + nt * 2 * n * 4
    if nx < 2 or ny < 2 or nt < 1 or len(data) != expected:
        raise ConfigurationError(f"{path}: truncated or inconsistent OVF1 payload")
    frames = np.frombuffer(data, dtype="<f4", offset=_OVF_HEADER.size).reshape(nt, 2, ny, nx)
    return GriddedVelocity(frames[:, 0].astype(float), frames[:, 1].astype(float),
                           lon0=lon0, lat0=lat0, dlon=dlon, dlat=dlat,
                           ref_lat=ref_lat, t0=t0, dt=dt)


# ---------------------------------------------------------------------------
# integration

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _dp_step(field, x, t, h):
    k = np.empty((7,) + x.shape)
    k[0] = field(x, t)
    for i in range(1, 7):
        dx = np.tensordot(_A[i], k[:i], axes=1)
        k[i] = field(x + h * dx, t + _C[i] * h)
    x_new = x + h * np.tensordot(_B5, k, axes=1)
    err = h * np.tensordot(_E, k, axes=1)
    return x_new, err


def _rk4_step(field, x, t, h):
    k1 = field(x, t)
    k2 = field(x + 0.5 * h * k1, t + 0.5 * h)
    k3 = field(x + 0.5 * h * k2, t + 0.5 * h)
    k4 = field(x + h * k3, t + h)
    return x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(field: VelocityField, x0, t1: float, t2: float, tol: float = 1e-6, *,
              method: str = "adaptive", step: float | None = None,
              domain: Domain | None = None, return_frozen: bool = False,
              max_steps: int = MAX_STEPS):
    """Flow map: carry positions ``x0`` from ``t1`` to ``t2`` along ``field``.

    ``method="adaptive"`` uses embedded Dormand-Prince 5(4) with one shared
    step for the whole batch, accepting a step only when the largest local
    error estimate is at most ``tol`` km. ``method="rk4"`` takes fixed RK4
    steps of size ``step`` (shortened to land on ``t2``).

    With a ``domain``, any point that would leave it is frozen at its last
    inside position for the rest of the interval.
    """
    if t2 < t1:
        raise ValueError("integrate requires t2 >= t1")
    x = np.array(x0, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    frozen = np.zeros(len(x), dtype=bool)
    if domain is not None:
        frozen |= ~domain.contains(x)
    span = t2 - t1
    if span == 0 or len(x) == 0:
        return _pack(x, frozen, single, return_frozen)

    active = ~frozen
    t = t1
    n_steps = 0
    if method == "rk4":
        if step is None or step <= 0:
            raise ValueError("fixed-step RK4 needs a positive step")
        n = max(1, math.ceil(span / step - 1e-12))
        h = span / n
        for i in range(n):
            xa = _rk4_step(field, x[active], t1 + i * h, h)
            x, active = _commit(x, xa, active, domain)
        return _pack(x, ~active | frozen, single, return_frozen)
    if method != "adaptive":
        raise ValueError(f"unknown method {method!r}")

    h = span if step is None else min(step, span)
    while t < t2:
        if not active.any():
            break
        n_steps += 1
        if n_steps > max_steps:
            raise IntegrationError(
                f"step cap {max_steps} exceeded at t={t:.6g} h (h={h:.3g})", t=t, steps=n_steps)
        h = min(h, t2 - t)
        xa, err = _dp_step(field, x[active], t, h)
        err_norm = float(np.max(np.hypot(err[:, 0], err[:, 1]))) if len(xa) else 0.0
        if not np.isfinite(err_norm):
            h *= 0.2
            continue
        if err_norm <= tol:
            t = t2 if t2 - t - h <= 1e-12 * max(1.0, abs(t2)) else t + h
            x, active = _commit(x, xa, active, domain)
        factor = 5.0 if err_norm == 0 else min(5.0, max(0.2, 0.8 * (tol / err_norm) ** 0.2))
        h *= factor
    return _pack(x, ~active, single, return_frozen)


def _commit(x, xa, active, domain):
    if domain is not None:
        ok = domain.contains(xa)
        idx = np.flatnonzero(active)
        x = x.copy()
        x[idx[ok]] = xa[ok]
        active = active.copy()
        active[idx[~ok]] = False
        return x, active
    x = x.copy()
    x[active] = xa
    return x, active


def _pack(x, frozen, single, return_frozen):
    out = x[0] if single else x
    if return_frozen:
        return out, (bool(frozen[0]) if single else frozen)
    return out


def flow_map_gradient(field: VelocityField, x0, t1: float, t2: float, h: float = 0.5,
                      tol: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the flow map at ``x0`` (2x2)."""
    if h <= 0:
        raise ValueError("stencil h must be positive")
    x0 = np.asarray(x0, dtype=float)
    stencil = np.array([x0 + [h, 0], x0 - [h, 0], x0 + [0, h], x0 - [0, h]])
    end = integrate(field, stencil, t1, t2, tol)
    J = np.empty((2, 2))
    J[:, 0] = (end[0] - end[1]) / (2 * h)
    J[:, 1] = (end[2] - end[3]) / (2 * h)
    return J
