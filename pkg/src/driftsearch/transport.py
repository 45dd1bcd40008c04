"""Semi-Lagrangian transport of the target distribution.

The distribution is carried by equally weighted tracers: seeded over the
splash polygon, moved with the flow map, and turned back into a grid
density by kernel estimation whenever a field is needed.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import flow as flowmod
from .errors import ConfigurationError
from .grid import GridSpec, ScalarField
from .kernels import splat
from .util import atomic_write_text, num


def radical_inverse(indices, base: int) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.int64).copy()
    result = np.zeros(idx.shape)
    f = 1.0 / base
    while np.any(idx > 0):
        result += f * (idx % base)
        idx //= base
        f /= base
    return result


def halton(n: int, start: int = 1) -> np.ndarray:
    """Points ``start .. start+n-1`` of the (2, 3) Halton sequence, shape (n, 2)."""
    i = np.arange(start, start + n)
    return np.column_stack([radical_inverse(i, 2), radical_inverse(i, 3)])


# ---------------------------------------------------------------------------
# polygons

def polygon_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def points_in_convex(points, vertices, tol: float = 1e-12) -> np.ndarray:
    """Containment (boundary inclusive) for a counter-clockwise convex polygon."""
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    v = np.asarray(vertices, dtype=float)
    a = v
    b = np.roll(v, -1, axis=0)
    e = b - a
    cross = (e[None, :, 0] * (p[:, None, 1] - a[None, :, 1])
             - e[None, :, 1] * (p[:, None, 0] - a[None, :, 0]))
    scale = np.hypot(e[:, 0], e[:, 1])[None, :]
    return np.all(cross >= -tol * np.maximum(scale, 1.0), axis=1)


@dataclass(frozen=True, eq=False)
class SplashRegion:
    """Convex splash polygon (km) with its splash time ``t0`` (hours)."""

    vertices: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ConfigurationError("splash polygon needs at least 3 vertices")
        area = polygon_area(v)
        if abs(area) <= 1e-12:
            raise ConfigurationError("splash polygon has zero area")
        if area < 0:
            v = v[::-1]
        e = np.roll(v, -1, axis=0) - v
        turn = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(turn < -1e-9 * np.abs(area)):
            raise ConfigurationError("splash polygon must be convex")
        winding = np.sum(np.arctan2(turn, np.einsum("ij,ij->i", e, np.roll(e, -1, axis=0))))
        if not np.isclose(winding, 2 * np.pi):
            raise ConfigurationError("splash polygon must be simple")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    @property
    def bbox(self):
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return lo, hi

    def contains(self, points) -> np.ndarray:
        return points_in_convex(points, self.vertices)

    def sample_uniform(self, n: int, rng: np.random.Generator) -> np.ndarray:
        lo, hi = self.bbox
        out = np.empty((0, 2))
        while len(out) < n:
            cand = lo + rng.random((max(2 * (n - len(out)), 16), 2)) * (hi - lo)
            out = np.vstack([out, cand[self.contains(cand)]])
        return out[:n]


# ---------------------------------------------------------------------------
# tracers

@dataclass(frozen=True, eq=False)
class TracerEnsemble:
    positions: np.ndarray
    epoch: float = 0.0
    frozen: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(p)):
            raise ConfigurationError("tracer positions must be finite")
        object.__setattr__(self, "positions", p)
        if self.frozen is None:
            object.__setattr__(self, "frozen", np.zeros(len(p), dtype=bool))

    def __len__(self):
        return len(self.positions)

    @property
    def weights(self) -> np.ndarray:
        n = len(self)
        return np.full(n, 1.0 / n) if n else np.zeros(0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# epoch_hours={num(self.epoch)}\n")
        buf.write("id,x_km,y_km,weight\n")
        w = self.weights
        for i, (x, y) in enumerate(self.positions):
            buf.write(f"{i},{num(x)},{num(y)},{num(w[i])}\n")
        return buf.getvalue()

    def save_csv(self, path):
        atomic_write_text(path, self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "TracerEnsemble":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# epoch_hours="):
            raise ConfigurationError("tracer CSV must start with an '# epoch_hours=' comment")
        epoch = float(lines[0].split("=", 1)[1])
        if lines[1].strip() != "id,x_km,y_km,weight":
            raise ConfigurationError("unexpected tracer CSV header")
        rows = [ln.split(",") for ln in lines[2:] if ln.strip()]
        pos = np.array([[float(r[1]), float(r[2])] for r in rows]).reshape(-1, 2)
        return cls(pos, epoch)

    @classmethod
    def load_csv(cls, path) -> "TracerEnsemble":
        with open(path) as fh:
            return cls.from_csv(fh.read())


def seed_halton(region: SplashRegion, n: int) -> TracerEnsemble:
    """First ``n`` Halton points of the bounding box that land in the polygon.

    The sequence index keeps running across rejections rather than restarting.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    lo, hi = region.bbox
    accepted = []
    count = 0
    start = 1
    fill = max(region.area / float(np.prod(hi - lo)), 1e-3)
    while count < n:
        batch = int((n - count) / fill * 1.1) + 16
        pts = lo + halton(batch, start) * (hi - lo)
        start += batch
        pts = pts[region.contains(pts)]
        accepted.append(pts[: n - count])
        count += len(accepted[-1])
    pos = np.vstack(accepted) if accepted else np.empty((0, 2))
    return TracerEnsemble(pos, region.t0)


def seed_regions(regions, n: int) -> TracerEnsemble:
    """Halton tracers over several splash polygons, split in proportion to area."""
    if len(regions) == 1:
        return seed_halton(regions[0], n)
    areas = np.array([r.area for r in regions])
    counts = np.floor(n * areas / areas.sum()).astype(int)
    counts[: n - counts.sum()] += 1
    parts = [seed_halton(r, int(c)).positions for r, c in zip(regions, counts)]
    return TracerEnsemble(np.vstack(parts), min(r.t0 for r in regions))


def advect(ensemble: TracerEnsemble, field, t_end: float, *, domain=None,
           tol: float = 1e-6) -> TracerEnsemble:
    """Move every tracer along the flow map to ``t_end``; weights are untouched."""
    if t_end < ensemble.epoch:
        raise ValueError("advect cannot run backwards in time")
    if len(ensemble) == 0:
        return TracerEnsemble(ensemble.positions, t_end)
    pos, frozen = flowmod.integrate(field, ensemble.positions, ensemble.epoch, t_end, tol,
                                    domain=domain, return_frozen=True)
    return TracerEnsemble(pos, t_end, frozen | ensemble.frozen)


def density(ensemble: TracerEnsemble, grid: GridSpec, bandwidth: float = 3.0) -> ScalarField:
    """Truncated-Gaussian density estimate whose grid integral is exactly 1."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    if len(ensemble) == 0:
        return ScalarField(grid, np.zeros((grid.nx, grid.ny)), degenerate=True)
    values = splat(ensemble.positions, ensemble.weights, grid, bandwidth)
    values /= values.sum() * grid.cell_area
    return ScalarField(grid, values)
