"""Coverage as drifting deposit particles, and its sensor-smoothed field."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import flow as flowmod
from .grid import GridSpec, ScalarField
from .kernels import splat


@dataclass(frozen=True, eq=False)
class CoverageState:
    """Deposited search effort.

    ``weights`` are agent-hours; ``searched`` holds accumulated search
    time per agent id. ``sigma`` is the sensor footprint scale in km.
    """

    positions: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    weights: np.ndarray = field(default_factory=lambda: np.empty(0))
    searched: dict = field(default_factory=dict)
    sigma: float = 3.0
    frozen: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "positions", np.asarray(self.positions, dtype=float).reshape(-1, 2))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float).reshape(-1))
        if self.frozen is None:
            object.__setattr__(self, "frozen", np.zeros(len(self.weights), dtype=bool))

    def __len__(self):
        return len(self.weights)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @property
    def total_searched(self) -> float:
        return float(sum(self.searched.values()))


def deposit(state: CoverageState, positions, dt: float, agent_ids=None) -> CoverageState:
    """One particle of weight ``dt`` per agent position."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    if len(pos) == 0:
        return state
    if dt <= 0:
        raise ValueError("dt must be positive")
    ids = range(len(pos)) if agent_ids is None else agent_ids
    searched = dict(state.searched)
    for i in ids:
        searched[i] = searched.get(i, 0.0) + dt
    return replace(state,
                   positions=np.vstack([state.positions, pos]),
                   weights=np.concatenate([state.weights, np.full(len(pos), dt)]),
                   frozen=np.concatenate([state.frozen, np.zeros(len(pos), dtype=bool)]),
                   searched=searched)


def drift_coverage(state: CoverageState, velocity, t0: float, t1: float, *,
                   domain=None, tol: float = 1e-6) -> CoverageState:
    if t1 < t0:
        raise ValueError("drift interval must be nonnegative")
    if len(state) == 0 or t1 == t0:
        return state
    pos, frozen = flowmod.integrate(velocity, state.positions, t0, t1, tol,
                                    domain=domain, return_frozen=True)
    return replace(state, positions=pos, frozen=frozen | state.frozen)


def smooth(state: CoverageState, grid: GridSpec) -> ScalarField:
    """Sensor-smoothed coverage; grid integral equals the deposited agent-hours."""
    return ScalarField(grid, splat(state.positions, state.weights, grid, state.sigma))


def merge_close(state: CoverageState, radius: float | None = None) -> CoverageState:
    """Merge particles closer than ``radius`` (default sigma/4) into weighted centroids.

    Particles are binned on a lattice of spacing ``radius``; each occupied
    bin becomes one particle carrying the summed weight.
    """
    if len(state) < 2:
        return state
    r = state.sigma / 4.0 if radius is None else radius
    key = np.floor(state.positions / r).astype(np.int64)
    _, inv = np.unique(key, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    n = inv.max() + 1
    w = np.bincount(inv, weights=state.weights, minlength=n)
    cx = np.bincount(inv, weights=state.weights * state.positions[:, 0], minlength=n) / w
    cy = np.bincount(inv, weights=state.weights * state.positions[:, 1], minlength=n) / w
    frozen = np.bincount(inv, weights=state.frozen.astype(float), minlength=n) > 0
    return replace(state, positions=np.column_stack([cx, cy]), weights=w, frozen=frozen)
