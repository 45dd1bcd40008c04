"""Stochastic detection: exponential-time sighting within a sensor radius."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class DetectionModel:
    radius: float = 1.5            # km
    expected_time: float = 2.0     # seconds

    def __post_init__(self):
        if self.radius <= 0 or self.expected_time <= 0:
            raise ValueError("radius and expected detection time must be positive")

    def probability(self, dwell_hours):
        """Chance of a sighting after ``dwell_hours`` continuous exposure."""
        t = np.asarray(dwell_hours, dtype=float) * SECONDS_PER_HOUR
        return -np.expm1(-t / self.expected_time)


@dataclass(eq=False)
class TargetSet:
    positions: np.ndarray
    detected: np.ndarray = None
    detected_at: np.ndarray = None
    detected_by: np.ndarray = None
    frozen: np.ndarray = None

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        n = len(self.positions)
        if self.detected is None:
            self.detected = np.zeros(n, dtype=bool)
        if self.detected_at is None:
            self.detected_at = np.full(n, np.nan)
        if self.detected_by is None:
            self.detected_by = np.full(n, -1, dtype=int)
        if self.frozen is None:
            self.frozen = np.zeros(n, dtype=bool)

    def __len__(self):
        return len(self.positions)

    @property
    def detected_fraction(self) -> float:
        return float(self.detected.mean()) if len(self) else 0.0


def uniform_draw(seed: int, stream: int, step: int, target_ids) -> np.ndarray:
    """One U(0,1) per target from a counter-based stream keyed by (seed, stream).

    The counter is ``(step, target id)``, so the draw does not depend on
    which other targets were tested or in what order.
    """
    out = np.empty(len(target_ids))
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    for k, tid in enumerate(target_ids):
        bitgen = np.random.Philox(key=key, counter=np.array([step, int(tid), 0, 0], dtype=np.uint64))
        out[k] = np.random.Generator(bitgen).random()
    return out


def exposure(model: DetectionModel, agent_samples, active, targets: TargetSet, dt: float):
    """Time (hours) each undetected target spends within range of some agent.

    ``agent_samples`` has shape (m, n_agents, 2): agent positions at m
    evenly spaced instants covering the step. Each sample stands for
    ``dt / m`` of exposure; overlap between agents counts once. Also
    returns the lowest-numbered agent that saw each target.
    """
    samples = np.asarray(agent_samples, dtype=float)
    m = samples.shape[0]
    dwell = np.zeros(len(targets))
    first_agent = np.full(len(targets), -1, dtype=int)
    act = np.flatnonzero(active)
    cand = np.flatnonzero(~targets.detected)
    if len(act) == 0 or len(cand) == 0:
        return dwell, first_agent
    tp = targets.positions[cand]
    r2 = model.radius ** 2
    # coarse prefilter: targets near the swept bounding box
    lo = samples[:, act].reshape(-1, 2).min(axis=0) - model.radius
    hi = samples[:, act].reshape(-1, 2).max(axis=0) + model.radius
    near = np.all((tp >= lo) & (tp <= hi), axis=1)
    cand, tp = cand[near], tp[near]
    if len(cand) == 0:
        return dwell, first_agent
    d2 = ((samples[:, act, None, :] - tp[None, None, :, :]) ** 2).sum(axis=-1)  # (m, a, t)
    in_range = d2 <= r2
    any_agent = in_range.any(axis=1)                                           # (m, t)
    dwell[cand] = any_agent.sum(axis=0) * (dt / m)
    hit = in_range.any(axis=0)                                                 # (a, t)
    seen = hit.any(axis=0)
    first_agent[cand[seen]] = act[np.argmax(hit[:, seen], axis=0)]
    return dwell, first_agent


def detect_step(model: DetectionModel, agent_samples, active, targets: TargetSet, dt: float,
                t_hours: float, *, seed: int, stream: int, step: int):
    """Bernoulli sighting test for every exposed target; mutates ``targets``.

    Returns the ids detected during this step.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    dwell, first_agent = exposure(model, agent_samples, active, targets, dt)
    exposed = np.flatnonzero(dwell > 0)
    if len(exposed) == 0:
        return np.empty(0, dtype=int)
    p = model.probability(dwell[exposed])
    u = uniform_draw(seed, stream, step, exposed)
    hit = exposed[u < p]
    targets.detected[hit] = True
    targets.detected_at[hit] = t_hours
    targets.detected_by[hit] = first_agent[hit]
    return hit


def path_samples(start, end, spacing: float = 1.0):
    """Evenly spaced points on straight segments so no gap exceeds ``spacing`` km."""
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    length = np.hypot(*(end - start).T).max() if len(start) else 0.0
    m = max(1, math.ceil(length / spacing))
    f = (np.arange(m) + 1.0) / m
    return start[None] + f[:, None, None] * (end - start)[None]


def detection_records(targets: TargetSet, ids):
    return [{"t_hours": float(targets.detected_at[i]), "target_id": int(i),
             "agent_id": int(targets.detected_by[i]),
             "x_km": float(targets.positions[i, 0]), "y_km": float(targets.positions[i, 1])}
            for i in ids]
