"""Agent motion: the spectral gradient controller and the lawnmower baseline."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .grid import Domain, SpectralBasis, synthesize_potential, transform

GRAD_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class AgentState:
    """Fleet state: one row per agent.

    ``headings`` are unit vectors; all agents share one speed in km/h.
    """

    positions: np.ndarray
    headings: np.ndarray
    speed: float
    active: np.ndarray = None

    def __post_init__(self):
        p = np.array(self.positions, dtype=float).reshape(-1, 2)
        h = np.array(self.headings, dtype=float).reshape(-1, 2)
        if h.shape != p.shape:
            raise ValueError("positions and headings disagree in shape")
        norm = np.hypot(h[:, 0], h[:, 1])
        if np.any(norm == 0):
            raise ValueError("headings must be nonzero")
        if self.speed <= 0:
            raise ValueError("speed must be positive")
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "headings", h / norm[:, None])
        act = np.ones(len(p), dtype=bool) if self.active is None else np.asarray(self.active, dtype=bool)
        object.__setattr__(self, "active", act)

    def __len__(self):
        return len(self.positions)


def steer_smc(agents: AgentState, mismatch, basis: SpectralBasis) -> AgentState:
    """Point each active agent up the gradient of the mismatch potential.

    Where the gradient vanishes the previous heading is kept.
    """
    coeffs = transform(mismatch.field if hasattr(mismatch, "field") else mismatch, basis)
    _, grad, _ = synthesize_potential(coeffs, basis, agents.positions)
    norm = np.hypot(grad[:, 0], grad[:, 1])
    turn = agents.active & (norm > GRAD_EPS)
    headings = agents.headings.copy()
    headings[turn] = grad[turn] / norm[turn, None]
    return replace(agents, headings=headings)


def move_straight(agents: AgentState, dt: float, domain: Domain) -> AgentState:
    """Advance active agents ``speed * dt`` along their headings, reflecting off the boundary."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    pos = agents.positions.copy()
    hdg = agents.headings.copy()
    a = agents.active
    pos[a] += hdg[a] * agents.speed * dt
    for axis, lo, hi in ((0, domain.x_min, domain.x_max), (1, domain.y_min, domain.y_max)):
        below = a & (pos[:, axis] < lo)
        above = a & (pos[:, axis] > hi)
        pos[below, axis] = 2 * lo - pos[below, axis]
        pos[above, axis] = 2 * hi - pos[above, axis]
        hdg[below | above, axis] *= -1
    pos = domain.clamp(pos)
    return replace(agents, positions=pos, headings=hdg)


def smc_step(agents: AgentState, mismatch, basis: SpectralBasis, dt: float) -> AgentState:
    return move_straight(steer_smc(agents, mismatch, basis), dt, basis.domain)


# ---------------------------------------------------------------------------
# geometry

def convex_hull(points) -> np.ndarray:
    """Counter-clockwise hull (Andrew's monotone chain).

    One distinct point gives a 1-vertex polygon, collinear input gives its
    two extreme points.
    """
    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        return np.array([pts[0], pts[-1]])
    return hull


def _clip_line(poly, origin, direction):
    """Parameter interval of ``origin + t * direction`` inside a CCW convex polygon."""
    lo, hi = -np.inf, np.inf
    for a, b in zip(poly, np.roll(poly, -1, axis=0)):
        e = b - a
        # cross(e, x - a) >= 0 for interior points
        c0 = e[0] * (origin[1] - a[1]) - e[1] * (origin[0] - a[0])
        c1 = e[0] * direction[1] - e[1] * direction[0]
        if abs(c1) < 1e-15:
            if c0 < -1e-9 * max(1.0, np.hypot(*e)):
                return None
            continue
        t = -c0 / c1
        if c1 > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
    if hi < lo:
        return None
    return lo, hi


@dataclass(eq=False)
class WaypointPlan:
    """Per-agent closed waypoint loops plus each agent's next-waypoint index."""

    waypoints: list
    tracks: list = field(default_factory=list)
    index: np.ndarray = None

    def __post_init__(self):
        if self.index is None:
            self.index = np.zeros(len(self.waypoints), dtype=int)

    def path_length(self, agent: int) -> float:
        w = self.waypoints[agent]
        if len(w) < 2:
            return 0.0
        return float(np.sum(np.hypot(*np.diff(w, axis=0).T)))

    def start_positions(self) -> np.ndarray:
        return np.array([w[0] for w in self.waypoints])


def _dedupe(points):
    out = [points[0]]
    for p in points[1:]:
        if np.hypot(*(p - out[-1])) > 1e-9:
            out.append(p)
    return np.array(out)


def lawnmower_tracks(polygon, spacing: float):
    """Parallel sweep tracks (list of (start, end) pairs) in serpentine order."""
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    hull = convex_hull(polygon)
    if len(hull) == 1:
        return [(hull[0], hull[0])]
    if len(hull) == 2:
        return [(hull[0], hull[1])]

    best = None
    for a, b in zip(hull, np.roll(hull, -1, axis=0)):
        d = (b - a) / np.hypot(*(b - a))
        n = np.array([-d[1], d[0]])
        proj = hull @ n
        width = proj.max() - proj.min()
        if best is None or width < best[0] - 1e-12:
            best = (width, d, n, proj.min(), proj.max())
    width, d, n, omin, omax = best

    if width < spacing:
        offsets = [0.5 * (omin + omax)]
    else:
        count = int(np.ceil(width / spacing - 1e-9))
        offsets = [min(omin + spacing * (i + 0.5), omax - 0.5 * spacing) for i in range(count)]

    tracks = []
    for o in offsets:
        origin = n * o
        span = _clip_line(hull, origin, d)
        if span is None:
            continue
        s, e = origin + span[0] * d, origin + span[1] * d
        if len(tracks) % 2:
            s, e = e, s
        tracks.append((s, e))
    return tracks


def _partition(lengths, n_groups):
    """Contiguous split of ``lengths`` into ``n_groups`` runs of near-equal sum."""
    n = len(lengths)
    if n_groups >= n:
        return [[i] for i in range(n)] + [[] for _ in range(n_groups - n)]
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    total = cum[-1]
    cuts = [0]
    for g in range(1, n_groups):
        target = total * g / n_groups
        j = int(np.argmin(np.abs(cum - target)))
        j = min(max(j, cuts[-1] + 1), n - (n_groups - g))
        cuts.append(j)
    cuts.append(n)
    return [list(range(cuts[g], cuts[g + 1])) for g in range(n_groups)]


def lawnmower_plan(polygon, n_agents: int, spacing: float = 3.0) -> WaypointPlan:
    """Boustrophedon sweep of a convex region split among ``n_agents``.

    Tracks run perpendicular to the region's narrowest width, the first one
    ``spacing / 2`` inside the edge. Agents get contiguous track groups of
    roughly equal length; with more agents than tracks the extra agents
    repeat groups round-robin.
    """
    if n_agents < 1:
        raise ValueError("need at least one agent")
    tracks = lawnmower_tracks(polygon, spacing)
    lengths = [np.hypot(*(e - s)) for s, e in tracks]
    groups = _partition(lengths, n_agents)
    filled = [g for g in groups if g]
    waypoints = []
    for i, g in enumerate(groups):
        if not g:
            g = filled[i % len(filled)]
        pts = [p for j in g for p in tracks[j]]
        waypoints.append(_dedupe(pts))
    return WaypointPlan(waypoints, tracks)


def follow_waypoints(agents: AgentState, plan: WaypointPlan, dt: float):
    """Move agents along their waypoint loops at constant speed.

    Distance left over on reaching a waypoint carries into the next leg.
    Returns ``(agents, plan, stalled)`` where ``stalled`` flags agents with
    no path to follow.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    pos = agents.positions.copy()
    hdg = agents.headings.copy()
    index = plan.index.copy()
    stalled = np.zeros(len(agents), dtype=bool)
    for i in range(len(agents)):
        if not agents.active[i]:
            continue
        wps = plan.waypoints[i] if i < len(plan.waypoints) else np.empty((0, 2))
        if len(wps) == 0 or (len(wps) == 1 and np.allclose(pos[i], wps[0])):
            stalled[i] = True
            continue
        remaining = agents.speed * dt
        while remaining > 0:
            target = wps[index[i] % len(wps)]
            delta = target - pos[i]
            dist = float(np.hypot(*delta))
            if dist > 0:
                hdg[i] = delta / dist
            if dist <= remaining:
                pos[i] = target
                remaining -= dist
                index[i] = (index[i] + 1) % len(wps)
                if len(wps) == 1:
                    break
            else:
                pos[i] = pos[i] + delta * (remaining / dist)
                remaining = 0.0
    new_plan = WaypointPlan(plan.waypoints, plan.tracks, index)
    return replace(agents, positions=pos, headings=hdg), new_plan, stalled


def trajectory_records(t_hours: float, agents: AgentState, ids=None):
    ids = range(len(agents)) if ids is None else ids
    return [{"t_hours": round(float(t_hours), 9), "agent_id": int(i),
             "x_km": float(agents.positions[k, 0]), "y_km": float(agents.positions[k, 1])}
            for k, i in enumerate(ids)]
