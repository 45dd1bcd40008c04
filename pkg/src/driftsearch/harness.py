"""Mission simulation: daily search loop, Monte Carlo ensembles, delayed starts."""
from __future__ import annotations

import functools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import control, coverage, detection, flow as flowmod, search_theory, transport
from .config import ConfigError, ScenarioConfig
from .grid import GridSpec, SpectralBasis

log = logging.getLogger(__name__)

HIST_BINS = 20
SAMPLE_SPACING_KM = 1.0
TARGET_STREAM = 1


@functools.lru_cache(maxsize=4)
def velocity_for(flow_spec) -> flowmod.VelocityField:
    if flow_spec.kind == "file":
        return flowmod.read_ovf(flow_spec.path)
    return flowmod.analytic_flow(flow_spec.kind, **dict(flow_spec.params))


def splash_regions(cfg: ScenarioConfig):
    if not cfg.splash:
        raise ConfigError("scenario has no [splash] region")
    return [transport.SplashRegion(np.array(s.polygon), s.t0_hours) for s in cfg.splash]


def grid_for(cfg: ScenarioConfig) -> GridSpec:
    return GridSpec(cfg.domain, cfg.nx, cfg.ny)


def step_times(cfg: ScenarioConfig):
    """Control-step start times per search day."""
    dt = cfg.control_dt_s / 3600.0
    out = []
    for s, e in cfg.windows():
        n = max(1, int(round((e - s) / dt)))
        out.append(s + dt * np.arange(n))
    return out


@dataclass(eq=False)
class DriftTrack:
    """Target density at every control step, shared by all runs of a scenario."""

    days: list            # per day: list of ScalarField, one per control step
    support: list         # per day: tracer positions at window start
    times: list


def _drift_key(cfg: ScenarioConfig):
    return (cfg.domain, cfg.flow, cfg.splash, tuple((d.day, d.start_hour, d.end_hour) for d in cfg.days),
            cfg.start_delay_days, cfg.n_tracers, cfg.nx, cfg.ny, cfg.bandwidth_km,
            cfg.control_dt_s, cfg.tol_km)


_track_cache: dict = {}


def drift_track(cfg: ScenarioConfig) -> DriftTrack:
    key = _drift_key(cfg)
    if key in _track_cache:
        return _track_cache[key]
    vel = velocity_for(cfg.flow)
    grid = grid_for(cfg)
    regions = splash_regions(cfg)
    # tracer counts split by area, each group seeded at its own splash time
    areas = np.array([r.area for r in regions])
    counts = np.floor(cfg.n_tracers * areas / areas.sum()).astype(int)
    counts[: cfg.n_tracers - counts.sum()] += 1
    groups = [transport.seed_halton(r, int(c)) for r, c in zip(regions, counts)]
    times = step_times(cfg)
    t_common = max(r.t0 for r in regions)
    groups = [transport.advect(g, vel, t_common, domain=cfg.domain, tol=cfg.tol_km) for g in groups]
    ens = transport.TracerEnsemble(np.vstack([g.positions for g in groups]), t_common,
                                   np.concatenate([g.frozen for g in groups]))
    days, support = [], []
    for ts in times:
        fields = []
        for i, t in enumerate(ts):
            ens = transport.advect(ens, vel, t, domain=cfg.domain, tol=cfg.tol_km)
            if i == 0:
                support.append(ens.positions.copy())
            fields.append(transport.density(ens, grid, cfg.bandwidth_km))
        days.append(fields)
    track = DriftTrack(days, support, times)
    _track_cache.clear()
    _track_cache[key] = track
    return track


def seed_targets(cfg: ScenarioConfig, run_index: int):
    """Uniform random targets over the splash polygons, split by area.

    Returns positions and their splash times.
    """
    regions = splash_regions(cfg)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(TARGET_STREAM, run_index)))
    areas = np.array([r.area for r in regions])
    which = rng.choice(len(regions), size=cfg.n_targets, p=areas / areas.sum())
    pos = np.empty((cfg.n_targets, 2))
    t0 = np.empty(cfg.n_targets)
    for k, r in enumerate(regions):
        idx = np.flatnonzero(which == k)
        pos[idx] = r.sample_uniform(len(idx), rng)
        t0[idx] = r.t0
    return pos, t0


# ---------------------------------------------------------------------------
# results

@dataclass(eq=False)
class EpisodeResult:
    run_index: int
    times: np.ndarray
    detected_fraction: np.ndarray
    detection_times: np.ndarray
    audits: list = field(default_factory=list)   # per day (total c_sigma, agent-hours)
    trajectories: list = field(default_factory=list)
    detections: list = field(default_factory=list)

    @property
    def final_rate(self) -> float:
        return float(self.detected_fraction[-1]) if len(self.detected_fraction) else 0.0


@dataclass(eq=False)
class EnsembleStats:
    times: np.ndarray
    curves: np.ndarray          # (n_runs, n_times)
    final_rates: np.ndarray
    episodes: list = field(default_factory=list, repr=False)

    @property
    def mean_curve(self) -> np.ndarray:
        return self.curves.mean(axis=0)

    @property
    def mean_final(self) -> float:
        return float(self.final_rates.mean())

    def histogram(self, bins: int = HIST_BINS):
        return np.histogram(self.final_rates, bins=bins, range=(0.0, 1.0))


# ---------------------------------------------------------------------------
# episode

def _start_smc(support: np.ndarray, domain, n: int, speed: float) -> control.AgentState:
    """Agents spread along the support's bounding-box edge closest to its centroid."""
    lo, hi = support.min(axis=0), support.max(axis=0)
    c = support.mean(axis=0)
    gaps = {"west": c[0] - lo[0], "east": hi[0] - c[0], "south": c[1] - lo[1], "north": hi[1] - c[1]}
    edge = min(gaps, key=gaps.get)
    f = (np.arange(n) + 0.5) / n
    if edge in ("west", "east"):
        x = np.full(n, lo[0] if edge == "west" else hi[0])
        y = lo[1] + f * (hi[1] - lo[1])
    else:
        y = np.full(n, lo[1] if edge == "south" else hi[1])
        x = lo[0] + f * (hi[0] - lo[0])
    pos = domain.clamp(np.column_stack([x, y]))
    heading = c - pos
    norm = np.hypot(heading[:, 0], heading[:, 1])
    heading[norm == 0] = (1.0, 0.0)
    return control.AgentState(pos, heading, speed)


def _start_lawnmower(polygon, n: int, cfg: ScenarioConfig):
    plan = control.lawnmower_plan(polygon, n, cfg.lawnmower_spacing_km)
    pos = plan.start_positions()
    heading = np.tile([1.0, 0.0], (n, 1))
    for i, w in enumerate(plan.waypoints):
        if len(w) > 1:
            heading[i] = w[1] - w[0]
    plan.index[:] = [1 if len(w) > 1 else 0 for w in plan.waypoints]
    return control.AgentState(pos, heading, cfg.speed_kmh), plan


def run_episode(cfg: ScenarioConfig, run_index: int, *, record_trajectories: bool = False,
                track: DriftTrack | None = None) -> EpisodeResult:
    """Simulate one mission with run-specific random targets."""
    track = drift_track(cfg) if track is None else track
    vel = velocity_for(cfg.flow)
    grid = grid_for(cfg)
    dom = cfg.domain
    dt = cfg.control_dt_s / 3600.0
    model = detection.DetectionModel(cfg.radius_km, cfg.expected_time_s)
    basis = SpectralBasis(dom, cfg.modes, cfg.beta) if cfg.controller in ("mdsmc", "dsmc") else None
    regions = splash_regions(cfg)

    pos, t0s = seed_targets(cfg, run_index)
    t = max(r.t0 for r in regions)
    for t0 in np.unique(t0s):
        sel = t0s == t0
        pos[sel] = flowmod.integrate(vel, pos[sel], t0, t, cfg.tol_km, domain=dom)
    targets = detection.TargetSet(pos)
    cov = coverage.CoverageState(sigma=cfg.sigma_km)

    times = [t]
    frac = [0.0]
    audits, traj, events = [], [], []
    step_counter = 0

    def drift_to(t_from, t_to):
        nonlocal cov
        if t_to <= t_from:
            return
        targets.positions, fz = flowmod.integrate(vel, targets.positions, t_from, t_to, cfg.tol_km,
                                                  domain=dom, return_frozen=True)
        targets.frozen |= fz
        cov = coverage.drift_coverage(cov, vel, t_from, t_to, domain=dom, tol=cfg.tol_km)

    for d, day in enumerate(cfg.days):
        starts = track.times[d]
        drift_to(t, starts[0])
        t = starts[0]
        if len(cov) > 1:
            cov = coverage.merge_close(cov)
        n = day.agents
        plan = None
        if n > 0:
            if cfg.controller in ("mdsmc", "dsmc"):
                agents = _start_smc(track.support[d], dom, n, cfg.speed_kmh)
            else:
                if cfg.controller == "lawnmower_drifted":
                    poly = control.convex_hull(track.support[d])
                else:
                    poly = np.array(day.reported) if day.reported else np.vstack([r.vertices for r in regions])
                agents, plan = _start_lawnmower(poly, n, cfg)
        for k, ts in enumerate(starts):
            drift_to(t, ts)
            t = ts
            if n == 0:
                step_counter += 1
                drift_to(t, ts + dt)
                t = ts + dt
                times.append(t)
                frac.append(targets.detected_fraction)
                continue
            p = track.days[d][k]
            if cfg.controller in ("mdsmc", "dsmc"):
                c_sigma = coverage.smooth(cov, grid)
                if cfg.controller == "mdsmc":
                    scale = cfg.sweep_rate
                    budget = scale * (c_sigma.integrate() + n * cfg.budget_window_h)
                    plan_k = search_theory.solve_alpha(p, budget)
                    mismatch = search_theory.mismatch_mdsmc(
                        p, plan_k.alpha, c_sigma.with_values(scale * c_sigma.values))
                else:
                    mismatch = search_theory.mismatch_dsmc(p, c_sigma, 1.0, cov.total_searched)
                agents = control.steer_smc(agents, mismatch, basis)

            m = max(1, math.ceil(cfg.speed_kmh * dt / SAMPLE_SPACING_KM))
            samples = np.empty((m, n, 2))
            for j in range(m):
                if plan is None:
                    agents = control.move_straight(agents, dt / m, dom)
                else:
                    agents, plan, _ = control.follow_waypoints(agents, plan, dt / m)
                samples[j] = agents.positions
            t_end = ts + dt
            cov = coverage.deposit(cov, agents.positions, dt)
            hits = detection.detect_step(model, samples, agents.active, targets, dt, t_end,
                                         seed=cfg.seed, stream=run_index, step=step_counter)
            step_counter += 1
            if len(hits):
                events.extend(detection.detection_records(targets, hits))
            if record_trajectories:
                traj.extend(control.trajectory_records(t_end, agents))
            t = t_end
            times.append(t)
            frac.append(targets.detected_fraction)
        c_total = coverage.smooth(cov, grid).integrate() if len(cov) else 0.0
        audits.append((c_total, cov.total_searched))

    return EpisodeResult(run_index, np.array(times), np.array(frac), targets.detected_at.copy(),
                         audits, traj, events)


# ---------------------------------------------------------------------------
# ensembles

def _episode_worker(args):
    cfg, run_index, record = args
    return run_episode(cfg, run_index, record_trajectories=record)


def _record_flag(cfg, run_index):
    return cfg.trajectories == "all" or (cfg.trajectories == "first" and run_index == 0)


def run_ensemble(cfg: ScenarioConfig, jobs: int = 1, runs=None) -> EnsembleStats:
    """Run ``cfg.n_runs`` episodes (or the given run indices) and aggregate them.

    Episodes are independent; with ``jobs > 1`` they run in worker
    processes, and results are always assembled in run order.
    """
    indices = list(range(cfg.n_runs)) if runs is None else list(runs)
    work = [(cfg, i, _record_flag(cfg, i)) for i in indices]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            episodes = list(pool.map(_episode_worker, work))
    else:
        track = drift_track(cfg)
        episodes = [run_episode(c, i, record_trajectories=r, track=track) for c, i, r in work]
    for ep in episodes:
        log.debug("run %d final %.4f", ep.run_index, ep.final_rate)
    times = episodes[0].times
    curves = np.vstack([ep.detected_fraction for ep in episodes])
    finals = np.array([ep.final_rate for ep in episodes])
    return EnsembleStats(times, curves, finals, episodes)


@dataclass(eq=False)
class DelayedComparison:
    offsets: list
    stats: list                 # EnsembleStats per offset
    relative_times: list        # hours since the first window opened, per offset
    daily_success: np.ndarray   # (n_offsets, n_days): mean fraction found on each day
    daily_delta: np.ndarray     # daily_success minus the row for the first offset


def daily_increments(cfg: ScenarioConfig, stats: EnsembleStats) -> np.ndarray:
    """Mean fraction of targets detected within each search window."""
    curve = stats.mean_curve
    out = []
    for s, e in cfg.windows():
        i0 = int(np.searchsorted(stats.times, s - 1e-9))
        i1 = int(np.searchsorted(stats.times, e + 1e-9)) - 1
        before = curve[i0 - 1] if i0 > 0 else 0.0
        out.append(curve[i1] - before)
    return np.array(out)


def delayed_start_experiment(cfg: ScenarioConfig, offsets_days, jobs: int = 1) -> DelayedComparison:
    """Repeat the ensemble with the whole schedule pushed back by each offset.

    Target seeds depend only on (seed, run index), so every offset searches
    for the same initial targets.
    """
    offsets = [float(o) for o in offsets_days]
    if any(o < 0 for o in offsets):
        raise ValueError("offsets must be nonnegative")
    stats, rel, daily = [], [], []
    for o in offsets:
        c = cfg.replace(start_delay_days=cfg.start_delay_days + o)
        st = run_ensemble(c, jobs=jobs)
        stats.append(st)
        first = c.windows()[0][0] if c.days else st.times[0]
        rel.append(st.times - first)
        daily.append(daily_increments(c, st))
    daily = np.array(daily)
    return DelayedComparison(offsets, stats, rel, daily, daily - daily[:1])
