"""Boustrophedon sweeps of a convex area split among several aircraft."""
import numpy as np

from driftsearch import control
from driftsearch.plotting import trajectories_svg
from _common import OUT

rng = np.random.default_rng(4)
ang = np.arange(6) * np.pi / 3 + rng.uniform(-0.25, 0.25, 6)
r = rng.uniform(30, 60, 6)
hexagon = control.convex_hull(np.column_stack([r * np.cos(ang), r * np.sin(ang)]) + 100)

tracks = control.lawnmower_tracks(hexagon, spacing=3.0)
print(f"{len(tracks)} tracks, total length {sum(np.hypot(*(e - s)) for s, e in tracks):.1f} km")

plan = control.lawnmower_plan(hexagon, n_agents=4, spacing=3.0)
for i in range(4):
    print(f"agent {i}: {len(plan.waypoints[i]) // 2} tracks, {plan.path_length(i):.1f} km "
          f"= {plan.path_length(i) / 380 * 60:.1f} min at 380 km/h")

agents = control.AgentState(plan.start_positions(), np.tile([1.0, 0.0], (4, 1)), 380.0)
plan.index[:] = 1
records = []
for k in range(40):
    agents, plan, _ = control.follow_waypoints(agents, plan, 1 / 60)
    records += control.trajectory_records((k + 1) / 60, agents)
trajectories_svg(OUT / "lawnmower_40min.svg", records, title="four aircraft, first 40 min")
