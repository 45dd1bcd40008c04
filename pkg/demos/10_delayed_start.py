"""Does waiting help? The same schedule started zero, two and four days later."""
from driftsearch import harness
from driftsearch.config import parse_text
from driftsearch.plotting import curves_svg
from _common import OUT

SCENARIO = """
[domain]
x_min = 0
x_max = 400
y_min = 0
y_max = 200

[flow]
kind = double_gyre
length = 200

[splash]
polygon = 150 50; 250 50; 250 150; 150 150

[schedule]
days = 0, 1
agents = 4

[planner]
nx = 96
ny = 48

[run]
n_tracers = 3000
n_targets = 300
n_runs = 3
seed = 3
"""

cfg = parse_text(SCENARIO)
cmp = harness.delayed_start_experiment(cfg, [0, 2, 4])
for o, st, daily, delta in zip(cmp.offsets, cmp.stats, cmp.daily_success, cmp.daily_delta):
    print(f"offset {o:g} d: final {st.mean_final:.3f}  per day {daily.round(3)}  vs no delay {delta.round(3)}")
curves_svg(OUT / "delayed_start.svg",
           {f"{o:g}-day delay": (rel, st.mean_curve) for o, st, rel in zip(cmp.offsets, cmp.stats, cmp.relative_times)},
           xlabel="hours since the first window opened")
