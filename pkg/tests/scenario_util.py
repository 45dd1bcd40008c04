from driftsearch.config import parse_text

SMALL = """
[domain]
x_min = 0
x_max = 120
y_min = 0
y_max = 60

[flow]
kind = double_gyre
length = 60
amplitude = 2

[splash]
polygon = 40 15; 80 15; 80 45; 40 45
t0_hours = 0.5

[schedule]
days = 0, 1
agents = 3, 2
window_start_hour = 14
window_end_hour = 15

[planner]
nx = 48
ny = 24
modes = 16

[run]
n_tracers = 800
n_targets = 60
n_runs = 2
seed = 11
"""


def small_config(*overrides):
    return parse_text(SMALL, overrides=overrides)
