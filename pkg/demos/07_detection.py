"""The sensor: exponential time-to-sighting within a fixed radius."""
import math

import numpy as np

from driftsearch import detection

model = detection.DetectionModel(radius=1.5, expected_time=2.0)
n = 20_000
for t_s in (1, 2, 4, 8):
    targets = detection.TargetSet(np.zeros((n, 2)))
    steps = int(t_s / 0.5)
    for k in range(steps):
        detection.detect_step(model, np.zeros((1, 1, 2)), [True], targets, 0.5 / 3600, k * 0.5 / 3600,
                              seed=1, stream=t_s, step=k)
    print(f"{t_s} s co-located: empirical {targets.detected.mean():.4f}  law {1 - math.exp(-t_s / 2):.4f}")

# a fly-over: aircraft at 380 km/h passing a target at various miss distances
for miss in (0.0, 0.75, 1.4, 1.6):
    targets = detection.TargetSet(np.array([[0.0, miss]]))
    start, end = np.array([[-3.0, 0.0]]), np.array([[3.0, 0.0]])
    samples = detection.path_samples(start, end, spacing=0.01)
    dwell, _ = detection.exposure(model, samples, [True], targets, 6.0 / 380)
    print(f"miss distance {miss:4.2f} km: in range {dwell[0] * 3600:5.1f} s, "
          f"P(sighting) {model.probability(dwell[0]):.3f}")
