"""Semi-Lagrangian transport of the target distribution.

The splash polygon is filled with Halton tracers; each tracer rides the
flow map, and the density is re-estimated on the grid whenever needed.
"""
import numpy as np

from driftsearch import transport
from driftsearch.flow import DoubleGyre
from driftsearch.grid import Domain, GridSpec
from driftsearch.plotting import field_svg
from _common import OUT

dom = Domain(0.0, 400.0, 0.0, 200.0)
grid = GridSpec(dom, 128, 64)
gyre = DoubleGyre(length=200.0, amplitude=3.0, eps=0.25, period=48.0)

region = transport.SplashRegion(np.array([[150.0, 60.0], [250.0, 60.0], [250.0, 140.0], [150.0, 140.0]]), t0=0.0)
print("first Halton points in the unit square:\n", transport.halton(3))
ens = transport.seed_halton(region, 10_000)
print(f"{len(ens)} tracers, total weight {ens.weights.sum():.12f}")

for t in (0.0, 24.0, 72.0, 144.0):
    ens = transport.advect(ens, gyre, t, domain=dom)
    p = transport.density(ens, grid, bandwidth=3.0)
    support = (p.values > 1e-6).mean()
    print(f"t={t:5.0f} h  integral {p.integrate():.12f}  occupied cells {support:.1%}  peak {p.values.max():.2e}")
    field_svg(OUT / f"density_t{t:g}h.svg", *zip(*p.to_rows()), title=f"target density, t = {t:g} h",
              label="1/km^2")
