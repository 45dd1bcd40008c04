"""Finite-time mixing classes of the double gyre over one forcing period."""
from driftsearch import hypergraph
from driftsearch.flow import DoubleGyre, RotationFlow, SaddleFlow
from driftsearch.grid import Domain, GridSpec
from driftsearch.plotting import hypergraph_svg
from _common import OUT

big = Domain(-1e4, 1e4, -1e4, 1e4)
small = GridSpec(Domain(-20, 20, -20, 20), 16, 16)
print("saddle  :", hypergraph.classify(SaddleFlow(0.1), big, small, 0, 10).hyperbolic_fraction, "hyperbolic")
print("rotation:", hypergraph.classify(RotationFlow(0.2), big, small, 0, 10).hyperbolic_fraction, "hyperbolic")

dom = Domain(0.0, 400.0, 0.0, 200.0)
grid = GridSpec(dom, 128, 64)
gyre = DoubleGyre(length=200.0, amplitude=3.0, eps=0.25, period=48.0)
for t2 in (12.0, 48.0, 96.0):
    hg = hypergraph.classify(gyre, dom, grid, 0.0, t2)
    print(f"[0, {t2:g}] h: {hg.hyperbolic_fraction:.1%} mesohyperbolic")
    names = ["mesohyperbolic" if v else "mesoelliptic" for v in hg.labels.ravel()]
    xy = grid.centers().reshape(-1, 2)
    hypergraph_svg(OUT / f"hypergraph_0_{t2:g}h.svg", xy[:, 0], xy[:, 1], names,
                   title=f"double gyre, [0, {t2:g}] h")
