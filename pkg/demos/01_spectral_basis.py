"""Cosine basis on a rectangle, coefficients, and the smoothing Sobolev norm.

The search controllers never look at a field directly. They see its cosine
coefficients, weighted so that coarse structure dominates.
"""
import numpy as np

from driftsearch.grid import Domain, GridSpec, ScalarField, SpectralBasis, sobolev_norm, synthesize_potential, transform

dom = Domain(0.0, 200.0, 0.0, 100.0)
grid = GridSpec(dom, 128, 64)
basis = SpectralBasis(dom, K=32, beta=-0.5)

# Gram matrix of the 1-D factors on the grid
fx, _ = basis.axis_functions(grid.xc, 0)
print("max |Gram - I| along x:", np.abs(fx @ fx.T * grid.dx - np.eye(32)).max())

# a blob plus a constant offset
c = grid.centers()
blob = np.exp(-((c[..., 0] - 60) ** 2 + (c[..., 1] - 40) ** 2) / (2 * 8.0 ** 2))
field = ScalarField(grid, 0.2 + blob)
s = transform(field, basis)
print("mean coefficient s_00 =", s[0, 0], " expected from the integral:", field.integrate() / np.sqrt(dom.area))

# energy captured as K grows
energy = np.sum(field.values ** 2) * grid.cell_area
for K in (4, 8, 16, 32):
    sK = transform(field, SpectralBasis(dom, K))
    print(f"K={K:2d}: captured fraction of L2 energy {np.sum(sK ** 2) / energy:.6f}")

# the norm with beta<0 discounts small scales
for beta in (-0.5, -1.5):
    print(f"beta={beta}: Sobolev norm {sobolev_norm(s, SpectralBasis(dom, 32, beta)):.4f}")

# potential and its gradient: the gradient points toward the blob
pts = np.array([[30.0, 40.0], [90.0, 40.0], [60.0, 70.0]])
u, grad, _ = synthesize_potential(s, basis, pts)
for p, g in zip(pts, grad):
    print(f"at {p}: gradient direction {g / np.hypot(*g)}")
