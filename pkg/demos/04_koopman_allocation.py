"""Optimal effort allocation for a fixed budget, and the controllers' targets.

Effort goes where ln p exceeds a water level alpha; extra budget lowers
the level. The mDSMC mismatch is what is still missing from that plan.
"""
import numpy as np

from driftsearch import search_theory as st
from driftsearch.grid import Domain, GridSpec, ScalarField

grid = GridSpec(Domain(0.0, 100.0, 0.0, 100.0), 64, 64)
c = grid.centers()
p = np.exp(-((c[..., 0] - 35) ** 2 + (c[..., 1] - 60) ** 2) / 300.0) \
    + 0.5 * np.exp(-((c[..., 0] - 70) ** 2 + (c[..., 1] - 30) ** 2) / 150.0)
p = ScalarField(grid, p / (p.sum() * grid.cell_area))

for budget in (10.0, 100.0, 1000.0):
    plan = st.solve_alpha(p, budget)
    print(f"budget {budget:7.1f}: alpha {plan.alpha:8.4f}  spent {plan.c_opt.integrate():9.4f}  "
          f"searched cells {(plan.c_opt.values > 0).mean():.1%}  "
          f"P(detect) {st.detection_probability(p, plan.c_opt):.4f}")

# splitting the budget across two sorties gives the same plan
c1 = st.solve_alpha(p, 40.0).c_opt
post = p.values * np.exp(-c1.values)
c2 = st.solve_alpha(p.with_values(post / (post.sum() * grid.cell_area)), 60.0).c_opt
both = st.solve_alpha(p, 100.0).c_opt
print("two sorties vs one plan, L1 gap:", np.abs(c1.values + c2.values - both.values).sum() * grid.cell_area)

# halfway through, the mismatch only keeps what the first sortie left
plan = st.solve_alpha(p, 100.0)
s = st.mismatch_mdsmc(p, plan.alpha, c1)
print("mDSMC mismatch mass before/after first sortie:",
      st.mismatch_mdsmc(p, plan.alpha, grid.zeros()).field.integrate(), s.field.integrate())
d = st.mismatch_dsmc(p, grid.zeros(), 1, 0.0)
print("DSMC mismatch with no coverage equals p:", np.allclose(d.values, p.values))
