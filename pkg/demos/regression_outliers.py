"""Robust regression: brain weights and a structurally wrong trend line.

Two classic cases. The animals data (log brain weight on log body weight)
contains three dinosaurs that pull least squares away from the mammal
trend; the weighted fit recovers the clean line. The voltage-drop data is
genuinely nonlinear, so a straight line is misspecified everywhere: the
root search surfaces several local fits, including a degenerate
near-interpolation root whose residual scale collapses.

Run:  python demos/regression_outliers.py
"""

import numpy as np

from wle import (ResidualConfig, ScaledFKernel, SolverConfig,
                 bootstrap_root_search, get_family, load_dataset)

fam = get_family("normal_regression")
rc = ResidualConfig(kind="regression")
spec = ScaledFKernel(2.5, 1.0)

ds = load_dataset("animals")
xy = np.log(ds.numeric())          # natural log-log scale
mle = fam.mle(xy)
print("animals (log brain weight on log body weight, n = 28):")
print(f"  least squares:  intercept = {mle[0]:7.4f}  slope = {mle[1]:7.4f}"
      f"  sigma = {mle[2]:7.4f}")
rs = bootstrap_root_search(fam, xy, rc, spec, SolverConfig(seed=0))
sel = rs.selected
print(f"  weighted fit:   intercept = {sel.theta[0]:7.4f}  "
      f"slope = {sel.theta[1]:7.4f}  sigma = {sel.theta[2]:7.4f}")
small = np.flatnonzero(sel.weights < 0.01)
names = ds.column("animal")
print(f"  weights below 0.01: {', '.join(names[i] for i in small)}")

ds = load_dataset("voltage_drop")
xy = ds.numeric()
mle = fam.mle(xy)
print("\nvoltage drop over time (n = 41, truly nonlinear):")
print(f"  least squares:  intercept = {mle[0]:7.4f}  slope = {mle[1]:7.4f}"
      f"  sigma = {mle[2]:7.4f}")
rs = bootstrap_root_search(fam, xy, rc, spec, SolverConfig(seed=0))
for i, root in enumerate(rs.roots):
    print(f"  root {i}: intercept = {root.theta[0]:7.4f}  "
          f"slope = {root.theta[1]:7.4f}  sigma = {root.theta[2]:7.4f}  "
          f"weight sum = {root.weight_sum:5.1f}")
degenerate = [r for r in rs.non_converged if r.theta[2] < 0.01]
print(f"  plus {len(degenerate)} degenerate fixed points with sigma near 0 "
      f"(near-interpolations of local runs of points), e.g. slope = "
      f"{degenerate[0].theta[1]:7.4f}, sigma = {degenerate[0].theta[2]:.1e}")
