"""Transversal profiles and their flow force as the load grows.

For each load the nontrivial transversal solution is found from the
period map; its flow force decreases while the peak slope grows.
"""
import numpy as np

from antiplane import MaterialModel
from antiplane import conjugate_flow as cf

model = MaterialModel.quadratic(1.0)
print(f"{'lambda':>8} {'c1':>12} {'U+(0)':>10} {'max|V+|':>10} {'S+':>12}")
for lam in (0.05, 0.25, 1.0, 2.0, 4.0):
    prof = cf.u_plus(model, lam)
    S = cf.flow_force_1d(model, prof)
    print(f"{lam:8.2f} {cf.solve_c1(model, lam):12.6f} {prof.center_value:10.6f} {prof.max_slope:10.6f} {S:12.6f}")

lam = 1.0
c = np.linspace(1e-4, 2.0, 5)
print(f"\nperiod map at lambda = {lam}: limit pi/sqrt(1+lam) = {cf.period_limit(model, lam):.6f}")
for ci in c:
    print(f"  c = {ci:.4f}  P = {cf.period_map(model, ci, lam):.6f}")
