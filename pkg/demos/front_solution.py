"""A single front near onset, solved by Newton on the quarter domain.

Prints the residual, the nodal sign pattern, the maximum principle
check and the flow force at several columns.
"""
import numpy as np

from antiplane import MaterialModel
from antiplane import front_solver as fs

model = MaterialModel.quadratic(1.0)
eps = 0.2
front = fs.newton_solve(model, fs.asymptotic_seed(model, eps))
g = front.grid
print(f"lambda = {front.lam:.4f} on {g.n_x} x {g.n_y} nodes, L = {g.L:g}")
print(f"residual: {np.max(np.abs(fs.residual(model, front))):.2e}")
rep = fs.nodal_check(front)
print("nodal pattern:", "ok" if rep.ok else rep.failures)
mp = fs.max_principle_check(model, front)
print(f"max principle: max at far field {mp.max_at_far_field}, coercive {mp.coercive}")
for frac in (0.0, 0.25, 0.5, 0.75):
    ix = int(round(frac * (g.n_x - 1) / 2)) + g.n_x // 2
    print(f"  flow force at x = {g.x[ix]:7.2f}: {fs.flow_force_2d(model, front, ix):+.8f}")
