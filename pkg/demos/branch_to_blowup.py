"""Follow the front branch away from onset.

Pseudo-arclength continuation from a small-amplitude front; the load,
peak slope and blowup proxy grow together until the step budget runs out.
"""
from antiplane import MaterialModel
from antiplane import continuation as ct
from antiplane import front_solver as fs

model = MaterialModel.quadratic(1.0)
start = fs.newton_solve(model, fs.asymptotic_seed(model, 0.1))
controls = ct.ContinuationControls(n_steps=20)


def report(point):
    print(f"s = {point.s:7.3f}  lambda = {point.lam:7.4f}  max|u_y| = {point.max_uy:7.4f}  "
          f"sigma0 = {point.sigma0:+.4f}  N = {point.N_proxy:8.3f}  nodal {'ok' if point.nodal.ok else 'FAIL'}")


branch = ct.continue_branch(model, start, controls, callback=report)
print(f"stopped: {branch.stop}; classified as {branch.tag.value}")
