"""Principal eigenvalue of the transversal operator near onset.

The eigenvalue scales like eps^2 with lam = eps^2; the Richardson
combination of three successive ratios isolates the limiting constant.
"""
from antiplane import MaterialModel
from antiplane import spectrum

model = MaterialModel.quadratic(1.0)
eps = [0.2, 0.1, 0.05]
table = spectrum.sigma0_curve(model, eps)
for e, s in table:
    print(f"eps = {e:<5} sigma0 = {s:+.8e}  sigma0/eps^2 = {s / e**2:+.6f}")
print(f"Richardson limit: {spectrum.richardson_ratio(table):+.6f}")
