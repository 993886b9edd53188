"""Which quadratic energies satisfy the structural conditions?

Sweep the quartic coefficient ``w1`` for both body-force families and
print the conditions that fail together with the leading front amplitude.
"""
from antiplane import BodyForce, MaterialModel, check_structural_conditions, leading_amplitude

for family in BodyForce:
    print(f"family: {family.value}")
    for w1 in (0.0, 0.25, 1.0, 4.0):
        model = MaterialModel.quadratic(w1, family)
        report = check_structural_conditions(model)
        status = "ok" if report.all_passed else "fails " + ", ".join(report.failures)
        amp = f"a1 = {leading_amplitude(model):.6f}" if report.all_passed else "a1 undefined"
        print(f"  w1 = {w1:<5g} {amp:<16} {status}")
