"""Evaluate the two-valued harmonic function and inspect both asymptotic
regimes: the cube-root-squared expansion at the branching ellipse and the
quadric far field, plus a finite-difference harmonicity audit.
"""

import numpy as np

from z2harmonic import (SheetPoint, branch_coefficient, branch_coordinate,
                        coefficients, evaluate, evaluate_at, harmonic_family,
                        harmonicity_report)

fam = harmonic_family([2.0, 1.0])

print("values on the two sheets at x = (1.2, 0.5, 0.8):")
for sheet in ("+", "-"):
    print("  sheet", sheet, ":", evaluate_at(fam, [1.2, 0.5, 0.8], sheet))
print("the function vanishes on the cut disc:",
      evaluate_at(fam, [0.5, 0.5, 0.0], "+"), "\n")

print("near-branch expansion f = Re(B z^(3/2)) + O(|z|^(5/2)) at mu_1 = 1.3:")
B = branch_coefficient(fam, SheetPoint(mu=[1.3, 0.0, 0.0], signs=[1, 1])).B
print("  B =", B)
for rho in (0.2, 0.05, 0.0125):
    sp = SheetPoint(mu=[1.3, 0.3 * rho, 0.95 * rho], signs=[1, 1])
    f = evaluate(fam, sp, rel_tol=1e-13, abs_tol=1e-16)
    z, zh = branch_coordinate(fam.axes, sp)
    lead = B * (zh ** 3).real
    print(f"  |z| = {abs(z):.2e}   f = {f: .3e}   f - Re(B z^1.5) = {f - lead: .2e}")
print()

asym = coefficients([2.0, 1.0])
print("far-field quadric: a0 =", asym.a0, " a =", asym.a)
for r in (5.0, 20.0, 80.0):
    x = np.array([0.6, 0.64, 0.48]) * r
    f = evaluate_at(fam, x, "+")
    quad = asym.a0 - float((asym.a * x ** 2).sum())
    print(f"  |x| = {r:5.1f}   f - quadric = {f - quad: .3e}   "
          f"scaled by |x|: {(f - quad) * r: .4f}")
print("(the scaled column tends to a constant: the O(|x|^(2-n)) tail)\n")

rep = harmonicity_report(fam, 1.5, 4.0, count=20, seed=3, delta=1e-3)
print("harmonicity audit over 20 shell points:", rep.metrics)
