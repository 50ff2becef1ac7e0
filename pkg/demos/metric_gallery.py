"""Print the first few band metrics of the point defect and check them.

Run with ``python demos/metric_gallery.py``.
"""
from fractions import Fraction

from quasilocal import closed_form_theta, point_defect, quasi_hermiticity_residual
from quasilocal.metric import asymptotic_locality_report, table_one

g = Fraction(1, 2)
N = 6

print("corner / wedge / central values at g = 1/2")
for row in (table_one(k, g) for k in range(1, 5)):
    print(f"  k={row.k}: corner={row.corner}  wedge={row.wedge}  central(R={2 * row.k + 1})={row.central}")

H = point_defect(g, N)
for R in (1, 2, 3):
    theta = closed_form_theta(R, g, N)
    res = quasi_hermiticity_residual(H.matrix, theta.matrix)
    loc = asymptotic_locality_report(theta.matrix, margin=R)
    print(f"\nR = {R}: interior residual {res.interior_max_abs}, local tails {loc.local}")
    for i in range(-3, 4):
        print("  " + " ".join(f"{str(theta.matrix[i, j]):>6}" for j in range(-3, 4)))
