"""Contrast a band metric with a long-range cross-shaped matrix.

The band metric reaches only ``R`` sites; the cross couples every site to its
mirror image, however far away.
"""
from fractions import Fraction

from quasilocal.metric import asymptotic_locality_report, closed_form_theta, cross_demo

band = closed_form_theta(2, Fraction(1, 3), 8).matrix
cross = cross_demo(1, 8).matrix
for name, M in (("band", band), ("cross", cross)):
    far = max(abs(i - j) for (i, j), v in M.items() if v != 0)
    print(f"{name}: bandwidth {M.bandwidth}, farthest coupling {far}")
print("band locality:", asymptotic_locality_report(band, margin=2).local)
