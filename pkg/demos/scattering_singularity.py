"""Unitary scattering and its breakdown as the coupling approaches 1.

Writes nothing; prints a table of the unitarity deficit and the two condition
numbers for a sweep of couplings.
"""
from quasilocal.scattering import default_kappa_grid, singularity_scan, solve_scattering
from quasilocal import point_defect

H = point_defect(0.5, 20)
for k in default_kappa_grid(5):
    r = solve_scattering(H, k)
    print(f"kappa={k:.3f}  |R|^2={abs(r.reflection)**2:.6f}  |T|^2={abs(r.transmission)**2:.6f}")

print("\n     g   max deficit   matching cond   transfer cond")
for row in singularity_scan("point-defect", [0.0, 0.5, 0.9, 0.99, 0.999]):
    print(f"{row.g:6.3f}   {row.max_deficit:.2e}      {row.matching_condition:9.3g}     "
          f"{row.transfer_condition:9.3g}")
