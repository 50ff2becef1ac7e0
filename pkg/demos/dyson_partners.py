"""Three Dyson maps for the same Hamiltonian and their Hermitian partners.

The partners differ entry by entry but share one spectrum.
"""
import warnings

import numpy as np

from quasilocal import closed_form_theta, point_defect, superpose
from quasilocal.dyson import (
    BoundaryCaseWarning,
    factor_diagonal,
    hermitize,
    isospectrality_check,
    paper_tridiagonal_omega,
    triangular_factor,
)

g, N = 0.5, 12
H = point_defect(g, N)
with warnings.catch_warnings():
    warnings.simplefilter("ignore", BoundaryCaseWarning)
    maps = {
        "diagonal": factor_diagonal(closed_form_theta(1, g, N)),
        "tridiagonal": paper_tridiagonal_omega(g, N),
        "triangular": triangular_factor(superpose(
            [(2, closed_form_theta(1, g, N)), (0.5, closed_form_theta(2, g, N))])),
    }
np.set_printoptions(precision=4, suppress=True, linewidth=120)
for name, dmap in maps.items():
    h = hermitize(H, dmap)
    rep = isospectrality_check(H, h)
    print(f"{name}: spectral deviation {rep.max_deviation:.1e}")
    print(h.astype("float").to_dense()[N - 2:N + 3, N - 2:N + 3])
