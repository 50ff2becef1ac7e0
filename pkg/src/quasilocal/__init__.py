"""Quasilocal band metrics for non-Hermitian lattice Hamiltonians.

Builds tridiagonal Hamiltonians with antisymmetric defect bonds, the banded
metrics that make them quasi-Hermitian, Dyson maps with their Hermitian
partners, and lattice scattering amplitudes.
"""
from .band import BandMatrix, NotPositiveDefinite, banded_cholesky, quasi_hermiticity_residual, solve_band
from .dyson import DysonMap, factor_diagonal, hermitize, isospectrality_check, paper_tridiagonal_omega, triangular_factor
from .lattice import LatticeHamiltonian, free_laplacian, multiparam, point_defect, two_center
from .metric import (
    MetricSpec,
    SpectralSingularityError,
    asymptotic_locality_report,
    closed_form_theta,
    cross_demo,
    diagonal_multiparam_metric,
    positivity_check,
    solve_band_metric,
    superpose,
    table_one,
)
from .scalars import QuadraticSurd, exact_sqrt
from .scattering import dispersion, singularity_scan, solve_scattering, transfer_matrix

__version__ = "0.1.0"
