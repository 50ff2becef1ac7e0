"""Dyson maps ``Omega`` with ``Omega^T Omega = Theta`` and Hermitian partners.

Three constructions are offered: the entrywise square root of a diagonal
metric, the sparse non-triangular map of the ``2 Theta_1 - Theta_2``
metric with its explicit inverse, and the generic upper-triangular band
factor.  :func:`hermitize` then forms ``h = Omega H Omega^{-1}``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from .band import (
    FLOAT,
    RATIONAL,
    BandMatrix,
    _sqrt_pivots,
    adjoint,
    banded_cholesky,
    multiply,
    solve_band,
)
from .lattice import LatticeHamiltonian, scalar_kind_of
from .metric import MetricSpec, SpectralSingularityError
from .scalars import exact_sqrt

__all__ = [
    "BoundaryCaseWarning",
    "DysonMap",
    "HermiticityError",
    "IllConditionedWarning",
    "IsospectralityReport",
    "SpectralRealityError",
    "factor_diagonal",
    "hermitize",
    "isospectrality_check",
    "paper_tridiagonal_omega",
    "symmetrizer_condition",
    "triangular_factor",
]

HERMITICITY_TOL = 1e-10
# symmetrizer condition number above which spectra are flagged as fragile;
# equals (1+|g|)/(1-|g|) for the point defect, so 1e3 trips near |g| = 0.998
SYMMETRIZER_COND_WARN = 1e3


class HermiticityError(ValueError):
    pass


class SpectralRealityError(ValueError):
    pass


class IllConditionedWarning(RuntimeWarning):
    pass


class BoundaryCaseWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DysonMap:
    """An invertible ``Omega`` plus, when known, its inverse and metric.

    ``provenance`` is ``diagonal_sqrt``, ``paper_tridiagonal`` or
    ``triangular``.
    """

    omega: BandMatrix
    provenance: str
    inverse: BandMatrix | None = None
    metric: BandMatrix | None = None
    notes: tuple = field(default_factory=tuple)

    @property
    def window(self):
        return self.omega.window

    def gram(self) -> BandMatrix:
        """``Omega^T Omega``."""
        return multiply(adjoint(self.omega), self.omega)

    def to_json(self) -> dict:
        out = self.omega.to_json()
        out["provenance"] = self.provenance
        return out


def _matrix(theta):
    return theta.matrix if isinstance(theta, MetricSpec) else theta


def factor_diagonal(theta) -> DysonMap:
    """Entrywise square root of a positive diagonal metric.

    Exact when every root lies in one field ``Q(sqrt(r))``, float otherwise.
    """
    M = _matrix(theta)
    if any(d != 0 and any(v != 0 for v in M.diagonal(d)) for d in M.offsets):
        raise ValueError("factor_diagonal needs a diagonal metric")
    diag = list(M.diagonal(0))
    for k, v in enumerate(diag):
        if v <= 0:
            raise ValueError(f"non-positive metric entry {v} at site {M.first + k}")
    roots = _sqrt_pivots(diag) if M.scalar == RATIONAL else None
    scalar = M.scalar
    if roots is None:
        roots = [float(np.sqrt(float(v))) for v in diag]
        scalar = FLOAT
    omega = BandMatrix(M.first, M.size, {0: roots}, scalar)
    inverse = BandMatrix(M.first, M.size, {0: [1 / r for r in roots]}, scalar)
    return DysonMap(omega, "diagonal_sqrt", inverse, M)


def paper_tridiagonal_omega(g, N: int, scalar: str | None = None) -> DysonMap:
    """Sparse Dyson map of ``2 Theta_1 - Theta_2`` with its exact inverse.

    Left half rows carry ``(1, -1)`` on the diagonal and superdiagonal,
    right half rows ``(-1, 1)`` on the subdiagonal and diagonal, the bonds
    into site 0 carry ``-1-g`` and the center is
    ``s = sqrt(2 g^2 (1+g) / (1-g))``.  The inverse has unit triangular
    blocks, a constant central column ``(1+g)/s`` and center ``1/s``.

    The metric sits on the boundary ``|gamma| = 1`` of the positivity range,
    so a :class:`BoundaryCaseWarning` note is attached.
    """
    scalar = scalar or scalar_kind_of(g)
    g = float(g) if scalar == FLOAT else Fraction(g)
    if g == 0:
        raise ValueError("g = 0 makes the central entry vanish; the map is singular")
    if abs(g) >= 1:
        raise SpectralSingularityError(f"|g| = {abs(g)} >= 1")
    if N < 2:
        raise ValueError("N must be at least 2")
    s2 = 2 * g * g * (1 + g) / (1 - g)
    s = float(np.sqrt(s2)) if scalar == FLOAT else exact_sqrt(s2)
    one = 1.0 if scalar == FLOAT else Fraction(1)
    a = 1 + g

    ent = {}
    for i in range(-N, N + 1):
        if i < 0:
            ent[(i, i)] = one
            if i + 1 <= N:
                ent[(i, i + 1)] = -a if i == -1 else -one
        elif i > 0:
            ent[(i, i)] = one
            ent[(i, i - 1)] = -a if i == 1 else -one
        else:
            ent[(0, 0)] = s
    omega = BandMatrix.from_entries(-N, 2 * N + 1, ent, scalar)

    inv = {(0, 0): 1 / s}
    for i in range(-N, N + 1):
        if i == 0:
            continue
        inv[(i, 0)] = a / s
        span = range(i, 0) if i < 0 else range(1, i + 1)
        for j in span:
            inv[(i, j)] = one
    inverse = BandMatrix.from_entries(-N, 2 * N + 1, inv, scalar)
    note = ("metric 2*Theta_1 - Theta_2 lies on the boundary |gamma| = 1 of the "
            "positivity interval")
    warnings.warn(note, BoundaryCaseWarning, stacklevel=2)
    return DysonMap(omega, "paper_tridiagonal", inverse, None, (note,))


def triangular_factor(theta) -> DysonMap:
    """Upper-triangular band factor from :func:`~quasilocal.band.banded_cholesky`."""
    if isinstance(theta, MetricSpec) and theta.demo_only:
        raise ValueError(f"{theta.kind} matrices are illustrations, not metrics")
    M = _matrix(theta)
    return DysonMap(banded_cholesky(M), "triangular", None, M)


def _apply_inverse_right(X: BandMatrix, dmap: DysonMap) -> BandMatrix:
    """``X Omega^{-1}``; uses the stored inverse or a banded solve."""
    if dmap.inverse is not None:
        return multiply(X, dmap.inverse)
    omega = dmap.omega
    # (X Omega^{-1})^T = Omega^{-T} X^T
    cols = solve_band(adjoint(omega), adjoint(X).to_dense())
    return BandMatrix.from_dense(np.asarray(cols).T, first=omega.first,
                                 scalar=omega.scalar).pruned()


def hermitize(H: LatticeHamiltonian | BandMatrix, dmap: DysonMap,
              margin: int | None = None, tol: float = HERMITICITY_TOL) -> BandMatrix:
    """Hermitian partner ``h = Omega H Omega^{-1}``.

    Symmetry of ``h`` is asserted on sites at least ``margin`` away from the
    window edge (default ``2 * (bandwidth(H) + bandwidth(Omega))``), exactly
    for exact scalars and to ``tol`` for floats.

    Raises
    ------
    HermiticityError
        if the interior of ``h`` is not symmetric, which means ``Omega`` is
        not a Dyson map for ``H``.
    """
    A = H.matrix if isinstance(H, LatticeHamiltonian) else H
    omega = dmap.omega
    if A.scalar != omega.scalar:
        A = A.astype(FLOAT)
        omega = omega.astype(FLOAT)
        dmap = DysonMap(omega, dmap.provenance,
                        None if dmap.inverse is None else dmap.inverse.astype(FLOAT),
                        dmap.metric, dmap.notes)
    h = _apply_inverse_right(multiply(omega, A), dmap)
    if margin is None:
        margin = 2 * (A.bandwidth + omega.bandwidth)
    skew = (h - adjoint(h)).max_abs(margin)
    bad = skew != 0 if h.scalar == RATIONAL else float(skew) > tol
    if bad:
        raise HermiticityError(f"interior of Omega H Omega^-1 is not symmetric (|h - h^T| = {float(skew):.3e})")
    return h


@dataclass(frozen=True)
class IsospectralityReport:
    spectrum_h: np.ndarray
    spectrum_partner: np.ndarray
    max_deviation: float
    eigvec_condition: float
    symmetrizer_condition: float | None
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tol


def _real_spectrum(M: BandMatrix, imag_tol: float):
    w, v = scipy.linalg.eig(M.astype(FLOAT).to_dense())
    if np.max(np.abs(w.imag), initial=0.0) > imag_tol:
        raise SpectralRealityError(
            f"complex eigenvalues, max |Im| = {np.max(np.abs(w.imag)):.3e}"
        )
    return np.sort(w.real), np.linalg.cond(v)


def symmetrizer_condition(A: BandMatrix) -> float | None:
    """Condition number of the diagonal ``D`` making ``D A D^{-1}`` symmetric.

    Only defined for tridiagonal ``A`` whose opposite off-diagonal entries
    have positive products; returns None otherwise.
    """
    if A.bandwidth != 1:
        return None
    up, lo = A.diagonal(1), A.diagonal(-1)
    weight, lo_w, hi_w = 1.0, 1.0, 1.0
    for u, l in zip(up, lo):
        u, l = float(u), float(l)
        if u * l <= 0:
            return None
        weight *= l / u
        lo_w, hi_w = min(lo_w, weight), max(hi_w, weight)
    return hi_w / lo_w


def isospectrality_check(H, h: BandMatrix, tol: float = 1e-8,
                         imag_tol: float = 1e-8) -> IsospectralityReport:
    """Compare sorted truncated spectra of ``H`` and its partner ``h``.

    Raises :class:`SpectralRealityError` if either spectrum has imaginary
    parts above ``imag_tol``.  Emits :class:`IllConditionedWarning` when the
    diagonal symmetrizer of a tridiagonal ``H`` is badly conditioned, which
    happens as ``|g| -> 1``.
    """
    A = H.matrix if isinstance(H, LatticeHamiltonian) else H
    if A.size != h.size:
        raise ValueError("windows differ")
    ev_h, cond = _real_spectrum(A, imag_tol)
    ev_p, _ = _real_spectrum(h, imag_tol)
    sym = symmetrizer_condition(A)
    if sym is not None and sym > SYMMETRIZER_COND_WARN:
        warnings.warn(f"symmetrizer condition number {sym:.3e}; close to a spectral "
                      "singularity", IllConditionedWarning, stacklevel=2)
    dev = float(np.max(np.abs(ev_h - ev_p)))
    return IsospectralityReport(ev_h, ev_p, dev, float(cond), sym, tol)
