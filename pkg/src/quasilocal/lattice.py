"""Tridiagonal lattice Hamiltonians with antisymmetric defect bonds.

Units are fixed so that the kinetic term is ``tridiag(-1, 2, -1)`` and the
free band is ``E = 2 - 2 cos(kappa)`` in ``[0, 4]``.  Every model adds a
real antisymmetric two-diagonal perturbation to that matrix.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .band import FLOAT, RATIONAL, BandMatrix

__all__ = [
    "LatticeHamiltonian",
    "free_laplacian",
    "from_descriptor",
    "multiparam",
    "point_defect",
    "scalar_kind_of",
    "two_center",
]


def scalar_kind_of(*values) -> str:
    """``"float"`` if any parameter is a float, else ``"rational"``."""
    return FLOAT if any(isinstance(v, float) for v in values) else RATIONAL


def _coerce(v, scalar):
    return float(v) if scalar == FLOAT else Fraction(v)


@dataclass(frozen=True)
class LatticeHamiltonian:
    """A model Hamiltonian on a finite window.

    Attributes
    ----------
    matrix : BandMatrix
    model : str
        One of ``free_laplacian``, ``point_defect``, ``two_center``,
        ``multiparam``.
    params : dict
        Model parameters (``g``, ``M`` or ``p``).
    labels : tuple or None
        Physical site labels when they differ from the storage indices
        (the multiparam model uses odd labels ``..., -3, -1, 1, 3, ...``).
    """

    matrix: BandMatrix
    model: str
    params: dict = field(default_factory=dict)
    labels: tuple | None = None

    @property
    def window(self):
        return self.matrix.window

    @property
    def scalar(self) -> str:
        return self.matrix.scalar

    def label(self, site: int) -> int:
        if self.labels is None:
            return site
        return self.labels[site - self.matrix.first]

    def site_of_label(self, label: int) -> int:
        if self.labels is None:
            return label
        return self.matrix.first + self.labels.index(label)

    def support(self) -> tuple[int, int]:
        """Smallest and largest site touched by the defect (storage indices)."""
        diff = self.matrix - _kinetic(self.matrix.first, self.matrix.size, self.scalar)
        sites = [s for (i, j), v in diff.items() if v != 0 for s in (i, j)]
        if not sites:
            return (0, 0)
        return min(sites), max(sites)

    def to_descriptor(self) -> dict:
        out = {"model": self.model.replace("_", "-"), "N": self.matrix.window
               if self.matrix.window is not None else self.matrix.size // 2}
        for k, v in self.params.items():
            if isinstance(v, (list, tuple)):
                out[k] = [str(x) for x in v]
            elif isinstance(v, int):
                out[k] = v
            else:
                out[k] = str(v)
        return out


def _kinetic(first: int, size: int, scalar: str) -> BandMatrix:
    two, one = _coerce(2, scalar), _coerce(1, scalar)
    return BandMatrix(first, size, {-1: [-one] * (size - 1), 0: [two] * size,
                                    1: [-one] * (size - 1)}, scalar)


def _with_bonds(first, size, scalar, bonds):
    """Kinetic matrix plus ``{(i, j): v}`` added on the off-diagonals."""
    base = _kinetic(first, size, scalar)
    entries = {ij: v for ij, v in base.items()}
    for (i, j), v in bonds.items():
        if not (first <= i < first + size and first <= j < first + size):
            raise ValueError(f"bond ({i}, {j}) falls outside the window")
        entries[(i, j)] = entries[(i, j)] + v
    return BandMatrix.from_entries(first, size, entries, scalar)


def free_laplacian(N: int, scalar: str = RATIONAL) -> LatticeHamiltonian:
    """Minus the discrete Laplacian on sites ``-N..N``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    return LatticeHamiltonian(_kinetic(-N, 2 * N + 1, scalar), "free_laplacian")


def point_defect(g, N: int, scalar: str | None = None) -> LatticeHamiltonian:
    """Single antisymmetric defect on the two bonds touching site 0.

    ``H(-1, 0) = H(1, 0) = -1 - g`` and ``H(0, -1) = H(0, 1) = -1 + g``.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    scalar = scalar or scalar_kind_of(g)
    g = _coerce(g, scalar)
    H = _with_bonds(-N, 2 * N + 1, scalar,
                    {(-1, 0): -g, (1, 0): -g, (0, -1): g, (0, 1): g})
    return LatticeHamiltonian(H, "point_defect", {"g": g})


def two_center(g, M: int, N: int, scalar: str | None = None) -> LatticeHamiltonian:
    """Two antisymmetric defect bonds at ``(-M, -M+1)`` and ``(M-1, M)``.

    The left bond carries ``-g`` above and ``+g`` below the diagonal, the
    right bond the mirror image.  ``M = 1`` makes the bonds share site 0 and
    reproduces :func:`point_defect`.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    if N < M + 1:
        raise ValueError(f"window N={N} too small for M={M}; need N >= M + 1")
    scalar = scalar or scalar_kind_of(g)
    g = _coerce(g, scalar)
    bonds = {(-M, -M + 1): -g, (-M + 1, -M): g, (M - 1, M): g, (M, M - 1): -g}
    H = _with_bonds(-N, 2 * N + 1, scalar, bonds)
    return LatticeHamiltonian(H, "two_center", {"g": g, "M": M})


def multiparam_labels(n_half: int) -> tuple:
    """Odd labels ``-(2n-1), ..., -1, 1, ..., 2n-1`` for ``2n`` sites."""
    return tuple(2 * k + 1 for k in range(-n_half, n_half))


def multiparam(params, N: int, scalar: str | None = None) -> LatticeHamiltonian:
    """Chain of antisymmetric bonds on a lattice without a site 0.

    Sites carry odd labels ``±1, ±3, ...``; storage indices run over
    ``-N .. N-1`` with label ``2k + 1``.  ``params[0]`` sits on the central
    bond ``(-1, 1)``, ``params[1]`` on the next bond outward on either side,
    and so on.  Each bond has ``+p`` below and ``-p`` above the diagonal.
    """
    params = list(params)
    if not params:
        raise ValueError("need at least one parameter")
    if N < len(params) + 1:
        raise ValueError(f"window N={N} too small for {len(params)} parameters")
    scalar = scalar or scalar_kind_of(*params)
    params = [_coerce(p, scalar) for p in params]
    if any(abs(p) >= 1 for p in params):
        warnings.warn("multiparam couplings with |p| >= 1 lose metric positivity",
                      RuntimeWarning, stacklevel=2)
    bonds = {}
    for j, p in enumerate(params):
        # storage index k has label 2k+1; central bond is k = -1, 0
        for lo in {-1 - j, j - 1}:
            bonds[(lo, lo + 1)] = -p
            bonds[(lo + 1, lo)] = p
    H = _with_bonds(-N, 2 * N, scalar, bonds)
    return LatticeHamiltonian(H, "multiparam", {"p": tuple(params)},
                              multiparam_labels(N))


def from_descriptor(desc: dict, scalar: str | None = None) -> LatticeHamiltonian:
    """Build a model from ``{"model": ..., "g": "1/2", "N": 50, ...}``."""
    from .scalars import parse_scalar

    kind = desc["model"].replace("-", "_")
    N = int(desc["N"])

    def num(x):
        return parse_scalar(x) if isinstance(x, str) else x

    if kind == "free_laplacian":
        return free_laplacian(N, scalar or RATIONAL)
    if kind == "point_defect":
        return point_defect(num(desc["g"]), N, scalar)
    if kind == "two_center":
        return two_center(num(desc["g"]), int(desc["M"]), N, scalar)
    if kind == "multiparam":
        return multiparam([num(p) for p in desc["p"]], N, scalar)
    raise ValueError(f"unknown model {desc['model']!r}")
