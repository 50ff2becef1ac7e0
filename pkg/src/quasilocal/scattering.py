"""Scattering on the tridiagonal lattice.

Plane waves ``exp(i kappa n)`` solve the free rows at ``E = 2 - 2 cos(kappa)``.
A left-incident wave gives ``psi_n = exp(i kappa n) + R exp(-i kappa n)`` to
the left of the defect and ``psi_n = T exp(i kappa n)`` to the right.  Two
independent routes produce ``(R, T)``: a direct matching linear system and a
product of 2x2 transfer steps.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .band import BandMatrix
from .lattice import LatticeHamiltonian, point_defect, two_center

__all__ = [
    "ScanRow",
    "ScatteringResult",
    "SingularScatteringSystem",
    "default_kappa_grid",
    "defect_half_width",
    "dispersion",
    "singularity_scan",
    "solve_scattering",
    "transfer_amplitudes",
    "transfer_matrix",
    "transfer_scattering",
]


class SingularScatteringSystem(ValueError):
    pass


def dispersion(kappa: float) -> float:
    """Free-band energy ``2 - 2 cos(kappa)`` for ``0 < kappa < pi``."""
    if not 0 < kappa < np.pi:
        raise ValueError(f"kappa = {kappa} is not strictly inside (0, pi)")
    return 2.0 - 2.0 * np.cos(kappa)


def default_kappa_grid(n: int = 50, pad: float = 0.1) -> np.ndarray:
    return np.linspace(pad, np.pi - pad, n)


@dataclass(frozen=True)
class ScatteringResult:
    kappa: float
    energy: float
    reflection: complex
    transmission: complex
    condition: float = float("nan")

    @property
    def unitarity_deficit(self) -> float:
        return abs(abs(self.reflection) ** 2 + abs(self.transmission) ** 2 - 1.0)


def _float_matrix(H) -> BandMatrix:
    A = H.matrix if isinstance(H, LatticeHamiltonian) else H
    return A.astype("float")


def defect_half_width(H) -> int:
    """Largest ``|site|`` touched by an entry that differs from the free lattice."""
    A = _float_matrix(H)
    w = 0
    for (i, j), v in A.items():
        free = 2.0 if i == j else (-1.0 if abs(i - j) == 1 else 0.0)
        if v != free:
            w = max(w, abs(i), abs(j))
    return w


def _entry(A: BandMatrix, i: int, j: int) -> float:
    if i in A and j in A:
        return float(A[i, j])
    return 2.0 if i == j else (-1.0 if abs(i - j) == 1 else 0.0)


def _matching_n0(A: BandMatrix, n0):
    if n0 is None:
        n0 = defect_half_width(A) + 2
    if A.window is None:
        raise ValueError("scattering needs a symmetric window")
    if A.window < n0:
        raise ValueError(f"window N={A.window} smaller than matching site n0={n0}")
    return n0


def solve_scattering(H, kappa: float, incidence: str = "left",
                     n0: int | None = None) -> ScatteringResult:
    """Amplitudes from the matching linear system.

    Rows ``-n0 .. n0`` of ``(H - E) psi = 0`` are imposed with ``psi``
    replaced by the asymptotic forms outside ``(-n0, n0)``; the unknowns are
    the interior ``psi`` together with ``R`` and ``T``.

    Parameters
    ----------
    incidence : {"left", "right"}
    n0 : int, optional
        Matching site, by default two sites beyond the defect.
    """
    A = _float_matrix(H)
    n0 = _matching_n0(A, n0)
    E = dispersion(kappa)
    if incidence == "left":
        sign = 1
    elif incidence == "right":
        sign = -1
    else:
        raise ValueError("incidence must be 'left' or 'right'")

    def wave(n):
        return np.exp(1j * sign * kappa * n)

    # unknown layout: psi_{-n0+1..n0-1}, R, T
    n_int = 2 * n0 - 1
    iR, iT = n_int, n_int + 1
    size = n_int + 2
    M = np.zeros((size, size), dtype=complex)
    b = np.zeros(size, dtype=complex)
    # for right incidence the roles of the two sides swap
    incoming_side = -1 if sign == 1 else 1

    for r, n in enumerate(range(-n0, n0 + 1)):
        for m in (n - 1, n, n + 1):
            c = _entry(A, n, m) - (E if m == n else 0.0)
            if c == 0:
                continue
            if -n0 < m < n0:
                M[r, m + n0 - 1] += c
            elif np.sign(m) == incoming_side:
                b[r] -= c * wave(m)
                M[r, iR] += c * wave(-m)
            else:
                M[r, iT] += c * wave(m)
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularScatteringSystem(f"matching system singular at kappa={kappa}")
    x = np.linalg.solve(M, b)
    return ScatteringResult(float(kappa), float(E), complex(x[iR]), complex(x[iT]), cond)


def _plane_wave_basis(kappa: float, n: int) -> np.ndarray:
    return np.array([[np.exp(1j * kappa * n), np.exp(-1j * kappa * n)],
                     [np.exp(1j * kappa * (n - 1)), np.exp(-1j * kappa * (n - 1))]])


def transfer_matrix(H, kappa: float, n0: int | None = None) -> np.ndarray:
    """Transfer matrix across the defect in the plane-wave basis.

    Maps the coefficients ``(a, b)`` of ``a exp(i kappa n) + b exp(-i kappa n)``
    on the left to those on the right; the identity for the free lattice.
    """
    A = _float_matrix(H)
    n0 = _matching_n0(A, n0)
    E = dispersion(kappa)
    P = np.eye(2, dtype=complex)
    for n in range(-n0, n0):
        up = _entry(A, n, n + 1)
        step = np.array([[(E - _entry(A, n, n)) / up, -_entry(A, n, n - 1) / up],
                         [1.0, 0.0]])
        P = step @ P
    return np.linalg.solve(_plane_wave_basis(kappa, n0), P @ _plane_wave_basis(kappa, -n0))


def transfer_amplitudes(T: np.ndarray) -> tuple[complex, complex]:
    """Left-incidence ``(R, T)`` from a plane-wave transfer matrix."""
    if T[1, 1] == 0:
        raise SingularScatteringSystem("transfer matrix has vanishing (2, 2) entry")
    R = -T[1, 0] / T[1, 1]
    return complex(R), complex(np.linalg.det(T) / T[1, 1])


def transfer_scattering(H, kappa: float, n0: int | None = None) -> ScatteringResult:
    Tm = transfer_matrix(H, kappa, n0)
    R, T = transfer_amplitudes(Tm)
    return ScatteringResult(float(kappa), dispersion(kappa), R, T, float(np.linalg.cond(Tm)))


@dataclass(frozen=True)
class ScanRow:
    g: float
    max_deficit: float
    matching_condition: float
    transfer_condition: float


def _builder(model: str, M: int | None, N: int):
    model = model.replace("-", "_")
    if model == "point_defect":
        return lambda g: point_defect(float(g), N)
    if model == "two_center":
        if M is None:
            raise ValueError("two_center needs M")
        return lambda g: two_center(float(g), M, N)
    raise ValueError(f"no scattering builder for model {model!r}")


def singularity_scan(model: str, g_values, kappa_grid=None, M: int | None = None,
                     N: int = 20) -> list[ScanRow]:
    """Unitarity deficit and conditioning across couplings.

    For each ``g`` the maxima over ``kappa_grid`` are reported: the deficit,
    the condition number of the matching system, and that of the
    plane-wave transfer matrix.  The last one diverges as ``|g| -> 1``.
    """
    grid = default_kappa_grid() if kappa_grid is None else np.asarray(kappa_grid)
    build = _builder(model, M, N)
    rows = []
    for g in g_values:
        H = build(g)
        deficits, conds, tconds = [], [], []
        for k in grid:
            res = solve_scattering(H, float(k))
            deficits.append(res.unitarity_deficit)
            conds.append(res.condition)
            tconds.append(np.linalg.cond(transfer_matrix(H, float(k))))
        rows.append(ScanRow(float(g), max(deficits), max(conds), float(max(tconds))))
    return rows
