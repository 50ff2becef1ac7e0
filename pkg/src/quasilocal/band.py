"""Banded matrices on a finite window of a doubly infinite lattice.

A :class:`BandMatrix` stores its nonzero diagonals, keyed by offset
``d = j - i``.  Rows and columns carry integer site labels ``first ..
first + size - 1``; the usual symmetric window ``-N .. N`` has
``first = -N`` and ``size = 2N + 1``.  Entry ``(i, j)`` sits at position
``min(i, j) - first`` of diagonal ``j - i``.

Two scalar kinds are supported:

``"rational"``
    numpy object arrays holding exact scalars (:class:`~fractions.Fraction`,
    or :class:`~quasilocal.scalars.QuadraticSurd` once square roots enter).
``"float"``
    plain ``float64`` arrays.

Everything here treats matrices as immutable values.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import solve_banded

from .scalars import (
    QuadraticSurd,
    exact_sqrt,
    format_scalar,
    is_exact,
    parse_exact,
    rational_sqrt,
)

__all__ = [
    "BandMatrix",
    "NotPositiveDefinite",
    "Residual",
    "SingularMatrixError",
    "adjoint",
    "banded_cholesky",
    "ldl_band",
    "multiply",
    "quasi_hermiticity_residual",
    "solve_band",
]

RATIONAL = "rational"
FLOAT = "float"

# relative pivot threshold for float-mode Cholesky
FLOAT_PIVOT_TOL = 1e-13


class NotPositiveDefinite(ValueError):
    """Raised by :func:`banded_cholesky`; ``pivot`` is the offending site."""

    def __init__(self, pivot, value):
        self.pivot = pivot
        self.value = value
        super().__init__(f"non-positive pivot {value} at site {pivot}")


class SingularMatrixError(ValueError):
    pass


def _zero(scalar):
    return Fraction(0) if scalar == RATIONAL else 0.0


def _as_array(values, scalar):
    if scalar == FLOAT:
        return np.asarray([float(v) for v in values], dtype=float)
    out = np.empty(len(values), dtype=object)
    for k, v in enumerate(values):
        if isinstance(v, float):
            raise TypeError("float entry in a rational matrix")
        out[k] = v if isinstance(v, QuadraticSurd) else Fraction(v)
    return out


class BandMatrix:
    """Banded square matrix indexed by lattice sites.

    Parameters
    ----------
    first : int
        Label of the first row/column.
    size : int
        Number of sites.
    diagonals : dict
        Offset -> sequence of ``size - |offset|`` entries.
    scalar : {"rational", "float"}
    """

    __slots__ = ("first", "size", "scalar", "_diags")

    def __init__(self, first: int, size: int, diagonals: dict, scalar: str = RATIONAL):
        if scalar not in (RATIONAL, FLOAT):
            raise ValueError(f"unknown scalar kind {scalar!r}")
        if size < 1:
            raise ValueError("empty window")
        self.first = int(first)
        self.size = int(size)
        self.scalar = scalar
        diags = {}
        for d, values in diagonals.items():
            d = int(d)
            if abs(d) >= size:
                raise ValueError(f"offset {d} outside a window of {size} sites")
            arr = _as_array(values, scalar)
            if arr.shape != (size - abs(d),):
                raise ValueError(
                    f"diagonal {d} has {arr.shape[0]} entries, expected {size - abs(d)}"
                )
            arr.setflags(write=False)
            diags[d] = arr
        self._diags = dict(sorted(diags.items()))

    # -- construction -----------------------------------------------------
    @classmethod
    def on_window(cls, N: int, diagonals: dict, scalar: str = RATIONAL):
        return cls(-N, 2 * N + 1, diagonals, scalar)

    @classmethod
    def zeros(cls, first: int, size: int, scalar: str = RATIONAL):
        return cls(first, size, {}, scalar)

    @classmethod
    def identity(cls, N: int, scalar: str = RATIONAL, *, first=None, size=None):
        first = -N if first is None else first
        size = 2 * N + 1 if size is None else size
        one = Fraction(1) if scalar == RATIONAL else 1.0
        return cls(first, size, {0: [one] * size}, scalar)

    @classmethod
    def from_entries(cls, first: int, size: int, entries: dict, scalar: str = RATIONAL):
        """Build from ``{(i, j): value}`` using site labels."""
        diags: dict[int, list] = {}
        zero = _zero(scalar)
        for (i, j), v in entries.items():
            d = j - i
            if d not in diags:
                diags[d] = [zero] * (size - abs(d))
            diags[d][min(i, j) - first] = v
        return cls(first, size, diags, scalar)

    @classmethod
    def from_function(cls, first: int, size: int, offsets, func, scalar: str = RATIONAL):
        """Fill the given offsets with ``func(i, j)``."""
        diags = {}
        for d in offsets:
            if abs(d) >= size:
                continue
            lo = first + max(0, -d)
            diags[d] = [func(i, i + d) for i in range(lo, lo + size - abs(d))]
        return cls(first, size, diags, scalar)

    @classmethod
    def from_dense(cls, dense, first: int | None = None, scalar: str | None = None,
                   drop_zeros: bool = True):
        dense = np.asarray(dense)
        n = dense.shape[0]
        if dense.shape != (n, n):
            raise ValueError("dense matrix must be square")
        if first is None:
            if n % 2 == 0:
                raise ValueError("even-sized matrix needs an explicit first label")
            first = -(n // 2)
        if scalar is None:
            scalar = RATIONAL if dense.dtype == object else FLOAT
        diags = {}
        for d in range(-(n - 1), n):
            values = np.diagonal(dense, offset=d)
            if drop_zeros and not any(v != 0 for v in values):
                continue
            diags[d] = list(values)
        return cls(first, n, diags, scalar)

    # -- basic accessors --------------------------------------------------
    @property
    def last(self) -> int:
        return self.first + self.size - 1

    @property
    def window(self) -> int | None:
        """``N`` for a symmetric ``-N..N`` window, otherwise None."""
        if self.size % 2 == 1 and self.first == -(self.size // 2):
            return self.size // 2
        return None

    @property
    def sites(self) -> range:
        return range(self.first, self.first + self.size)

    @property
    def offsets(self) -> tuple:
        return tuple(self._diags)

    @property
    def bandwidth(self) -> int:
        return max((abs(d) for d in self._diags), default=0)

    def diagonal(self, d: int = 0):
        if d in self._diags:
            return self._diags[d]
        return _as_array([_zero(self.scalar)] * (self.size - abs(d)), self.scalar)

    def diagonals(self) -> dict:
        return dict(self._diags)

    def __contains__(self, site) -> bool:
        return self.first <= site <= self.last

    def __getitem__(self, ij):
        i, j = ij
        if i not in self or j not in self:
            raise IndexError(f"({i}, {j}) outside sites {self.first}..{self.last}")
        arr = self._diags.get(j - i)
        if arr is None:
            return _zero(self.scalar)
        return arr[min(i, j) - self.first]

    entry = __getitem__

    def items(self):
        """Iterate ``((i, j), value)`` over stored entries."""
        for d, arr in self._diags.items():
            lo = self.first + max(0, -d)
            for k, v in enumerate(arr):
                yield (lo + k, lo + k + d), v

    def to_dense(self):
        n = self.size
        if self.scalar == FLOAT:
            out = np.zeros((n, n))
        else:
            out = np.empty((n, n), dtype=object)
            out[...] = Fraction(0)
        for d, arr in self._diags.items():
            r0 = max(0, -d)
            rows = np.arange(r0, r0 + n - abs(d))
            out[rows, rows + d] = arr
        return out

    def astype(self, scalar: str) -> "BandMatrix":
        if scalar == self.scalar:
            return self
        if scalar == RATIONAL:
            raise TypeError("cannot convert float matrix to exact rationals")
        return BandMatrix(self.first, self.size,
                          {d: [float(v) for v in a] for d, a in self._diags.items()}, FLOAT)

    def pruned(self) -> "BandMatrix":
        """Drop diagonals that are identically zero."""
        keep = {d: a for d, a in self._diags.items() if any(v != 0 for v in a)}
        return BandMatrix(self.first, self.size, keep, self.scalar)

    def same_window(self, other: "BandMatrix") -> bool:
        return self.first == other.first and self.size == other.size

    def _check_compatible(self, other):
        if not isinstance(other, BandMatrix):
            raise TypeError(f"expected BandMatrix, got {type(other).__name__}")
        if not self.same_window(other):
            raise ValueError(
                f"window mismatch: {self.first}..{self.last} vs {other.first}..{other.last}"
            )
        if self.scalar != other.scalar:
            raise TypeError(f"scalar-kind mismatch: {self.scalar} vs {other.scalar}")

    # -- arithmetic -------------------------------------------------------
    def _combine(self, other, sign):
        self._check_compatible(other)
        out = {d: np.array(a) for d, a in self._diags.items()}
        for d, a in other._diags.items():
            out[d] = out[d] + sign * a if d in out else sign * a
        return BandMatrix(self.first, self.size, out, self.scalar)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return BandMatrix(self.first, self.size, {d: -a for d, a in self._diags.items()},
                          self.scalar)

    def scale(self, alpha) -> "BandMatrix":
        if self.scalar == RATIONAL and isinstance(alpha, float):
            raise TypeError("float coefficient for a rational matrix")
        return BandMatrix(self.first, self.size,
                          {d: a * alpha for d, a in self._diags.items()}, self.scalar)

    def __mul__(self, alpha):
        if isinstance(alpha, BandMatrix):
            return NotImplemented
        return self.scale(alpha)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return multiply(self, other)

    def adjoint(self) -> "BandMatrix":
        return adjoint(self)

    @property
    def T(self) -> "BandMatrix":
        return adjoint(self)

    def __eq__(self, other):
        if not isinstance(other, BandMatrix):
            return NotImplemented
        if not self.same_window(other) or self.scalar != other.scalar:
            return False
        for d in set(self._diags) | set(other._diags):
            if not all(x == y for x, y in zip(self.diagonal(d), other.diagonal(d))):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        return (f"BandMatrix(sites={self.first}..{self.last}, offsets={list(self._diags)}, "
                f"scalar={self.scalar!r})")

    # -- interior helpers -------------------------------------------------
    def interior_sites(self, margin: int) -> range:
        return range(self.first + margin, self.last - margin + 1)

    def max_abs(self, margin: int = 0):
        """Largest ``|entry|`` with both indices at least ``margin`` from the edge."""
        lo, hi = self.first + margin, self.last - margin
        best = _zero(self.scalar)
        for (i, j), v in self.items():
            if lo <= i <= hi and lo <= j <= hi:
                a = abs(v)
                if a > best:
                    best = a
        return best

    def is_symmetric(self, margin: int = 0, tol: float = 0.0) -> bool:
        diff = self - adjoint(self)
        m = diff.max_abs(margin)
        return m == 0 if self.scalar == RATIONAL else m <= tol

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        """Interchange dict; rationals become ``"p/q"`` strings."""
        out = {"scalar": self.scalar}
        if self.window is not None:
            out["window"] = self.window
        else:
            out["first"] = self.first
            out["size"] = self.size
        enc = format_scalar if self.scalar == RATIONAL else float
        out["diagonals"] = {str(d): [enc(v) for v in a] for d, a in self._diags.items()}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "BandMatrix":
        scalar = data["scalar"]
        if "window" in data:
            first, size = -int(data["window"]), 2 * int(data["window"]) + 1
        else:
            first, size = int(data["first"]), int(data["size"])
        dec = parse_exact if scalar == RATIONAL else float
        diags = {int(d): [dec(v) for v in vals] for d, vals in data["diagonals"].items()}
        return cls(first, size, diags, scalar)


def multiply(A: BandMatrix, B: BandMatrix) -> BandMatrix:
    """Matrix product restricted to the common window."""
    A._check_compatible(B)
    n, first = A.size, A.first
    out: dict[int, np.ndarray] = {}
    for da, a in A._diags.items():
        for db, b in B._diags.items():
            d = da + db
            if abs(d) >= n:
                continue
            # local row index r (0-based); need r, r+da, r+d all inside the window
            r_lo = max(0, -da, -d)
            r_hi = min(n, n - da, n - d)
            if r_hi <= r_lo:
                continue
            r = np.arange(r_lo, r_hi)
            term = a[np.minimum(r, r + da)] * b[np.minimum(r + da, r + d)]
            pos = np.minimum(r, r + d)
            if d not in out:
                out[d] = _as_array([_zero(A.scalar)] * (n - abs(d)), A.scalar)
                out[d].setflags(write=True)
            out[d][pos] = out[d][pos] + term
    return BandMatrix(first, n, out, A.scalar)


def adjoint(A: BandMatrix) -> BandMatrix:
    """Conjugate transpose; all scalars here are real, so the transpose."""
    return BandMatrix(A.first, A.size, {-d: a for d, a in A._diags.items()}, A.scalar)


@dataclass(frozen=True)
class Residual:
    """``H^T Theta - Theta H`` with its largest interior entry."""

    matrix: BandMatrix
    interior_max_abs: object
    margin: int

    @property
    def vanishes(self) -> bool:
        return self.interior_max_abs == 0


def quasi_hermiticity_residual(H: BandMatrix, theta: BandMatrix,
                               margin: int | None = None) -> Residual:
    """Residual of the quasi-Hermiticity condition ``H^dagger Theta = Theta H``.

    Entries within ``margin`` sites of the window edge are excluded from
    ``interior_max_abs``; by default ``margin = bandwidth(H) + bandwidth(Theta)``,
    which is where truncation of the doubly infinite matrices can leak in.
    """
    H._check_compatible(theta)
    res = multiply(adjoint(H), theta) - multiply(theta, H)
    if margin is None:
        margin = H.bandwidth + theta.bandwidth
    return Residual(res, res.max_abs(margin), margin)


# -- factorization ------------------------------------------------------------

def ldl_band(theta: BandMatrix, tol: float = FLOAT_PIVOT_TOL):
    """Root-free banded Cholesky ``Theta = W^T D W``.

    Returns ``(W, pivots)`` with ``W`` unit upper triangular of the same
    bandwidth.  Exact inputs give exact outputs.  Raises
    :class:`NotPositiveDefinite` at the first pivot ``<= 0`` (exact) or
    ``<= tol * max|diag|`` (float).
    """
    if not theta.is_symmetric(tol=0.0 if theta.scalar == RATIONAL else 1e-12):
        raise ValueError("banded_cholesky needs a symmetric matrix")
    n, p = theta.size, theta.bandwidth
    exact = theta.scalar == RATIONAL
    zero = _zero(theta.scalar)
    # band[k, t] = W(k, k+t) for t = 1..p; band[k, 0] unused
    W = [[zero] * (p + 1) for _ in range(n)]
    D = [zero] * n
    diag = theta.diagonal(0)
    threshold = 0 if exact else tol * max((abs(float(v)) for v in diag), default=1.0)
    for k in range(n):
        dk = theta._diags[0][k] if 0 in theta._diags else zero
        for m in range(max(0, k - p), k):
            w = W[m][k - m]
            if w:
                dk = dk - w * w * D[m]
        if (dk <= 0) if exact else (dk <= threshold):
            raise NotPositiveDefinite(theta.first + k, dk)
        D[k] = dk
        for t in range(1, p + 1):
            j = k + t
            if j >= n:
                break
            v = theta.diagonal(t)[k] if t in theta._diags else zero
            for m in range(max(0, j - p), k):
                if W[m][k - m] and W[m][j - m]:
                    v = v - W[m][k - m] * D[m] * W[m][j - m]
            W[k][t] = v / dk
    one = Fraction(1) if exact else 1.0
    diags = {0: [one] * n}
    for t in range(1, p + 1):
        diags[t] = [W[k][t] for k in range(n - t)]
    return BandMatrix(theta.first, n, diags, theta.scalar), D


def _sqrt_pivots(pivots):
    """Exact roots of all pivots if they share one quadratic field, else None."""
    radicand = None
    roots = []
    for d in pivots:
        if isinstance(d, QuadraticSurd):
            return None
        r = rational_sqrt(d)
        if r is None:
            if radicand is None:
                radicand = d
            try:
                r = exact_sqrt(d, radicand)
            except ValueError:
                return None
        roots.append(r)
    return roots


def banded_cholesky(theta: BandMatrix, tol: float = FLOAT_PIVOT_TOL) -> BandMatrix:
    """Upper-triangular band factor ``U`` with ``Theta = U^T U``.

    Succeeds exactly when the truncated ``Theta`` is positive definite.  In
    rational mode the factor stays exact whenever every pivot's square root
    lies in a common field ``Q(sqrt(r))``; otherwise it is returned in float.
    """
    W, D = ldl_band(theta, tol)
    if theta.scalar == RATIONAL:
        roots = _sqrt_pivots(D)
        if roots is None:
            W = W.astype(FLOAT)
            roots = [float(np.sqrt(float(d))) for d in D]
    else:
        roots = [float(np.sqrt(d)) for d in D]
    scalar = W.scalar
    diags = {}
    for t, arr in W.diagonals().items():
        diags[t] = [roots[k] * arr[k] for k in range(len(arr))]
    return BandMatrix(theta.first, theta.size, diags, scalar)


# -- linear solves ------------------------------------------------------------

def _exact_solve(A: BandMatrix, rhs):
    n = A.size
    M = A.to_dense()
    X = np.array(rhs, dtype=object)
    vector = X.ndim == 1
    if vector:
        X = X.reshape(n, 1)
    if X.shape[0] != n:
        raise ValueError("right-hand side has the wrong length")
    X = X.copy()
    lower = max((-d for d in A.offsets if d < 0), default=0)
    upper = max((d for d in A.offsets if d > 0), default=0)
    reach = upper + lower  # fill-in bound under row pivoting
    for k in range(n):
        rows = range(k, min(n, k + lower + 1))
        piv = next((r for r in rows if M[r, k] != 0), None)
        if piv is None:
            raise SingularMatrixError(f"singular matrix at site {A.first + k}")
        if piv != k:
            M[[k, piv]] = M[[piv, k]]
            X[[k, piv]] = X[[piv, k]]
        cols = slice(k, min(n, k + reach + 1))
        for r in range(k + 1, min(n, k + lower + 1)):
            if M[r, k] != 0:
                f = M[r, k] / M[k, k]
                M[r, cols] = M[r, cols] - f * M[k, cols]
                X[r] = X[r] - f * X[k]
    for k in range(n - 1, -1, -1):
        hi = min(n, k + reach + 1)
        acc = X[k].copy()
        for c in range(k + 1, hi):
            if M[k, c] != 0:
                acc = acc - M[k, c] * X[c]
        X[k] = acc / M[k, k]
    return X[:, 0] if vector else X


def solve_band(A: BandMatrix, rhs):
    """Solve ``A x = rhs`` (vector or matrix of columns).

    Exact in rational mode (Gaussian elimination with row pivoting inside the
    band); LAPACK ``gbsv`` through :func:`scipy.linalg.solve_banded` in float
    mode.
    """
    if A.scalar == RATIONAL:
        return _exact_solve(A, rhs)
    lower = max((-d for d in A.offsets if d < 0), default=0)
    upper = max((d for d in A.offsets if d > 0), default=0)
    n = A.size
    ab = np.zeros((lower + upper + 1, n))
    for d, arr in A.diagonals().items():
        row = upper - d
        if d >= 0:
            ab[row, d:] = arr
        else:
            ab[row, : n + d] = arr
    rhs = np.asarray(rhs, dtype=float)
    try:
        return solve_banded((lower, upper), ab, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc


def is_exact_matrix(A: BandMatrix) -> bool:
    return A.scalar == RATIONAL and all(is_exact(v) for _, v in A.items())
