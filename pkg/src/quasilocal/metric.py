"""Band metrics for the antisymmetric point-defect lattice.

A metric ``Theta`` makes a tridiagonal ``H`` quasi-Hermitian,
``H^T Theta = Theta H``, and has to be positive definite.  For the point
defect there is a family ``Theta_R`` of ``(2R-1)``-diagonal solutions with
unit far field; :func:`closed_form_theta` builds them from a closed rule,
:func:`solve_band_metric` recovers them independently from the linear
system itself.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .band import (
    FLOAT,
    RATIONAL,
    BandMatrix,
    NotPositiveDefinite,
    banded_cholesky,
    quasi_hermiticity_residual,
)
from .lattice import LatticeHamiltonian, multiparam_labels, scalar_kind_of

__all__ = [
    "LocalityReport",
    "MetricSpec",
    "PositivityReport",
    "SingularMetricSystem",
    "SpectralSingularityError",
    "TableOneRow",
    "asymptotic_locality_report",
    "closed_form_theta",
    "cross_demo",
    "diagonal_multiparam_metric",
    "positivity_check",
    "solve_band_metric",
    "superpose",
    "table_one",
]


class SpectralSingularityError(ValueError):
    """The coupling sits at or beyond the spectral singularity ``|g| = 1``."""


class SingularMetricSystem(ValueError):
    """The band ansatz has no unique solution."""

    def __init__(self, message, rank=None, unknowns=None):
        self.rank = rank
        self.unknowns = unknowns
        super().__init__(message)


@dataclass(frozen=True)
class MetricSpec:
    """A metric candidate together with how it was produced.

    ``kind`` is one of ``closed_form``, ``solved``, ``superposition``,
    ``diagonal_multiparam`` or ``cross_demo``.  ``demo_only`` matrices are
    illustrations and are refused by the positivity and factorization code.
    """

    kind: str
    params: dict
    matrix: BandMatrix
    demo_only: bool = False
    labels: tuple | None = None

    def to_json(self) -> dict:
        out = self.matrix.to_json()
        out["kind"] = self.kind
        out["params"] = {k: _describe(v) for k, v in self.params.items()}
        return out


def _describe(v):
    if isinstance(v, (list, tuple)):
        return [_describe(x) for x in v]
    if isinstance(v, (int, str)) and not isinstance(v, bool):
        return v
    if isinstance(v, float):
        return float(f"{v:.15e}")
    return str(v)


def _num(x, scalar):
    return float(x) if scalar == FLOAT else Fraction(x)


def _check_coupling(g):
    if abs(g) >= 1:
        raise SpectralSingularityError(
            f"|g| = {abs(g)} >= 1: the metric degenerates at the spectral singularity"
        )


@dataclass(frozen=True)
class TableOneRow:
    """Corner ``A_k``, wedge ``B_k`` and central ``z_{2k+1}`` entries."""

    k: int
    corner: object
    wedge: object
    central: object


def corner(k: int, g):
    return (1 + g) * (1 - 2 * g * g) ** (k - 1)


def wedge(k: int, g):
    return (1 - g * g) * (1 - 2 * g * g) ** (k - 1)


def central(R: int, g):
    """Central entry of ``Theta_R`` for odd ``R``."""
    if R % 2 != 1:
        raise ValueError("only odd R has a nonzero central entry")
    if g == 1:
        raise SpectralSingularityError("central entry diverges at g = 1")
    return corner((R + 1) // 2, g) / (1 - g)


def table_one(k: int, g) -> TableOneRow:
    if k < 1:
        raise ValueError("k must be positive")
    g = g if isinstance(g, float) else Fraction(g)
    return TableOneRow(k, corner(k, g), wedge(k, g), central(2 * k + 1, g))


def _theta_entry(R, g, i, j):
    d = abs(i - j)
    if d > R - 1 or (i - j - (R - 1)) % 2:
        return 0
    s = (R + 1 - abs(i) - abs(j)) // 2
    if s <= 0:
        return 1
    if i == 0 and j == 0:
        return central(R, g)
    if i == 0 or j == 0:
        return corner(s, g)
    return wedge(s, g)


def closed_form_theta(R: int, g, N: int, scalar: str | None = None) -> MetricSpec:
    """The ``(2R-1)``-diagonal metric of the point defect.

    Nonzero offsets are ``R-1, R-3, ...``.  With ``s = (R + 1 - |i| - |j|) / 2``
    an allowed entry is 1 for ``s <= 0``, the wedge value ``B_s`` off the
    central row and column, the corner value ``A_s`` on them, and
    ``z_R`` at the center.

    Raises
    ------
    SpectralSingularityError
        for ``|g| >= 1``.
    """
    if R < 1:
        raise ValueError("R must be positive")
    if N < 2 * R:
        raise ValueError(f"window N={N} too small for R={R}; need N >= 2R")
    scalar = scalar or scalar_kind_of(g)
    g = _num(g, scalar)
    _check_coupling(g)
    offsets = range(-(R - 1), R, 2)
    M = BandMatrix.from_function(
        -N, 2 * N + 1, offsets,
        lambda i, j: _num(_theta_entry(R, g, i, j), scalar) if scalar == FLOAT
        else _theta_entry(R, g, i, j),
        scalar,
    )
    return MetricSpec("closed_form", {"R": R, "g": g}, M)


# -- solving the linear system --------------------------------------------------

def _row_reduce(equations, n_unknowns):
    """Exact elimination on sparse rows ``({col: coef}, rhs)``.

    Returns the solution list; raises :class:`SingularMetricSystem` on rank
    deficiency or inconsistency.
    """
    pivots: dict[int, tuple[dict, Fraction]] = {}
    for row, rhs in equations:
        row = {c: v for c, v in row.items() if v != 0}
        # reduce against existing pivots until the leading column is fresh
        while row:
            lead = min(row)
            if lead not in pivots:
                break
            prow, prhs = pivots[lead]
            f = row[lead]
            for c, v in prow.items():
                nv = row.get(c, 0) - f * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            rhs = rhs - f * prhs
        if not row:
            if rhs != 0:
                raise SingularMetricSystem("inconsistent quasi-Hermiticity system")
            continue
        lead = min(row)
        inv = 1 / row[lead]
        pivots[lead] = ({c: v * inv for c, v in row.items()}, rhs * inv)
    if len(pivots) < n_unknowns:
        raise SingularMetricSystem(
            f"rank {len(pivots)} < {n_unknowns} unknowns", len(pivots), n_unknowns
        )
    x = [Fraction(0)] * n_unknowns
    for lead in sorted(pivots, reverse=True):
        prow, prhs = pivots[lead]
        x[lead] = prhs - sum(v * x[c] for c, v in prow.items() if c != lead)
    return x


def solve_band_metric(H: LatticeHamiltonian, R: int) -> MetricSpec:
    """Solve ``H^T Theta = Theta H`` within the ``(2R-1)``-diagonal ansatz.

    The unknowns are the symmetric entries on offsets ``R-1, R-3, ...``
    inside the diamond ``|i| + |j| <= R + 1``; outside it those offsets are
    pinned to 1.  Equations are the residual entries whose indices stay
    ``R`` sites away from the window edge.  Exact rational arithmetic only.
    """
    A = H.matrix
    if A.scalar != RATIONAL:
        raise TypeError("solve_band_metric runs in exact mode")
    if A.bandwidth > 1:
        raise ValueError("H must be tridiagonal")
    N = A.window
    if N is None:
        raise ValueError("solve_band_metric needs a symmetric window")
    if N < 2 * R + 2:
        raise ValueError(f"window N={N} too small for R={R}; need N >= 2R+2")
    reach = R + 1

    unknown: dict[tuple[int, int], int] = {}
    for i in range(-reach, reach + 1):
        for j in range(i, reach + 1):
            if (j - i) <= R - 1 and (j - i - (R - 1)) % 2 == 0 and abs(i) + abs(j) <= reach:
                unknown[(i, j)] = len(unknown)

    def theta_ref(i, j):
        """(column, None) for an unknown, (None, constant) otherwise."""
        key = (min(i, j), max(i, j))
        if key in unknown:
            return unknown[key], None
        d = abs(i - j)
        if d <= R - 1 and (d - (R - 1)) % 2 == 0:
            return None, Fraction(1)
        return None, Fraction(0)

    def h(i, j):
        return A[i, j] if (i in A and j in A) else 0

    lo, hi = -N + R, N - R
    equations = []
    for p in range(lo, hi + 1):
        for q in range(max(lo, p - R), min(hi, p + R) + 1):
            row: dict[int, Fraction] = {}
            const = Fraction(0)
            # (H^T Theta)(p, q) = sum_k H(k, p) Theta(k, q)
            for k in (p - 1, p, p + 1):
                c = h(k, p)
                if c:
                    col, val = theta_ref(k, q)
                    if col is None:
                        const += c * val
                    else:
                        row[col] = row.get(col, 0) + c
            # (Theta H)(p, q) = sum_k Theta(p, k) H(k, q)
            for k in (q - 1, q, q + 1):
                c = h(k, q)
                if c:
                    col, val = theta_ref(p, k)
                    if col is None:
                        const -= c * val
                    else:
                        row[col] = row.get(col, 0) - c
            row = {c: v for c, v in row.items() if v}
            if row or const:
                equations.append((row, -const))
    x = _row_reduce(equations, len(unknown))

    entries = {}
    for d in range(-(R - 1), R, 2):
        for i in range(max(-N, -N - d), min(N, N - d) + 1):
            col, val = theta_ref(i, i + d)
            entries[(i, i + d)] = x[col] if col is not None else val
    M = BandMatrix.from_entries(-N, 2 * N + 1, entries, RATIONAL)
    return MetricSpec("solved", {"R": R, "model": H.model, **H.params}, M)


# -- combinations and checks ----------------------------------------------------

def superpose(terms) -> MetricSpec:
    """Linear combination ``sum alpha_j Theta_j`` of ``(alpha, spec)`` pairs."""
    terms = list(terms)
    if not terms:
        raise ValueError("empty superposition")
    total = None
    alphas = []
    for alpha, spec in terms:
        M = spec.matrix if isinstance(spec, MetricSpec) else spec
        if M.scalar == RATIONAL and not isinstance(alpha, float):
            alpha = Fraction(alpha)
        elif M.scalar == RATIONAL:
            M = M.astype(FLOAT)
        if total is not None and total.scalar != M.scalar:
            total, M = total.astype(FLOAT), M.astype(FLOAT)
        term = M.scale(alpha)
        total = term if total is None else total + term
        alphas.append(alpha)
    params = {"alphas": tuple(alphas)}
    first = terms[0][1]
    if isinstance(first, MetricSpec) and "g" in first.params:
        params["g"] = first.params["g"]
    return MetricSpec("superposition", params, total)


@dataclass(frozen=True)
class PositivityReport:
    positive: bool
    pivot: int | None = None
    pivot_value: object = None

    def __bool__(self):
        return self.positive


def positivity_check(theta) -> PositivityReport:
    """Positive definiteness of the truncated metric via banded Cholesky.

    ``pivot`` is the site where the first non-positive pivot appeared.
    """
    if isinstance(theta, MetricSpec):
        if theta.demo_only:
            raise ValueError(f"{theta.kind} matrices are illustrations, not metrics")
        theta = theta.matrix
    try:
        banded_cholesky(theta)
    except NotPositiveDefinite as exc:
        return PositivityReport(False, exc.pivot, exc.value)
    return PositivityReport(True)


def _multiparam_theta(label: int, params):
    sign = 1 if label > 0 else -1
    m = (abs(label) - 1) // 2
    val = 1 + sign * params[0]
    for j, p in enumerate(params[1:], start=2):
        if j <= m + 1:
            val *= (1 + sign * p) ** 2
        else:
            val *= 1 - p * p
    return val


def diagonal_multiparam_metric(params, N: int, scalar: str | None = None) -> MetricSpec:
    """Diagonal metric of the multiparam chain, sites labelled ``±1, ±3, ...``.

    ``theta(±(2m+1)) = (1 ± p_1) prod_{2<=j<=m+1} (1 ± p_j)^2
    prod_{j>m+1} (1 - p_j^2)``.
    """
    scalar = scalar or scalar_kind_of(*params)
    params = [_num(p, scalar) for p in params]
    labels = multiparam_labels(N)
    diag = [_multiparam_theta(lab, params) for lab in labels]
    M = BandMatrix(-N, 2 * N, {0: diag}, scalar)
    return MetricSpec("diagonal_multiparam", {"p": tuple(params)}, M, labels=labels)


def cross_demo(k: int, N: int) -> MetricSpec:
    """Cross-shaped long-range matrix on the even window ``-N..N-1``.

    Built as ``D_k (I + J)`` with ``J`` the reflection ``i -> -1 - i`` and
    ``D_k`` block diagonal over the two half-lattices (identity for
    ``k = 1``, ones at distance ``k-1`` otherwise).  Quarantined as
    ``demo_only``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if N < k:
        raise ValueError("window too small")
    first, size = -N, 2 * N

    def block(i, m):
        if (i < 0) != (m < 0):
            return 0
        return 1 if abs(i - m) == k - 1 else 0

    entries = {}
    for i in range(first, first + size):
        for m in range(first, first + size):
            if block(i, m):
                for j in {m, -1 - m}:
                    entries[(i, j)] = entries.get((i, j), Fraction(0)) + 1
    M = BandMatrix.from_entries(first, size, entries, RATIONAL)
    return MetricSpec("cross_demo", {"k": k}, M, demo_only=True)


# -- locality -------------------------------------------------------------------

@dataclass(frozen=True)
class LocalityReport:
    """Far-field structure of a metric.

    Attributes
    ----------
    diamond_radius : int
        Largest ``|i| + |j|`` (distances from the window center) of an entry
        that is neither 0 nor 1.
    row_ranges : tuple
        Largest ``|i - j|`` of a nonzero entry, per row.
    far_field_range_constant : bool
        Rows outside the diamond all couple within the same fixed range.
    unit_tails : bool
        Every nonzero entry outside the diamond equals 1.
    diagonal_profile : tuple
        Distinct far-field diagonal values; ``(1,)`` or ``(0,)`` for the
        band metrics here.
    parity_symmetric : bool
    local : bool
    """

    diamond_radius: int
    row_ranges: tuple
    far_field_range_constant: bool
    unit_tails: bool
    diagonal_profile: tuple
    parity_symmetric: bool
    local: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "local", self.far_field_range_constant and self.unit_tails)


def asymptotic_locality_report(theta, margin: int = 0) -> LocalityReport:
    """Check that the metric becomes a fixed unit band away from the center.

    ``margin`` rows at each edge of the window are ignored.
    """
    M = theta.matrix if isinstance(theta, MetricSpec) else theta
    twice_center = M.first + M.last  # 0 for odd windows, -1 for even ones

    def dist(i):
        return abs(2 * i - twice_center) // 2

    lo, hi = M.first + margin, M.last - margin
    inside = [((i, j), v) for (i, j), v in M.items() if lo <= i <= hi and lo <= j <= hi]
    nonzero = [((i, j), v) for (i, j), v in inside if v != 0]
    special = [dist(i) + dist(j) for (i, j), v in nonzero if v != 1]
    radius = max(special, default=-1)

    ranges = {i: 0 for i in range(lo, hi + 1)}
    for (i, j), _ in nonzero:
        ranges[i] = max(ranges[i], abs(i - j))
    far_rows = [i for i in ranges if dist(i) > radius]
    far_ranges = {ranges[i] for i in far_rows}

    unit_tails = all(v == 1 for (i, j), v in nonzero if dist(i) + dist(j) > radius)
    diag = sorted({M[i, i] for i in far_rows}, key=float)
    parity = all(M[twice_center - i, twice_center - j] == v for (i, j), v in inside)
    return LocalityReport(
        diamond_radius=radius,
        row_ranges=tuple(ranges[i] for i in sorted(ranges)),
        far_field_range_constant=len(far_ranges) <= 1,
        unit_tails=unit_tails,
        diagonal_profile=tuple(diag),
        parity_symmetric=parity,
    )


def residual_vanishes(H: LatticeHamiltonian, theta) -> bool:
    M = theta.matrix if isinstance(theta, MetricSpec) else theta
    return quasi_hermiticity_residual(H.matrix, M).vanishes
