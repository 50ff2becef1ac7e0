"""Literal transcriptions of the published matrices and their replay.

Each fixture in ``fixtures/reference_matrices.json`` is a square block of
tokens centred on site 0:

``.``
    zero
``?``
    not specified (continuation dots or an undrawn corner)
symbol or integer, optionally with a leading ``-``
    a value, with symbols defined per fixture kind below.

:func:`verify_fixtures` rebuilds every matrix with the library at a given
coupling and compares entry by entry.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .band import FLOAT, RATIONAL, BandMatrix, multiply
from .dyson import (
    BoundaryCaseWarning,
    factor_diagonal,
    hermitize,
    paper_tridiagonal_omega,
)
from .lattice import point_defect
from .metric import central, closed_form_theta, corner, superpose, wedge
from .scalars import exact_sqrt

__all__ = ["FixtureCheck", "load_fixtures", "symbols_for", "verify_fixtures"]

FLOAT_TOL = 1e-12


def load_fixtures() -> dict:
    text = resources.files("quasilocal").joinpath("fixtures/reference_matrices.json").read_text()
    return json.loads(text)


def _sqrt(value, radicand, exact):
    if not exact:
        return float(value) ** 0.5
    return exact_sqrt(value, radicand)


def symbols_for(fixture: dict, g) -> dict:
    """Values of the symbols used in ``fixture`` at coupling ``g``.

    Square roots are taken in the quadratic field of the map that produces
    the matrix, so exact comparison is possible.
    """
    exact = not isinstance(g, float)
    kind = fixture["kind"]
    one = Fraction(1) if exact else 1.0
    if kind == "theta":
        R = fixture["R"]
        sym = {"a": corner(1, g), "b": wedge(1, g), "c": corner(2, g),
               "d": wedge(2, g), "e": corner(3, g), "f": wedge(3, g)}
        if R % 2:
            sym["z"] = central(R, g)
        return sym
    if kind == "hamiltonian":
        return {"a": one + g, "m": one - g}
    if kind == "theta_gamma":
        return {"a": one + g, "Z": 2 * (one + g) / (one - g)}
    z1 = (one + g) / (one - g)
    s2 = 2 * g * g * (one + g) / (one - g)
    if kind == "omega_diagonal":
        return {"v": _sqrt(z1, z1, exact)}
    if kind == "partner_diagonal":
        return {"q": _sqrt(one - g * g, z1, exact)}
    if kind == "omega":
        return {"a": one + g, "s": _sqrt(s2, s2, exact)}
    if kind == "omega_inverse":
        return {"u": _sqrt((one - g * g) / (2 * g * g), s2, exact),
                "w": _sqrt((one - g) / (2 * g * g * (one + g)), s2, exact)}
    if kind == "partner_tridiagonal":
        return {"P": 2 - g * g, "t": 2 * g * g, "b": one - g * g,
                "r": _sqrt(2 * g * g * (one - g * g), s2, exact)}
    raise ValueError(f"unknown fixture kind {kind!r}")


def _token_value(tok: str, sym: dict, exact: bool):
    neg = tok.startswith("-") and len(tok) > 1
    body = tok[1:] if neg else tok
    if body.lstrip("+").isdigit():
        v = Fraction(int(body)) if exact else float(body)
    else:
        v = sym[body]
    return -v if neg else v


def expected_entries(fixture: dict, g) -> dict:
    """``{(i, j): value}`` for every specified cell of the block."""
    exact = not isinstance(g, float)
    sym = symbols_for(fixture, g)
    rows = [r.split() for r in fixture["rows"]]
    half = len(rows) // 2
    out = {}
    for r, row in enumerate(rows):
        for c, tok in enumerate(row):
            if tok == "?":
                continue
            i, j = r - half, c - half
            out[(i, j)] = 0 if tok == "." else _token_value(tok, sym, exact)
    return out


@dataclass
class FixtureCheck:
    name: str
    ok: bool
    compared: int
    mismatches: list = field(default_factory=list)
    note: str = ""


def _equal(x, y, exact):
    if exact:
        return x == y
    return abs(float(x) - float(y)) <= FLOAT_TOL


def _compare(name, fixture, M: BandMatrix, g, expected=None, note=""):
    exact = M.scalar == RATIONAL
    expected = expected_entries(fixture, g) if expected is None else expected
    bad = [(ij, v, M[ij]) for ij, v in expected.items() if not _equal(M[ij], v, exact)]
    return FixtureCheck(name, not bad, len(expected), bad, note)


def _tail_check(R, M: BandMatrix, block_half: int):
    """Outside the displayed block every allowed offset carries 1, others 0."""
    bad = []
    for i in M.sites:
        for j in range(max(M.first, i - R - 1), min(M.last, i + R + 1) + 1):
            if abs(i) <= block_half and abs(j) <= block_half:
                continue
            d = abs(i - j)
            want = 1 if d <= R - 1 and (d - (R - 1)) % 2 == 0 else 0
            if M[i, j] != want:
                bad.append(((i, j), want, M[i, j]))
    return bad


def _build(kind, fixture, g, N):
    if kind == "theta":
        return closed_form_theta(fixture["R"], g, N).matrix
    if kind == "hamiltonian":
        return point_defect(g, N).matrix
    if kind == "theta_gamma":
        return superpose([(2, closed_form_theta(1, g, N)),
                          (-1, closed_form_theta(2, g, N))]).matrix
    if kind == "omega_diagonal":
        return factor_diagonal(closed_form_theta(1, g, N)).omega
    if kind == "partner_diagonal":
        return hermitize(point_defect(g, N), factor_diagonal(closed_form_theta(1, g, N)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryCaseWarning)
        dmap = paper_tridiagonal_omega(g, N)
    if kind == "omega":
        return dmap.omega
    if kind == "omega_inverse":
        return dmap.inverse
    if kind == "partner_tridiagonal":
        return hermitize(point_defect(g, N), dmap)
    raise ValueError(kind)


def verify_fixtures(g, names=None) -> list[FixtureCheck]:
    """Replay the stored matrices at coupling ``g`` (Fraction or float).

    A fixture carrying an ``erratum`` passes when the printed block differs
    from the computed one at exactly the listed entries and the corrected
    matrix satisfies its defining identity.
    """
    if not isinstance(g, float):
        g = Fraction(g)
    fixtures = load_fixtures()
    checks = []
    for name in sorted(fixtures):
        if names is not None and name not in names:
            continue
        fx = fixtures[name]
        half = len(fx["rows"]) // 2
        N = max(2 * fx.get("R", 1), half) + 6
        M = _build(fx["kind"], fx, g, N)
        check = _compare(name, fx, M, g)
        if fx["kind"] == "theta":
            tail = _tail_check(fx["R"], M, half)
            check.mismatches.extend(tail)
            check.ok = check.ok and not tail
        if "erratum" in fx:
            check = _erratum_check(name, fx, M, g, check, N)
        checks.append(check)
    return checks


def _erratum_check(name, fx, inverse: BandMatrix, g, check, N):
    listed = {tuple(e) for e in fx["erratum"]["entries"]}
    found = {ij for ij, _, _ in check.mismatches}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryCaseWarning)
        omega = paper_tridiagonal_omega(g, N).omega
    identity = BandMatrix.identity(N, inverse.scalar)
    exact = inverse.scalar == RATIONAL
    corrected_ok = (multiply(omega, inverse) - identity).max_abs(0)
    corrected_ok = corrected_ok == 0 if exact else float(corrected_ok) <= FLOAT_TOL
    # the printed pattern: alternate the sign down column 0
    printed = {ij: v for ij, v in inverse.items()}
    for i in inverse.sites:
        if i != 0 and abs(i) % 2 == 0:
            printed[(i, 0)] = -printed[(i, 0)]
    printed = BandMatrix.from_entries(inverse.first, inverse.size, printed, inverse.scalar)
    printed_res = (multiply(omega, printed) - identity).max_abs(2)
    printed_fails = printed_res != 0 if exact else float(printed_res) > FLOAT_TOL
    ok = found == listed and corrected_ok and printed_fails
    note = (f"printed entries {sorted(found)} differ as recorded; corrected inverse "
            f"{'satisfies' if corrected_ok else 'violates'} Omega Omega^-1 = I, printed one "
            f"{'violates' if printed_fails else 'satisfies'} it")
    return FixtureCheck(name, ok, check.compared, check.mismatches, note)
