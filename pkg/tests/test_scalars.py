from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quasilocal.scalars import (
    QuadraticSurd,
    exact_sqrt,
    format_scalar,
    parse_exact,
    parse_scalar,
    rational_sqrt,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=50)
radicands = st.sampled_from([F(2), F(3), F(3, 2), F(5, 7)])


def test_parse_scalar_kinds():
    assert parse_scalar("1/2") == F(1, 2)
    assert parse_scalar("-3") == F(-3)
    assert isinstance(parse_scalar("0.5"), float)
    assert isinstance(parse_scalar("1e-3"), float)


def test_rational_sqrt():
    assert rational_sqrt(F(9, 4)) == F(3, 2)
    assert rational_sqrt(F(2)) is None
    assert rational_sqrt(F(-1)) is None


def test_exact_sqrt_fields():
    r = exact_sqrt(F(3))
    assert r * r == 3
    # sqrt(3/4) lies in Q(sqrt(3))
    h = exact_sqrt(F(3, 4), F(3))
    assert h == r / 2
    with pytest.raises(ValueError):
        exact_sqrt(F(2), F(3))
    with pytest.raises(ValueError):
        exact_sqrt(F(-1))


def test_collapse_to_fraction():
    r = exact_sqrt(F(2))
    assert isinstance(r * r, F)
    assert isinstance(r - r, F)


def test_mixed_fields_rejected():
    with pytest.raises(ValueError):
        exact_sqrt(F(2)) + exact_sqrt(F(3))


@given(rationals, rationals, rationals, rationals, radicands)
def test_field_axioms(a, b, c, d, r):
    x = QuadraticSurd.make(a, b, r)
    y = QuadraticSurd.make(c, d, r)
    assert (x + y) - y == x
    assert x * y == y * x
    if y != 0:
        assert (x / y) * y == x
        assert (1 / y) * y == 1


@given(rationals, rationals, radicands)
def test_sign_matches_float(a, b, r):
    x = QuadraticSurd.make(a, b, r)
    fx = float(x)
    if abs(fx) > 1e-9:
        assert (x > 0) == (fx > 0)
        assert abs(x) == (x if fx > 0 else -x)


@given(rationals, rationals, radicands)
def test_format_round_trip(a, b, r):
    x = QuadraticSurd.make(a, b, r)
    assert parse_exact(format_scalar(x)) == x
