"""Exact scalars: rationals and elements of a real quadratic field.

Metric algebra runs over :class:`fractions.Fraction`.  Dyson maps need square
roots, which leave the rationals; as long as every root involved lives in a
single field ``Q(sqrt(r))`` the computation stays exact through
:class:`QuadraticSurd`.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

__all__ = [
    "QuadraticSurd",
    "as_fraction",
    "exact_sqrt",
    "format_scalar",
    "is_exact",
    "parse_exact",
    "parse_scalar",
    "rational_sqrt",
    "to_float",
]


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected; use :func:`parse_scalar` for user input that may be
    decimal.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {x!r} as an exact rational")


def parse_scalar(text: str):
    """Parse a command-line scalar.

    ``"1/2"`` and ``"3"`` give Fractions, anything with a decimal point or an
    exponent gives a float.
    """
    text = text.strip()
    if re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        return Fraction(text)
    return float(text)


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Return the exact rational square root of ``q``, or None."""
    q = Fraction(q)
    if q < 0:
        return None
    p, r = q.numerator, q.denominator
    sp, sr = math.isqrt(p), math.isqrt(r)
    if sp * sp == p and sr * sr == r:
        return Fraction(sp, sr)
    return None


class QuadraticSurd:
    """The real number ``a + b*sqrt(r)`` with rational ``a, b, r``.

    ``r`` is a positive rational that is not a perfect square.  Arithmetic
    between surds requires a common radicand; results with ``b == 0`` collapse
    back to :class:`~fractions.Fraction`, so mixing with rationals is seamless.
    """

    __slots__ = ("a", "b", "r")

    def __init__(self, a, b, r):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.r = Fraction(r)
        if self.r <= 0 or rational_sqrt(self.r) is not None:
            raise ValueError(f"radicand {self.r} must be a positive non-square")

    @classmethod
    def make(cls, a, b, r):
        """Build ``a + b*sqrt(r)``, collapsing to a Fraction when possible."""
        b = Fraction(b)
        if b == 0:
            return Fraction(a)
        root = rational_sqrt(Fraction(r))
        if root is not None:
            return Fraction(a) + b * root
        return cls(a, b, r)

    # -- field operations -------------------------------------------------
    def _split(self, other):
        if isinstance(other, QuadraticSurd):
            if other.r != self.r:
                raise ValueError(
                    f"surds live in different fields: sqrt({self.r}) vs sqrt({other.r})"
                )
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        parts = self._split(other)
        if parts is None:
            return NotImplemented
        return QuadraticSurd.make(self.a + parts[0], self.b + parts[1], self.r)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.r)

    def __pos__(self):
        return self

    def __sub__(self, other):
        parts = self._split(other)
        if parts is None:
            return NotImplemented
        return QuadraticSurd.make(self.a - parts[0], self.b - parts[1], self.r)

    def __rsub__(self, other):
        parts = self._split(other)
        if parts is None:
            return NotImplemented
        return QuadraticSurd.make(parts[0] - self.a, parts[1] - self.b, self.r)

    def __mul__(self, other):
        parts = self._split(other)
        if parts is None:
            return NotImplemented
        c, d = parts
        return QuadraticSurd.make(
            self.a * c + self.b * d * self.r, self.a * d + self.b * c, self.r
        )

    __rmul__ = __mul__

    def conjugate_surd(self):
        """Galois conjugate ``a - b*sqrt(r)``."""
        return QuadraticSurd(self.a, -self.b, self.r)

    def norm(self) -> Fraction:
        """Field norm ``a**2 - r*b**2``; zero only for the zero element."""
        return self.a * self.a - self.r * self.b * self.b

    def __truediv__(self, other):
        parts = self._split(other)
        if parts is None:
            return NotImplemented
        c, d = parts
        if d == 0:
            if c == 0:
                raise ZeroDivisionError("division by zero")
            return QuadraticSurd.make(self.a / c, self.b / c, self.r)
        den = QuadraticSurd(c, d, self.r)
        return self * den.conjugate_surd() / den.norm()

    def __rtruediv__(self, other):
        parts = self._split(other)
        if parts is None:
            return NotImplemented
        c, d = parts
        conj = self.conjugate_surd()
        n = self.norm()
        return QuadraticSurd.make(c, d, self.r) * conj / n

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return 1 / (self**-n)
        out = Fraction(1)
        for _ in range(n):
            out = out * self
        return out

    # -- comparisons ------------------------------------------------------
    def __eq__(self, other):
        parts = self._split(other)
        if parts is None:
            if isinstance(other, float):
                return float(self) == other
            return NotImplemented
        return self.a == parts[0] and self.b == parts[1]

    def __hash__(self):
        return hash((self.a, self.b, self.r))

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(r)``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a**2 against r*b**2
        diff = self.a * self.a - self.r * self.b * self.b
        return sa if diff > 0 else (sb if diff < 0 else 0)

    def _cmp(self, other) -> int:
        diff = self - other
        if isinstance(diff, QuadraticSurd):
            return diff.sign()
        return (diff > 0) - (diff < 0)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(float(self.r))

    def __bool__(self):
        return not (self.a == 0 and self.b == 0)

    def __repr__(self):
        return f"QuadraticSurd({self.a}, {self.b}, {self.r})"

    def __str__(self):
        return format_scalar(self)


def exact_sqrt(q, radicand=None):
    """Positive square root of a non-negative rational, kept exact if possible.

    Returns a Fraction when ``q`` is a perfect square, otherwise a
    :class:`QuadraticSurd` in ``Q(sqrt(radicand))`` (``radicand`` defaults to
    ``q`` itself).  Raises ValueError when ``q/radicand`` is not a square,
    i.e. the root is not in the requested field.
    """
    q = as_fraction(q)
    if q < 0:
        raise ValueError(f"square root of negative {q}")
    root = rational_sqrt(q)
    if root is not None:
        return root
    r = q if radicand is None else as_fraction(radicand)
    ratio = rational_sqrt(q / r)
    if ratio is None:
        raise ValueError(f"sqrt({q}) does not lie in Q(sqrt({r}))")
    return QuadraticSurd(0, ratio, r)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QuadraticSurd))


def to_float(x) -> float:
    return float(x)


def format_scalar(x) -> str:
    """String form used in JSON: ``"p/q"`` or ``"a+b*sqrt(r)"``."""
    if isinstance(x, QuadraticSurd):
        if x.a == 0:
            return f"{x.b}*sqrt({x.r})"
        return f"{x.a}+{x.b}*sqrt({x.r})"
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    raise TypeError(f"not an exact scalar: {x!r}")


_SURD_RE = re.compile(r"^(?:(?P<a>[+-]?[^+*]+)\+)?(?P<b>[^*]+)\*sqrt\((?P<r>[^)]+)\)$")


def parse_exact(text: str):
    """Inverse of :func:`format_scalar`."""
    m = _SURD_RE.match(text)
    if m:
        return QuadraticSurd.make(Fraction(m["a"] or 0), Fraction(m["b"]), Fraction(m["r"]))
    return Fraction(text)
