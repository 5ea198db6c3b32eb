"""Exact finite-precision arithmetic.

Values live on the grid ``m * 2**-p`` with an arbitrary-precision integer
mantissa ``m``.  Every primitive result is rounded back onto the grid with
round-to-nearest, ties-to-even.  The ``fx_*`` helpers work on raw mantissas
and are what the simulator uses in its inner loop; :class:`FixedPoint` wraps
them for callers who want values that know their own precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

DEFAULT_PRECISION = 8


def round_shift(x: int, s: int) -> int:
    """Return ``x / 2**s`` rounded to the nearest integer, ties to even."""
    if s <= 0:
        return x << -s
    q, r = divmod(x, 1 << s)
    half = 1 << (s - 1)
    if r > half or (r == half and q & 1):
        q += 1
    return q


def round_div(a: int, b: int) -> int:
    """Nearest integer to ``a / b`` (``b != 0``), ties to even."""
    if b < 0:
        a, b = -a, -b
    q, r = divmod(a, b)
    twice = 2 * r
    if twice > b or (twice == b and q & 1):
        q += 1
    return q


def fx_mul(a: int, b: int, p: int) -> int:
    return round_shift(a * b, p)


def fx_div(a: int, b: int, p: int) -> int:
    if b == 0:
        raise ZeroDivisionError("fixed-point division by zero")
    return round_div(a << p, b)


def fx_sqrt(a: int, p: int) -> int:
    """Square root of a nonnegative grid value, rounded to the grid.

    ``sqrt(a / 2**p) * 2**p == sqrt(a * 2**p)``; the integer square root is
    corrected upward when the exact root lies past the midpoint.  Ties cannot
    occur because ``(s + 1/2)**2`` is never an integer.
    """
    if a < 0:
        raise ValueError("square root of a negative value")
    n = a << p
    s = math.isqrt(n)
    if n - s * s > s:
        s += 1
    return s


def fx_from_fraction(x: Fraction | int | float | str, p: int) -> int:
    """Mantissa of the grid point nearest to ``x``."""
    x = Fraction(x)
    return round_div(x.numerator << p, x.denominator)


def fx_to_fraction(m: int, p: int) -> Fraction:
    return Fraction(m, 1 << p)


def fx_to_str(m: int, p: int) -> str:
    """Exact decimal rendering of ``m * 2**-p``.

    A dyadic rational always has a finite decimal expansion with at most ``p``
    digits after the point, so the string round-trips bit-exactly.
    """
    sign = "-" if m < 0 else ""
    m = abs(m)
    whole, frac = divmod(m, 1 << p)
    if frac == 0:
        return f"{sign}{whole}"
    digits = str(frac * 5**p).rjust(p, "0").rstrip("0")
    return f"{sign}{whole}.{digits}"


def fx_from_str(text: str, p: int) -> int:
    """Inverse of :func:`fx_to_str`; rejects strings that are off the grid."""
    x = Fraction(text)
    m = x * (1 << p)
    if m.denominator != 1:
        raise ValueError(f"{text!r} is not on the 2^-{p} grid")
    return int(m)


def rms_norm_raw(v: Sequence[int], p: int) -> tuple[int, ...]:
    """RMS-normalize a mantissa vector, rounding after every primitive op."""
    d = len(v)
    mask = (1 << p) - 1
    total = 0
    for x in v:
        if x:
            sq = x * x
            total += sq >> p if not sq & mask else round_shift(sq, p)
    mean = round_div(total, d)
    root = fx_sqrt(mean, p)
    if root == 0:
        raise ZeroDivisionError("RMS norm of a (numerically) zero vector")
    quotients = {0: 0}
    out = []
    for x in v:
        q = quotients.get(x)
        if q is None:
            q = quotients[x] = round_div(x << p, root)
        out.append(q)
    return tuple(out)


@dataclass(frozen=True)
class FixedPoint:
    """A value ``mantissa * 2**-precision``."""

    mantissa: int
    precision: int = DEFAULT_PRECISION

    @classmethod
    def of(cls, x: Fraction | int | float | str, precision: int = DEFAULT_PRECISION) -> "FixedPoint":
        return cls(fx_from_fraction(x, precision), precision)

    def _check(self, other: "FixedPoint") -> None:
        if self.precision != other.precision:
            raise ValueError("mixed precisions")

    def __add__(self, other: "FixedPoint") -> "FixedPoint":
        return fp_add(self, other)

    def __sub__(self, other: "FixedPoint") -> "FixedPoint":
        self._check(other)
        return FixedPoint(self.mantissa - other.mantissa, self.precision)

    def __neg__(self) -> "FixedPoint":
        return FixedPoint(-self.mantissa, self.precision)

    def __mul__(self, other: "FixedPoint") -> "FixedPoint":
        return fp_mul(self, other)

    def __truediv__(self, other: "FixedPoint") -> "FixedPoint":
        self._check(other)
        return FixedPoint(fx_div(self.mantissa, other.mantissa, self.precision), self.precision)

    def __lt__(self, other: "FixedPoint") -> bool:
        self._check(other)
        return self.mantissa < other.mantissa

    def __le__(self, other: "FixedPoint") -> bool:
        self._check(other)
        return self.mantissa <= other.mantissa

    def sqrt(self) -> "FixedPoint":
        return FixedPoint(fx_sqrt(self.mantissa, self.precision), self.precision)

    def to_fraction(self) -> Fraction:
        return fx_to_fraction(self.mantissa, self.precision)

    def __float__(self) -> float:
        return self.mantissa / (1 << self.precision)

    def __str__(self) -> str:
        return fx_to_str(self.mantissa, self.precision)

    def __repr__(self) -> str:
        return f"FixedPoint({self}, p={self.precision})"


FixedVector = tuple[FixedPoint, ...]


def fixed_vector(values: Iterable, precision: int = DEFAULT_PRECISION) -> FixedVector:
    return tuple(v if isinstance(v, FixedPoint) else FixedPoint.of(v, precision) for v in values)


def fp_add(x: FixedPoint, y: FixedPoint) -> FixedPoint:
    x._check(y)
    return FixedPoint(x.mantissa + y.mantissa, x.precision)


def fp_mul(x: FixedPoint, y: FixedPoint) -> FixedPoint:
    x._check(y)
    return FixedPoint(fx_mul(x.mantissa, y.mantissa, x.precision), x.precision)


def rms_norm(v: FixedVector) -> FixedVector:
    """``v_i / sqrt(mean(v**2))`` with grid rounding at each step.

    Raises ``ZeroDivisionError`` on an all-zero vector; compiled models keep
    a constant dummy channel so this only fires on a construction bug.
    """
    if not v:
        raise ValueError("empty vector")
    p = v[0].precision
    if any(x.precision != p for x in v):
        raise ValueError("mixed precisions")
    return tuple(FixedPoint(m, p) for m in rms_norm_raw([x.mantissa for x in v], p))


@dataclass(frozen=True, order=True)
class UnitRotation:
    """The unit complex number ``exp(2*pi*i * numerator/denominator)``.

    Always stored in lowest terms with ``0 <= numerator < denominator``.
    """

    numerator: int
    denominator: int = 1

    def __post_init__(self) -> None:
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        a = self.numerator % self.denominator
        g = math.gcd(a, self.denominator)
        object.__setattr__(self, "numerator", a // g)
        object.__setattr__(self, "denominator", self.denominator // g)

    @classmethod
    def from_angle(cls, turns: Fraction) -> "UnitRotation":
        turns = Fraction(turns)
        return cls(turns.numerator, turns.denominator)

    @property
    def angle(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __mul__(self, other: "UnitRotation") -> "UnitRotation":
        return rot_mul(self, other)

    def inverse(self) -> "UnitRotation":
        return UnitRotation(-self.numerator, self.denominator)

    def __pow__(self, n: int) -> "UnitRotation":
        return UnitRotation(self.numerator * n, self.denominator)

    def is_identity(self) -> bool:
        return self.numerator == 0

    def to_complex(self) -> complex:
        theta = 2 * math.pi * self.numerator / self.denominator
        return complex(math.cos(theta), math.sin(theta))

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def rot_mul(r1: UnitRotation, r2: UnitRotation) -> UnitRotation:
    return UnitRotation.from_angle(r1.angle + r2.angle)
