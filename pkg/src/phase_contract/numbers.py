"""Exact and log-domain scalar types used by the angular-momentum code.

``HalfInt`` keeps angular-momentum quantum numbers as doubled integers so that
``1/2`` and ``3/2`` never go through floating point.  ``SqrtRational`` holds
values of the form ``sign * sqrt(p/q)``, which is the closed form of every
Clebsch-Gordan coefficient.  ``LogDomainReal`` stores ``sign * exp(log_mag)``
so products of huge factorials stay finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Union

__all__ = ["HalfInt", "SqrtRational", "LogDomainReal", "half", "HalfLike"]


@total_ordering
@dataclass(frozen=True)
class HalfInt:
    """An integer or half-odd-integer, stored as ``twice_value``."""

    twice_value: int

    def __post_init__(self):
        if not isinstance(self.twice_value, int) or isinstance(self.twice_value, bool):
            raise TypeError(f"twice_value must be int, got {self.twice_value!r}")

    @classmethod
    def of(cls, value: "HalfLike") -> "HalfInt":
        """Coerce ``value`` (HalfInt, int, Fraction or string like ``"3/2"``).

        Floats are rejected on purpose: ``0.5`` and ``0.49999`` must not be
        confused.
        """
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a quantum number")
        if isinstance(value, int):
            return cls(2 * value)
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, Fraction):
            doubled = 2 * value
            if doubled.denominator != 1:
                raise ValueError(f"{value} is not a multiple of 1/2")
            return cls(int(doubled))
        raise TypeError(f"cannot interpret {value!r} as a half-integer; use HalfInt(2*j)")

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    def __float__(self) -> float:
        return self.twice_value / 2

    def __int__(self) -> int:
        if not self.is_integer:
            raise ValueError(f"{self} is not an integer")
        return self.twice_value // 2

    def __add__(self, other: "HalfLike") -> "HalfInt":
        return HalfInt(self.twice_value + HalfInt.of(other).twice_value)

    __radd__ = __add__

    def __sub__(self, other: "HalfLike") -> "HalfInt":
        return HalfInt(self.twice_value - HalfInt.of(other).twice_value)

    def __rsub__(self, other: "HalfLike") -> "HalfInt":
        return HalfInt.of(other) - self

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice_value)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice_value))

    def __lt__(self, other: "HalfLike") -> bool:
        return self.twice_value < HalfInt.of(other).twice_value

    def __eq__(self, other) -> bool:
        try:
            return self.twice_value == HalfInt.of(other).twice_value
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash(("HalfInt", self.twice_value))

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"

    def __repr__(self) -> str:
        return f"HalfInt({self})"

    def magnetic_range(self) -> list["HalfInt"]:
        """Magnetic numbers ``j, j-1, ..., -j`` (descending)."""
        return [HalfInt(tm) for tm in range(self.twice_value, -self.twice_value - 1, -2)]


HalfLike = Union[HalfInt, int, Fraction, str]


def half(value: HalfLike) -> HalfInt:
    """Shorthand for :meth:`HalfInt.of`."""
    return HalfInt.of(value)


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass(frozen=True)
class SqrtRational:
    """Exact value ``sign * sqrt(numerator / denominator)``.

    The radicand is kept in lowest terms; zero is ``sign == 0`` with
    radicand ``0/1``.
    """

    sign: int
    numerator: int
    denominator: int = 1

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.denominator <= 0 or self.numerator < 0:
            raise ValueError("radicand must be non-negative with positive denominator")
        if (self.sign == 0) != (self.numerator == 0):
            raise ValueError("sign is 0 exactly when the radicand is 0")
        g = math.gcd(self.numerator, self.denominator)
        if g != 1:
            object.__setattr__(self, "numerator", self.numerator // g)
            object.__setattr__(self, "denominator", self.denominator // g)
        if self.sign == 0:
            object.__setattr__(self, "denominator", 1)

    @classmethod
    def zero(cls) -> "SqrtRational":
        return cls(0, 0, 1)

    @classmethod
    def from_rational(cls, value: Union[int, Fraction]) -> "SqrtRational":
        """The exact square root representation of a rational number."""
        value = Fraction(value)
        if value == 0:
            return cls.zero()
        sq = value * value
        return cls(1 if value > 0 else -1, sq.numerator, sq.denominator)

    @classmethod
    def signed_sqrt(cls, sign: int, radicand: Fraction) -> "SqrtRational":
        radicand = Fraction(radicand)
        if radicand == 0 or sign == 0:
            return cls.zero()
        return cls(sign, radicand.numerator, radicand.denominator)

    @property
    def radicand(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def squared(self) -> Fraction:
        """The signed square ``sign * value**2``; exact."""
        return self.sign * self.radicand

    def is_rational(self) -> bool:
        return _is_square(self.numerator) and _is_square(self.denominator)

    def __bool__(self) -> bool:
        return self.sign != 0

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.sqrt(self.numerator / self.denominator)
        except OverflowError:
            log_mag = 0.5 * (math.log(self.numerator) - math.log(self.denominator))
            return self.sign * math.exp(log_mag)

    def log_abs(self) -> float:
        if self.sign == 0:
            return -math.inf
        return 0.5 * (math.log(self.numerator) - math.log(self.denominator))

    def __neg__(self) -> "SqrtRational":
        return SqrtRational(-self.sign, self.numerator, self.denominator)

    def __mul__(self, other) -> "SqrtRational":
        if isinstance(other, (int, Fraction)):
            other = SqrtRational.from_rational(other)
        if not isinstance(other, SqrtRational):
            return NotImplemented
        return SqrtRational.signed_sqrt(self.sign * other.sign, self.radicand * other.radicand)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "SqrtRational":
        if isinstance(other, (int, Fraction)):
            other = SqrtRational.from_rational(other)
        if not isinstance(other, SqrtRational):
            return NotImplemented
        if other.sign == 0:
            raise ZeroDivisionError("division by exact zero")
        return SqrtRational.signed_sqrt(self.sign * other.sign, self.radicand / other.radicand)

    def __add__(self, other) -> "SqrtRational":
        """Exact sum, defined when both radicands share a square-free part.

        Raises ``ValueError`` otherwise (e.g. ``sqrt(2) + sqrt(3)``).
        """
        if isinstance(other, (int, Fraction)):
            other = SqrtRational.from_rational(other)
        if not isinstance(other, SqrtRational):
            return NotImplemented
        if other.sign == 0:
            return self
        if self.sign == 0:
            return other
        ratio = self.radicand / other.radicand
        if not (_is_square(ratio.numerator) and _is_square(ratio.denominator)):
            raise ValueError(f"{self} + {other} is not a single square root of a rational")
        root = Fraction(math.isqrt(ratio.numerator), math.isqrt(ratio.denominator))
        coeff = self.sign * root + other.sign
        # value = coeff * sqrt(other.radicand)
        if coeff == 0:
            return SqrtRational.zero()
        return SqrtRational.signed_sqrt(1 if coeff > 0 else -1, coeff * coeff * other.radicand)

    __radd__ = __add__

    def __sub__(self, other) -> "SqrtRational":
        if isinstance(other, (int, Fraction)):
            other = SqrtRational.from_rational(other)
        return self + (-other)

    def __rsub__(self, other) -> "SqrtRational":
        return (-self) + other

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = SqrtRational.from_rational(other)
        if not isinstance(other, SqrtRational):
            return NotImplemented
        return (self.sign, self.numerator, self.denominator) == (
            other.sign,
            other.numerator,
            other.denominator,
        )

    def __hash__(self) -> int:
        return hash((self.sign, self.numerator, self.denominator))

    def __str__(self) -> str:
        if self.sign == 0:
            return "0"
        s = "+" if self.sign > 0 else "-"
        if self.is_rational():
            p, q = math.isqrt(self.numerator), math.isqrt(self.denominator)
            return f"{s}{p}" if q == 1 else f"{s}{p}/{q}"
        return f"{s}sqrt({self.numerator}/{self.denominator})"


@dataclass(frozen=True)
class LogDomainReal:
    """Real number ``sign * exp(log_magnitude)``."""

    sign: int
    log_magnitude: float

    @classmethod
    def from_float(cls, x: float) -> "LogDomainReal":
        if x == 0:
            return cls(0, -math.inf)
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def zero(cls) -> "LogDomainReal":
        return cls(0, -math.inf)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        if self.log_magnitude > 709.782712893384:
            raise OverflowError(f"exp({self.log_magnitude}) exceeds float range")
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other: "LogDomainReal") -> "LogDomainReal":
        if self.sign == 0 or other.sign == 0:
            return LogDomainReal.zero()
        return LogDomainReal(self.sign * other.sign, self.log_magnitude + other.log_magnitude)

    def __truediv__(self, other: "LogDomainReal") -> "LogDomainReal":
        if other.sign == 0:
            raise ZeroDivisionError("division by zero")
        if self.sign == 0:
            return LogDomainReal.zero()
        return LogDomainReal(self.sign * other.sign, self.log_magnitude - other.log_magnitude)

    def __neg__(self) -> "LogDomainReal":
        return LogDomainReal(-self.sign, self.log_magnitude)

    def __add__(self, other: "LogDomainReal") -> "LogDomainReal":
        return LogDomainReal.sum([self, other])

    def sqrt(self) -> "LogDomainReal":
        if self.sign < 0:
            raise ValueError("square root of a negative number")
        return LogDomainReal(self.sign, 0.5 * self.log_magnitude)

    @staticmethod
    def sum(values: Iterable["LogDomainReal"]) -> "LogDomainReal":
        """Sum by factoring out the largest magnitude; inner sum is ``math.fsum``."""
        values = [v for v in values if v.sign != 0]
        if not values:
            return LogDomainReal.zero()
        top = max(v.log_magnitude for v in values)
        total = math.fsum(v.sign * math.exp(v.log_magnitude - top) for v in values)
        if total == 0:
            return LogDomainReal.zero()
        return LogDomainReal(1 if total > 0 else -1, top + math.log(abs(total)))
