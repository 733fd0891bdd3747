"""Exact arithmetic in Q(phi), phi = (sqrt 5 - 1)/2, using phi**2 = 1 - phi."""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from math import sqrt
from numbers import Rational

SQRT5 = sqrt(5.0)


def _q(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} exactly")


@total_ordering
class PhiNumber:
    """``a + b*phi`` with rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = _q(a)
        self.b = _q(b)

    @classmethod
    def coerce(cls, value) -> PhiNumber:
        return value if isinstance(value, PhiNumber) else cls(value)

    def __add__(self, other):
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        return PhiNumber(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return PhiNumber(-self.a, -self.b)

    def __sub__(self, other):
        try:
            return self + (-self.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        # (a + b phi)(c + d phi) = ac + bd + (ad + bc - bd) phi
        bd = self.b * o.b
        return PhiNumber(self.a * o.a + bd, self.a * o.b + self.b * o.a - bd)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        # product with the conjugate a + b*(-1 - phi)
        return self.a * self.a - self.a * self.b - self.b * self.b

    def inverse(self) -> PhiNumber:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("PhiNumber division by zero")
        return PhiNumber((self.a - self.b) / n, -self.b / n)

    def __truediv__(self, other):
        try:
            return self * self.coerce(other).inverse()
        except TypeError:
            return NotImplemented

    def __rtruediv__(self, other):
        return self.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        result = PhiNumber(1)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            result = result * base
        return result

    def __eq__(self, other):
        try:
            o = self.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __lt__(self, other):
        o = self.coerce(other)
        d = self - o
        # sign of a + b*phi decided exactly: compare a against -b*phi
        if d.b == 0:
            return d.a < 0
        # a + b phi < 0  <=>  2a - b < -b sqrt5
        lhs = 2 * d.a - d.b
        if d.b > 0:
            return lhs < 0 and lhs * lhs > 5 * d.b * d.b
        return lhs < 0 or lhs * lhs < 5 * d.b * d.b

    def __hash__(self):
        return hash(self.a) if self.b == 0 else hash((self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * (SQRT5 - 1) / 2

    def __abs__(self):
        return -self if self < 0 else self

    def __bool__(self):
        return bool(self.a or self.b)

    def __repr__(self):
        return f"PhiNumber({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a}+{self.b}*phi" if self.b > 0 else f"{self.a}-{-self.b}*phi"


PHI = PhiNumber(0, 1)
