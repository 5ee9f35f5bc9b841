"""Rational values with a rigorous absolute error bound.

A :class:`Certified` ``c`` stands for some real ``x`` with
``|x - c.value| <= c.err``.  Arithmetic propagates the bound; ``tighten``
rounds the value to a dyadic rational so denominators stay small.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from ..errors import ContractError
from .matrix import to_fraction


def floor_div(q: Fraction) -> int:
    return q.numerator // q.denominator


def ceil_div(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def round_dyadic(q: Fraction, bits: int) -> Fraction:
    """Nearest multiple of ``2**-bits`` to ``q``; the error is at most ``2**-(bits+1)``."""
    q = to_fraction(q)
    scale = 1 << bits
    return Fraction(floor_div(q * scale + Fraction(1, 2)), scale)


def sqrt_lower(q, bits: int = 64) -> Fraction:
    """A rational ``r`` with ``r <= sqrt(q)`` and ``sqrt(q) - r <= 2**-bits * max(1, sqrt(q))``."""
    q = to_fraction(q)
    if q < 0:
        raise ContractError("square root of a negative number")
    if q == 0:
        return Fraction(0)
    # relative precision: pick a scale with enough significant bits
    shift = bits + max(0, -(q.numerator.bit_length() - q.denominator.bit_length()) // 2 + 2)
    scale = 1 << shift
    n = floor_div(q * scale * scale)
    r = Fraction(isqrt(n), scale)
    return r


def sqrt_upper(q, bits: int = 64) -> Fraction:
    """A rational ``r`` with ``r >= sqrt(q)``, tight to the same precision as :func:`sqrt_lower`."""
    q = to_fraction(q)
    if q < 0:
        raise ContractError("square root of a negative number")
    if q == 0:
        return Fraction(0)
    shift = bits + max(0, -(q.numerator.bit_length() - q.denominator.bit_length()) // 2 + 2)
    scale = 1 << shift
    n = ceil_div(q * scale * scale)
    s = isqrt(n)
    if s * s < n:
        s += 1
    return Fraction(s, scale)


def is_square_rational(q) -> Fraction | None:
    """The exact rational square root of ``q`` if there is one."""
    q = to_fraction(q)
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


@dataclass(frozen=True)
class Certified:
    value: Fraction
    err: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "value", to_fraction(self.value))
        object.__setattr__(self, "err", to_fraction(self.err))
        if self.err < 0:
            raise ContractError("negative error bound")

    @classmethod
    def exact(cls, x) -> "Certified":
        return cls(to_fraction(x), Fraction(0))

    @classmethod
    def from_bounds(cls, lo, hi) -> "Certified":
        lo, hi = to_fraction(lo), to_fraction(hi)
        if lo > hi:
            raise ContractError("empty interval")
        return cls((lo + hi) / 2, (hi - lo) / 2)

    @property
    def lo(self) -> Fraction:
        return self.value - self.err

    @property
    def hi(self) -> Fraction:
        return self.value + self.err

    @property
    def is_exact(self) -> bool:
        return self.err == 0

    def contains(self, x) -> bool:
        return abs(to_fraction(x) - self.value) <= self.err

    def tighten(self, bits: int) -> "Certified":
        """Round the value to ``bits`` fractional bits, widening ``err`` accordingly."""
        if self.value.denominator <= (1 << bits) and self.err.denominator <= (1 << (bits + 2)):
            return self
        v = round_dyadic(self.value, bits)
        e = self.err + abs(v - self.value)
        # round the error bound upward to a dyadic as well
        scale = 1 << (bits + 2)
        e = Fraction(ceil_div(e * scale), scale)
        return Certified(v, e)

    def __add__(self, other):
        o = _lift(other)
        return Certified(self.value + o.value, self.err + o.err)

    __radd__ = __add__

    def __neg__(self):
        return Certified(-self.value, self.err)

    def __sub__(self, other):
        o = _lift(other)
        return Certified(self.value - o.value, self.err + o.err)

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        o = _lift(other)
        v = self.value * o.value
        e = abs(self.value) * o.err + abs(o.value) * self.err + self.err * o.err
        return Certified(v, e)

    __rmul__ = __mul__

    def reciprocal(self) -> "Certified":
        lo, hi = self.lo, self.hi
        if lo <= 0 <= hi:
            raise ZeroDivisionError("interval contains zero")
        a = min(abs(lo), abs(hi))
        v = 1 / self.value
        # |1/x - 1/v| = |x - v| / (|x||v|) <= err / (a |v|)
        return Certified(v, self.err / (a * abs(self.value)))

    def __truediv__(self, other):
        o = _lift(other)
        if o.is_exact:
            if o.value == 0:
                raise ZeroDivisionError("division by zero")
            return Certified(self.value / o.value, self.err / abs(o.value))
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return _lift(other) / self

    def __abs__(self):
        return Certified(abs(self.value), self.err)

    def square(self) -> "Certified":
        return self * self

    def sqrt(self, bits: int = 64) -> "Certified":
        """Square root of a certified non-negative quantity (negative parts clipped to 0)."""
        lo = max(self.lo, Fraction(0))
        hi = self.hi
        if hi < 0:
            raise ContractError("square root of a negative interval")
        return Certified.from_bounds(sqrt_lower(lo, bits), sqrt_upper(hi, bits))

    def __repr__(self):
        return f"Certified({self.value} ± {self.err})"


def _lift(x) -> Certified:
    if isinstance(x, Certified):
        return x
    return Certified.exact(x)


def certified_max(values) -> Certified:
    values = list(values)
    lo = max(v.lo for v in values)
    hi = max(v.hi for v in values)
    return Certified.from_bounds(lo, hi)


def certified_sum(values) -> Certified:
    v, e = Fraction(0), Fraction(0)
    for c in values:
        c = _lift(c)
        v += c.value
        e += c.err
    return Certified(v, e)


@dataclass(frozen=True)
class CertifiedComplex:
    """A complex number known through certified real and imaginary parts."""
    re: Certified
    im: Certified

    @property
    def abs_err(self) -> Fraction:
        """An upper bound on the modulus of the error (``err_re + err_im``)."""
        return self.re.err + self.im.err

    def contains(self, z: complex | tuple) -> bool:
        a, b = (z.real, z.imag) if isinstance(z, complex) else z
        return self.re.contains(Fraction(a)) and self.im.contains(Fraction(b))
