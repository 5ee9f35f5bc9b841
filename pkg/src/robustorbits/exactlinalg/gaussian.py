"""Gaussian rationals: complex numbers with rational real and imaginary parts."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .matrix import to_fraction


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", to_fraction(self.re))
        object.__setattr__(self, "im", to_fraction(self.im))

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, dict):
            return cls(x.get("re", 0), x.get("im", 0))
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        if isinstance(x, (list, tuple)) and len(x) == 2:
            return cls(x[0], x[1])
        return cls(to_fraction(x), Fraction(0))

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, an exact rational."""
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        n = self.abs2()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "GaussianRational":
        if not isinstance(k, int):
            raise TypeError("only integer powers")
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = GaussianRational(Fraction(1))
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


def as_gaussian_vector(xs) -> list[GaussianRational]:
    return [GaussianRational.coerce(x) for x in xs]


def gaussian_product_power(vs, exps) -> GaussianRational:
    """Exact value of ``prod v_j ** e_j`` for integer exponents."""
    num = GaussianRational(Fraction(1))
    den = GaussianRational(Fraction(1))
    for v, e in zip(vs, exps):
        if e > 0:
            num = num * v ** e
        elif e < 0:
            den = den * v ** (-e)
    return num / den
