"""Certified elementary functions on rational arguments.

Every routine evaluates a power series in fixed point (integers scaled by
``2**W``) with truncation toward zero, counts the truncation errors, and
returns a :class:`Certified` whose ``err`` is a proven bound.  ``bits``
always means: absolute error at most ``2**-bits`` (relative for ``exp``).

    log  q = k log 2 + 2 atanh((y-1)/(y+1)),   q = 2^k y,  y in [2/3, 4/3]
    log 2  = 2 atanh(1/3)
    pi     = 16 atan(1/5) - 4 atan(1/239)      (Machin)
    exp  q = 2^k exp(r),                       r = q - k log 2
"""
from __future__ import annotations

import threading
from fractions import Fraction

from ..errors import ContractError
from ..exactlinalg.certified import Certified, floor_div
from ..exactlinalg.matrix import to_fraction


def _guard(bits: int) -> int:
    return max(bits, 8).bit_length() + 12


def _tdiv(x: int, y: int) -> int:
    """Integer division truncating toward zero (``y > 0``)."""
    return x // y if x >= 0 else -((-x) // y)


def _atanh_series(a: int, b: int, W: int) -> tuple[int, int]:
    """``atanh(a/b) * 2^W`` for ``0 <= a/b <= 1/3``; returns ``(S, err_ulps)``."""
    T = (a << W) // b
    a2, b2 = a * a, b * b
    S = 0
    j = 0
    while T:
        S += T // (2 * j + 1)
        T = T * a2 // b2
        j += 1
    return S, 3 * (j + 2)


def _atan_series(a: int, b: int, W: int) -> tuple[int, int]:
    """``atan(a/b) * 2^W`` for ``0 <= a/b <= 1/2``; returns ``(S, err_ulps)``."""
    T = (a << W) // b
    a2, b2 = a * a, b * b
    S = 0
    j = 0
    while T:
        term = T // (2 * j + 1)
        S += term if j % 2 == 0 else -term
        T = T * a2 // b2
        j += 1
    return S, 3 * (j + 2)


class _ConstantCache:
    """Memo for a fixed-point constant; the highest precision computed wins.

    Safe for concurrent use: readers either see an old entry (still correct,
    just less precise) or the new one; writers hold a lock.
    """

    def __init__(self, compute):
        self._compute = compute
        self._lock = threading.Lock()
        self._entry: tuple[int, int, int] | None = None  # (W, S, err_ulps)

    def get(self, W: int) -> tuple[int, int]:
        """``(S, err)`` with ``|const * 2^W - S| <= err``."""
        entry = self._entry
        if entry is None or entry[0] < W:
            with self._lock:
                entry = self._entry
                if entry is None or entry[0] < W:
                    W2 = max(W, 2 * entry[0] if entry else W)
                    S, e = self._compute(W2)
                    entry = (W2, S, e)
                    self._entry = entry
        W0, S0, e0 = entry
        shift = W0 - W
        if shift == 0:
            return S0, e0
        return S0 >> shift, (e0 >> shift) + 2


def _pi_fixed(W: int) -> tuple[int, int]:
    W2 = W + _guard(W)
    a, ea = _atan_series(1, 5, W2)
    b, eb = _atan_series(1, 239, W2)
    S = 16 * a - 4 * b
    err = 16 * ea + 4 * eb
    shift = W2 - W
    return S >> shift, (err >> shift) + 2


def _log2_fixed(W: int) -> tuple[int, int]:
    W2 = W + _guard(W)
    S, e = _atanh_series(1, 3, W2)
    shift = W2 - W
    return (2 * S) >> shift, ((2 * e) >> shift) + 2


_PI = _ConstantCache(_pi_fixed)
_LOG2 = _ConstantCache(_log2_fixed)


def _certified(S: int, err: int, W: int) -> Certified:
    return Certified(Fraction(S, 1 << W), Fraction(err, 1 << W))


def pi_certified(bits: int = 64) -> Certified:
    """``pi`` with absolute error at most ``2**-bits``."""
    W = bits + 4
    S, e = _PI.get(W)
    return _certified(S, e, W)


def log2_certified(bits: int = 64) -> Certified:
    W = bits + 4
    S, e = _LOG2.get(W)
    return _certified(S, e, W)


def _split_power_of_two(q: Fraction) -> tuple[int, Fraction]:
    """``q = 2^k y`` with ``y`` in ``[2/3, 4/3]``."""
    k = q.numerator.bit_length() - q.denominator.bit_length()
    y = q / (Fraction(2) ** k)
    while y > Fraction(4, 3):
        y /= 2
        k += 1
    while y < Fraction(2, 3):
        y *= 2
        k -= 1
    return k, y


def log_certified(q, bits: int = 64) -> Certified:
    """Natural logarithm of a positive rational, absolute error ``<= 2**-bits``."""
    q = to_fraction(q)
    if q <= 0:
        raise ContractError("log of a non-positive number")
    if q == 1:
        return Certified.exact(0)
    k, y = _split_power_of_two(q)
    W = bits + _guard(bits) + abs(k).bit_length() + 2
    num = y.numerator - y.denominator
    den = y.numerator + y.denominator
    S, e = _atanh_series(abs(num), den, W)
    S = 2 * S if num >= 0 else -2 * S
    e *= 2
    if k:
        L, eL = _LOG2.get(W)
        S += k * L
        e += abs(k) * eL
    return _certified(S, e, W).tighten(bits + 2)


def _exp_small(r: Fraction, W: int) -> tuple[int, int]:
    """``exp(r) * 2^W`` for ``|r| <= 1``; returns ``(S, err_ulps)``."""
    a, b = r.numerator, r.denominator
    T = 1 << W
    S = T
    j = 1
    while T:
        T = _tdiv(T * a, b * j)
        S += T
        j += 1
    return S, 2 * (j + 2)


def exp_certified(q, bits: int = 64) -> Certified:
    """``exp(q)`` for rational ``q`` with *relative* error at most ``2**-bits``."""
    q = to_fraction(q)
    if q == 0:
        return Certified.exact(1)
    ln2_rough = Fraction(6243314768165359, 9007199254740992)  # log 2 to ~53 bits
    k = floor_div(q / ln2_rough + Fraction(1, 2))
    kb = abs(k).bit_length()
    W = bits + _guard(bits) + 4
    Wl = W + kb + 2
    L, eL = _LOG2.get(Wl)
    r_hat = q - Fraction(k * L, 1 << Wl)
    # |r - r_hat| <= |k| eL 2^-Wl
    delta = Fraction(abs(k) * eL, 1 << Wl)
    E, eE = _exp_small(r_hat, W)
    value = Fraction(E, 1 << W)
    err = Fraction(eE, 1 << W) + (value + Fraction(eE, 1 << W)) * 2 * delta
    scale = Fraction(2) ** k
    c = Certified(value * scale, err * scale)
    return _tighten_relative(c, bits + 2)


def _tighten_relative(c: Certified, bits: int) -> Certified:
    """Round to about ``bits`` significant bits (keeps denominators small)."""
    v = abs(c.value)
    if v == 0:
        return c
    mag = v.numerator.bit_length() - v.denominator.bit_length()
    frac_bits = max(0, bits - mag + 2)
    return c.tighten(frac_bits)


def exp_of_certified(x: Certified, bits: int = 64) -> Certified:
    """``exp`` of an uncertain argument: ``exp(v) * exp(+-err)``."""
    base = exp_certified(x.value, bits)
    if x.err == 0:
        return base
    if x.err > Fraction(1, 2):
        raise ContractError("argument too uncertain for exp")
    hi = base.hi * (1 + 2 * x.err)
    lo = base.lo * (1 - x.err)
    return _tighten_relative(Certified.from_bounds(lo, hi), bits + 2)


def atan_certified(q, bits: int = 64) -> Certified:
    """Arctangent of a rational, absolute error ``<= 2**-bits``."""
    q = to_fraction(q)
    if q == 0:
        return Certified.exact(0)
    if q < 0:
        return -atan_certified(-q, bits)
    W = bits + _guard(bits) + 4
    P, eP = _PI.get(W)
    if q > 1:
        inner = _atan_reduced(1 / q, W, P, eP)
        S, e = (P >> 1) - inner[0], inner[1] + eP + 1
    else:
        S, e = _atan_reduced(q, W, P, eP)
    return _certified(S, e, W).tighten(bits + 2)


def _atan_reduced(q: Fraction, W: int, P: int, eP: int) -> tuple[int, int]:
    """``atan(q) 2^W`` for ``0 < q <= 1``."""
    if q <= Fraction(1, 2):
        return _atan_series(q.numerator, q.denominator, W)
    # atan(q) = pi/4 - atan((1-q)/(1+q)),  (1-q)/(1+q) in [0, 1/3)
    x = (1 - q) / (1 + q)
    S, e = _atan_series(x.numerator, x.denominator, W)
    return (P >> 2) - S, e + eP + 1


def arg_turns(re, im, bits: int = 64) -> Certified:
    """``Arg(re + i im) / (2 pi)`` reduced to ``[0, 1)``, absolute error ``<= 2**-bits``.

    Multiples of 1/8 turn are returned exactly.
    """
    a, b = to_fraction(re), to_fraction(im)
    if a == 0 and b == 0:
        raise ContractError("argument of zero")
    if b == 0:
        return Certified.exact(0 if a > 0 else Fraction(1, 2))
    if a == 0:
        return Certified.exact(Fraction(1, 4) if b > 0 else Fraction(3, 4))
    if abs(a) == abs(b):
        octant = {(1, 1): 1, (-1, 1): 3, (-1, -1): 5, (1, -1): 7}
        return Certified.exact(Fraction(octant[(1 if a > 0 else -1, 1 if b > 0 else -1)], 8))
    work = bits + 6
    pi = pi_certified(work)
    if abs(b) < abs(a):
        base = atan_certified(b / a, work)
        if a > 0:
            phi = base
        else:
            phi = base + pi if b > 0 else base - pi
    else:
        base = atan_certified(a / b, work)
        half = pi * Fraction(1, 2)
        phi = half - base if b > 0 else -half - base
    theta = phi / (pi * 2)
    theta = theta.tighten(bits + 2)
    if theta.value < 0:
        theta = Certified(theta.value + 1, theta.err)
    elif theta.value >= 1:
        theta = Certified(theta.value - 1, theta.err)
    return theta


def _sin_cos_small(phi: Fraction, W: int) -> tuple[int, int, int]:
    """``sin(phi) 2^W, cos(phi) 2^W`` for ``|phi| <= 1``; plus a shared error in ulps."""
    a, b = phi.numerator, phi.denominator
    a2, b2 = a * a, b * b
    # sine
    T = _tdiv(a << W, b)
    S = T
    j = 1
    while T:
        T = -_tdiv(T * a2, b2 * (2 * j) * (2 * j + 1))
        S += T
        j += 1
    # cosine
    T = 1 << W
    C = T
    i = 1
    while T:
        T = -_tdiv(T * a2, b2 * (2 * i - 1) * (2 * i))
        C += T
        i += 1
    return S, C, 2 * (max(i, j) + 3)


def cos_sin_turns(theta, bits: int = 64) -> tuple[Certified, Certified]:
    """``(cos 2 pi theta, sin 2 pi theta)`` for rational ``theta``, abs error ``<= 2**-bits``.

    ``theta`` is reduced exactly to ``j/4 + delta`` with ``|delta| <= 1/8``,
    so quarter turns are exact.
    """
    theta = to_fraction(theta)
    theta -= floor_div(theta)
    j = floor_div(4 * theta + Fraction(1, 2))
    delta = theta - Fraction(j, 4)
    j %= 4
    if delta == 0:
        c, s = [(1, 0), (0, 1), (-1, 0), (0, -1)][j]
        return Certified.exact(c), Certified.exact(s)
    W = bits + _guard(bits) + 4
    P, eP = _PI.get(W)
    phi_hat = Fraction(2 * P, 1 << W) * delta
    # |phi - phi_hat| <= 2 |delta| eP 2^-W <= eP 2^-W / 4
    S, C, e = _sin_cos_small(phi_hat, W)
    err = Fraction(e, 1 << W) + Fraction(eP, 1 << (W + 2))
    s = Certified(Fraction(S, 1 << W), err).tighten(bits + 2)
    c = Certified(Fraction(C, 1 << W), err).tighten(bits + 2)
    if j == 0:
        return c, s
    if j == 1:
        return -s, c
    if j == 2:
        return -c, -s
    return s, -c


def exp_complex(a, b, bits: int = 64):
    """``exp(a + 2 pi i b)`` for rationals ``a, b`` as a Gaussian rational.

    The relative error is below ``2**-bits``; the result is exact when
    ``a = 0`` and ``b`` is a multiple of 1/4.
    """
    from ..exactlinalg.gaussian import GaussianRational

    a, b = to_fraction(a), to_fraction(b)
    E = exp_certified(a, bits + 3)
    c, s = cos_sin_turns(b, bits + 3)
    if E.is_exact and c.is_exact and s.is_exact:
        return GaussianRational(E.value * c.value, E.value * s.value)
    mag = E.value.numerator.bit_length() - E.value.denominator.bit_length() - 1
    frac = max(0, bits + 4 - mag)
    from ..exactlinalg.certified import round_dyadic

    return GaussianRational(round_dyadic(E.value * c.value, frac),
                            round_dyadic(E.value * s.value, frac))


__all__ = [
    "arg_turns", "exp_complex", "atan_certified", "cos_sin_turns", "exp_certified",
    "exp_of_certified", "log2_certified", "log_certified", "pi_certified",
]
