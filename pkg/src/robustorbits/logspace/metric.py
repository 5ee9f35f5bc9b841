"""Logarithmic coordinates and the quotient metric on ``C^n / 2 pi i Z^n``.

A point ``eta = rho + 2 pi i theta`` is stored as two rational vectors with
``theta`` reduced to ``[0, 1)``.  The distance

    Delta(eta, zeta)^2 = ||rho - tau||^2 + 4 pi^2 dist^2(theta - phi, Z^n)

is a rational quantity up to the factor ``pi^2``, so everything here is
exact except for the enclosure of ``pi``.  Orbit distances split into an
orthogonal projection (real parts) and a subspace-to-lattice distance
(imaginary parts) handled by the SLDP solvers.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ..errors import ContractError
from ..exactlinalg.certified import (Certified, CertifiedComplex, ceil_div, floor_div,
                                     sqrt_lower, sqrt_upper)
from ..exactlinalg.gaussian import GaussianRational, as_gaussian_vector
from ..exactlinalg.matrix import (as_int_matrix, as_rat_vector, dot, inverse,
                                  matvec, to_fraction)
from ..exactlinalg.normal_forms import hnf_basis
from ..exactlinalg.spectral import gram, sigma_max_upper
from ..lattices.cvp import DistanceEstimate
from ..lattices.lll import _round_half_up
from ..lattices.sldp import (SldpInstance, SldpWitness, sldp_exact_witness,
                             sldp_h_based, sldp_lll)
from .elementary import arg_turns, exp_complex, log_certified, pi_certified

BACKENDS = ("exact", "h", "lll")
GROUPS = ("T", "K")


def _frac_part(x: Fraction) -> Fraction:
    return x - floor_div(x)


@dataclass(frozen=True)
class QuotientPoint:
    """``rho + 2 pi i theta`` modulo ``2 pi i Z^n``; ``err`` bounds the distance
    to the point it approximates (0 when exact)."""
    rho: tuple[Fraction, ...]
    theta: tuple[Fraction, ...]
    err: Fraction = Fraction(0)

    def __init__(self, rho: Sequence, theta: Optional[Sequence] = None, err=0):
        rho = as_rat_vector(rho)
        theta = as_rat_vector(theta) if theta is not None else [Fraction(0)] * len(rho)
        if len(rho) != len(theta):
            raise ContractError("rho and theta must have the same length")
        err = to_fraction(err)
        if err < 0:
            raise ContractError("negative error bound")
        object.__setattr__(self, "rho", tuple(rho))
        object.__setattr__(self, "theta", tuple(_frac_part(t) for t in theta))
        object.__setattr__(self, "err", err)

    @classmethod
    def zero(cls, n: int) -> "QuotientPoint":
        return cls([0] * n, [0] * n)

    @property
    def n(self) -> int:
        return len(self.rho)

    @property
    def is_exact(self) -> bool:
        return self.err == 0

    def translated(self, shift_rho: Sequence = None, shift_theta: Sequence = None) -> "QuotientPoint":
        rho = list(self.rho)
        theta = list(self.theta)
        if shift_rho is not None:
            rho = [a + to_fraction(b) for a, b in zip(rho, shift_rho)]
        if shift_theta is not None:
            theta = [a + to_fraction(b) for a, b in zip(theta, shift_theta)]
        return QuotientPoint(rho, theta, self.err)


@dataclass(frozen=True)
class PiApprox:
    """``pi`` enclosed to a requested number of bits."""
    value: Certified

    @classmethod
    def at(cls, bits: int = 64) -> "PiApprox":
        return cls(pi_certified(bits))

    @property
    def lo(self) -> Fraction:
        return self.value.lo

    @property
    def hi(self) -> Fraction:
        return self.value.hi


def _bits_for(eps: Fraction) -> int:
    """Smallest ``b >= 0`` with ``2**-b <= eps``."""
    if eps >= 1:
        return 0
    return (ceil_div(1 / eps) - 1).bit_length()


def _nonzero_vector(v) -> list[GaussianRational]:
    v = as_gaussian_vector(v)
    if not v:
        raise ContractError("empty vector")
    if any(not x for x in v):
        raise ContractError("vectors with a zero component are not supported")
    return v


def log_approx(v, eps=Fraction(1, 1 << 64)) -> QuotientPoint:
    """Principal logarithm of a vector with nonzero entries, within ``eps``.

    Components of modulus one and arguments that are multiples of 1/8 turn
    come out exact, so ``err`` is 0 for e.g. ``(1, -1, i)``.
    """
    v = _nonzero_vector(v)
    eps = to_fraction(eps)
    if eps <= 0:
        raise ContractError("precision must be positive")
    n = len(v)
    b = _bits_for(eps / sqrt_upper(2 * n, 8)) + 2
    pi_hi = pi_certified(32).hi
    rho, theta, err2 = [], [], Fraction(0)
    for x in v:
        lg = log_certified(x.abs2(), b + 1)
        r = Certified(lg.value / 2, lg.err / 2)
        t = arg_turns(x.re, x.im, b + 3)
        rho.append(r.value)
        theta.append(t.value)
        err2 += r.err ** 2 + (2 * pi_hi * t.err) ** 2
    err = sqrt_upper(err2, 8) if err2 else Fraction(0)
    assert err < eps
    return QuotientPoint(rho, theta, err)


def exp_approx(p: QuotientPoint, eps=Fraction(1, 1 << 64)) -> list[GaussianRational]:
    """``Exp`` of the stored point, relative error below ``eps`` per entry."""
    eps = to_fraction(eps)
    if eps <= 0:
        raise ContractError("precision must be positive")
    bits = _bits_for(eps) + 1
    return [exp_complex(r, t, bits) for r, t in zip(p.rho, p.theta)]


def torus_dist2(x: Sequence[Fraction]) -> Fraction:
    """``dist^2(x, Z^n)``, exactly, by rounding each coordinate."""
    return sum(((a - _round_half_up(a)) ** 2 for a in x), Fraction(0))


def _sqrt_bracket(lo2: Fraction, hi2: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    return sqrt_lower(lo2, bits), sqrt_upper(hi2, bits)


def delta_metric(p: QuotientPoint, q: QuotientPoint, bits: int = 64) -> Certified:
    """``Delta(p, q)`` with the approximation errors of ``p`` and ``q`` added."""
    if p.n != q.n:
        raise ContractError("points live in different dimensions")
    F = sum(((a - b) ** 2 for a, b in zip(p.rho, q.rho)), Fraction(0))
    s2 = torus_dist2([a - b for a, b in zip(p.theta, q.theta)])
    e = p.err + q.err
    if s2 == 0:
        root = sqrt_lower(F, bits)
        if root * root == F:
            return Certified(root, e)
    pi = pi_certified(bits + 4)
    lo, hi = _sqrt_bracket(F + 4 * pi.lo ** 2 * s2, F + 4 * pi.hi ** 2 * s2, bits)
    return Certified.from_bounds(max(Fraction(0), lo - e), hi + e)


@dataclass(frozen=True)
class OrbitHint:
    """Precomputed bases for large actions: ``U`` independent integer rows
    spanning the row space of ``M`` and ``H`` a saturated basis of its kernel
    lattice.  Not checked beyond what :class:`SldpInstance` checks."""
    U: tuple[tuple[int, ...], ...]
    H: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class OrbitParts:
    """The two summands of a squared orbit distance, with the SLDP details."""
    real2: Fraction                     # exact first term
    sldp: SldpInstance
    sldp_estimate: DistanceEstimate     # distance (not squared) for the imaginary part
    witness: SldpWitness
    backend: str


def _row_space_basis(action) -> list[list[int]]:
    return hnf_basis(as_int_matrix(action.M))


def _invariant_H(action):
    from ..torus import invariant_matrix  # local import: torus depends on this package
    return [list(h) for h in invariant_matrix(action, verify=False).H]


def _project_perp2(H: list[list[int]], x: Sequence[Fraction]) -> Fraction:
    """``||P_{ker M} x||^2 = (Hx)^T (H H^T)^-1 (Hx)``."""
    if not H:
        return Fraction(0)
    Hx = matvec(H, x)
    return dot(Hx, matvec(inverse(gram(H)), Hx))


def orbit_parts(action, p: QuotientPoint, q: QuotientPoint, group: str = "T",
                backend: str = "exact", bits: int = 64,
                max_dim: Optional[int] = None, hint: Optional["OrbitHint"] = None) -> OrbitParts:
    if group not in GROUPS:
        raise ContractError(f"group must be one of {GROUPS}")
    if backend not in BACKENDS:
        raise ContractError(f"backend must be one of {BACKENDS}")
    if p.n != action.n or q.n != action.n:
        raise ContractError("points must have length n")
    diff_rho = [a - b for a, b in zip(p.rho, q.rho)]
    H = hint.H if hint is not None else _invariant_H(action)
    if group == "T":
        real2 = _project_perp2(H, diff_rho)
    else:
        real2 = dot(diff_rho, diff_rho)
    U = hint.U if hint is not None else _row_space_basis(action)
    t = [a - b for a, b in zip(p.theta, q.theta)]
    inst = SldpInstance(t, U, H if U else None)
    if backend == "exact":
        d2, wit = sldp_exact_witness(inst, max_dim)
        root = sqrt_lower(d2, bits)
        if root * root == d2:
            est = DistanceEstimate(root, 1, d2, lower=root)
        else:
            hi, lo = sqrt_upper(d2, bits), sqrt_lower(d2, bits)
            est = DistanceEstimate(hi, hi / lo, d2, lower=lo)
    elif backend == "h":
        est, wit = sldp_h_based(inst, bits)
    else:
        est, wit = sldp_lll(inst, bits)
    return OrbitParts(real2, inst, est, wit, backend)


def combine(real2: Fraction, est: DistanceEstimate, bits: int = 64,
            notes: tuple[str, ...] = ()) -> DistanceEstimate:
    """``D' = sqrt(real2 + 4 pi^2 D^2)`` rounded up, with its honest factor."""
    pi = pi_certified(bits + 4)
    hi2 = real2 + 4 * pi.hi ** 2 * est.D ** 2
    lb = est.lower_bound
    lo2 = real2 + 4 * pi.lo ** 2 * lb ** 2
    D, L = sqrt_upper(hi2, bits), sqrt_lower(lo2, bits)
    exact = None
    if est.squared_exact == 0:
        exact = real2
        root = sqrt_lower(real2, bits)
        if root * root == real2:
            D = L = root
    if D == 0:
        return DistanceEstimate(0, est.gamma, 0, notes, lower=0)
    gamma = max(Fraction(1), D / L) if L > 0 else None
    if gamma is None:
        raise AssertionError("positive upper bound with zero lower bound")
    return DistanceEstimate(D, gamma, exact, notes, lower=L)


def delta_orbit(action, p: QuotientPoint, q: QuotientPoint, group: str = "T",
                backend: str = "exact", bits: int = 64,
                max_dim: Optional[int] = None, hint: Optional["OrbitHint"] = None) -> DistanceEstimate:
    """Distance between the ``T``- or ``K``-orbits of two stored log points.

    ``p`` and ``q`` are taken at face value (their ``err`` is ignored here; the
    orbit distance is 1-Lipschitz in each argument, so callers add it).  The
    returned ``gamma`` is ``D / lower`` for a certified ``lower``, hence at
    most the backend factor times ``(1 + 2^-bits) pi_hi / pi_lo``.
    """
    parts = orbit_parts(action, p, q, group, backend, bits, max_dim, hint)
    notes = (f"group={group}", f"backend={backend}",
             f"sldp_gamma={parts.sldp_estimate.gamma}")
    return combine(parts.real2, parts.sldp_estimate, bits, notes)


def h_distance(H, p: QuotientPoint, q: QuotientPoint, bits: int = 64) -> Certified:
    """``Delta(H eta, H zeta)`` in the ``k``-dimensional quotient."""
    rows = [list(h) for h in (H.H if hasattr(H, "H") else H)]
    if not rows:
        return Certified.exact(0)
    s = sigma_max_upper(rows, 16)
    hp = QuotientPoint(matvec(rows, p.rho), matvec(rows, p.theta), s * p.err)
    hq = QuotientPoint(matvec(rows, q.rho), matvec(rows, q.theta), s * q.err)
    return delta_metric(hp, hq, bits)


def k_orbit_dist_bounds(action, v, w, backend: str = "exact",
                        bits: int = 64) -> tuple[Certified, Certified]:
    """Certified ``(lower, upper)`` on the Euclidean distance between ``K``-orbits.

    Uses ``(2r/pi) Delta_K <= dist <= R Delta_K`` where ``r, R`` are the
    smallest and largest moduli among the entries of ``v`` and ``w``.  Each
    bound is returned as an exact :class:`Certified`.
    """
    from ..torus import orbit_equal_K

    v, w = _nonzero_vector(v), _nonzero_vector(w)
    if orbit_equal_K(action, v, w):
        return Certified.exact(0), Certified.exact(0)
    mods = [x.abs2() for x in v + w]
    r, R = sqrt_lower(min(mods), bits), sqrt_upper(max(mods), bits)
    eps = Fraction(1, 1 << bits)
    p, q = log_approx(v, eps), log_approx(w, eps)
    est = delta_orbit(action, p, q, "K", backend, bits)
    e = p.err + q.err
    pi = pi_certified(bits)
    lower = 2 * r / pi.hi * max(Fraction(0), est.lower_bound - e)
    upper = R * (est.D + e)
    return Certified.exact(lower), Certified.exact(upper)


def linear_form_in_logs(v, e: Sequence[int], eps=Fraction(1, 1 << 64)) -> CertifiedComplex:
    """``sum e_j Log v_j`` on the principal branch, within ``eps`` in modulus."""
    v = _nonzero_vector(v)
    e = [int(x) for x in e]
    if len(e) != len(v):
        raise ContractError("dimension mismatch")
    eps = to_fraction(eps)
    if eps <= 0:
        raise ContractError("precision must be positive")
    weight = sum(abs(x) for x in e)
    if weight == 0:
        return CertifiedComplex(Certified.exact(0), Certified.exact(0))
    b = _bits_for(eps / (16 * weight)) + 1
    pi = pi_certified(b + 4)
    re = Certified.exact(0)
    im = Certified.exact(0)
    for x, ej in zip(v, e):
        if not ej:
            continue
        lg = log_certified(x.abs2(), b)
        re = re + Certified(lg.value / 2, lg.err / 2) * ej
        t = arg_turns(x.re, x.im, b)
        # map the turn to (-1/2, 1/2]; near 1/2 the sign of the imaginary part decides
        if Fraction(1, 4) < t.value < Fraction(3, 4):
            shift = 0 if x.im >= 0 else -1
        else:
            shift = 0 if t.value < Fraction(1, 2) else -1
        turn = Certified(t.value + shift, t.err)
        im = im + turn * pi * (2 * ej)
    return CertifiedComplex(re.tighten(b + 2), im.tighten(b + 2))


__all__ = [
    "BACKENDS", "GROUPS", "OrbitHint", "OrbitParts", "PiApprox", "QuotientPoint", "combine",
    "delta_metric", "delta_orbit", "exp_approx", "h_distance",
    "k_orbit_dist_bounds", "linear_form_in_logs", "log_approx", "orbit_parts",
    "torus_dist2",
]
