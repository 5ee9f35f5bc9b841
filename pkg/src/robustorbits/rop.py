"""Robust orbit problems: approximate distances between torus orbits.

Every solver returns a :class:`DistanceEstimate`.  Its ``D`` is always an
unconditional upper bound and ``lower`` an unconditional lower bound on the
distance being approximated.  The factor ``gamma`` is unconditional except
where a :class:`SepBound` enters: there the caller asserts a lower bound on
the distance between distinct orbits, and ``gamma`` is valid under that
assertion.  Such estimates carry the note ``"conditional:sep"``.

The module also implements the reductions CVP -> SLDP -> ROP with explicit
back-maps, so an ROP answer can be turned back into a certified statement
about the original lattice problem.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .errors import ContractError
from .exactlinalg.certified import sqrt_lower, sqrt_upper
from .exactlinalg.gaussian import GaussianRational, as_gaussian_vector
from .exactlinalg.matrix import (dot, independent_rows, matmul,
                                 matvec, solve, to_fraction, transpose)
from .lattices.cvp import CvpInstance, DistanceEstimate
from .lattices.sldp import SldpInstance, invariant_complement, sldp_separation
from .lifting import ReducedSldp, cvp_to_sldp
from .logspace.elementary import pi_certified
from .logspace.metric import (OrbitHint, QuotientPoint, combine, delta_metric,
                              exp_approx, log_approx, orbit_parts)
from .torus import TorusAction, orbit_equal_K, orbit_equal_T

CONDITIONAL = "conditional:sep"
DEFAULT_SEP_WARNING = "default SepBound 2^-64(d+n+B+b) assumed; the separation hypothesis is unproven"


@dataclass(frozen=True)
class SepBound:
    """Caller-asserted lower bound on the distance between distinct orbits."""
    eps: Fraction
    is_default: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eps", to_fraction(self.eps))
        if self.eps <= 0:
            raise ContractError("SepBound must be positive")


def _vector_bits(vs) -> int:
    best = 0
    for v in vs:
        for x in as_gaussian_vector(v):
            for q in (x.re, x.im):
                best = max(best, abs(q.numerator).bit_length(), q.denominator.bit_length())
    return best


def default_sep_bound(action: TorusAction, v=(), w=()) -> SepBound:
    """``2^(-64 (d + n + B + b))``, flagged as a default."""
    b = _vector_bits([v, w])
    e = 64 * (action.d + action.n + action.B + b)
    return SepBound(Fraction(1, 1 << e), is_default=True)


@dataclass(frozen=True)
class Witness:
    """The torus element ``e^{y + 2 pi i z}``."""
    y: tuple[Fraction, ...]
    z: tuple[Fraction, ...]


class OrbitEqual:
    """Returned by :func:`rop_witness_T` when the two orbits coincide."""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OrbitEqual()"


ORBIT_EQUAL = OrbitEqual()


def _hint_for(action: TorusAction, hint: Optional[OrbitHint]):
    return hint.H if hint is not None else None


def _zero_estimate(notes=()) -> DistanceEstimate:
    return DistanceEstimate(0, 1, 0, tuple(notes), lower=0)


def rop_delta(action: TorusAction, p: QuotientPoint, q: QuotientPoint, group: str = "T",
              backend: str = "exact", bits: int = 64,
              hint: Optional[OrbitHint] = None) -> DistanceEstimate:
    """``Delta(G*p, G*q)`` for exact rational quotient points.

    ``D' = sqrt(first^2 + 4 pi^2 D_sldp^2)`` rounded up; the reported
    ``gamma`` is ``D'/lower`` which never exceeds ``2 gamma_backend``.
    """
    if not (p.is_exact and q.is_exact):
        raise ContractError("rop_delta needs exact quotient points; use rop_logdist for approximations")
    parts = orbit_parts(action, p, q, group, backend, bits, None, hint)
    notes = (f"group={group}", f"backend={backend}",
             f"sldp_gamma={parts.sldp_estimate.gamma}",
             f"gamma_bound={2 * parts.sldp_estimate.gamma}")
    return combine(parts.real2, parts.sldp_estimate, bits, notes)


def _strip(p: QuotientPoint) -> QuotientPoint:
    return QuotientPoint(p.rho, p.theta, 0)


def _warnings(sep: SepBound) -> tuple[str, ...]:
    return (DEFAULT_SEP_WARNING,) if sep.is_default else ()


def _sep_bits(sep: SepBound, bits: int) -> int:
    return max(bits, (sep.eps.denominator // max(1, sep.eps.numerator)).bit_length() + 8)


def rop_logdist(action: TorusAction, v, w, group: str = "T", sep: Optional[SepBound] = None,
                backend: str = "exact", bits: int = 64,
                hint: Optional[OrbitHint] = None) -> DistanceEstimate:
    """``delta_log`` between the ``G``-orbits of ``v`` and ``w``.

    Logs are approximated to ``kappa = sep/2`` (or better); with ``e`` the
    total log error and ``rho = e / sep`` the estimate is
    ``D' = D + e``, ``lower' = lower - e`` and, under the separation
    assertion, ``gamma' = gamma (1 + rho) + rho``.
    """
    H = _hint_for(action, hint)
    if sep is None:
        sep = default_sep_bound(action, v, w)
    warn = _warnings(sep)
    equal = orbit_equal_T(action, v, w, H) if group == "T" else orbit_equal_K(action, v, w, H)
    if equal:
        return _zero_estimate(warn + ("orbits equal (exact invariant test)",))
    b = _sep_bits(sep, bits)
    kappa = min(sep.eps / 2, Fraction(1, 1 << b))
    p, q = log_approx(v, kappa), log_approx(w, kappa)
    parts = orbit_parts(action, _strip(p), _strip(q), group, backend, b, None, hint)
    est = combine(parts.real2, parts.sldp_estimate, b)
    e = p.err + q.err
    rho = e / sep.eps
    D = est.D + e
    lower = max(Fraction(0), est.lower_bound - e)
    gamma = est.gamma * (1 + rho) + rho
    if lower > 0:
        gamma = min(gamma, D / lower)   # unconditional when available
    notes = warn + (f"group={group}", f"backend={backend}", f"log_error={e}", CONDITIONAL)
    return DistanceEstimate(D, max(gamma, Fraction(1)), None, notes, lower=lower)


def rop_logdist_T(action: TorusAction, v, w, sep: Optional[SepBound] = None,
                  backend: str = "exact", bits: int = 64,
                  hint: Optional[OrbitHint] = None) -> DistanceEstimate:
    return rop_logdist(action, v, w, "T", sep, backend, bits, hint)


def _modulus_range(vs, bits: int) -> tuple[Fraction, Fraction]:
    mods = [x.abs2() for v in vs for x in as_gaussian_vector(v)]
    return sqrt_lower(min(mods), bits), sqrt_upper(max(mods), bits)


def rop_dist_K(action: TorusAction, v, w, sep: Optional[SepBound] = None,
               backend: str = "exact", bits: int = 64,
               hint: Optional[OrbitHint] = None) -> DistanceEstimate:
    """Euclidean distance between compact-torus orbits.

    Uses ``(2r/pi) Delta_K <= dist <= R Delta_K`` with logs taken to
    ``kappa = sep / (9R)``.  The upper bound ``R (D + e)`` and the lower
    bound ``(2r/pi)(lower - e)`` are unconditional; the reported ``gamma``
    is ``(pi R / 2r) gamma_Delta + (gamma_Delta + 1) R e / sep`` under the
    separation assertion (at most ``(2R/r) gamma_Delta`` for small ``e``).
    """
    v, w = as_gaussian_vector(v), as_gaussian_vector(w)
    H = _hint_for(action, hint)
    if sep is None:
        sep = default_sep_bound(action, v, w)
    warn = _warnings(sep)
    if orbit_equal_K(action, v, w, H):
        return _zero_estimate(warn + ("orbits equal (exact invariant test)",))
    b = _sep_bits(sep, bits)
    r, R = _modulus_range([v, w], b)
    kappa = min(sep.eps / (9 * R), Fraction(1, 1 << b))
    p, q = log_approx(v, kappa), log_approx(w, kappa)
    parts = orbit_parts(action, _strip(p), _strip(q), "K", backend, b, None, hint)
    est = combine(parts.real2, parts.sldp_estimate, b)
    e = p.err + q.err
    pi = pi_certified(b)
    D = R * (est.D + e)
    lower = 2 * r / pi.hi * max(Fraction(0), est.lower_bound - e)
    gamma = pi.hi * R / (2 * r) * est.gamma + (est.gamma + 1) * R * e / sep.eps
    if lower > 0:
        gamma = min(gamma, D / lower)
    notes = warn + ("group=K", "metric=euclid", f"backend={backend}",
                    f"r={r}", f"R={R}", CONDITIONAL)
    return DistanceEstimate(D, max(gamma, Fraction(1)), None, notes, lower=lower)


def _solve_in_row_space(M: Sequence[Sequence[int]], u: Sequence[Fraction]) -> list[Fraction]:
    """A rational ``y`` with ``M^T y = u`` for ``u`` in the row space of ``M``."""
    d = len(M)
    idx = []
    rows = []
    for i, row in enumerate(M):
        if independent_rows(rows + [list(row)]):
            rows.append(list(row))
            idx.append(i)
    y = [Fraction(0)] * d
    if not rows:
        return y
    sol = solve(matmul(rows, transpose(rows)), matvec(rows, u))
    for i, c in zip(idx, sol):
        y[i] = c
    check = [sum((M[i][j] * y[i] for i in range(d)), Fraction(0)) for j in range(len(u))]
    if check != list(u):
        raise AssertionError("vector is not in the row space")
    return y


def rop_witness_T(action: TorusAction, v, w, sep: Optional[SepBound] = None,
                  backend: str = "exact", bits: int = 64,
                  hint: Optional[OrbitHint] = None
                  ) -> Union[OrbitEqual, tuple[Witness, DistanceEstimate]]:
    """A torus element ``e^x`` moving ``v`` close to ``w`` in log distance.

    The real part ``y`` solves ``M^T y = P_U(tau - rho)`` exactly, the
    imaginary part ``z`` solves ``M^T z = u`` for the SLDP witness ``u``.
    The estimate's ``D`` is a certified upper bound on the residual
    ``Delta(Log(e^x v), Log w)``; its ``gamma`` compares it with the orbit
    distance (conditional on ``sep`` unless a positive lower bound exists).
    """
    H = _hint_for(action, hint)
    if sep is None:
        sep = default_sep_bound(action, v, w)
    warn = _warnings(sep)
    if orbit_equal_T(action, v, w, H):
        return ORBIT_EQUAL
    b = _sep_bits(sep, bits)
    kappa = min(sep.eps / 2, Fraction(1, 1 << b))
    p, q = log_approx(v, kappa), log_approx(w, kappa)
    parts = orbit_parts(action, _strip(p), _strip(q), "T", backend, b, None, hint)
    M = [list(r) for r in action.M]
    diff = [b_ - a for a, b_ in zip(p.rho, q.rho)]            # tau - rho
    comp = invariant_complement(parts.sldp)
    perp = comp.project(diff)
    u1 = [a - c for a, c in zip(diff, perp)]
    y = _solve_in_row_space(M, u1)
    z = _solve_in_row_space(M, list(parts.witness.u))
    Mt = transpose(M)
    moved = QuotientPoint([a + dot(col, y) for a, col in zip(p.rho, Mt)],
                          [a + dot(col, z) for a, col in zip(p.theta, Mt)])
    residual = delta_metric(moved, _strip(q), b)
    e = p.err + q.err
    D = residual.hi + e
    # orbit distance of the stored points, for the factor
    orbit = combine(parts.real2, parts.sldp_estimate, b)
    lower = max(Fraction(0), orbit.lower_bound - e)
    if lower > 0:
        gamma = D / lower
    else:
        g = residual.hi / orbit.lower_bound if orbit.lower_bound > 0 else parts.sldp_estimate.gamma
        rho = e / sep.eps
        gamma = g * (1 + rho) + rho
    notes = warn + (f"backend={backend}", f"residual_upper={D}", CONDITIONAL)
    return (Witness(tuple(y), tuple(z)),
            DistanceEstimate(D, max(gamma, Fraction(1)), None, notes, lower=lower))


# ---------------------------------------------------------------------------
# reductions

SETTINGS = {("T", "delta"), ("K", "delta"), ("T", "log"), ("K", "log"), ("K", "euclid")}


@dataclass
class RopInstance:
    """An ROP instance produced by a reduction, with the map back to SLDP.

    ``back_map(est)`` turns an estimate for the ROP distance into an
    estimate for ``dist(t + U, Z^n)`` (not squared).
    """
    action: TorusAction
    group: str
    metric: str
    p: Optional[QuotientPoint] = None
    q: Optional[QuotientPoint] = None
    v: Optional[list[GaussianRational]] = None
    w: Optional[list[GaussianRational]] = None
    sep: Optional[SepBound] = None
    hint: Optional[OrbitHint] = None
    back_map: Callable[[DistanceEstimate], DistanceEstimate] = field(default=None, repr=False)
    scale: Fraction = Fraction(1)

    def solve(self, backend: str = "exact", bits: int = 64) -> DistanceEstimate:
        """Run the matching ROP solver (no back-map)."""
        if self.metric == "delta":
            return rop_delta(self.action, self.p, self.q, self.group, backend, bits, self.hint)
        if self.metric == "log":
            return rop_logdist(self.action, self.v, self.w, self.group, self.sep, backend, bits, self.hint)
        return rop_dist_K(self.action, self.v, self.w, self.sep, backend, bits, self.hint)

    def solve_back(self, backend: str = "exact", bits: int = 64) -> tuple[DistanceEstimate, DistanceEstimate]:
        """``(rop_estimate, back_mapped_estimate)``."""
        est = self.solve(backend, bits)
        return est, self.back_map(est)


def _from_bounds(lo: Fraction, hi: Fraction, notes) -> DistanceEstimate:
    if hi == 0:
        return _zero_estimate(notes)
    gamma = hi / lo if lo > 0 else None
    if gamma is None:
        raise ContractError("back-map could not certify a positive lower bound; raise precision")
    return DistanceEstimate(hi, max(gamma, Fraction(1)), None, tuple(notes), lower=lo)


def reduce_sldp_to_rop(instance: SldpInstance, group: str = "T", metric: str = "delta",
                       bits: int = 64) -> RopInstance:
    """Encode ``dist(t + U, Z^n)`` as an orbit distance for ``M`` with rows spanning ``U``.

    ``delta``: ``p = (0, t)``, ``q = 0`` and ``Delta = 2 pi dist`` exactly.
    ``log``/``euclid``: ``v = Exp(2 pi i t)`` to relative accuracy ``kappa``,
    ``w = (1, ..., 1)``.  ``kappa`` is chosen below the instance's own
    separation ``s`` (a nonzero distance is at least ``s``), which lets the
    back-map snap tiny answers to an exact 0 and certify a lower bound
    otherwise, without any hypothesis.
    """
    if (group, metric) not in SETTINGS:
        raise ContractError(f"unsupported setting {(group, metric)}")
    n = instance.n
    U = [list(u) for u in instance.U_basis]
    M = U if U else [[0] * n]
    action = TorusAction(M)
    comp = invariant_complement(instance)
    hint = OrbitHint(tuple(tuple(u) for u in U), comp.H) if instance.complement is not None else None
    sep_s = sldp_separation(instance)
    pi = pi_certified(bits + 8)
    t = list(instance.t)

    if metric == "delta":
        p = QuotientPoint([0] * n, t)
        q = QuotientPoint.zero(n)

        def back(est: DistanceEstimate) -> DistanceEstimate:
            hi = est.D / (2 * pi.lo)
            lo = est.lower_bound / (2 * pi.hi)
            if hi < sep_s:
                return _zero_estimate(("snapped to 0 below the instance separation",))
            return _from_bounds(max(lo, sep_s), hi, (f"rop_gamma={est.gamma}",))

        return RopInstance(action, group, metric, p=p, q=q, hint=hint, back_map=back)

    # log / euclid settings: v approximates Exp(2 pi i t) on the unit circle
    gamma_room = 2 ** (n // 2 + 4)
    kappa = min(sep_s / (64 * gamma_room * (n + 1)), Fraction(1, 1 << bits))
    v = exp_approx(QuotientPoint([0] * n, t), kappa)
    w = [GaussianRational(1)] * n
    # per component |Log v_j - 2 pi i t_j| <= kappa / (1 - kappa); eta bounds the vector
    eta = sqrt_upper(Fraction(n), 16) * kappa / (1 - kappa)
    # a valid separation for the ROP side whenever dist > 0, shrunk so that the
    # solver's own log error stays far below the SLDP separation
    sep_rop_delta = (2 * pi.lo * sep_s - 2 * eta) / (64 * gamma_room)
    if metric == "euclid":
        r, R = _modulus_range([v, w], bits)
        sep = SepBound(2 * r / pi.hi * sep_rop_delta)
    else:
        r = R = Fraction(1)
        sep = SepBound(sep_rop_delta)

    def back(est: DistanceEstimate) -> DistanceEstimate:
        if metric == "euclid":
            # Delta_K <= (pi / 2r) dist and Delta_K >= dist / R
            delta_hi = pi.hi / (2 * r) * est.D
            delta_lo = est.lower_bound / R
        else:
            delta_hi, delta_lo = est.D, est.lower_bound
        hi = (delta_hi + eta) / (2 * pi.lo)
        lo = max(Fraction(0), (delta_lo - eta) / (2 * pi.hi))
        if hi < sep_s:
            return _zero_estimate(("snapped to 0 below the instance separation",))
        if lo == 0:
            raise ContractError("back-map is ambiguous at this precision; raise bits")
        # lo > 0 certifies dist > 0, hence dist >= sep_s
        return _from_bounds(max(lo, sep_s), hi, (f"rop_gamma={est.gamma}", f"eta={eta}"))

    return RopInstance(action, group, metric, v=v, w=w, sep=sep, hint=hint, back_map=back)


@dataclass
class CvpPipeline:
    """CVP -> SLDP -> ROP with the composed back-map to ``dist(t, L)``."""
    reduced: ReducedSldp
    rop: RopInstance

    def back_map(self, est: DistanceEstimate) -> DistanceEstimate:
        s = self.reduced.s_total
        e = self.rop.back_map(est)
        lower = e.lower * s if e.lower is not None else None
        exact = e.squared_exact * s * s if e.squared_exact is not None else None
        return DistanceEstimate(e.D * s, e.gamma, exact, e.notes + (f"s_total={s}",), lower=lower)

    def solve(self, backend: str = "exact", bits: int = 64) -> tuple[DistanceEstimate, DistanceEstimate]:
        est = self.rop.solve(backend, bits)
        return est, self.back_map(est)


def cvp_to_rop_pipeline(instance: CvpInstance, group: str = "T", metric: str = "delta",
                        bits: int = 64) -> CvpPipeline:
    reduced = cvp_to_sldp(instance)
    return CvpPipeline(reduced, reduce_sldp_to_rop(reduced.instance, group, metric, bits))


__all__ = [
    "CONDITIONAL", "CvpPipeline", "ORBIT_EQUAL", "OrbitEqual", "RopInstance",
    "SepBound", "Witness", "cvp_to_rop_pipeline", "default_sep_bound",
    "reduce_sldp_to_rop", "rop_delta", "rop_dist_K", "rop_logdist",
    "rop_logdist_T", "rop_witness_T",
]
