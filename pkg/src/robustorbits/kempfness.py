"""The Kempf-Ness function of a torus orbit and a damped Newton minimiser.

For weights ``w_i`` (columns of ``M``) and ``q_i = |v_i|^2``

    f(x) = 2 log || e^{x/2} . v || = log sum_i q_i exp(w_i . x),

a smooth convex function whose gradient is the softmax-weighted mean of
the weights.  The infimum is attained iff 0 is an interior point of the
weight polytope; the minimiser gives the point of minimal norm in the orbit
closure.  All values below are certified enclosures computed with the
fixed-point routines of :mod:`robustorbits.logspace.elementary`; the
optimiser itself is a heuristic whose output is certified only through its
gradient norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ContractError
from .exactlinalg.certified import Certified, round_dyadic, sqrt_upper
from .exactlinalg.gaussian import as_gaussian_vector
from .exactlinalg.matrix import (as_int_matrix, as_rat_vector, rank, solve,
                                 to_fraction, transpose)
from .exactlinalg.spectral import sigma_max_upper
from .logspace.elementary import exp_certified, log_certified
from .logspace.metric import QuotientPoint, _bits_for, delta_orbit, h_distance, log_approx
from .torus import TorusAction, orbit_equal_K, point_position


class InfeasibleError(ContractError):
    """The origin is not an interior point of the weight polytope."""


@dataclass(frozen=True)
class KnProblem:
    weights: tuple[tuple[int, ...], ...]   # n weights in Z^d
    q: tuple[Fraction, ...]

    def __init__(self, weights: Sequence[Sequence[int]], q: Sequence):
        W = as_int_matrix(weights)
        q = as_rat_vector(q)
        if not W or len(W) != len(q):
            raise ContractError("need one positive q_i per weight")
        if any(x <= 0 for x in q):
            raise ContractError("q_i must be positive")
        d = len(W[0])
        if any(len(w) != d for w in W):
            raise ContractError("weights must all have length d")
        diffs = [[a - b for a, b in zip(w, W[0])] for w in W[1:]]
        if d == 0 or not diffs or rank(diffs) < d:
            raise ContractError("the affine span of the weights must be R^d")
        object.__setattr__(self, "weights", tuple(tuple(w) for w in W))
        object.__setattr__(self, "q", tuple(q))

    @classmethod
    def from_action(cls, action: TorusAction, v) -> "KnProblem":
        v = as_gaussian_vector(v)
        if any(not x for x in v):
            raise ContractError("vectors with a zero component are not supported")
        return cls(action.weights, [x.abs2() for x in v])

    @property
    def d(self) -> int:
        return len(self.weights[0])

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def max_weight(self) -> int:
        return max(abs(a) for w in self.weights for a in w)


@dataclass(frozen=True)
class KnSolution:
    x: tuple[Fraction, ...]
    grad_norm: Fraction          # certified upper bound on ||grad f(x)||
    f_value: Certified
    iterations: int
    bits: int
    values: tuple[Fraction, ...] = field(default=(), repr=False)   # f along accepted steps


def _terms(problem: KnProblem, x: Sequence[Fraction], bits: int):
    """``(s_max, [q_i exp(s_i - s_max)], S)`` with ``s_i = w_i . x``."""
    s = [sum((a * b for a, b in zip(w, x)), Fraction(0)) for w in problem.weights]
    smax = max(s)
    terms = [exp_certified(si - smax, bits) * qi for si, qi in zip(s, problem.q)]
    total = Certified.exact(0)
    for t in terms:
        total = total + t
    return smax, terms, total


def _log_of(c: Certified, bits: int) -> Certified:
    lo = log_certified(c.lo, bits)
    hi = log_certified(c.hi, bits) if c.err else lo
    return Certified.from_bounds(lo.lo, hi.hi)


def _work_bits(problem: KnProblem, eps: Fraction) -> int:
    return _bits_for(to_fraction(eps)) + (problem.n * problem.max_weight + 1).bit_length() + 6


def kn_value(problem: KnProblem, x: Sequence, eps=Fraction(1, 1 << 64)) -> Certified:
    """``f(x)`` within ``eps`` (max-exponent shift keeps every exp below 1)."""
    eps = to_fraction(eps)
    if eps <= 0:
        raise ContractError("precision must be positive")
    x = as_rat_vector(x)
    b = _work_bits(problem, eps)
    smax, _, S = _terms(problem, x, b)
    f = _log_of(S, b) + smax
    return f.tighten(b)


def _gradient(problem: KnProblem, x, b: int):
    _, terms, S = _terms(problem, x, b)
    probs = [t / S for t in terms]
    g = []
    for r in range(problem.d):
        acc = Certified.exact(0)
        for p, w in zip(probs, problem.weights):
            if w[r]:
                acc = acc + p * w[r]
        g.append(acc)
    return probs, g


def kn_gradient(problem: KnProblem, x: Sequence, eps=Fraction(1, 1 << 64)) -> list[Certified]:
    """``grad f(x) = sum_i p_i w_i`` with ``p_i`` the softmax weights."""
    x = as_rat_vector(x)
    b = _work_bits(problem, eps)
    _, g = _gradient(problem, x, b)
    return [c.tighten(b) for c in g]


def kn_hessian(problem: KnProblem, x: Sequence, eps=Fraction(1, 1 << 64)) -> list[list[Certified]]:
    """``sum_i p_i w_i w_i^T - grad grad^T``."""
    x = as_rat_vector(x)
    b = _work_bits(problem, eps) + 2
    probs, g = _gradient(problem, x, b)
    d = problem.d
    out = []
    for r in range(d):
        row = []
        for c in range(d):
            acc = Certified.exact(0)
            for p, w in zip(probs, problem.weights):
                if w[r] and w[c]:
                    acc = acc + p * (w[r] * w[c])
            row.append((acc - g[r] * g[c]).tighten(b))
        out.append(row)
    return out


def _norm_upper(g: Sequence[Certified], bits: int = 64) -> Fraction:
    return sqrt_upper(sum((max(abs(c.lo), abs(c.hi)) ** 2 for c in g), Fraction(0)), bits)


def kn_minimize(problem: KnProblem, tol=Fraction(1, 1 << 40), max_iter: int = 500,
                max_bits: int = 8192) -> KnSolution:
    """Damped Newton from ``x = 0`` until the certified gradient norm is ``<= tol``.

    Steps are solved exactly in rational arithmetic on the enclosure
    centres and rounded to the working precision; Armijo backtracking keeps
    ``f`` decreasing.  When progress stalls the working precision doubles.
    """
    tol = to_fraction(tol)
    if tol <= 0:
        raise ContractError("tolerance must be positive")
    pos = point_position(problem.weights, [0] * problem.d)
    if not pos.interior:
        raise InfeasibleError(f"0 is not interior to the weight polytope ({pos.position})")
    d = problem.d
    bits = max(64, _bits_for(tol) + 24)
    x = [Fraction(0)] * d
    fx = kn_value(problem, x, Fraction(1, 1 << bits))
    history = [fx.value]
    for it in range(1, max_iter + 1):
        eps = Fraction(1, 1 << bits)
        g = kn_gradient(problem, x, eps)
        gn = _norm_upper(g)
        if gn <= tol:
            return KnSolution(tuple(x), gn, fx, it - 1, bits, tuple(history))
        Hc = kn_hessian(problem, x, eps)
        Hm = [[c.value for c in row] for row in Hc]
        gv = [c.value for c in g]
        try:
            step = solve(Hm, [-a for a in gv])
        except ZeroDivisionError:
            step = [-a for a in gv]
        slope = sum((a * b for a, b in zip(gv, step)), Fraction(0))
        if slope >= 0:   # not a descent direction at this precision: fall back to the gradient
            step = [-a for a in gv]
            slope = -sum((a * a for a in gv), Fraction(0))
        t = Fraction(1)
        accepted = False
        for _ in range(60):
            cand = [round_dyadic(a + t * s, bits) for a, s in zip(x, step)]
            fc = kn_value(problem, cand, eps)
            if fc.value <= fx.value + t * slope / 4 and cand != x:
                accepted = True
                break
            t /= 2
        if accepted:
            x, fx = cand, fc
            history.append(fx.value)
            continue
        if bits >= max_bits:
            break
        bits *= 2
        fx = kn_value(problem, x, Fraction(1, 1 << bits))
    g = kn_gradient(problem, x, Fraction(1, 1 << bits))
    raise RuntimeError(f"kn_minimize did not reach tol (gradient norm <= {float(_norm_upper(g)):.3g})")


def _translated_log(action: TorusAction, p: QuotientPoint, x: Sequence[Fraction]) -> QuotientPoint:
    """``Log(e^{x/2} . v) = Log v + M^T x / 2``."""
    Mt = transpose(action.M)
    shift = [sum((a * b for a, b in zip(col, x)), Fraction(0)) / 2 for col in Mt]
    return QuotientPoint([r + s for r, s in zip(p.rho, shift)], p.theta)


def kn_orbit_equal(action: TorusAction, v, w, sep=None, backend: str = "exact",
                   bits: int = 64) -> bool:
    """Decide equality of closed ``T``-orbits through the Kempf-Ness minimisers.

    Minimises both Kempf-Ness functions, moves ``v`` and ``w`` to their
    minimal-norm points in log space, and compares the ``K``-orbit log
    distance ``D`` of those points against ``gamma * eps`` with
    ``eps = sep / (2 gamma)``.  The answer relies on the caller's separation
    bound and on the minimisers being accurate, which is only certified
    through the gradient norm.
    """
    from .rop import default_sep_bound

    if sep is None:
        sep = default_sep_bound(action, v, w)
    pv, pw = KnProblem.from_action(action, v), KnProblem.from_action(action, w)
    if orbit_equal_K(action, v, w):
        return True
    # gamma of the K-distance solver; the exact backend is within rounding of 1
    gamma_solver = Fraction(2)
    eps = sep.eps / (2 * gamma_solver)
    Mnorm = sigma_max_upper([list(r) for r in action.M], 16)
    tol = eps / (2 * Mnorm) / (1 << 8)
    xv = kn_minimize(pv, tol).x
    xw = kn_minimize(pw, tol).x
    b = max(bits, _bits_for(eps) + 16)
    lv, lw = log_approx(v, Fraction(1, 1 << b)), log_approx(w, Fraction(1, 1 << b))
    p = _translated_log(action, lv, xv)
    q = _translated_log(action, lw, xw)
    est = delta_orbit(action, p, q, "K", backend, b)
    D = est.D + lv.err + lw.err
    return D < est.gamma * eps


def _example_weights(N: int) -> list[list[int]]:
    return [[1, 0], [-2, 0], [-N, 1], [-N, -1]]


def example_6_3(N: int, v=(1, 1, 1, 1), w=(1, 1, 2, 2), tol=Fraction(1, 1 << 60)) -> dict:
    """The near-singular family with weights ``(1,0), (-2,0), (-N,1), (-N,-1)``.

    Reports the minimiser bracket ``2^(1/3) < e^{x_1} < (1 + N 2^(-N/3)) 2^(1/3)``,
    the gap ``f(x_1, 1) - f(x) <= 2^(-N/3) (e + 1/e - 2)``, the unit
    displacement, and for the pair ``v, w`` the Euclidean upper bound
    ``2^(7/3) eps_N`` (``eps_N = 2N 2^(-N/3)``) together with the log lower
    bound ``log 2 / (2N)`` obtained from ``H = [[2,1,0,0],[2N,0,1,1]]``.
    """
    if N <= 2:
        raise ContractError("N must exceed 2")
    weights = _example_weights(N)
    action = TorusAction(transpose(weights))
    problem = KnProblem.from_action(action, v)
    sol = kn_minimize(problem, tol)
    x1, x2 = sol.x
    bits = 96
    eps = Fraction(1, 1 << bits)
    # e^{3 x1} against 2 and against (1 + N 2^(-N/3))^3 2 = 2 (1 + N 2^(-N/3))^3
    e3 = exp_certified(3 * x1, bits)
    t = _cbrt_lower(Fraction(1, 2 ** N), bits)     # lower bound on 2^(-N/3)
    cube_upper_lo = 2 * (1 + N * t) ** 3
    bracket_ok = e3.lo > 2 and e3.hi < cube_upper_lo
    # gap
    f_star = kn_value(problem, [x1, x2], eps)
    f_shift = kn_value(problem, [x1, x2 + 1], eps)
    e1 = exp_certified(1, bits)
    e_inv = exp_certified(-1, bits)
    t_hi = _cbrt_upper(Fraction(1, 2 ** N), bits)
    gap_bound = t_hi * (e1.hi + e_inv.hi - 2)
    gap_hi = f_shift.hi - f_star.lo
    gap_ok = gap_hi <= gap_bound
    # log lower bound through H
    H = [[2, 1, 0, 0], [2 * N, 0, 1, 1]]
    lv, lw = log_approx(v, eps), log_approx(w, eps)
    hd = h_distance(H, lv, lw, bits)
    s_hi = sigma_max_upper(H, 32)
    log_lower = hd.lo / s_hi
    log2 = log_certified(2, bits)
    target = log2.hi / (2 * N)
    log_ok = log_lower >= target
    # Euclidean distance of the minimal-norm points of v and w
    pw = KnProblem.from_action(action, w)
    xw = kn_minimize(pw, tol).x
    eps_N = 2 * N * t_hi
    euclid_bound = _cbrt_upper(Fraction(2 ** 7), bits) * eps_N
    dist_hi = _moved_distance_upper(action, v, sol.x, w, xw, bits)
    return {
        "N": N,
        "x": [str(a) for a in sol.x],
        "grad_norm_upper": str(sol.grad_norm),
        "exp_x1_cubed": {"lo": str(e3.lo), "hi": str(e3.hi)},
        "bracket_upper_cubed": str(cube_upper_lo),
        "bracket_ok": bracket_ok,
        "x2_abs": str(abs(x2)),
        "x2_ok": abs(x2) <= Fraction(1, 10 ** 12),
        "gap_upper": str(gap_hi),
        "gap_bound": str(gap_bound),
        "gap_ok": gap_ok,
        "displacement": "1",
        "log_lower_bound": str(log_lower),
        "log_target": str(target),
        "log_bound_ok": log_ok,
        "euclid_distance_upper": str(dist_hi),
        "euclid_bound": str(euclid_bound),
        "euclid_ok": dist_hi <= euclid_bound,
        "note": "minimiser accuracy is certified only through the gradient norm",
    }


def _cbrt_lower(q: Fraction, bits: int) -> Fraction:
    """Rational ``r <= q^(1/3)`` (bisection on exact cubes)."""
    lo, hi = Fraction(0), max(Fraction(1), q)
    for _ in range(bits):
        mid = round_dyadic((lo + hi) / 2, bits + 8)
        if mid ** 3 <= q:
            lo = mid
        else:
            hi = mid
    return lo


def _cbrt_upper(q: Fraction, bits: int) -> Fraction:
    lo, hi = Fraction(0), max(Fraction(1), q)
    for _ in range(bits):
        mid = round_dyadic((lo + hi) / 2, bits + 8)
        if mid ** 3 >= q:
            hi = mid
        else:
            lo = mid
    return hi


def _moved_distance_upper(action: TorusAction, v, xv, w, xw, bits: int) -> Fraction:
    """Upper bound on ``|| e^{xv/2} . v - e^{xw/2} . w ||`` for real positive ``v, w``."""
    Mt = transpose(action.M)
    total = Fraction(0)
    for col, a, b in zip(Mt, as_gaussian_vector(v), as_gaussian_vector(w)):
        if a.im or b.im or a.re <= 0 or b.re <= 0:
            raise ContractError("example vectors must be positive reals")
        sa = sum((c * x for c, x in zip(col, xv)), Fraction(0)) / 2
        sb = sum((c * x for c, x in zip(col, xw)), Fraction(0)) / 2
        ea = exp_certified(sa, bits) * a.re
        eb = exp_certified(sb, bits) * b.re
        diff = ea - eb
        m = max(abs(diff.lo), abs(diff.hi))
        total += m * m
    return sqrt_upper(total, bits)


__all__ = [
    "InfeasibleError", "KnProblem", "KnSolution", "example_6_3", "kn_gradient",
    "kn_hessian", "kn_minimize", "kn_orbit_equal", "kn_value",
]
