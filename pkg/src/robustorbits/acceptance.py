"""The acceptance suite: eleven end-to-end checks with fixed seeds.

Each ``criterion_k`` returns a :class:`CriterionResult`.  Where the
criterion states a runtime budget, exceeding it is a failure.  The checks
compare the library against oracles computed a different way wherever one
is available (direct matrix products instead of library predicates,
integer inclusion tests instead of HNF comparison, numpy singular values,
finite differences).
"""
from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, Optional

from .errors import ContractError
from .exactlinalg.certified import sqrt_upper
from .exactlinalg.matrix import det, inverse, matmul, rank
from .exactlinalg.normal_forms import solve_integer
from .exactlinalg.spectral import sigma_bounds
from .lattices.cvp import CvpInstance, cvp_exact
from .lattices.sldp import (SldpInstance, invariant_complement, sldp_exact,
                            sldp_h_based, sldp_lll)
from .lifting import (cvp_to_sldp, lift_lattice, lift_lattice_equal, sum_of_squares,
                      waring_decompose_full)
from .logspace.elementary import pi_certified
from .logspace.metric import QuotientPoint, delta_metric, delta_orbit, h_distance, log_approx
from .torus import TorusAction, invariant_matrix, orbit_equal_K, orbit_equal_T, polytope_origin_position


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: Optional[float] = None

    def as_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f" (limit {self.limit:.0f}s)" if self.limit else ""
        return f"[{status}] criterion {self.number:2d} {self.name}: {self.detail} [{self.seconds:.2f}s{budget}]"


def _timed(number: int, name: str, limit: Optional[float] = None):
    """Decorator: time the check and fold the runtime budget into the verdict."""
    def wrap(fn: Callable[[], tuple[bool, str]]):
        def run() -> CriterionResult:
            start = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # a crash is a failed criterion, not a crashed suite
                ok, detail = False, f"raised {type(exc).__name__}: {exc}"
            seconds = time.perf_counter() - start
            if limit is not None and seconds >= limit:
                ok, detail = False, detail + f"; over the {limit:.0f}s budget"
            return CriterionResult(number, name, ok, detail, seconds, limit)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# ---------------------------------------------------------------------------
# random instance generators

def random_nonsingular(rng: random.Random, m: int, bound: int = 10) -> list[list[int]]:
    while True:
        G = [[rng.randint(-bound, bound) for _ in range(m)] for _ in range(m)]
        if det(G) != 0:
            return G


def random_rational(rng: random.Random, den: int = 12, lo: int = -3, hi: int = 3) -> Fraction:
    q = rng.randint(1, den)
    return Fraction(rng.randint(lo * q, hi * q), q)


def random_sldp(rng: random.Random, n_max: int, coef: int = 3) -> SldpInstance:
    """``t + U`` with ``U`` spanned by independent integer rows; about one in
    eight instances is placed on an integer point so that the distance is 0."""
    n = rng.randint(1, n_max)
    k = rng.randint(0, n - 1)
    while True:
        U = [[rng.randint(-coef, coef) for _ in range(n)] for _ in range(k)]
        if k == 0 or rank(U) == k:
            break
    if U and rng.random() < 0.125:
        c = [random_rational(rng, 6) for _ in range(k)]
        t = [Fraction(rng.randint(-2, 2)) + sum((ci * u[j] for ci, u in zip(c, U)), Fraction(0))
             for j in range(n)]
    else:
        t = [random_rational(rng) for _ in range(n)]
    return SldpInstance(t, U)


def random_action(rng: random.Random, n: int, coef: int = 3) -> TorusAction:
    while True:
        d = rng.randint(1, n)
        M = [[rng.randint(-coef, coef) for _ in range(n)] for _ in range(d)]
        if any(any(r) for r in M):
            return TorusAction(M)


def _unit_point(t: Fraction, sign: int = 1):
    """A rational point on the unit circle from the stereographic parameter ``t``."""
    from .exactlinalg.gaussian import GaussianRational
    den = 1 + t * t
    return GaussianRational(sign * (1 - t * t) / den, sign * 2 * t / den)


def loglog_ceiling(D: int) -> int:
    """``ceil(log2 log2 D)`` for ``D >= 2``: the least ``k >= 0`` with ``D <= 2^(2^k)``."""
    k = 0
    while D > 1 << (1 << k):
        k += 1
    return k


# ---------------------------------------------------------------------------
# the criteria

def _orthonormal_rows(Y) -> bool:
    scaled = []
    for row in Y:
        c = 1
        for x in row:
            c = lcm(c, x.denominator)
        scaled.append((c, [int(x * c) for x in row]))
    for i, (ci, ri) in enumerate(scaled):
        for j in range(i, len(scaled)):
            cj, rj = scaled[j]
            dot = sum(a * b for a, b in zip(ri, rj))
            if dot != (ci * cj if i == j else 0):
                return False
    return True


@_timed(1, "lattice lifting exactness", 60)
def criterion_1() -> tuple[bool, str]:
    rng = random.Random(101)
    bad = []
    for i in range(100):
        m = rng.randint(1, 4)
        G = random_nonsingular(rng, m)
        res = lift_lattice(G)
        Y, s = res.Y, res.s_total
        # Y Y^T = I by direct products of the denominator-cleared integer rows
        if not _orthonormal_rows(Y):
            bad.append((i, "YY^T"))
            continue
        # s_total * P(Y Z^n) = G Z^m by mutual inclusion
        head = [[x * s for x in row] for row in Y[:m]]
        if any(x.denominator != 1 for row in head for x in row):
            bad.append((i, "non-integral head"))
            continue
        head = [[int(x) for x in row] for row in head]
        Gi = inverse(G)
        inside = all(x.denominator == 1 for x in (y for row in matmul(Gi, head) for y in row))
        covers = all(solve_integer(head, [G[r][c] for r in range(m)]) is not None for c in range(m))
        if not (inside and covers and lift_lattice_equal(res, G)):
            bad.append((i, "lattice mismatch"))
    return not bad, f"100 lifts, {len(bad)} failures{': ' + str(bad[:3]) if bad else ''}"


@_timed(2, "CVP to SLDP distance preservation", 120)
def criterion_2() -> tuple[bool, str]:
    rng = random.Random(202)
    bad = []
    for i in range(50):
        m = rng.randint(1, 3)
        G = random_nonsingular(rng, m, 6)
        t = [random_rational(rng, 9, -5, 5) for _ in range(m)]
        inst = CvpInstance(t, G)
        _, d2 = cvp_exact(inst)
        red = cvp_to_sldp(inst)
        d2_sldp = sldp_exact(red.instance)
        if d2 != red.s_total ** 2 * d2_sldp:
            bad.append(i)
    return not bad, f"50 instances, exact identity failed on {len(bad)}"


def _gamma_h_numpy(H) -> float:
    import numpy as np
    s = np.linalg.svd(np.array(H, dtype=float), compute_uv=False)
    return 2 * s.max() / s.min()


@_timed(3, "SLDP sandwich for the h and lll backends", 120)
def criterion_3() -> tuple[bool, str]:
    rng = random.Random(303)
    bad = []
    zeros = 0
    for i in range(200):
        inst = random_sldp(rng, 6)
        d2 = sldp_exact(inst)
        zeros += d2 == 0
        n = inst.n
        for backend in ("h", "lll"):
            est, wit = sldp_h_based(inst) if backend == "h" else sldp_lll(inst)
            g2 = est.gamma ** 2
            D2 = est.D ** 2
            ok = d2 <= D2 <= g2 * d2 and wit.residual2(inst.t) <= g2 * d2
            H = invariant_complement(inst).H
            if backend == "h" and H:
                ref = _gamma_h_numpy(H)
                ok = ok and ref * (1 - 1e-9) <= float(est.gamma) <= ref * (1 + 1e-9)
            if backend == "lll":
                ok = ok and g2 >= 2 ** (n + 2) and g2 <= 2 ** (n + 2) * (1 + Fraction(1, 1 << 40))
            if not ok:
                bad.append((i, backend))
    return not bad, f"200 instances ({zeros} at distance 0), {len(bad)} sandwich failures"


def _sandwich_4(action, H, p, q, bits) -> Optional[bool]:
    """True/False when certified, None when the intervals overlap."""
    lo, hi = sigma_bounds(H)
    est = delta_orbit(action, p, q, "T", "exact", bits)
    dh = h_distance(H, p, q, bits)
    if est.D == 0:
        return dh.hi == 0
    t_lo, t_hi = est.lower_bound, est.D
    if lo * t_hi <= dh.lo and dh.hi <= hi * t_lo:
        return True
    if lo * t_lo > dh.hi or dh.lo > hi * t_hi:
        return False
    return None


@_timed(4, "linear-forms sandwich")
def criterion_4() -> tuple[bool, str]:
    rng = random.Random(404)
    bad, refined = [], 0
    for i in range(100):
        n = rng.randint(1, 5)
        action = random_action(rng, n)
        H = invariant_matrix(action).rows()
        p = QuotientPoint([random_rational(rng) for _ in range(n)], [random_rational(rng) for _ in range(n)])
        q = QuotientPoint([random_rational(rng) for _ in range(n)], [random_rational(rng) for _ in range(n)])
        if not H:
            ok = delta_orbit(action, p, q).D == 0
        else:
            bits, ok = 64, None
            while ok is None and bits <= 1024:
                ok = _sandwich_4(action, H, p, q, bits)
                if ok is None:
                    refined += 1
                    bits *= 2
        if ok is not True:
            bad.append(i)
    return not bad, f"100 instances, {refined} precision doublings, {len(bad)} failures"


@_timed(5, "metric equivalence on the unit torus")
def criterion_5() -> tuple[bool, str]:
    """``(2/pi) Delta <= |v - w| <= Delta`` for unit-modulus ``v, w``.

    Equality occurs for antipodal components, so a case counts as passing
    when neither inequality is refuted by the certified enclosures; the
    number of cases certified strictly is reported too.
    """
    rng = random.Random(505)
    bad, strict = [], 0
    pi = pi_certified(128)
    for i in range(100):
        n = rng.randint(1, 3)
        v = [_unit_point(random_rational(rng, 7), rng.choice((1, -1))) for _ in range(n)]
        if rng.random() < 0.1:
            w = list(v)
        elif rng.random() < 0.1:
            w = [-x for x in v]          # antipodal: the lower bound is attained
        else:
            w = [_unit_point(random_rational(rng, 7), rng.choice((1, -1))) for _ in range(n)]
        dist2 = sum(((a - b).abs2() for a, b in zip(v, w)), Fraction(0))
        eps = Fraction(1, 1 << 100)
        p, q = log_approx(v, eps), log_approx(w, eps)
        D = delta_metric(p, q, 100)
        lo_lower, lo_upper = 2 * D.lo / pi.hi, 2 * D.hi / pi.lo
        refuted = (lo_lower > 0 and lo_lower ** 2 > dist2) or dist2 > D.hi ** 2
        if refuted:
            bad.append(i)
        elif lo_upper ** 2 <= dist2 <= D.lo ** 2:
            strict += 1
    return not bad, f"100 pairs, {strict} certified strictly, {len(bad)} refuted"


def curated_orbit_cases() -> list[tuple[list[list[int]], list, list]]:
    """Thirty (M, v, w) cases; the first twenty are the two one-parameter families."""
    h, two, three = Fraction(1, 2), Fraction(2), Fraction(3)
    cases = []
    for M in ([[1, 1]], [[1, -1]]):
        for v, w in [((1, 1), (1, 1)), ((1, 1), (2, h)), ((1, 1), (2, 2)), ((1, 1), (1, -1)),
                     ((1, 1), (-1, -1)), ((2, 3), (3, 2)), ((2, 3), (1, 6)), ((2, 3), (4, Fraction(3, 2))),
                     ((1, [0, 1]), ([0, 1], 1)), ((three, h), (1, Fraction(3, 2)))]:
            cases.append((M, list(v), list(w)))
    cases += [
        ([[1, -1, 0], [0, 1, -1]], [1, 1, 1], [2, 2, 2]),
        ([[1, -1, 0], [0, 1, -1]], [1, 1, 1], [2, 2, 3]),
        ([[1, 1, -2]], [1, 1, 1], [2, h, 1]),
        ([[1, 1, -2]], [1, 1, 1], [two, two, two]),
        ([[2, -1]], [1, 1], [2, 4]),
        ([[2, -1]], [1, 1], [2, 2]),
        ([[1, 0, -1], [0, 1, -1]], [1, 2, 3], [2, 4, 6]),
        ([[1, 0, -1], [0, 1, -1]], [1, 2, 3], [1, 2, -3]),
        ([[1, -1]], [[1, 1], [1, -1]], [[2, 2], [h, -h]]),
        ([[3, -2]], [1, 1], [8, 27]),
    ]
    return cases


@_timed(6, "orbit equality consistency")
def criterion_6() -> tuple[bool, str]:
    from .kempfness import kn_orbit_equal
    from .rop import rop_logdist

    bad, kn_checked = [], 0
    for i, (M, v, w) in enumerate(curated_orbit_cases()):
        action = TorusAction(M)
        eqT, eqK = orbit_equal_T(action, v, w), orbit_equal_K(action, v, w)
        for group, eq in (("T", eqT), ("K", eqK)):
            est = rop_logdist(action, v, w, group)
            if (est.D == 0) != eq or (not eq and est.lower_bound <= 0):
                bad.append((i, group))
        if polytope_origin_position(action).interior:
            kn_checked += 1
            if kn_orbit_equal(action, v, w) != eqT:
                bad.append((i, "kn"))
    n = len(curated_orbit_cases())
    return not bad, f"{n} cases, {kn_checked} with closed orbits, disagreements: {bad}"


@_timed(7, "near-singular family N = 6..30", 60)
def criterion_7() -> tuple[bool, str]:
    from .kempfness import example_6_3

    keys = ("bracket_ok", "x2_ok", "gap_ok", "log_bound_ok")
    bad = []
    for N in range(6, 31):
        rep = example_6_3(N)
        failed = [k for k in keys if not rep[k]]
        if failed:
            bad.append((N, failed))
    return not bad, f"N = 6..30, failures: {bad}"


def random_kn_problem(rng: random.Random):
    from .kempfness import KnProblem

    while True:
        d = rng.randint(1, 4)
        n = rng.randint(d + 1, 8)
        W = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(n)]
        q = [Fraction(rng.randint(1, 20), rng.randint(1, 10)) for _ in range(n)]
        try:
            return KnProblem(W, q)
        except ContractError:
            continue


@_timed(8, "gradient and Hessian against finite differences")
def criterion_8() -> tuple[bool, str]:
    from .kempfness import kn_gradient, kn_hessian, kn_value

    rng = random.Random(808)
    h = Fraction(1, 1 << 20)
    eps = Fraction(1, 1 << 90)
    worst, bad = 0.0, []
    for i in range(50):
        pb = random_kn_problem(rng)
        x = [Fraction(rng.randint(-64, 64), 64) for _ in range(pb.d)]
        g = [c.value for c in kn_gradient(pb, x, eps)]
        Hm = [[c.value for c in row] for row in kn_hessian(pb, x, eps)]
        fd_g, fd_H = [], []
        for j in range(pb.d):
            xp = list(x); xp[j] += h
            xm = list(x); xm[j] -= h
            fd_g.append((kn_value(pb, xp, eps).value - kn_value(pb, xm, eps).value) / (2 * h))
            gp = kn_gradient(pb, xp, eps)
            gm = kn_gradient(pb, xm, eps)
            fd_H.append([(a.value - b.value) / (2 * h) for a, b in zip(gp, gm)])
        rel_g = _rel(g, fd_g)
        rel_H = _rel([a for r in Hm for a in r], [a for r in fd_H for a in r])
        worst = max(worst, rel_g, rel_H)
        if rel_g > 1e-6 or rel_H > 1e-6:
            bad.append(i)
    return not bad, f"50 problems, worst relative error {worst:.2e}"


def _rel(exact: list[Fraction], approx: list[Fraction]) -> float:
    num = sum((a - b) ** 2 for a, b in zip(exact, approx))
    den = sum(a * a for a in exact)
    if den == 0:
        return float(sqrt_upper(num, 40))
    return float(sqrt_upper(num / den, 40))


@_timed(9, "sum of squares", 60)
def criterion_9() -> tuple[bool, str]:
    bad = []
    limit = 10 ** 6
    # loglog thresholds: lengths may grow only at D = 2^(2^k) + 1
    for D in range(limit + 1):
        sq = sum_of_squares(D)
        s = 0
        for a in sq:
            s += a * a
        if s != D or (D >= 2 and len(sq) > loglog_ceiling(D) + 4) or (D < 2 and len(sq) > 1):
            bad.append(D)
    rng = random.Random(909)
    for _ in range(limit):
        D = rng.randint(2, 10 ** 18)
        sq = sum_of_squares(D)
        s = 0
        for a in sq:
            s += a * a
        if s != D or len(sq) > loglog_ceiling(D) + 4:
            bad.append(D)
    return not bad, f"exhaustive D <= 10^6 and 10^6 random D <= 10^18, {len(bad)} failures"


def random_pd_rational(rng: random.Random, m: int) -> list[list[Fraction]]:
    while True:
        B = [[random_rational(rng, 5) for _ in range(m)] for _ in range(m)]
        A = [[sum((B[i][k] * B[j][k] for k in range(m)), Fraction(0)) for j in range(m)] for i in range(m)]
        for i in range(m):
            A[i][i] += Fraction(rng.randint(1, 5), rng.randint(1, 7))
        return A


@_timed(10, "Waring decomposition")
def criterion_10() -> tuple[bool, str]:
    rng = random.Random(1010)
    bad = []
    for i in range(200):
        m = rng.randint(1, 6)
        A = random_pd_rational(rng, m)
        res = waring_decompose_full(A)
        S = [[sum((l[a] * l[b] for l in res.vectors), Fraction(0)) for b in range(m)] for a in range(m)]
        d_max = res.d_max
        bound = m * ((loglog_ceiling(d_max) if d_max >= 2 else 0) + 4)
        if S != A or len(res.vectors) > bound:
            bad.append(i)
    return not bad, f"200 forms, {len(bad)} failures"


@_timed(11, "reduction round trips")
def criterion_11() -> tuple[bool, str]:
    from .rop import SETTINGS, reduce_sldp_to_rop

    rng = random.Random(1111)
    bad, solved = [], 0
    for i in range(100):
        inst = random_sldp(rng, 4)
        d2 = sldp_exact(inst)
        for group, metric in sorted(SETTINGS):
            rop = reduce_sldp_to_rop(inst, group, metric)
            for backend in ("exact", "h", "lll"):
                _, back = rop.solve_back(backend)
                solved += 1
                lo = back.lower_bound
                ok = lo * lo <= d2 <= back.D ** 2 and back.D ** 2 <= back.gamma ** 2 * d2
                if not ok:
                    bad.append((i, group, metric, backend))
    return not bad, f"100 instances x {solved // 100} (setting, backend) pairs, {len(bad)} failures"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def run_all(only: Optional[Iterable[int]] = None,
            log: Optional[Callable[[str], None]] = print) -> list[CriterionResult]:
    wanted = set(only) if only else None
    results = []
    for k, fn in enumerate(CRITERIA, start=1):
        if wanted is not None and k not in wanted:
            continue
        res = fn()
        results.append(res)
        if log is not None:
            log(res.line())
    return results


__all__ = ["CRITERIA", "CriterionResult", "curated_orbit_cases", "loglog_ceiling", "run_all"] + \
    [f"criterion_{k}" for k in range(1, 12)]
