from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from robustorbits.errors import ContractError
from robustorbits.exactlinalg.gaussian import GaussianRational as G
from robustorbits.exactlinalg.matrix import rank
from robustorbits.lattices.cvp import CvpInstance, cvp_exact
from robustorbits.lattices.sldp import SldpInstance, sldp_exact
from robustorbits.logspace import QuotientPoint, delta_metric, delta_orbit, log_approx
from robustorbits.rop import (CONDITIONAL, DEFAULT_SEP_WARNING, ORBIT_EQUAL, SETTINGS, SepBound,
                              Witness, cvp_to_rop_pipeline, default_sep_bound, reduce_sldp_to_rop,
                              rop_delta, rop_dist_K, rop_logdist, rop_logdist_T, rop_witness_T)
from robustorbits.torus import TorusAction, act, orbit_equal_K, orbit_equal_T

from oracles import mpf, numeric_log_diff, numeric_orbit_dist2, sampled_k_orbit_dist
from strategies import int_matrices, nonzero_gaussians, rationals

SEP = SepBound(Fraction(1, 1 << 40))


def sandwich_sq(est, d2):
    """``lower <= d <= D`` checked with exact squares."""
    return est.lower_bound ** 2 <= d2 <= est.D ** 2


def float_sandwich(est, d2, rel=1e-9):
    return float(est.lower_bound) ** 2 <= d2 * (1 + rel) + 1e-15 and d2 <= float(est.D) ** 2 * (1 + rel) + 1e-15


@st.composite
def qpoints(draw, n):
    rho = draw(st.lists(rationals(12, 6), min_size=n, max_size=n))
    theta = draw(st.lists(rationals(12, 12), min_size=n, max_size=n))
    return QuotientPoint(rho, theta)


@st.composite
def action_pair(draw, max_d=2, max_n=4, coef=2, gauss=(6, 3)):
    d = draw(st.integers(1, max_d))
    n = draw(st.integers(1, max_n))
    M = draw(int_matrices(d, n, coef))
    assume(any(any(r) for r in M))
    v = draw(st.lists(nonzero_gaussians(*gauss), min_size=n, max_size=n))
    w = draw(st.lists(nonzero_gaussians(*gauss), min_size=n, max_size=n))
    return TorusAction(M), v, w


# the separation bound

def test_sep_bound_contract():
    with pytest.raises(ContractError):
        SepBound(0)
    s = default_sep_bound(TorusAction([[1, -1]]), [1, 1], [2, 1])
    assert s.is_default and s.eps == Fraction(1, 1 << (64 * (1 + 2 + 1 + 2)))


# delta setting

def test_rop_delta_examples():
    a = TorusAction([[1, -1]])
    z = QuotientPoint.zero(2)
    assert rop_delta(a, z, z).D == 0
    q = QuotientPoint([Fraction(7, 10), 0], [0, 0])
    est = rop_delta(a, z, q)
    ex = delta_orbit(a, z, q, "T", "exact")
    assert est.lower_bound <= ex.D and ex.lower_bound <= est.D
    assert est.squared_exact == Fraction(49, 200) and sandwich_sq(est, Fraction(49, 200))
    # purely imaginary instance: D / 2 pi sandwiches sqrt(1/8)
    b = TorusAction([[1, 1]])
    est = rop_delta(b, QuotientPoint([0, 0], [Fraction(1, 2), 0]), z)
    ref = mpmath.sqrt(mpmath.mpf(1) / 8) * 2 * mpmath.pi
    assert mpf(est.lower_bound) <= ref <= mpf(est.D)
    with pytest.raises(ContractError):
        rop_delta(a, log_approx([2, 1]), z)


@given(st.integers(1, 2).flatmap(lambda d: st.integers(1, 4).flatmap(
    lambda n: st.tuples(int_matrices(d, n, 2), qpoints(n), qpoints(n)))),
    st.sampled_from(["T", "K"]), st.sampled_from(["exact", "h", "lll"]))
def test_rop_delta_sandwich(data, group, backend):
    M, p, q = data
    assume(any(any(r) for r in M))
    a = TorusAction(M)
    est = rop_delta(a, p, q, group, backend)
    d2 = numeric_orbit_dist2(M, [x - y for x, y in zip(p.rho, q.rho)],
                             [x - y for x, y in zip(p.theta, q.theta)], group)
    assert float_sandwich(est, d2)
    assert est.D <= est.gamma * est.lower_bound
    ex = delta_orbit(a, p, q, group, "exact")
    assert est.lower_bound <= ex.D and ex.lower_bound <= est.D
    if est.D:
        sldp_gamma = Fraction(next(n for n in est.notes if n.startswith("sldp_gamma=")).split("=")[1])
        assert est.gamma <= 2 * sldp_gamma


# log distance

def test_rop_logdist_examples():
    a = TorusAction([[1, -1]])
    est = rop_logdist_T(a, [1, 1], [2, Fraction(1, 2)], SEP)
    assert est.D == 0 and est.squared_exact == 0
    est = rop_logdist_T(a, [1, 1], [2, 1], SEP)
    ref = mpmath.log(2) / mpmath.sqrt(2)
    assert mpf(est.lower_bound) <= ref <= mpf(est.D)
    assert CONDITIONAL in est.notes
    assert rop_logdist_T(TorusAction([[1, 1]]), [1, 2], [2, 4], SEP).D == 0


def test_default_sep_warning():
    est = rop_logdist_T(TorusAction([[1, -1]]), [1, 1], [2, 1])
    assert DEFAULT_SEP_WARNING in est.notes


@given(action_pair(), st.sampled_from(["T", "K"]), st.sampled_from(["exact", "lll"]))
def test_rop_logdist_sandwich(data, group, backend):
    a, v, w = data
    est = rop_logdist(a, v, w, group, SEP, backend)
    equal = orbit_equal_T(a, v, w) if group == "T" else orbit_equal_K(a, v, w)
    assert (est.D == 0) == equal
    dr, dt = numeric_log_diff(v, w)
    d2 = numeric_orbit_dist2(a.M, dr, dt, group)
    assert float_sandwich(est, d2, 1e-7)


@given(action_pair(max_n=3), st.data())
def test_rop_logdist_zero_iff_orbit_equal(data, draw):
    a, v, _ = data
    # half of the time move v inside its orbit by a rational torus element
    from robustorbits.torus import act_rational
    if draw.draw(st.booleans()):
        t = draw.draw(st.lists(nonzero_gaussians(3, 3), min_size=a.d, max_size=a.d))
        w = act_rational(a, t, v)
    else:
        w = draw.draw(st.lists(nonzero_gaussians(6, 3), min_size=a.n, max_size=a.n))
    est = rop_logdist_T(a, v, w, SEP)
    assert (est.D == 0) == orbit_equal_T(a, v, w)


# compact torus, Euclidean distance

def test_rop_dist_K_examples():
    assert rop_dist_K(TorusAction([[1]]), [1], [G(0, 1)], SEP).D == 0
    est = rop_dist_K(TorusAction([[1, 1]]), [1, 1], [1, -1], SEP)
    assert est.lower_bound <= 2 <= est.D
    v, w = [G(1, 2), G(-3, 1)], [G(2, 0), G(1, 1)]
    est = rop_dist_K(TorusAction([[0, 0]]), v, w, SEP)
    d2 = sum((x - y).abs2() for x, y in zip(v, w))
    assert sandwich_sq(est, d2)


@given(st.sampled_from([[[1]], [[2]], [[1, 1]], [[1, -1]], [[1, 2]], [[0, 1]], [[0, 0]]]), st.data())
def test_rop_dist_K_against_sampling(M, data):
    a = TorusAction(M)
    v = data.draw(st.lists(nonzero_gaussians(4, 3), min_size=a.n, max_size=a.n))
    w = data.draw(st.lists(nonzero_gaussians(4, 3), min_size=a.n, max_size=a.n))
    est = rop_dist_K(a, v, w, SEP)
    sampled, lip = sampled_k_orbit_dist(M[0], v, w)
    assert float(est.lower_bound) <= sampled + 1e-9
    assert float(est.D) >= sampled - lip - 1e-9
    assert (est.D == 0) == orbit_equal_K(a, v, w)


# witnesses

def test_rop_witness_examples():
    a = TorusAction([[1, -1]])
    assert rop_witness_T(a, [1, 1], [2, Fraction(1, 2)], SEP) is ORBIT_EQUAL
    for w in ([2, 2], [4, 1]):
        x, est = rop_witness_T(a, [1, 1], w, SEP)
        assert isinstance(x, Witness)
        assert est.D <= est.gamma * est.lower_bound
    x, _ = rop_witness_T(a, [1, 1], [4, 1], SEP)
    # optimal real shift is y = log 2 / 1 up to the log accuracy, no rotation needed
    assert abs(mpf(x.y[0]) - mpmath.log(2)) < 1e-9
    assert x.z[0] == 0


@given(action_pair(max_n=3))
def test_rop_witness_residual(data):
    a, v, w = data
    res = rop_witness_T(a, v, w, SEP)
    if orbit_equal_T(a, v, w):
        assert res is ORBIT_EQUAL
        return
    x, est = res
    eps = Fraction(1, 1 << 70)
    moved = act(a, (list(x.y), list(x.z)), v, eps)
    resid = delta_metric(log_approx(moved, eps), log_approx(w, eps), 70)
    # e^x . v is recomputed independently, so allow its own accuracy
    assert resid.lo <= est.D + Fraction(1, 1 << 60)
    dr, dt = numeric_log_diff(v, w)
    d2 = numeric_orbit_dist2(a.M, dr, dt, "T")
    assert float(resid.lo) <= float(est.gamma) * d2 ** 0.5 * (1 + 1e-7) + 1e-12
    assert float(est.lower_bound) ** 2 <= d2 * (1 + 1e-7) + 1e-15


# reductions

@st.composite
def sldp_instances(draw, n_max=4, coef=1):
    n = draw(st.integers(1, n_max))
    k = draw(st.integers(0, n - 1))
    U = draw(int_matrices(k, n, coef)) if k else []
    assume(not U or rank(U) == k)
    if draw(st.integers(0, 5)) == 0:
        # an integer target, on the lattice
        t = draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n))
    else:
        t = draw(st.lists(rationals(6, 6), min_size=n, max_size=n))
    return SldpInstance(t, U)


def test_reduce_examples():
    inst = SldpInstance([1, -2], [[1, 1]])
    for g, m in sorted(SETTINGS):
        rop, back = reduce_sldp_to_rop(inst, g, m).solve_back()
        assert rop.D == 0 and back.D == 0
    inst = SldpInstance([Fraction(1, 2), 0], [[1, 1]])
    for g, m in sorted(SETTINGS):
        _, back = reduce_sldp_to_rop(inst, g, m).solve_back()
        assert sandwich_sq(back, Fraction(1, 8))
    inst = SldpInstance([Fraction(2, 5), Fraction(3, 5)], [])
    for g, m in sorted(SETTINGS):
        _, back = reduce_sldp_to_rop(inst, g, m).solve_back()
        assert sandwich_sq(back, Fraction(8, 25))


def test_reduce_rejects_unknown_setting():
    with pytest.raises(ContractError):
        reduce_sldp_to_rop(SldpInstance([0], []), "T", "euclid")


@settings(max_examples=100)
@given(sldp_instances())
def test_reduction_round_trip_delta(inst):
    d2 = sldp_exact(inst)
    for g in ("T", "K"):
        rop, back = reduce_sldp_to_rop(inst, g, "delta").solve_back()
        assert sandwich_sq(back, d2)
        assert back.gamma <= 2 * rop.gamma


@settings(max_examples=100)
@given(sldp_instances(), st.sampled_from([("T", "log"), ("K", "log"), ("K", "euclid")]))
def test_reduction_round_trip_log_and_euclid(inst, setting):
    d2 = sldp_exact(inst)
    rop, back = reduce_sldp_to_rop(inst, *setting).solve_back()
    assert sandwich_sq(back, d2)
    assert (back.D == 0) == (d2 == 0)


def test_cvp_pipeline_examples():
    for g, m in sorted(SETTINGS):
        _, back = cvp_to_rop_pipeline(CvpInstance([Fraction(3, 10)], [[1]]), g, m).solve()
        assert sandwich_sq(back, Fraction(9, 100))
        _, back = cvp_to_rop_pipeline(CvpInstance([2, 3], [[1, 0], [1, 1]]), g, m).solve()
        assert back.D == 0
    _, back = cvp_to_rop_pipeline(CvpInstance([Fraction(1, 2)] * 2, [[1, 0], [0, 1]])).solve()
    assert sandwich_sq(back, Fraction(1, 2))


@settings(max_examples=20)
@given(st.integers(1, 2).flatmap(lambda m: st.tuples(int_matrices(m, m, 3),
                                                    st.lists(rationals(6, 5), min_size=m, max_size=m))),
       st.sampled_from(sorted(SETTINGS)))
def test_cvp_pipeline_sandwich(data, setting):
    Gm, t = data
    assume(rank(Gm) == len(Gm))
    inst = CvpInstance(t, Gm)
    _, back = cvp_to_rop_pipeline(inst, *setting).solve()
    assert sandwich_sq(back, cvp_exact(inst)[1])
