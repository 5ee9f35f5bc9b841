from fractions import Fraction
from itertools import product

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from robustorbits.errors import ContractError
from robustorbits.kempfness import (InfeasibleError, KnProblem, example_6_3, kn_gradient, kn_hessian,
                                    kn_minimize, kn_orbit_equal, kn_value)
from robustorbits.rop import SepBound
from robustorbits.torus import TorusAction, act_rational, orbit_equal_T, point_position

from oracles import mpf
from strategies import nonzero_gaussians, positive_rationals, rationals

SEP = SepBound(Fraction(1, 1 << 20))


def f_mp(problem, x):
    return mpmath.log(sum(mpf(q) * mpmath.exp(sum(mpf(a) * b for a, b in zip(x, w)))
                          for w, q in zip(problem.weights, problem.q)))


@st.composite
def problems(draw, max_d=4, max_n=8, interior=False):
    d = draw(st.integers(1, max_d))
    n = draw(st.integers(d + 1, max_n))
    W = draw(st.lists(st.lists(st.integers(-3, 3), min_size=d, max_size=d), min_size=n, max_size=n))
    if interior:
        # mirror some weights so 0 is usually interior; the filter below checks it
        W = W + [[-a for a in w] for w in W[:d + 1]]
    q = draw(st.lists(positive_rationals(9, 4), min_size=len(W), max_size=len(W)))
    try:
        problem = KnProblem(W, q)
    except ContractError:
        assume(False)
    if interior:
        assume(point_position(problem.weights, [0] * d).interior)
    return problem


def points(d, bound=2):
    return st.lists(rationals(4 * bound, 4), min_size=d, max_size=d)


# value, gradient and Hessian

def test_kn_value_examples():
    sym = KnProblem([[1], [-1]], [1, 1])
    eps = Fraction(1, 1 << 80)
    assert abs(mpf(kn_value(sym, [0], eps).value) - mpmath.log(2)) <= mpf(eps)
    p = KnProblem([[1, 0], [0, 1], [-1, -1]], [1, 2, 3])
    v = kn_value(p, [0, 0], eps)
    assert abs(mpf(v.value) - mpmath.log(6)) <= mpf(eps)
    with pytest.raises(ContractError):
        kn_value(sym, [0], 0)


@given(problems(), st.data())
def test_kn_value_against_mpmath(problem, data):
    x = data.draw(points(problem.d))
    eps = Fraction(1, 1 << 60)
    c = kn_value(problem, x, eps)
    ref = f_mp(problem, x)
    assert mpf(c.lo) <= ref <= mpf(c.hi) and c.err <= eps


def test_gradient_hessian_examples():
    sym = KnProblem([[1], [-1]], [1, 1])
    assert kn_gradient(sym, [0])[0].contains(0)
    assert kn_hessian(sym, [0])[0][0].contains(1)
    report = example_6_3(9)
    x1 = Fraction(report["x"][0])
    p = KnProblem([[1, 0], [-2, 0], [-9, 1], [-9, -1]], [1, 1, 1, 1])
    assert kn_gradient(p, [x1, 0])[1].contains(0)


@settings(max_examples=50)
@given(problems(), st.data())
def test_derivatives_against_central_differences(problem, data):
    x = data.draw(points(problem.d, 1))
    g = kn_gradient(problem, x)
    Hs = kn_hessian(problem, x)
    h = mpmath.mpf(2) ** -40
    xm = [mpf(a) for a in x]
    for r in range(problem.d):
        e = [h if i == r else 0 for i in range(problem.d)]
        plus = [a + b for a, b in zip(xm, e)]
        minus = [a - b for a, b in zip(xm, e)]
        fd = (f_mp(problem, plus) - f_mp(problem, minus)) / (2 * h)
        assert abs(fd - mpf(g[r].value)) <= 1e-6 * max(1, abs(fd))
        # Hessian row by differencing the exact gradient formula in mpmath
        for c in range(problem.d):
            def grad_c(y):
                ws = [mpf(q) * mpmath.exp(sum(a * b for a, b in zip(y, w)))
                      for w, q in zip(problem.weights, problem.q)]
                return sum(wi * w[c] for wi, w in zip(ws, problem.weights)) / sum(ws)
            fd2 = (grad_c(plus) - grad_c(minus)) / (2 * h)
            assert abs(fd2 - mpf(Hs[r][c].value)) <= 1e-6 * max(1, abs(fd2))


@given(problems(max_d=3, max_n=6), st.data())
def test_gradient_inside_weight_polytope(problem, data):
    x = data.draw(points(problem.d))
    g = kn_gradient(problem, x)
    pos = point_position(problem.weights, [c.value for c in g])
    assert pos.position == "interior"
    # every corner of the certified box is interior as well
    for corner in product(*[(c.lo, c.hi) for c in g]):
        assert point_position(problem.weights, list(corner)).position == "interior"


@given(problems(max_d=3, max_n=6), st.data())
def test_convexity(problem, data):
    x, y = data.draw(points(problem.d)), data.draw(points(problem.d))
    lam = data.draw(st.fractions(0, 1).filter(lambda t: 0 < t < 1).map(lambda t: t.limit_denominator(16)))
    assume(0 < lam < 1)
    z = [lam * a + (1 - lam) * b for a, b in zip(x, y)]
    fz = kn_value(problem, z)
    assert fz.lo <= lam * kn_value(problem, x).hi + (1 - lam) * kn_value(problem, y).hi


@given(problems(max_d=2, max_n=5))
def test_hessian_positive_semidefinite(problem):
    Hs = kn_hessian(problem, [0] * problem.d)
    for r in range(problem.d):
        assert Hs[r][r].hi >= 0


def test_problem_contract():
    with pytest.raises(ContractError):
        KnProblem([[1], [1]], [1, 1])          # affine span is a point
    with pytest.raises(ContractError):
        KnProblem([[1], [-1]], [1, 0])
    with pytest.raises(ContractError):
        KnProblem.from_action(TorusAction([[1, -1]]), [1, 0])


# minimisation

def test_kn_minimize_examples():
    sol = kn_minimize(KnProblem([[1], [-1]], [1, 1]))
    assert sol.x == (0,)
    assert abs(mpf(sol.f_value.value) - mpmath.log(2)) < 1e-15
    with pytest.raises(InfeasibleError):
        kn_minimize(KnProblem([[1], [2]], [1, 1]))
    with pytest.raises(InfeasibleError):
        kn_minimize(KnProblem([[0], [1]], [1, 1]))


@settings(max_examples=30)
@given(problems(max_d=3, max_n=5, interior=True))
def test_kn_minimize_properties(problem):
    tol = Fraction(1, 1 << 30)
    sol = kn_minimize(problem, tol)
    assert 0 <= sol.grad_norm <= tol
    assert all(a > b for a, b in zip(sol.values, sol.values[1:]))
    # first-order optimality against mpmath
    g = [mpmath.diff(lambda t, r=r: f_mp(problem, [mpf(a) + (t if i == r else 0)
                                               for i, a in enumerate(sol.x)]), 0)
         for r in range(problem.d)]
    assert mpmath.sqrt(sum(c * c for c in g)) <= 2 * mpf(tol)


def test_kn_minimize_scalar_closed_form():
    # f(x) = log(q1 e^x + q2 e^-x) is minimised at x = log(q2/q1) / 2
    sol = kn_minimize(KnProblem([[1], [-1]], [1, 4]), Fraction(1, 1 << 50))
    assert abs(mpf(sol.x[0]) - mpmath.log(4) / 2) < 1e-14


# example family with a nearly singular Hessian

@pytest.mark.parametrize("N", [3, 9, 30])
def test_example_6_3_report(N):
    rep = example_6_3(N)
    for key in ("bracket_ok", "x2_ok", "gap_ok", "log_bound_ok", "euclid_ok"):
        assert rep[key], key
    assert rep["displacement"] == "1"


def test_example_6_3_bounds_numerically():
    rep = example_6_3(9)
    x1 = mpf(Fraction(rep["x"][0]))
    assert mpmath.cbrt(2) < mpmath.exp(x1) < (1 + 9 * mpmath.mpf(2) ** -3) * mpmath.cbrt(2)
    gap = mpf(Fraction(rep["gap_bound"]))
    assert abs(gap - mpmath.mpf(2) ** -3 * (mpmath.e + 1 / mpmath.e - 2)) < 1e-20
    rep = example_6_3(30)
    assert mpf(Fraction(rep["gap_upper"])) <= mpmath.mpf(2) ** -10 * (mpmath.e + 1 / mpmath.e - 2)


def test_example_6_3_contract():
    with pytest.raises(ContractError):
        example_6_3(2)


# orbit equality through the Kempf-Ness minimisers

def test_kn_orbit_equal_examples():
    a = TorusAction([[1, -1]])
    assert kn_orbit_equal(a, [1, 1], [1, 1], SEP)
    assert kn_orbit_equal(a, [1, 1], [2, Fraction(1, 2)], SEP)
    assert not kn_orbit_equal(a, [1, 1], [2, 1], SEP)
    with pytest.raises(InfeasibleError):
        kn_orbit_equal(TorusAction([[1, 2]]), [1, 1], [2, 1], SEP)


@settings(max_examples=25)
@given(st.sampled_from([[[1, -1]], [[1, -2, 1]], [[1, -1, 0, 0], [0, 0, 1, -1]],
                        [[1, 0, -1], [0, 1, -1]], [[2, -1, -1]]]), st.data())
def test_kn_orbit_equal_agrees_with_invariants(M, data):
    a = TorusAction(M)
    v = data.draw(st.lists(nonzero_gaussians(4, 3), min_size=a.n, max_size=a.n))
    if data.draw(st.booleans()):
        t = data.draw(st.lists(nonzero_gaussians(3, 2), min_size=a.d, max_size=a.d))
        w = act_rational(a, t, v)
    else:
        w = data.draw(st.lists(nonzero_gaussians(4, 3), min_size=a.n, max_size=a.n))
    assert kn_orbit_equal(a, v, w, SEP) == orbit_equal_T(a, v, w)
