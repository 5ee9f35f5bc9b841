from fractions import Fraction
from math import ceil, log2

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from robustorbits.errors import ContractError
from robustorbits.exactlinalg.matrix import det, identity, inverse, matmul, transpose
from robustorbits.exactlinalg.normal_forms import hnf_basis
from robustorbits.lattices.cvp import CvpInstance, cvp_exact
from robustorbits.lattices.sldp import sldp_exact
from robustorbits.lifting import (ExactAnswer, ReducedSldp, cvp_to_sldp, eutactic_check, is_orthogonal,
                                  lagrange_diagonalize, lift_lattice, lift_lattice_equal,
                                  orthogonal_complete, outer_sum, sos_length_bound, sum_of_squares,
                                  waring_decompose, waring_decompose_full)

from strategies import int_matrices, rationals


def reflection(a):
    n = len(a)
    a2 = sum(x * x for x in a)
    return [[Fraction(int(i == j)) - Fraction(2 * a[i] * a[j], a2) for j in range(n)] for i in range(n)]


@st.composite
def orthonormal_rows(draw, max_n=5):
    """First m rows of a product of random integer reflections."""
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, n))
    Q = identity(n, Fraction(1))
    for _ in range(draw(st.integers(1, 3))):
        a = draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n))
        if any(a):
            Q = matmul(Q, reflection(a))
    return Q[:m]


# sums of squares

@pytest.mark.parametrize("D, expected", [(0, []), (12, [3, 1, 1, 1]), (10 ** 6, [1000])])
def test_sos_examples(D, expected):
    assert sum_of_squares(D) == expected


@given(st.integers(0, 10 ** 40))
def test_sos_property(D):
    sq = sum_of_squares(D)
    assert sum(a * a for a in sq) == D
    assert all(a > 0 for a in sq)
    if D >= 2:
        assert len(sq) <= sos_length_bound(D)


@given(st.integers(2, 10 ** 30))
def test_sos_length_bound_formula(D):
    # float cross-check away from the exact thresholds 2^(2^k)
    ll = log2(log2(D))
    assume(abs(ll - round(ll)) > 1e-9)
    assert sos_length_bound(D) == ceil(ll) + 4


def test_sos_length_bound_thresholds():
    for k in range(1, 8):
        T = 1 << (1 << k)
        assert sos_length_bound(T) == k + 4
        assert sos_length_bound(T + 1) == k + 5


def test_sos_rejects_negative():
    with pytest.raises(ContractError):
        sum_of_squares(-1)


# Lagrange and Waring

def test_lagrange_examples():
    assert lagrange_diagonalize([[1, 0], [0, 1]]) == ([[1, 0], [0, 1]], [1, 1])
    Q, d = lagrange_diagonalize([[2, 1], [1, 2]])
    assert Q == [[1, 0], [-1, 2]] and d == [2, 6]
    assert lagrange_diagonalize([[5]]) == ([[1]], [5])


@st.composite
def pd_matrices(draw, max_m=4):
    m = draw(st.integers(1, max_m))
    B = draw(st.lists(st.lists(rationals(5, 4), min_size=m, max_size=m), min_size=m, max_size=m))
    A = matmul(B, transpose(B))
    shift = draw(st.lists(st.builds(Fraction, st.integers(1, 5), st.integers(1, 5)), min_size=m, max_size=m))
    return [[A[i][j] + (shift[i] if i == j else 0) for j in range(m)] for i in range(m)]


@given(pd_matrices())
def test_lagrange_property(A):
    Q, d = lagrange_diagonalize(A)
    assert det(Q) != 0
    D = matmul(matmul(Q, A), transpose(Q))
    m = len(A)
    assert D == [[d[i] if i == j else 0 for j in range(m)] for i in range(m)]
    assert all(x > 0 for x in d)


def test_waring_examples():
    L = waring_decompose([[1, 0], [0, 1]])
    assert sorted(map(tuple, L)) == [(0, 1), (1, 0)]
    L = waring_decompose([[2, 1], [1, 2]])
    assert outer_sum(L, 2) == [[2, 1], [1, 2]]
    assert sorted(map(tuple, L)) == sorted([(1, Fraction(1, 2)), (1, Fraction(1, 2)), (0, 1),
                                            (0, Fraction(1, 2)), (0, Fraction(1, 2))])
    assert waring_decompose([[4]]) == [[2]]


@given(pd_matrices(5))
def test_waring_property(A):
    res = waring_decompose_full(A)
    m = len(A)
    S = [[sum(l[i] * l[j] for l in res.vectors) for j in range(m)] for i in range(m)]
    assert S == A
    assert len(res.vectors) <= res.length_bound()


def test_waring_rejects_indefinite():
    with pytest.raises(ContractError):
        waring_decompose([[1, 2], [2, 1]])
    with pytest.raises(ContractError):
        waring_decompose([[1, 2], [0, 1]])


# orthogonal completion

def test_orthogonal_complete_examples():
    assert orthogonal_complete([[1, 0]]) == [[1, 0], [0, 1]]
    Y = orthogonal_complete([[Fraction(3, 5), Fraction(4, 5)]])
    assert Y == [[Fraction(3, 5), Fraction(4, 5)], [Fraction(4, 5), Fraction(-3, 5)]]
    assert orthogonal_complete([[0, 1]]) == [[0, 1], [1, 0]]
    # the v = -w case
    Y = orthogonal_complete([[-1, 0]])
    assert Y[0] == [-1, 0] and is_orthogonal(Y)


@given(orthonormal_rows())
def test_orthogonal_complete_property(X):
    Y = orthogonal_complete(X)
    n = len(X[0])
    assert len(Y) == n
    assert Y[:len(X)] == X
    assert matmul(Y, transpose(Y)) == identity(n, Fraction(1))
    assert is_orthogonal(Y)


def test_orthogonal_complete_contract():
    with pytest.raises(ContractError):
        orthogonal_complete([[1, 1]])


# eutactic stars and the lift

@pytest.mark.parametrize("G, L, s, expected", [
    ([[1]], [[1, 1, 1]], 2, False),
    ([[1]], [[1, 1, 1, 1]], 2, True),
    ([[1, 0], [0, 1]], [[1, 0], [0, 1]], 1, True),
])
def test_eutactic_examples(G, L, s, expected):
    assert eutactic_check(G, L, s) is expected


def test_lift_examples():
    r = lift_lattice([[1]])
    assert (r.s, r.f, r.p, r.n, r.s_total) == (2, 1, 0, 4, 2)
    assert r.X == [[1, 1, 1, 1]]
    assert lift_lattice_equal(r, [[1]])
    r = lift_lattice([[2]])
    assert (r.s, r.f, r.n, r.s_total) == (3, 2, 6, 6)
    # column order of the Waring block is not canonical
    assert r.X[0][:1] == [2] and sorted(r.X[0]) == [2, 2, 2, 2, 2, 4]
    assert sum(x * x for x in r.X[0]) == 36
    assert lift_lattice_equal(r, [[2]])
    r = lift_lattice([[1, 0], [0, 1]])
    assert is_orthogonal(r.Y) and lift_lattice_equal(r, [[1, 0], [0, 1]])


@given(st.integers(1, 3).flatmap(lambda m: int_matrices(m, m, 10)))
def test_lift_property(G):
    assume(det(G) != 0)
    r = lift_lattice(G)
    m = len(G)
    assert matmul(r.Y, transpose(r.Y)) == identity(r.n, Fraction(1))
    # eutactic star [I | L''] scaled by s f
    L = [row[m:] for row in matmul(inverse(G), r.X)]
    star = [[int(i == j) for j in range(m)] + [int(x) for x in L[i]] for i in range(m)]
    assert eutactic_check(G, star, r.s * r.f)
    head = [[int(x * r.s_total) for x in row] for row in r.Y[:m]]
    assert hnf_basis(transpose(head)) == hnf_basis(transpose(G))


def test_lift_contract():
    with pytest.raises(ContractError):
        lift_lattice([[1, 2], [2, 4]])
    with pytest.raises(ContractError):
        lift_lattice([[1, 2]])


# CVP -> SLDP

def test_cvp_to_sldp_examples():
    inst = CvpInstance([Fraction(3, 10)], [[1]])
    red = cvp_to_sldp(inst)
    assert isinstance(red, ReducedSldp) and red.s_total == 2
    assert cvp_exact(inst)[1] == Fraction(9, 100)
    assert sldp_exact(red.instance) == Fraction(9, 400)
    red = cvp_to_sldp(CvpInstance([3], [[1]]))
    assert sldp_exact(red.instance) == 0
    inst = CvpInstance([Fraction(1, 2), Fraction(1, 2)], [[1, 0], [0, 1]])
    red = cvp_to_sldp(inst)
    assert red.s_total ** 2 * sldp_exact(red.instance) == Fraction(1, 2)
    assert cvp_to_sldp(inst, exact_max_m=3) == ExactAnswer(Fraction(1, 2))


@given(st.integers(1, 2).flatmap(lambda m: st.tuples(int_matrices(m, m, 4),
                                                    st.lists(rationals(6, 5), min_size=m, max_size=m))))
def test_cvp_to_sldp_identity(data):
    G, t = data
    assume(det(G) != 0)
    inst = CvpInstance(t, G)
    red = cvp_to_sldp(inst)
    assert cvp_exact(inst)[1] == red.s_total ** 2 * sldp_exact(red.instance)
