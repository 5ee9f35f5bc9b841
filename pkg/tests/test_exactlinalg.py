from fractions import Fraction
from itertools import permutations
from math import prod

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from robustorbits.errors import ContractError
from robustorbits.exactlinalg.certified import (Certified, is_square_rational, round_dyadic,
                                                sqrt_lower, sqrt_upper)
from robustorbits.exactlinalg.gaussian import GaussianRational
from robustorbits.exactlinalg.lp import feasible, simplex_max
from robustorbits.exactlinalg.matrix import (det, gram_schmidt, identity, inverse, matmul, nullspace,
                                             rank, rank_mod_p, rref, transpose)
from robustorbits.exactlinalg.normal_forms import (hnf, hnf_basis, invariant_factors, kernel_lattice_basis,
                                                   saturate, snf, solve_integer)
from robustorbits.exactlinalg.spectral import (RankError, charpoly, eigen_bracket, gram, is_positive_definite,
                                               lambda_min_bracket, sigma_bounds, sigma_max_upper,
                                               sigma_min_2approx)

from strategies import int_matrices, matrices, rationals


def leibniz_det(A):
    n = len(A)
    total = 0
    for p in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        total += (-1) ** inv * prod(A[i][p[i]] for i in range(n))
    return total


def is_row_hnf(H):
    last = -1
    zero_seen = False
    for i, row in enumerate(H):
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            zero_seen = True
            continue
        if zero_seen:
            return False
        j = nz[0]
        if j <= last or row[j] <= 0:
            return False
        if any(not (0 <= H[r][j] < row[j]) for r in range(i)):
            return False
        last = j
    return True


# determinants, rank, inverse

@given(st.integers(1, 4).flatmap(lambda n: int_matrices(n, n, 6)))
def test_det_matches_leibniz(A):
    assert det(A) == leibniz_det(A)


@given(matrices())
def test_rank_matches_numpy_and_mod_p(A):
    assert rank(A) == np.linalg.matrix_rank(np.array(A, dtype=float))
    assert rank_mod_p(A) == rank(A)


@given(st.integers(1, 4).flatmap(lambda n: int_matrices(n, n, 6)))
def test_inverse_is_exact(A):
    assume(det(A) != 0)
    n = len(A)
    assert matmul(A, inverse(A)) == identity(n, Fraction(1))


@given(matrices())
def test_nullspace_annihilates(A):
    N = nullspace(A)
    assert len(N) == len(A[0]) - rank(A)
    for v in N:
        assert all(sum(a * x for a, x in zip(row, v)) == 0 for row in A)


def test_rref_simple():
    R, piv = rref([[2, 4], [1, 3]])
    assert R == [[1, 0], [0, 1]] and piv == [0, 1]


# Hermite and Smith forms

def test_hnf_examples():
    H, U = hnf([[1, 0], [0, 1]])
    assert H == [[1, 0], [0, 1]] and U == [[1, 0], [0, 1]]
    A = [[2, 4], [1, 3]]
    H, U = hnf(A)
    assert H[0][0] == 1
    assert matmul(U, A) == H and abs(det(U)) == 1
    H, _ = hnf([[0, 0], [0, 0]])
    assert H == [[0, 0], [0, 0]]


@given(matrices(4, 5, 9))
def test_hnf_properties(A):
    H, U, Ui = hnf(A, with_inverse=True)
    assert matmul(U, A) == H
    assert abs(det(U)) == 1
    assert matmul(U, Ui) == identity(len(A))
    assert is_row_hnf(H)


def test_snf_examples():
    S, U, V = snf([[2, 0], [0, 3]])
    assert S == [[1, 0], [0, 6]]
    assert matmul(matmul(U, [[2, 0], [0, 3]]), V) == S
    assert snf(identity(3))[0] == identity(3)
    assert snf([[2, 0], [0, 2]])[0] == [[2, 0], [0, 2]]


@given(matrices(4, 4, 9))
def test_snf_properties(A):
    S, U, V = snf(A)
    assert matmul(matmul(U, A), V) == S
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    d = [S[i][i] for i in range(min(len(S), len(S[0])))]
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (a == 0 and b == 0) or (a != 0 and b % a == 0)
    assert all(S[i][j] == 0 for i in range(len(S)) for j in range(len(S[0])) if i != j)


@pytest.mark.parametrize("M, expected", [
    ([[1, -1]], [[1, 1]]),
    ([[1, 1]], [[1, -1]]),
    ([[0, 0]], [[1, 0], [0, 1]]),
])
def test_kernel_examples(M, expected):
    K = kernel_lattice_basis(M)
    # equal lattices: same HNF
    assert hnf_basis(K) == hnf_basis(expected)


@given(matrices(3, 5, 6))
def test_kernel_basis_is_saturated_and_complete(M):
    n = len(M[0])
    K = kernel_lattice_basis(M, n)
    assert len(K) == n - rank(M)
    for a in K:
        assert all(sum(m * x for m, x in zip(row, a)) == 0 for row in M)
    if K:
        assert all(f == 1 for f in invariant_factors(K))


@given(matrices(3, 4, 6), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_solve_integer(A, x):
    x = x[:len(A[0])]
    b = [sum(a * y for a, y in zip(row, x)) for row in A]
    sol = solve_integer(A, b)
    assert sol is not None
    assert [sum(a * y for a, y in zip(row, sol)) for row in A] == b


def test_solve_integer_none():
    assert solve_integer([[2, 4]], [3]) is None


def test_saturate():
    S = saturate([[2, 2]])
    assert hnf_basis(S) == [[1, 1]]


# spectral bounds

@pytest.mark.parametrize("H, lo, hi, sigma2", [
    ([[1, 1]], Fraction(1, 2), Fraction(2), 2),
    ([[1, 0], [0, 1]], Fraction(1, 2), Fraction(2), 1),
    ([[3, 4]], Fraction(1, 8), Fraction(8), 25),
])
def test_sigma_bounds_examples(H, lo, hi, sigma2):
    assert sigma_bounds(H) == (lo, hi)
    assert lo * lo <= sigma2 <= hi * hi


def test_sigma_bounds_rejects_rank_deficient():
    with pytest.raises(RankError):
        sigma_bounds([[1, 1], [2, 2]])


def test_sigma_min_2approx_examples():
    D = sigma_min_2approx(identity(3))
    assert 1 <= D <= 2
    D = sigma_min_2approx([[1, 1]])
    assert 2 <= D * D <= 8
    # smaller root of l^2 - 10002 l + 1
    H = [[1, 0], [100, 1]]
    D = sigma_min_2approx(H)
    lam = (10002 - np.sqrt(10002 ** 2 - 4)) / 2
    assert lam <= float(D * D) <= 4 * lam
    p = charpoly(gram(H))
    assert p == [1, -10002, 1]


@given(st.integers(1, 3).flatmap(lambda k: st.integers(k, 4).flatmap(
    lambda n: int_matrices(k, n, 6))))
def test_sigma_min_2approx_property(H):
    assume(rank(H) == len(H))
    D = sigma_min_2approx(H)
    lo, hi = sigma_bounds(H)
    s = np.linalg.svd(np.array(H, dtype=float), compute_uv=False)
    assert lo <= D
    assert s.min() * (1 - 1e-9) <= float(D) <= 2 * s.min() * (1 + 1e-9)
    assert float(hi) >= s.max() * (1 - 1e-12)
    assert float(sigma_max_upper(H)) >= s.max() * (1 - 1e-12)
    # exact: lambda_min(HH^T) >= D^2/4 (G - D^2/4 I is PD) and <= D^2 (G - D^2 I is not PD)
    G = gram(H)
    k = len(G)
    shifted = lambda c: [[G[i][j] - (c if i == j else 0) for j in range(k)] for i in range(k)]
    assert is_positive_definite(shifted(D * D / 4))
    assert not is_positive_definite(shifted(D * D))
    a, b = lambda_min_bracket(H, Fraction(2))
    assert 0 < a <= b <= 2 * a


@given(st.integers(1, 3).flatmap(lambda k: int_matrices(k, 4, 5)))
def test_eigen_bracket_against_numpy(H):
    assume(rank(H) == len(H))
    G = gram(H)
    ev = np.linalg.eigvalsh(np.array(G, dtype=float))
    for which, ref in (("min", ev.min()), ("max", ev.max())):
        a, b = eigen_bracket(G, which, Fraction(1, 1 << 20))
        assert float(a) <= ref * (1 + 1e-9) + 1e-12
        assert float(b) >= ref * (1 - 1e-9) - 1e-12


# Gram-Schmidt

def test_gram_schmidt_examples():
    assert gram_schmidt([[1, 0], [0, 1]]) == [[1, 0], [0, 1]]
    assert gram_schmidt([[1, 1], [1, 0]]) == [[1, 1], [Fraction(1, 2), Fraction(-1, 2)]]
    assert gram_schmidt([[2, 0, 0]]) == [[2, 0, 0]]
    with pytest.raises(ValueError):
        gram_schmidt([[1, 1], [2, 2]])


@given(matrices(3, 4, 5))
def test_gram_schmidt_orthogonal(A):
    assume(rank(A) == len(A))
    B = gram_schmidt(A)
    G = matmul(B, transpose(B))
    assert all(G[i][j] == 0 for i in range(len(B)) for j in range(len(B)) if i != j)


# certified arithmetic

@given(st.builds(Fraction, st.integers(0, 10 ** 6), st.integers(1, 10 ** 3)), st.integers(8, 80))
def test_sqrt_bounds(q, bits):
    lo, hi = sqrt_lower(q, bits), sqrt_upper(q, bits)
    assert lo * lo <= q <= hi * hi
    assert hi - lo <= Fraction(2, 1 << bits) * max(1, hi)


def test_is_square_rational():
    assert is_square_rational(Fraction(9, 4)) == Fraction(3, 2)
    assert is_square_rational(Fraction(2)) is None


@given(rationals(), rationals(), st.builds(Fraction, st.integers(0, 5), st.integers(1, 7)),
       st.builds(Fraction, st.integers(0, 5), st.integers(1, 7)),
       st.builds(Fraction, st.integers(-1, 1)), st.builds(Fraction, st.integers(-1, 1)))
def test_certified_arithmetic_encloses(a, b, ea, eb, ta, tb):
    x, y = Certified(a, ea), Certified(b, eb)
    # pick points inside each interval (endpoints or centre)
    xa, yb = a + ta * ea, b + tb * eb
    assert (x + y).contains(xa + yb)
    assert (x - y).contains(xa - yb)
    assert (x * y).contains(xa * yb)
    if y.lo > 0 or y.hi < 0:
        assert (x / y).contains(xa / yb)


def test_certified_rejects_negative_error():
    with pytest.raises(ContractError):
        Certified(Fraction(1), Fraction(-1))


def test_round_dyadic():
    q = round_dyadic(Fraction(1, 3), 10)
    assert q.denominator <= 1 << 10 and abs(q - Fraction(1, 3)) <= Fraction(1, 1 << 10)


# Gaussian rationals

def test_gaussian_basic():
    z = GaussianRational(Fraction(1, 2), Fraction(-3, 4))
    assert z * z.conjugate() == GaussianRational(z.abs2())
    assert z / z == GaussianRational(1)
    assert GaussianRational(0, 1) ** 2 == GaussianRational(-1)


# linear programming

def with_slacks(c, A, b):
    """``max c.x, A x <= b, x >= 0`` in the equality form the solver takes."""
    m = len(A)
    A_eq = [list(row) + [int(i == j) for j in range(m)] for i, row in enumerate(A)]
    return list(c) + [0] * m, A_eq, b


def test_simplex_examples():
    # max x + y, x + 2y <= 4, 3x + y <= 6, x, y >= 0: optimum 14/5 at (8/5, 6/5)
    r = simplex_max(*with_slacks([1, 1], [[1, 2], [3, 1]], [4, 6]))
    assert r.status == "optimal" and r.value == Fraction(14, 5)
    assert r.x[:2] == (Fraction(8, 5), Fraction(6, 5))
    # equality form: x + 2y = 4 and 3x + y = 6 pin the same point
    assert simplex_max([1, 1], [[1, 2], [3, 1]], [4, 6]).value == Fraction(14, 5)
    assert simplex_max(*with_slacks([1, 0], [[-1, 1]], [1])).status == "unbounded"
    assert simplex_max(*with_slacks([1], [[1], [-1]], [-1, 0])).status == "infeasible"
    # a redundant equality row
    assert simplex_max([1, 1], [[1, 1], [2, 2]], [1, 2]).value == 1
    assert feasible([[1, 1]], [2])


@given(st.lists(st.lists(st.integers(-4, 4), min_size=2, max_size=2), min_size=1, max_size=4),
       st.lists(st.integers(0, 6), min_size=4, max_size=4), st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_simplex_against_vertex_enumeration(A, b, c):
    b = b[:len(A)]
    # add a box so the LP is bounded
    A2 = A + [[1, 0], [0, 1]]
    b2 = b + [5, 5]
    r = simplex_max(*with_slacks(c, A2, b2))
    assert r.status == "optimal"   # 0 is feasible since b >= 0
    # brute force over intersections of constraint pairs, including x >= 0, y >= 0
    cons = [(row, rhs) for row, rhs in zip(A2, b2)] + [([-1, 0], 0), ([0, -1], 0)]
    best = None
    for i in range(len(cons)):
        for j in range(i + 1, len(cons)):
            (a1, r1), (a2, r2) = cons[i], cons[j]
            D = a1[0] * a2[1] - a1[1] * a2[0]
            if D == 0:
                continue
            x = Fraction(r1 * a2[1] - r2 * a1[1], D)
            y = Fraction(a1[0] * r2 - a2[0] * r1, D)
            if all(row[0] * x + row[1] * y <= rhs for row, rhs in cons):
                val = c[0] * x + c[1] * y
                best = val if best is None else max(best, val)
    assert r.value == best
