"""Lattice lifting: every full-rank lattice is, up to scale, an orthogonal
projection of a cubic lattice ``Z^n``.

The construction runs through four exact sub-steps:

1. ``sum_of_squares``: greedy decomposition of an integer into few squares.
2. ``lagrange_diagonalize``: integral congruence ``Q A Q^T = diag(d)``.
3. ``waring_decompose``: ``A = sum l_i l_i^T`` with rational ``l_i``.
4. ``orthogonal_complete``: extend orthonormal rational rows to a rational
   orthogonal matrix with Householder reflections.

``lift_lattice`` glues them together and ``cvp_to_sldp`` uses the result to
turn a closest-vector instance into a subspace-to-lattice distance instance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Optional, Sequence, Union

from .errors import ContractError
from .exactlinalg.matrix import (as_int_matrix, as_rat_matrix, clear_denominators,
                                 common_denominator, det, dot, identity, inverse,
                                 is_symmetric, matmul, max_norm, shape, transpose)
from .exactlinalg.normal_forms import hnf_basis, invariant_factors
from .exactlinalg.spectral import leading_minor_failure
from .lattices.cvp import CvpInstance, cvp_exact
from .lattices.sldp import SldpInstance


# ---------------------------------------------------------------------------
# sums of squares

def sum_of_squares(D: int) -> list[int]:
    """Greedy decomposition ``D = a_1^2 + ... + a_k^2`` with ``a_i = isqrt(residual)``.

    The residual after one step is at most ``2 sqrt(D)``, so ``k`` is
    ``O(log log D)``; the concrete bound ``ceil(log2 log2 D) + 4`` holds for
    ``D >= 2``.
    """
    if D < 0:
        raise ContractError("sum_of_squares needs D >= 0")
    out = []
    while D:
        a = isqrt(D)
        out.append(a)
        D -= a * a
    return out


def sos_length_bound(D: int) -> int:
    """``ceil(log2(log2(D))) + 4`` for ``D >= 2`` (and 4 for smaller D), in exact integers.

    ``ceil(log2 log2 D)`` is the least ``k`` with ``D <= 2^(2^k)``.
    """
    if D < 2:
        return 4
    e = (D - 1).bit_length()          # least e with D <= 2^e
    k = (e - 1).bit_length()          # least k with e <= 2^k
    return k + 4


# ---------------------------------------------------------------------------
# Lagrange's method

def _check_positive_definite(A) -> None:
    if not is_symmetric(A):
        raise ContractError("matrix must be symmetric")
    bad = leading_minor_failure(A)
    if bad is not None:
        raise ContractError(f"matrix is not positive definite: leading minor {bad} is not positive")


def lagrange_diagonalize(A: Sequence[Sequence]) -> tuple[list[list[int]], list[Fraction]]:
    """Integral congruence diagonalisation of a positive-definite matrix.

    Returns ``(Q, d)`` with ``Q`` integral, ``det Q != 0`` and
    ``Q A Q^T = diag(d)``.  Denominators of ``A`` are cleared internally;
    the update ``row_j <- a_ii row_j - a_ji row_i`` (and the same on columns)
    keeps everything integral.  Rows of ``Q`` are divided by their content
    as soon as possible to keep the entries small.
    """
    A = as_rat_matrix(A)
    _check_positive_definite(A)
    m = len(A)
    X, _ = clear_denominators(A)
    Q = identity(m)
    for i in range(m):
        for j in range(i + 1, m):
            a_ii, a_ji = X[i][i], X[j][i]
            if a_ji == 0:
                continue
            # row op then column op: X <- E X E^T with E = I + (a_ii - 1) e_j e_j^T - a_ji e_j e_i^T
            X[j] = [a_ii * x - a_ji * y for x, y in zip(X[j], X[i])]
            for row in X:
                row[j] = a_ii * row[j] - a_ji * row[i]
            Q[j] = [a_ii * x - a_ji * y for x, y in zip(Q[j], Q[i])]
            g = 0
            for x in Q[j]:
                g = gcd(g, x)
            if g > 1:
                Q[j] = [x // g for x in Q[j]]
                X[j] = [x // g for x in X[j]]
                for row in X:
                    row[j] //= g
    QA = matmul(Q, A)
    d = [dot(QA[i], Q[i]) for i in range(m)]
    return Q, d


# ---------------------------------------------------------------------------
# Waring decomposition of a positive-definite form

@dataclass(frozen=True)
class WaringResult:
    vectors: list[list[Fraction]]
    scale: int          # c with c^2 A integral
    scaled_diagonal: list[int]  # the d_i of Q (c^2 A) Q^T

    @property
    def d_max(self) -> int:
        return max(self.scaled_diagonal)

    def length_bound(self) -> int:
        m = len(self.scaled_diagonal)
        return m * sos_length_bound(self.d_max)


def waring_decompose_full(A: Sequence[Sequence]) -> WaringResult:
    A = as_rat_matrix(A)
    _check_positive_definite(A)
    m = len(A)
    c = common_denominator(a for row in A for a in row)
    A_int = [[int(a * c * c) for a in row] for row in A]
    Q, d = lagrange_diagonalize(A_int)
    d_int = [int(x) for x in d]
    Qi = inverse(Q)
    cols = transpose(Qi)
    vectors: list[list[Fraction]] = []
    for i in range(m):
        q = [x / c for x in cols[i]]
        for a in sum_of_squares(d_int[i]):
            vectors.append([a * x for x in q])
    return WaringResult(vectors, c, d_int)


def waring_decompose(A: Sequence[Sequence]) -> list[list[Fraction]]:
    """Rational vectors ``l_1..l_N`` with ``sum l_i l_i^T = A``.

    ``c^2 A`` is integral for ``c`` the common denominator of ``A``;
    diagonalising it as ``Q (c^2 A) Q^T = diag(d)`` gives
    ``A = sum_i d_i (q_i / c)(q_i / c)^T`` with ``q_i`` the columns of
    ``Q^-1``, and each ``d_i`` is split greedily into squares.
    """
    return waring_decompose_full(A).vectors


def outer_sum(vectors: Sequence[Sequence[Fraction]], m: int) -> list[list[Fraction]]:
    S = [[Fraction(0)] * m for _ in range(m)]
    for v in vectors:
        for i in range(m):
            if v[i]:
                for j in range(m):
                    S[i][j] += v[i] * v[j]
    return S


# ---------------------------------------------------------------------------
# orthogonal completion

def _scaled(v: Sequence[Fraction]) -> tuple[list[int], int]:
    """Write ``v = w / d`` with integer ``w`` and ``d > 0`` in lowest terms."""
    d = common_denominator(v)
    return [int(x * d) for x in v], d


def _reflect(x: tuple[list[int], int], a: list[int], a2: int) -> tuple[list[int], int]:
    """Householder reflection of ``x = w/d`` in the hyperplane ``a^perp``.

    Works on integer numerators: ``x - 2<x,a>/<a,a> a``.
    """
    w, d = x
    c = 2 * sum(p * q for p, q in zip(w, a))
    if not c:
        return x
    w = [p * a2 - c * q for p, q in zip(w, a)]
    d = d * a2
    g = d
    for p in w:
        g = gcd(g, p)
        if g == 1:
            break
    if g > 1:
        w = [p // g for p in w]
        d //= g
    return w, d


def orthogonal_complete(X: Sequence[Sequence]) -> list[list[Fraction]]:
    """Rational orthogonal ``Y`` (``n x n``) whose first ``m`` rows are the rows of ``X``.

    Requires ``X X^T = I_m``.  Builds ``Z = R_1 ... R_m`` where ``R_j`` is the
    reflection along ``e_j - R_{j-1} ... R_1 x_j`` (skipped when that vector is
    zero).  Each ``R_j`` fixes ``e_1..e_{j-1}``, so ``Z e_j = x_j`` and
    ``Y = Z^T`` works.  At most ``m`` reflections are used.
    """
    X = as_rat_matrix(X)
    m, n = shape(X)
    if m > n:
        raise ContractError("more rows than columns")
    for i in range(m):
        for j in range(i, m):
            if dot(X[i], X[j]) != (1 if i == j else 0):
                raise ContractError("orthogonal_complete requires X X^T = I")
    reflections: list[tuple[list[int], int]] = []
    for j in range(m):
        target = _scaled(X[j])
        for a, a2 in reflections:
            target = _reflect(target, a, a2)
        w, d = target
        a = [(d if i == j else 0) - w[i] for i in range(n)]
        if any(a):
            g = 0
            for x in a:
                g = gcd(g, x)
            a = [x // g for x in a]
            reflections.append((a, sum(x * x for x in a)))
    Y = []
    for i in range(n):
        v = ([int(k == i) for k in range(n)], 1)
        for a, a2 in reversed(reflections):
            v = _reflect(v, a, a2)
        w, d = v
        Y.append([Fraction(x, d) for x in w])  # row i of Y = Z e_i
    return Y


def is_orthogonal(Y: Sequence[Sequence[Fraction]]) -> bool:
    """Exact check of ``Y Y^T = I`` using integer arithmetic after scaling."""
    Yi, c = clear_denominators(Y)
    n = len(Yi)
    c2 = c * c
    for i in range(n):
        ri = Yi[i]
        for j in range(i, n):
            s = sum(a * b for a, b in zip(ri, Yi[j]))
            if s != (c2 if i == j else 0):
                return False
    return True


# ---------------------------------------------------------------------------
# eutactic stars and the lift

def eutactic_check(G: Sequence[Sequence[int]], L: Sequence[Sequence[int]], s: int) -> bool:
    """True iff ``(G L)(G L)^T = s^2 I`` and ``L`` is right-invertible over Z."""
    G = as_int_matrix(G)
    L = as_int_matrix(L)
    GL = matmul(G, L)
    m = len(GL)
    P = matmul(GL, transpose(GL))
    if any(P[i][j] != (s * s if i == j else 0) for i in range(m) for j in range(m)):
        return False
    f = invariant_factors(L)
    return len(f) == len(L) and all(x == 1 for x in f)


@dataclass(frozen=True)
class LiftResult:
    """``s_total * P(Y Z^n) = G Z^m`` with ``P`` the projection to the first ``m`` coordinates."""
    n: int
    s_total: int
    Y: list[list[Fraction]]
    m: int
    s: int = 0
    f: int = 1
    p: int = 0
    N: int = 0
    X: list[list[int]] = field(default_factory=list)

    @property
    def head(self) -> list[list[Fraction]]:
        """The first ``m`` rows of ``Y`` (equal to ``X / s_total``)."""
        return self.Y[:self.m]


def lift_lattice(G: Sequence[Sequence[int]], complete: bool = True) -> LiftResult:
    """Lift the lattice ``G Z^m`` to a rotated cubic lattice.

    ``s = m ||G||_max + 1``, ``A = s^2 G^-1 G^-T - I`` (positive definite),
    ``A = L L^T`` by ``waring_decompose``, ``f`` the common denominator of
    ``L``, ``f^2 - 1 = sum b_j^2``, ``L'' = [b_1 I | ... | b_p I | f L]`` and
    ``X = [G | G L'']`` satisfies ``X X^T = (s f)^2 I``.  Then
    ``Y = orthogonal_complete(X / (s f))`` and ``s_total = s f``.
    """
    G = as_int_matrix(G)
    m, m2 = shape(G)
    if m != m2 or m == 0:
        raise ContractError("G must be square")
    if det(G) == 0:
        raise ContractError("G must be nonsingular")
    s = m * max_norm(G) + 1
    Gi = inverse(G)
    GiGit = matmul(Gi, transpose(Gi))
    A = [[s * s * GiGit[i][j] - (1 if i == j else 0) for j in range(m)] for i in range(m)]
    Ls = waring_decompose(A)
    N = len(Ls)
    f = common_denominator(x for v in Ls for x in v)
    bs = sum_of_squares(f * f - 1)
    p = len(bs)
    # L'' = [b_1 I | ... | b_p I | f L], an m x (p m + N) integer matrix
    Lpp = [[0] * (p * m + N) for _ in range(m)]
    for j, b in enumerate(bs):
        for i in range(m):
            Lpp[i][j * m + i] = b
    for k, v in enumerate(Ls):
        for i in range(m):
            Lpp[i][p * m + k] = int(f * v[i])
    GL = matmul(G, Lpp)
    X = [list(G[i]) + GL[i] for i in range(m)]
    s_total = s * f
    n = m * (1 + p) + N
    Y = orthogonal_complete([[Fraction(x, s_total) for x in row] for row in X]) if complete else []
    return LiftResult(n=n, s_total=s_total, Y=Y, m=m, s=s, f=f, p=p, N=N, X=X)


def lift_lattice_equal(result: LiftResult, G: Sequence[Sequence[int]]) -> bool:
    """HNF check of ``s_total * P(Y Z^n) = G Z^m`` (column lattices)."""
    head = [[int(x * result.s_total) if (x * result.s_total).denominator == 1 else None
             for x in row] for row in result.head]
    if any(x is None for row in head for x in row):
        return False
    return hnf_basis(transpose(head)) == hnf_basis(transpose(as_int_matrix(G)))


# ---------------------------------------------------------------------------
# CVP -> SLDP

@dataclass(frozen=True)
class ExactAnswer:
    squared_distance: Fraction


@dataclass(frozen=True)
class ReducedSldp:
    s_total: int
    instance: SldpInstance
    lift: LiftResult


def _integer_row(row: Sequence[Fraction]) -> list[int]:
    c = common_denominator(row)
    v = [int(x * c) for x in row]
    g = 0
    for x in v:
        g = gcd(g, x)
    return [x // g for x in v] if g > 1 else v


def cvp_to_sldp(instance: CvpInstance, exact_max_m: Optional[int] = None
                ) -> Union[ExactAnswer, ReducedSldp]:
    """Reduce CVP to SLDP through the lattice lift.

    Returns ``ExactAnswer`` only if the caller opts in with
    ``exact_max_m >= m``; otherwise ``ReducedSldp`` with
    ``dist(t, L) = s_total * dist(t' + U, Z^n)``, ``t' = Y^T (t, 0) / s_total``
    and ``U`` spanned by rows ``m+1..n`` of ``Y`` (scaled to primitive
    integer vectors).
    """
    m = instance.m
    if exact_max_m is not None and m <= exact_max_m:
        _, d2 = cvp_exact(instance)
        return ExactAnswer(d2)
    lift = lift_lattice([list(r) for r in instance.G])
    Y = lift.Y
    n = lift.n
    t_hat = list(instance.t) + [Fraction(0)] * (n - m)
    # t' = Y^T t_hat / s_total; only the first m entries of t_hat are nonzero
    t_prime = [sum((Y[i][j] * t_hat[i] for i in range(m)), Fraction(0)) / lift.s_total
               for j in range(n)]
    U = [_integer_row(Y[i]) for i in range(m, n)]
    complement = [list(row) for row in lift.X]
    return ReducedSldp(lift.s_total, SldpInstance(t_prime, U, complement), lift)


__all__ = [
    "ExactAnswer", "LiftResult", "ReducedSldp", "WaringResult", "cvp_to_sldp",
    "eutactic_check", "is_orthogonal", "lagrange_diagonalize", "lift_lattice",
    "lift_lattice_equal", "orthogonal_complete", "outer_sum", "sos_length_bound",
    "sum_of_squares", "waring_decompose", "waring_decompose_full",
]
