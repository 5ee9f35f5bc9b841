"""Certified bounds on singular values of integer matrices.

Everything here is exact: eigenvalue questions about the Gram matrix
``H H^T`` are answered by testing positive definiteness of ``H H^T - x I``
with rational elimination, so no floating point is ever involved.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..errors import ContractError
from .certified import sqrt_lower, sqrt_upper
from .matrix import gram_schmidt, matmul, max_norm, rank, shape, to_int, transpose


class RankError(ValueError):
    pass


def gram(H: Sequence[Sequence[int]]) -> list[list[int]]:
    """``H H^T``."""
    return matmul(H, transpose(H))


def _check_full_row_rank(H) -> tuple[int, int]:
    k, n = shape(H)
    if k == 0:
        raise RankError("empty matrix")
    if rank(H) != k:
        raise RankError(f"matrix has rank {rank(H)} < {k} rows")
    return k, n


def sigma_bounds(H: Sequence[Sequence[int]]) -> tuple[Fraction, Fraction]:
    """Crude rational bounds ``lo <= sigma_min(H) <= sigma_max(H) <= hi``.

    ``hi = n * ||H||_max`` and ``lo = (n * ||H||_max) ** -(n-1)``.
    """
    H = [[to_int(a) for a in row] for row in H]
    _, n = _check_full_row_rank(H)
    c = n * max_norm(H)
    return Fraction(1, c ** (n - 1)), Fraction(c)


def sigma_max_upper(H: Sequence[Sequence[int]], bits: int = 32) -> Fraction:
    """A rational upper bound on ``sigma_max(H)``, never worse than ``sqrt(trace(H H^T))``.

    The Frobenius norm is usually much closer to the truth than ``n ||H||_max``.
    """
    fro2 = sum(a * a for row in H for a in row)
    return min(sqrt_upper(fro2, bits), sigma_bounds(H)[1])


def is_positive_definite(A: Sequence[Sequence]) -> bool:
    """Exact test via symmetric Gaussian elimination (all pivots positive)."""
    n = len(A)
    M = [[Fraction(a) for a in row] for row in A]
    for k in range(n):
        p = M[k][k]
        if p <= 0:
            return False
        for i in range(k + 1, n):
            f = M[i][k] / p
            if f:
                Mi, Mk = M[i], M[k]
                for j in range(k + 1, n):
                    Mi[j] -= f * Mk[j]
    return True


def leading_minor_failure(A: Sequence[Sequence]) -> int | None:
    """Index (1-based) of the first non-positive leading principal minor, or ``None``."""
    n = len(A)
    M = [[Fraction(a) for a in row] for row in A]
    for k in range(n):
        p = M[k][k]
        if p <= 0:
            return k + 1
        for i in range(k + 1, n):
            f = M[i][k] / p
            if f:
                for j in range(k + 1, n):
                    M[i][j] -= f * M[k][j]
    return None


def eigen_bracket(G: Sequence[Sequence], which: str = "min",
                  rel: Fraction = Fraction(1)) -> tuple[Fraction, Fraction]:
    """Rationals ``a <= lambda <= b`` with ``b <= (1 + rel) a``.

    ``lambda`` is the smallest (``which="min"``) or largest eigenvalue of the
    positive-definite symmetric matrix ``G``.  Bisection is geometric while
    the bracket is wide and arithmetic afterwards; each step decides an
    exact positive-definiteness question.
    """
    k = len(G)

    def shifted(x, sign):
        return [[sign * (G[i][j] - (x if i == j else 0)) for j in range(k)] for i in range(k)]

    if which == "min":
        # the smallest diagonal entry bounds lambda_min from above
        b = Fraction(min(G[i][i] for i in range(k)))
        a = b
        for _ in range(100000):
            if is_positive_definite(shifted(a, 1)):
                break
            a /= 2
        else:
            raise RankError("matrix is not positive definite")

        def below(x):
            return is_positive_definite(shifted(x, 1))
    elif which == "max":
        a = Fraction(max(G[i][i] for i in range(k)))
        b = Fraction(sum(G[i][i] for i in range(k)))

        def below(x):
            return not is_positive_definite(shifted(x, -1))
    else:
        raise ContractError("which must be 'min' or 'max'")
    if a <= 0:
        raise RankError("matrix is not positive definite")
    while b > (1 + rel) * a:
        mid = sqrt_lower(a * b, 16) if b > 4 * a else (a + b) / 2
        if not (a < mid < b):
            mid = (a + b) / 2
        if below(mid):
            a = mid
        else:
            b = mid
    return a, b


def lambda_min_bracket(H: Sequence[Sequence[int]], ratio: Fraction = Fraction(2)) -> tuple[Fraction, Fraction]:
    """Rationals ``a <= lambda_min(H H^T) <= b`` with ``b <= ratio * a``."""
    H = [[to_int(a) for a in row] for row in H]
    _check_full_row_rank(H)
    return eigen_bracket(gram(H), "min", ratio - 1)


def sigma_min_2approx(H: Sequence[Sequence[int]]) -> Fraction:
    """A rational ``D`` with ``sigma_min(H) <= D <= 2 sigma_min(H)``.

    The bracket on ``lambda_min`` is tightened to ratio 2 and ``D`` is a
    rational upper bound on the square root of its upper end, so in fact
    ``D <= sqrt(2)(1 + 2^-60) sigma_min``.
    """
    _, b = lambda_min_bracket(H, Fraction(2))
    return sqrt_upper(b, 60)


def charpoly(A: Sequence[Sequence]) -> list[Fraction]:
    """Coefficients ``[1, c1, ..., cn]`` of ``det(x I - A)`` (Faddeev-LeVerrier)."""
    n = len(A)
    A = [[Fraction(a) for a in row] for row in A]
    coeffs = [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        AM = matmul(A, Mk) if k > 1 else [[Fraction(0)] * n for _ in range(n)]
        Mk = [[AM[i][j] + (coeffs[-1] if i == j else 0) for j in range(n)] for i in range(n)]
        AMk = matmul(A, Mk)
        c = -sum(AMk[i][i] for i in range(n)) / k
        coeffs.append(c)
    return coeffs


def poly_eval(coeffs: Sequence[Fraction], x) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


__all__ = [
    "RankError", "gram", "sigma_bounds", "sigma_max_upper", "sigma_min_2approx",
    "lambda_min_bracket", "eigen_bracket", "is_positive_definite", "leading_minor_failure",
    "charpoly", "poly_eval", "gram_schmidt",
]
