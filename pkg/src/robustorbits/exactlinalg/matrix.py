"""Dense exact matrices and vectors over Z and Q.

Matrices are plain row-major lists of lists; vectors are lists.  Entries are
``int`` for integer matrices and :class:`fractions.Fraction` for rational
ones.  No function in this module mutates its arguments.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, List, Sequence

from ..errors import ContractError

IntVector = List[int]
RatVector = List[Fraction]
IntMatrix = List[List[int]]
RatMatrix = List[List[Fraction]]


class ShapeError(ValueError):
    pass


def to_fraction(x) -> Fraction:
    """Convert ``x`` to a Fraction; strings like ``"3/4"`` or ``"0.4"`` are accepted."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Rational, str)):
        return Fraction(x)
    if isinstance(x, float):
        # floats are exact dyadics; take them at face value
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def to_int(x) -> int:
    q = to_fraction(x)
    if q.denominator != 1:
        raise ContractError(f"expected an integer, got {q}")
    return q.numerator


def as_int_matrix(rows: Iterable[Iterable]) -> IntMatrix:
    A = [[to_int(a) for a in row] for row in rows]
    _check_rectangular(A)
    return A


def as_rat_matrix(rows: Iterable[Iterable]) -> RatMatrix:
    A = [[to_fraction(a) for a in row] for row in rows]
    _check_rectangular(A)
    return A


def as_rat_vector(xs: Iterable) -> RatVector:
    return [to_fraction(x) for x in xs]


def as_int_vector(xs: Iterable) -> IntVector:
    return [to_int(x) for x in xs]


def _check_rectangular(A) -> None:
    if A and any(len(r) != len(A[0]) for r in A):
        raise ShapeError("ragged matrix")


def shape(A: Sequence[Sequence]) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def zeros(m: int, n: int, zero=0) -> list:
    return [[zero] * n for _ in range(m)]


def identity(n: int, one=1) -> list:
    return [[one if i == j else 0 * one for j in range(n)] for i in range(n)]


def transpose(A: Sequence[Sequence]) -> list:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def copy(A: Sequence[Sequence]) -> list:
    return [list(r) for r in A]


def dot(x: Sequence, y: Sequence):
    if len(x) != len(y):
        raise ShapeError("dot of vectors of different length")
    return sum((a * b for a, b in zip(x, y)), 0)


def norm2(x: Sequence):
    """Squared Euclidean norm."""
    return sum((a * a for a in x), 0)


def vadd(x: Sequence, y: Sequence) -> list:
    return [a + b for a, b in zip(x, y)]


def vsub(x: Sequence, y: Sequence) -> list:
    return [a - b for a, b in zip(x, y)]


def vscale(c, x: Sequence) -> list:
    return [c * a for a in x]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    m, k = shape(A)
    k2, n = shape(B)
    if k != k2 and not (m == 0 or n == 0):
        raise ShapeError(f"cannot multiply {m}x{k} by {k2}x{n}")
    Bt = transpose(B)
    return [[dot(row, col) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], x: Sequence) -> list:
    return [dot(row, x) for row in A]


def vecmat(x: Sequence, A: Sequence[Sequence]) -> list:
    return matvec(transpose(A), x)


def hstack(*blocks: Sequence[Sequence]) -> list:
    rows = len(blocks[0])
    if any(len(b) != rows for b in blocks):
        raise ShapeError("hstack of blocks with different row counts")
    return [sum((list(b[i]) for b in blocks), []) for i in range(rows)]


def vstack(*blocks: Sequence[Sequence]) -> list:
    out = []
    for b in blocks:
        out.extend(list(r) for r in b)
    _check_rectangular(out)
    return out


def max_norm(A: Sequence[Sequence]):
    return max((abs(a) for row in A for a in row), default=0)


def bit_length(A: Sequence[Sequence]) -> int:
    """Largest bit-length among numerators and denominators of the entries."""
    best = 0
    for row in A:
        for a in row:
            q = to_fraction(a)
            best = max(best, abs(q.numerator).bit_length(), q.denominator.bit_length())
    return best


def common_denominator(values: Iterable) -> int:
    d = 1
    for v in values:
        d = lcm(d, to_fraction(v).denominator)
    return d


def clear_denominators(A: Sequence[Sequence]) -> tuple[IntMatrix, int]:
    """Return ``(c*A, c)`` with ``c`` the least common denominator of ``A``."""
    c = common_denominator(a for row in A for a in row)
    return [[int(to_fraction(a) * c) for a in row] for row in A], c


def primitive(v: Sequence[int]) -> IntVector:
    """Divide an integer vector by the gcd of its entries (sign kept)."""
    g = 0
    for a in v:
        g = gcd(g, a)
    return list(v) if g in (0, 1) else [a // g for a in v]


def rref(A: Sequence[Sequence]) -> tuple[RatMatrix, list[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    R = [[to_fraction(a) for a in row] for row in A]
    m, n = shape(R)
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [a * inv for a in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def rank_mod_p(A: Sequence[Sequence[int]], p: int = (1 << 61) - 1) -> int:
    """Rank of an integer matrix modulo the prime ``p``; a lower bound on the rank over Q."""
    R = [[a % p for a in row] for row in A]
    m, n = shape(R)
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if R[i][c]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = pow(R[r][c], -1, p)
        R[r] = [a * inv % p for a in R[r]]
        for i in range(r + 1, m):
            f = R[i][c]
            if f:
                R[i] = [(a - f * b) % p for a, b in zip(R[i], R[r])]
        r += 1
    return r


def independent_rows(A: Sequence[Sequence]) -> bool:
    """Exact test that the rows of ``A`` are linearly independent."""
    if not A:
        return True
    if len(A) > len(A[0]):
        return False
    if all(isinstance(a, int) for row in A for a in row) and rank_mod_p(A) == len(A):
        return True
    return rank(A) == len(A)


def nullspace(A: Sequence[Sequence], n: int | None = None) -> RatMatrix:
    """Rational basis (as rows) of ``{x : A x = 0}``."""
    if n is None:
        n = shape(A)[1]
    if not A:
        return identity(n, Fraction(1))
    R, pivots = rref(A)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -R[i][f]
        basis.append(x)
    return basis


def det(A: Sequence[Sequence]):
    """Exact determinant (Bareiss fraction-free elimination for integers)."""
    n, n2 = shape(A)
    if n != n2:
        raise ShapeError("determinant of a non-square matrix")
    if n == 0:
        return 1
    if all(isinstance(a, int) for row in A for a in row):
        M = copy(A)
        sign, prev = 1, 1
        for k in range(n - 1):
            if M[k][k] == 0:
                p = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
                if p is None:
                    return 0
                M[k], M[p] = M[p], M[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            prev = M[k][k]
        return sign * M[n - 1][n - 1]
    M = [[to_fraction(a) for a in row] for row in A]
    d = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if M[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            M[k], M[p] = M[p], M[k]
            d = -d
        d *= M[k][k]
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return d


def inverse(A: Sequence[Sequence]) -> RatMatrix:
    n, n2 = shape(A)
    if n != n2:
        raise ShapeError("inverse of a non-square matrix")
    aug = [[to_fraction(a) for a in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(A)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R]


def solve(A: Sequence[Sequence], b: Sequence) -> RatVector:
    """Solve a square nonsingular system over Q."""
    return matvec(inverse(A), [to_fraction(x) for x in b])


def is_symmetric(A: Sequence[Sequence]) -> bool:
    n, m = shape(A)
    return n == m and all(A[i][j] == A[j][i] for i in range(n) for j in range(i))


def gram_schmidt(vs: Sequence[Sequence]) -> RatMatrix:
    """Unnormalised Gram-Schmidt orthogonalisation over Q.

    Raises ``ValueError`` if the vectors are linearly dependent.
    """
    out: RatMatrix = []
    norms: list[Fraction] = []
    for v in vs:
        w = [to_fraction(a) for a in v]
        for u, nu in zip(out, norms):
            mu = dot(w, u) / nu
            if mu:
                w = [a - mu * b for a, b in zip(w, u)]
        nw = norm2(w)
        if nw == 0:
            raise ContractError("gram_schmidt: input vectors are linearly dependent")
        out.append(w)
        norms.append(nw)
    return out


def fmt(q) -> str:
    """Exact string form: ``"p/q"`` or ``"p"``."""
    q = to_fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
