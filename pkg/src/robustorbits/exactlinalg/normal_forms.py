"""Hermite and Smith normal forms over Z, integer kernels and integer solving.

All routines work on plain lists of ``int`` and return fresh matrices.
Transformation matrices are tracked so callers can check unimodularity.
"""
from __future__ import annotations

from typing import Sequence

from ..errors import ContractError
from .matrix import IntMatrix, identity, primitive, shape, to_int, transpose


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``g = gcd(a, b) >= 0`` and ``a*x + b*y = g``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _combine_rows(M: list, i: int, j: int, x: int, y: int, u: int, v: int) -> None:
    """Replace rows ``i, j`` of ``M`` by ``x*Ri + y*Rj`` and ``u*Ri + v*Rj`` in place."""
    ri, rj = M[i], M[j]
    M[i] = [x * a + y * b for a, b in zip(ri, rj)]
    M[j] = [u * a + v * b for a, b in zip(ri, rj)]


def hnf(A: Sequence[Sequence[int]], with_inverse: bool = False):
    """Row Hermite normal form.

    Returns ``(H, U)`` with ``H = U A``, ``det U = ±1``.  ``H`` is in row
    echelon form, pivots are positive, entries above a pivot lie in
    ``[0, pivot)`` and zero rows come last.  With ``with_inverse`` the
    inverse ``U^-1`` is tracked too and ``(H, U, U^-1)`` is returned.
    """
    H = [[to_int(a) for a in row] for row in A]
    m, n = shape(H)
    U = identity(m)
    Ui = identity(m) if with_inverse else None

    def col_combine(r, i, x, y, u, v):
        # U^-1 <- U^-1 E^-1 with E^-1 = [[v, -y], [-u, x]] on columns r, i
        for row in Ui:
            a, b = row[r], row[i]
            row[r], row[i] = v * a - u * b, -y * a + x * b

    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if H[i][c] == 0:
                continue
            a, b = H[r][c], H[i][c]
            g, x, y = _xgcd(a, b)
            # [[x, y], [-b/g, a/g]] has determinant 1
            _combine_rows(H, r, i, x, y, -b // g, a // g)
            _combine_rows(U, r, i, x, y, -b // g, a // g)
            if Ui is not None:
                col_combine(r, i, x, y, -b // g, a // g)
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-a for a in H[r]]
            U[r] = [-a for a in U[r]]
            if Ui is not None:
                for row in Ui:
                    row[r] = -row[r]
        p = H[r][c]
        for i in range(r):
            q = H[i][c] // p
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                if Ui is not None:
                    for row in Ui:
                        row[r] += q * row[i]
        r += 1
    if with_inverse:
        return H, U, Ui
    return H, U


def hnf_basis(A: Sequence[Sequence[int]]) -> IntMatrix:
    """Nonzero rows of the HNF: the canonical basis of the row lattice of ``A``."""
    H, _ = hnf(A)
    return [row for row in H if any(row)]


def snf(A: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form.

    Returns ``(S, U, V)`` with ``S = U A V`` diagonal, ``S[i][i] >= 0`` and
    ``S[i][i]`` dividing ``S[i+1][i+1]``; ``U`` and ``V`` are unimodular.
    """
    S = [[to_int(a) for a in row] for row in A]
    m, n = shape(S)
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (S, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        S[dst] = [a + q * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for M in (S, V):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        entries = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            changed = False
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // S[t][t]))
                    if S[i][t]:
                        swap_rows(i, t)
                        changed = True
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // S[t][t]))
                    if S[t][j]:
                        swap_cols(j, t)
                        changed = True
            if changed:
                continue
            p = S[t][t]
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if S[t][t] < 0:
            S[t] = [-a for a in S[t]]
            U[t] = [-a for a in U[t]]
    return S, U, V


def invariant_factors(A: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form."""
    S, _, _ = snf(A)
    return [S[i][i] for i in range(min(shape(S))) if S[i][i]]


def is_saturated(B: Sequence[Sequence[int]]) -> bool:
    """True iff the rows of ``B`` are independent and span a saturated sublattice.

    Equivalently ``B (Z^n) = Z^k``: every invariant factor equals 1.
    """
    if not B:
        return True
    f = invariant_factors(B)
    return len(f) == len(B) and all(d == 1 for d in f)


def kernel_lattice_basis(M: Sequence[Sequence[int]], n: int | None = None,
                         reduce: bool = True) -> IntMatrix:
    """Z-basis (as rows) of ``{a in Z^n : M a = 0}``.

    Computed from the HNF of ``M^T``: if ``U M^T = H`` with ``U`` unimodular
    then the rows of ``U`` that meet the zero rows of ``H`` form a basis of
    the integer kernel, which is automatically saturated.  The basis is then
    LLL-reduced to keep the entries small.
    """
    M = [[to_int(a) for a in row] for row in M]
    if n is None:
        n = shape(M)[1]
    if not M or not any(any(r) for r in M):
        return identity(n)
    H, U = hnf(transpose(M))
    basis = [U[i] for i in range(n) if not any(H[i])]
    if reduce and len(basis) > 1:
        from ..lattices.lll import lll_reduce_rows
        basis = lll_reduce_rows(basis)
    return [_sign_normalize(b) for b in basis]


def saturate(B: Sequence[Sequence[int]], reduce: bool = True) -> IntMatrix:
    """Z-basis of ``span_Q(rows of B) ∩ Z^n`` for independent integer rows ``B``.

    If ``U B^T = H`` is the HNF then ``B U^T = [H_top^T | 0]``; an integer
    vector in the row space is ``[w, 0] U^-T`` with ``w`` integral, so the
    first ``r`` columns of ``U^-1`` (transposed) form the basis.
    """
    B = [[to_int(a) for a in row] for row in B]
    r, n = shape(B)
    if r == 0:
        return []
    H, _, Ui = hnf(transpose(B), with_inverse=True)
    if sum(1 for row in H if any(row)) != r:
        raise ContractError("saturate: rows are linearly dependent")
    basis = [[Ui[i][j] for i in range(n)] for j in range(r)]
    if reduce and r > 1:
        from ..lattices.lll import lll_reduce_rows
        basis = lll_reduce_rows(basis)
    return [_sign_normalize(b) for b in basis]


def _sign_normalize(v: list[int]) -> list[int]:
    """Make the first nonzero entry positive."""
    for a in v:
        if a:
            return v if a > 0 else [-x for x in v]
    return v


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int]) -> list[int] | None:
    """An integer solution of ``A x = b`` or ``None`` if none exists."""
    A = [[to_int(a) for a in row] for row in A]
    b = [to_int(x) for x in b]
    m, n = shape(A)
    if m == 0:
        return [0] * n
    # U A^T = H  =>  A U^T = H^T, a column echelon form
    H, U = hnf(transpose(A))
    Ht = transpose(H)  # m x n, column echelon
    y = [0] * n
    residual = list(b)
    col = 0
    for i in range(m):
        if col < n and Ht[i][col] != 0:
            p = Ht[i][col]
            if residual[i] % p:
                return None
            y[col] = residual[i] // p
            residual = [r - y[col] * Ht[k][col] for k, r in enumerate(residual)]
            col += 1
        elif residual[i] != 0:
            return None
    Ut = transpose(U)
    return [sum(Ut[i][j] * y[j] for j in range(n)) for i in range(n)]


__all__ = [
    "hnf", "hnf_basis", "snf", "invariant_factors", "is_saturated",
    "kernel_lattice_basis", "saturate", "solve_integer", "primitive",
]
