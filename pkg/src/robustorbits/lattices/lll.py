"""Exact LLL reduction over the rationals (delta = 3/4 by default)."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..errors import ContractError
from ..exactlinalg.matrix import dot, identity, to_fraction, transpose


def _round_half_up(q: Fraction) -> int:
    return (2 * q.numerator + q.denominator) // (2 * q.denominator)


class _GramSchmidt:
    """Gram-Schmidt data kept in sync with a basis during LLL."""

    def __init__(self, b: list[list]):
        self.mu = [[Fraction(0)] * len(b) for _ in b]
        self.B: list[Fraction] = []
        star: list[list[Fraction]] = []
        for i, v in enumerate(b):
            w = [Fraction(a) for a in v]
            for j in range(i):
                m = dot(v, star[j]) / self.B[j]
                self.mu[i][j] = m
                if m:
                    w = [x - m * y for x, y in zip(w, star[j])]
            nw = dot(w, w)
            if nw == 0:
                raise ContractError("lattice generators are linearly dependent")
            star.append(w)
            self.B.append(nw)


def lll_reduce_rows(rows: Sequence[Sequence], delta: Fraction = Fraction(3, 4),
                    with_transform: bool = False):
    """LLL-reduce the lattice spanned by the given (independent) row vectors.

    Returns the reduced rows, and with ``with_transform`` also the unimodular
    ``T`` such that ``reduced = T * rows``.
    """
    b = [list(r) for r in rows]
    n = len(b)
    T = identity(n) if with_transform else None
    if n == 0:
        return (b, T) if with_transform else b
    gs = _GramSchmidt(b)
    mu, B = gs.mu, gs.B

    def size_reduce(k: int, l: int) -> None:
        m = mu[k][l]
        if abs(m) * 2 <= 1:
            return
        q = _round_half_up(m)
        b[k] = [x - q * y for x, y in zip(b[k], b[l])]
        if T is not None:
            T[k] = [x - q * y for x, y in zip(T[k], T[l])]
        mu[k][l] -= q
        for i in range(l):
            mu[k][i] -= q * mu[l][i]

    k = 1
    while k < n:
        size_reduce(k, k - 1)
        m = mu[k][k - 1]
        if B[k] < (delta - m * m) * B[k - 1]:
            b[k], b[k - 1] = b[k - 1], b[k]
            if T is not None:
                T[k], T[k - 1] = T[k - 1], T[k]
            for j in range(k - 1):
                mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
            Bn = B[k] + m * m * B[k - 1]
            mu[k][k - 1] = m * B[k - 1] / Bn
            B[k] = B[k - 1] * B[k] / Bn
            B[k - 1] = Bn
            for i in range(k + 1, n):
                t = mu[i][k]
                mu[i][k] = mu[i][k - 1] - m * t
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                size_reduce(k, l)
            k += 1
    return (b, T) if with_transform else b


def lll_reduce(G: Sequence[Sequence]) -> list[list]:
    """LLL-reduce a generator matrix whose *columns* span the lattice.

    The result has the same shape and its columns are an LLL-reduced basis
    (delta = 3/4) of the same lattice.
    """
    cols = [[to_fraction(a) for a in c] for c in transpose(G)]
    red = lll_reduce_rows(cols)
    out = transpose(red)
    if all(a.denominator == 1 for row in out for a in row):
        out = [[int(a) for a in row] for row in out]
    return out


def is_lll_reduced(rows: Sequence[Sequence], delta: Fraction = Fraction(3, 4)) -> bool:
    """Check the size-reduction and Lovasz conditions exactly."""
    if len(rows) < 2:
        return True
    gs = _GramSchmidt([list(r) for r in rows])
    mu, B = gs.mu, gs.B
    for i in range(len(rows)):
        for j in range(i):
            if abs(mu[i][j]) * 2 > 1:
                return False
    return all(B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1] for k in range(1, len(rows)))
