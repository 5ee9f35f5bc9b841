"""A small exact simplex method over the rationals.

Dense tableau, two phases, Bland's rule (so it always terminates).  Meant
for the handful of tiny feasibility questions about weight polytopes, not
for large programs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .matrix import to_fraction


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    value: Optional[Fraction] = None
    x: Optional[tuple[Fraction, ...]] = None


def _pivot(T: list[list[Fraction]], r: int, c: int) -> None:
    row = T[r]
    p = row[c]
    if p != 1:
        T[r] = row = [a / p for a in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                T[i] = [a - f * b for a, b in zip(other, row)]


def _run(T, basis, cost, columns) -> str:
    """Maximise ``cost . x`` over the tableau; returns "optimal" or "unbounded"."""
    m = len(T)
    while True:
        entering = None
        for j in columns:
            if j in basis:
                continue
            red = cost[j] - sum((cost[basis[i]] * T[i][j] for i in range(m)), Fraction(0))
            if red > 0:
                entering = j
                break
        if entering is None:
            return "optimal"
        best = None
        for i in range(m):
            a = T[i][entering]
            if a > 0:
                ratio = T[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        r = best[1]
        _pivot(T, r, entering)
        basis[r] = entering


def simplex_max(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LpResult:
    """Maximise ``c.x`` subject to ``A x = b`` and ``x >= 0``, exactly."""
    c = [to_fraction(v) for v in c]
    n = len(c)
    rows = []
    for row, rhs in zip(A, b):
        row = [to_fraction(v) for v in row]
        rhs = to_fraction(rhs)
        if rhs < 0:
            row, rhs = [-v for v in row], -rhs
        rows.append((row, rhs))
    m = len(rows)
    # phase one: artificial variables n .. n+m-1
    T = [row + [Fraction(int(i == j)) for j in range(m)] + [rhs]
         for i, (row, rhs) in enumerate(rows)]
    basis = [n + i for i in range(m)]
    cost1 = [Fraction(0)] * n + [Fraction(-1)] * m
    _run(T, basis, cost1, range(n + m))
    if any(T[i][-1] != 0 for i in range(m) if basis[i] >= n):
        return LpResult("infeasible")
    # drive remaining (zero) artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= n:
            j = next((j for j in range(n) if T[i][j] != 0), None)
            if j is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, i, j)
            basis[i] = j
        i += 1
    T = [row[:n] + [row[-1]] for row in T]
    status = _run(T, basis, c + [Fraction(0)], range(n))
    if status == "unbounded":
        return LpResult("unbounded")
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        x[j] = T[i][-1]
    return LpResult("optimal", sum((a * v for a, v in zip(c, x)), Fraction(0)), tuple(x))


def feasible(A: Sequence[Sequence], b: Sequence) -> bool:
    """Is ``{x >= 0 : A x = b}`` nonempty?"""
    n = len(A[0]) if A else 0
    return simplex_max([0] * n, A, b).status != "infeasible"
