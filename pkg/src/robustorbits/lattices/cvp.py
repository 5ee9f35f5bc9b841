"""Lattices, the closest vector problem and distance estimates.

The exact solver is a Fincke-Pohst enumeration over an LLL-reduced basis,
seeded with the Babai nearest-plane point as initial radius.  Among several
closest vectors the one whose coefficient vector (in the caller's basis) is
lexicographically smallest is returned, so the answer is deterministic.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ..errors import ContractError, DimensionGuardError
from ..exactlinalg.matrix import (as_int_matrix, as_rat_vector, det, dot, rank,
                                  to_fraction, transpose)
from .lll import _round_half_up, lll_reduce_rows

DEFAULT_MAX_ENUM_DIM = 8
ENV_MAX_ENUM_DIM = "ROBUSTORBITS_MAX_ENUM_DIM"


def max_enum_dim(override: Optional[int] = None) -> int:
    """The dimension guard: explicit override, else the environment, else 8."""
    if override is not None:
        return int(override)
    env = os.environ.get(ENV_MAX_ENUM_DIM)
    if env:
        return int(env)
    return DEFAULT_MAX_ENUM_DIM


@dataclass(frozen=True)
class Lattice:
    """A lattice given by independent generators, stored as rows."""
    basis: tuple[tuple[Fraction, ...], ...]
    ambient_dim: int

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ambient_dim: Optional[int] = None) -> "Lattice":
        rows = tuple(tuple(to_fraction(a) for a in r) for r in rows)
        if ambient_dim is None:
            ambient_dim = len(rows[0]) if rows else 0
        if rows and rank(rows) != len(rows):
            raise ContractError("lattice generators are linearly dependent")
        return cls(rows, ambient_dim)

    @classmethod
    def from_columns(cls, G: Sequence[Sequence]) -> "Lattice":
        return cls.from_rows(transpose(G), len(G))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def generators(self) -> list[list[Fraction]]:
        """Generator matrix with the basis vectors as columns."""
        if not self.basis:
            return [[] for _ in range(self.ambient_dim)]
        return transpose(self.basis)

    def point(self, coeffs: Sequence[int]) -> list[Fraction]:
        out = [Fraction(0)] * self.ambient_dim
        for c, b in zip(coeffs, self.basis):
            if c:
                out = [x + c * y for x, y in zip(out, b)]
        return out


@dataclass(frozen=True)
class CvpInstance:
    t: tuple[Fraction, ...]
    G: tuple[tuple[int, ...], ...]

    def __init__(self, t: Sequence, G: Sequence[Sequence]):
        G = as_int_matrix(G)
        t = as_rat_vector(t)
        m = len(G)
        if any(len(r) != m for r in G) or len(t) != m:
            raise ContractError("CVP instance needs a square G and a target of matching size")
        if m == 0 or det(G) == 0:
            raise ContractError("CVP instance requires det G != 0")
        object.__setattr__(self, "t", tuple(t))
        object.__setattr__(self, "G", tuple(tuple(r) for r in G))

    @property
    def m(self) -> int:
        return len(self.G)

    @property
    def lattice(self) -> Lattice:
        return Lattice.from_columns(self.G)


@dataclass(frozen=True)
class DistanceEstimate:
    """``d <= D <= gamma * d`` for the true distance ``d``.

    ``lower``, when present, is a certified lower bound on ``d`` (at least
    ``D / gamma``); ``squared_exact`` is ``d**2`` when it is rational and known.
    """
    D: Fraction
    gamma: Fraction
    squared_exact: Optional[Fraction] = None
    notes: tuple[str, ...] = field(default=())
    lower: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "D", to_fraction(self.D))
        object.__setattr__(self, "gamma", to_fraction(self.gamma))
        if self.squared_exact is not None:
            object.__setattr__(self, "squared_exact", to_fraction(self.squared_exact))
        if self.lower is not None:
            object.__setattr__(self, "lower", to_fraction(self.lower))
        if self.D < 0:
            raise ContractError("negative distance estimate")
        if self.gamma < 1:
            raise ContractError("approximation factor below 1")

    def sandwiches_squared(self, d2: Fraction) -> bool:
        """Exact check of ``d <= D <= gamma d`` given the true squared distance."""
        D2 = self.D * self.D
        return d2 <= D2 <= self.gamma * self.gamma * d2

    @property
    def lower_bound(self) -> Fraction:
        """The best certified lower bound on ``d`` this estimate carries."""
        base = self.D / self.gamma
        return max(base, self.lower) if self.lower is not None else base


@dataclass
class _Reduced:
    rows: list[list[Fraction]]
    T: list[list[int]]
    star: list[list[Fraction]]
    B: list[Fraction]
    mu: list[list[Fraction]]


def _reduce(basis: Sequence[Sequence]) -> _Reduced:
    rows, T = lll_reduce_rows(basis, with_transform=True)
    star, B = [], []
    mu = [[Fraction(0)] * len(rows) for _ in rows]
    for i, v in enumerate(rows):
        w = [Fraction(a) for a in v]
        for j in range(i):
            m = dot(v, star[j]) / B[j]
            mu[i][j] = m
            if m:
                w = [x - m * y for x, y in zip(w, star[j])]
        star.append(w)
        B.append(dot(w, w))
    return _Reduced(rows, T, star, B, mu)


def _babai_coeffs(red: _Reduced, t: Sequence[Fraction]) -> list[int]:
    r = len(red.rows)
    z = [0] * r
    res = list(t)
    for i in range(r - 1, -1, -1):
        c = _round_half_up(dot(res, red.star[i]) / red.B[i])
        z[i] = c
        if c:
            res = [x - c * y for x, y in zip(res, red.rows[i])]
    return z


def babai_nearest_plane(G_reduced: Sequence[Sequence], t: Sequence) -> list[Fraction]:
    """Babai's nearest-plane point for a basis given as columns of ``G_reduced``.

    If the basis is LLL-reduced the result is within ``2^(r/2)`` of the
    closest lattice vector (r the rank).
    """
    rows = transpose(G_reduced)
    t = as_rat_vector(t)
    if not rows:
        return [Fraction(0)] * len(t)
    star, B = [], []
    for v in rows:
        w = [Fraction(a) for a in v]
        for s, b in zip(star, B):
            m = dot(v, s) / b
            if m:
                w = [x - m * y for x, y in zip(w, s)]
        star.append(w)
        B.append(dot(w, w))
    res = list(t)
    for i in range(len(rows) - 1, -1, -1):
        c = _round_half_up(dot(res, star[i]) / B[i])
        if c:
            res = [x - c * y for x, y in zip(res, rows[i])]
    return [a - b for a, b in zip(t, res)]


def _enumerate(red: _Reduced, y: list[Fraction], radius2: Fraction):
    """All coefficient vectors ``z`` (reduced basis) minimising the in-span distance.

    ``y`` holds the Gram-Schmidt coordinates of the target.  Returns the best
    value and the list of minimisers.
    """
    r = len(red.rows)
    B, mu = red.B, red.mu
    best = [radius2]
    winners: list[list[int]] = []
    z = [0] * r

    def rec(i: int, partial: Fraction) -> None:
        c = y[i] - sum((mu[j][i] * z[j] for j in range(i + 1, r)), Fraction(0))
        room = best[0] - partial
        x0 = _round_half_up(c)
        # walk outward from the nearest integer in both directions
        for direction in (0, 1):
            x = x0 if direction == 0 else x0 - 1
            step = 1 if direction == 0 else -1
            while True:
                diff = x - c
                val = B[i] * diff * diff
                if val > room:
                    break
                z[i] = x
                total = partial + val
                if i == 0:
                    if total < best[0]:
                        best[0] = total
                        winners.clear()
                        winners.append(list(z))
                    elif total == best[0]:
                        winners.append(list(z))
                else:
                    rec(i - 1, total)
                room = best[0] - partial
                x += step
        z[i] = 0

    rec(r - 1, Fraction(0))
    return best[0], winners


def closest_vector(basis: Sequence[Sequence], t: Sequence, max_dim: Optional[int] = None):
    """Exact closest vector to ``t`` in the lattice spanned by the rows of ``basis``.

    ``t`` may lie outside the span of the lattice.  Returns
    ``(alpha, d2, coeffs)`` where ``alpha = sum coeffs_j basis_j`` minimises
    ``||t - alpha||`` and ``d2`` is the exact squared distance.
    """
    t = as_rat_vector(t)
    r = len(basis)
    if r == 0:
        return [Fraction(0)] * len(t), dot(t, t), []
    limit = max_enum_dim(max_dim)
    if r > limit:
        raise DimensionGuardError(r, limit)
    red = _reduce(basis)
    y = [dot(t, s) / b for s, b in zip(red.star, red.B)]
    z0 = _babai_coeffs(red, t)
    # squared in-span distance of the Babai point
    radius2 = Fraction(0)
    for i in range(r - 1, -1, -1):
        c = y[i] - sum((red.mu[j][i] * z0[j] for j in range(i + 1, r)), Fraction(0))
        radius2 += red.B[i] * (z0[i] - c) ** 2
    _, winners = _enumerate(red, y, radius2)
    Tt = transpose(red.T)
    candidates = [[sum(Tt[i][j] * z[j] for j in range(r)) for i in range(r)] for z in winners]
    coeffs = min(candidates)
    alpha = [Fraction(0)] * len(t)
    for c, b in zip(coeffs, basis):
        if c:
            alpha = [x + c * Fraction(v) for x, v in zip(alpha, b)]
    diff = [a - b for a, b in zip(t, alpha)]
    return alpha, dot(diff, diff), coeffs


def cvp_exact(instance: CvpInstance, max_dim: Optional[int] = None) -> tuple[list[Fraction], Fraction]:
    """Exact CVP: the closest lattice vector and the exact squared distance."""
    if instance.m > max_enum_dim(max_dim):
        raise DimensionGuardError(instance.m, max_enum_dim(max_dim))
    alpha, d2, _ = closest_vector(transpose(instance.G), instance.t, max_dim)
    return alpha, d2
