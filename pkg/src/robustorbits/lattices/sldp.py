"""Distance from an affine subspace ``t + U`` to the integer lattice ``Z^n``.

Writing ``H`` for a saturated integer basis of ``U^perp ∩ Z^n`` (so that
``H(Z^n) = Z^k``), the orthogonal projection ``P`` onto ``U^perp`` maps
``Z^n`` onto the lattice generated by the columns of ``H^T (H H^T)^-1`` and

    dist^2(t + U, Z^n) = min over beta in Z^k of (Ht - beta)^T (H H^T)^-1 (Ht - beta).

All three solvers below work from this identity.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Optional, Sequence

from ..errors import ContractError, DimensionGuardError
from ..exactlinalg.certified import sqrt_lower, sqrt_upper
from ..exactlinalg.matrix import (as_int_matrix, as_rat_vector, dot, identity,
                                  independent_rows, inverse, matmul, matvec,
                                  transpose)
from ..exactlinalg.normal_forms import (kernel_lattice_basis, saturate, snf,
                                        solve_integer)
from ..exactlinalg.spectral import eigen_bracket, gram
from .cvp import (DistanceEstimate, Lattice, _babai_coeffs, _reduce,
                  closest_vector, max_enum_dim)
from .lll import _round_half_up


@dataclass(frozen=True)
class SldpInstance:
    """Target ``t`` and independent integer generators of ``U``.

    ``complement`` optionally lists integer vectors spanning ``U^perp``; it
    spares the solvers from computing an integer kernel of a tall ``U``
    (the lifting reduction knows it for free).
    """
    t: tuple[Fraction, ...]
    U_basis: tuple[tuple[int, ...], ...]
    complement: Optional[tuple[tuple[int, ...], ...]] = None

    def __init__(self, t: Sequence, U_basis: Sequence[Sequence] = (),
                 complement: Optional[Sequence[Sequence]] = None):
        t = as_rat_vector(t)
        U = as_int_matrix(U_basis) if len(U_basis) else []
        if any(len(u) != len(t) for u in U):
            raise ContractError("subspace generators must have the same length as t")
        if not independent_rows(U):
            raise ContractError("U_basis must be linearly independent")
        comp = None
        if complement is not None:
            C = as_int_matrix(complement) if len(complement) else []
            if any(len(c) != len(t) for c in C) or not independent_rows(C):
                raise ContractError("complement rows must be independent vectors of length n")
            if len(C) + len(U) != len(t) or any(dot(c, u) for c in C for u in U):
                raise ContractError("complement must span the orthogonal complement of U")
            comp = tuple(tuple(c) for c in C)
        object.__setattr__(self, "t", tuple(t))
        object.__setattr__(self, "U_basis", tuple(tuple(u) for u in U))
        object.__setattr__(self, "complement", comp)

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def k(self) -> int:
        return self.n - len(self.U_basis)


@dataclass(frozen=True)
class SldpWitness:
    """A point ``t + u`` of the affine subspace and an integer point ``alpha``."""
    u: tuple[Fraction, ...]
    alpha: tuple[int, ...]

    def residual2(self, t: Sequence[Fraction]) -> Fraction:
        d = [a + b - c for a, b, c in zip(t, self.u, self.alpha)]
        return dot(d, d)


@dataclass(frozen=True)
class Complement:
    """Saturated integer basis ``H`` of ``U^perp ∩ Z^n`` and ``(H H^T)^-1``."""
    H: tuple[tuple[int, ...], ...]
    gram_inv: tuple[tuple[Fraction, ...], ...]
    n: int

    def project(self, x: Sequence[Fraction]) -> list[Fraction]:
        """Orthogonal projection onto ``U^perp``: ``H^T (H H^T)^-1 H x``."""
        if not self.H:
            return [Fraction(0)] * self.n
        c = matvec(self.gram_inv, matvec(self.H, x))
        out = [Fraction(0)] * self.n
        for ci, h in zip(c, self.H):
            if ci:
                out = [a + ci * b for a, b in zip(out, h)]
        return out

    def generators(self) -> list[list[Fraction]]:
        """Rows ``(H H^T)^-1 H``: the images of a basis of ``Z^k`` in ``P(Z^n)``."""
        return matmul(self.gram_inv, self.H) if self.H else []


@lru_cache(maxsize=256)
def _complement(U_basis: tuple, n: int, hint: Optional[tuple]) -> Complement:
    if not U_basis:
        H = identity(n)
    elif hint is not None:
        H = saturate(hint) if hint else []
    else:
        H = kernel_lattice_basis(U_basis, n)
    if not H:
        return Complement((), (), n)
    Gi = inverse(gram(H))
    return Complement(tuple(tuple(h) for h in H), tuple(tuple(r) for r in Gi), n)


def invariant_complement(instance: SldpInstance) -> Complement:
    return _complement(instance.U_basis, instance.n, instance.complement)


def projected_lattice_basis(U_basis: Sequence[Sequence[int]], n: Optional[int] = None,
                            complement: Optional[Sequence[Sequence[int]]] = None) -> Lattice:
    """Basis of ``P(Z^n)``, ``P`` the orthogonal projection onto ``U^perp``.

    The generators are the columns of ``H^T (H H^T)^-1``; rank ``n - dim U``.
    """
    U = tuple(tuple(u) for u in U_basis)
    if n is None:
        if not U:
            raise ContractError("ambient dimension needed for an empty U")
        n = len(U[0])
    hint = tuple(tuple(c) for c in complement) if complement is not None else None
    comp = _complement(U, n, hint)
    if not comp.H:
        return Lattice((), n)
    return Lattice.from_rows(comp.generators(), n)


def project_onto_span(U_basis: Sequence[Sequence[int]], x: Sequence[Fraction]) -> list[Fraction]:
    """Orthogonal projection of ``x`` onto ``U = span(U_basis)``."""
    if not U_basis:
        return [Fraction(0)] * len(x)
    G = inverse(gram(U_basis))
    c = matvec(G, [dot(u, x) for u in U_basis])
    out = [Fraction(0)] * len(x)
    for ci, u in zip(c, U_basis):
        out = [a + ci * b for a, b in zip(out, u)]
    return out


def _witness(inst: SldpInstance, comp: Complement, beta: Sequence[int]) -> SldpWitness:
    """Lift ``beta`` to ``alpha`` with ``H alpha = beta`` and pick ``u = P_U(alpha - t)``."""
    if comp.H:
        alpha = solve_integer(comp.H, beta)
        if alpha is None:  # impossible for a saturated H
            raise AssertionError("H(Z^n) != Z^k")
    else:
        alpha = [0] * inst.n
    diff = [Fraction(a) - b for a, b in zip(alpha, inst.t)]
    perp = comp.project(diff)
    return SldpWitness(tuple(a - b for a, b in zip(diff, perp)), tuple(alpha))


def _rounding_witness(inst: SldpInstance) -> tuple[Fraction, SldpWitness]:
    alpha = [_round_half_up(x) for x in inst.t]
    d2 = sum((x - a) ** 2 for x, a in zip(inst.t, alpha))
    return d2, SldpWitness(tuple([Fraction(0)] * inst.n), tuple(alpha))


def sldp_exact(instance: SldpInstance, max_dim: Optional[int] = None) -> Fraction:
    """Exact squared distance ``dist^2(t + U, Z^n)``."""
    return sldp_exact_witness(instance, max_dim)[0]


def sldp_exact_witness(instance: SldpInstance, max_dim: Optional[int] = None):
    """Exact squared distance together with an optimal witness.

    Enumerates in the rank-``k`` lattice ``P(Z^n)``, so the guard applies to
    ``k = n - dim U``; ``U = {0}`` is solved by rounding.
    """
    if not instance.U_basis:
        return _rounding_witness(instance)
    comp = invariant_complement(instance)
    if not comp.H:
        return Fraction(0), _witness(instance, comp, [])
    k = len(comp.H)
    limit = max_enum_dim(max_dim)
    if k > limit:
        raise DimensionGuardError(k, limit)
    pt = comp.project(instance.t)
    _, d2, coeffs = closest_vector(comp.generators(), pt, max_dim)
    return d2, _witness(instance, comp, coeffs)


def condition_bounds(H: Sequence[Sequence[int]], rel: Fraction = Fraction(1, 1 << 40)):
    """Tight rational brackets on ``lambda_min`` and ``lambda_max`` of ``H H^T``."""
    G = gram(H)
    return eigen_bracket(G, "min", rel), eigen_bracket(G, "max", rel)


def sldp_h_based(instance: SldpInstance, bits: int = 64) -> tuple[DistanceEstimate, SldpWitness]:
    """Polynomial-time estimate with factor ``gamma = 2 sigma_max(H) / sigma_min(H)``.

    ``D = 2 dist(Ht, Z^k) / D_sigma`` with ``sigma_min <= D_sigma <= 2 sigma_min``;
    the witness rounds ``Ht`` to ``beta`` and lifts ``beta`` through ``H``.
    """
    comp = invariant_complement(instance)
    if not comp.H:
        return (DistanceEstimate(Fraction(0), Fraction(1), Fraction(0)),
                _witness(instance, comp, []))
    Ht = matvec(comp.H, instance.t)
    beta = [_round_half_up(x) for x in Ht]
    r = [a - b for a, b in zip(Ht, beta)]
    witness = _witness(instance, comp, beta)
    dist_Ht2 = dot(r, r)
    (a_min, b_min), (a_max, b_max) = condition_bounds(comp.H)
    # gamma >= 2 sigma_max / sigma_min, tight to about 2^-40
    gamma = 2 * sqrt_upper(b_max, bits) / sqrt_lower(a_min, bits)
    if dist_Ht2 == 0:
        return DistanceEstimate(Fraction(0), gamma, Fraction(0)), witness
    # D_sigma^2 in [lambda_min, 4 lambda_min]: from a ratio-2 bracket with a small upward nudge
    _, b2 = eigen_bracket(gram(comp.H), "min", Fraction(1))
    D_sigma2 = b2 * (1 + Fraction(1, 1 << 40))
    D = sqrt_upper(4 * dist_Ht2 / D_sigma2, bits)
    return DistanceEstimate(D, gamma), witness


def lll_gamma(n: int, bits: int = 64) -> Fraction:
    """Rational upper bound on ``2^(n/2 + 1)``."""
    if n % 2 == 0:
        return Fraction(2 ** (n // 2 + 1))
    return sqrt_upper(Fraction(2 ** (n + 2)), bits)


def sldp_lll(instance: SldpInstance, bits: int = 64) -> tuple[DistanceEstimate, SldpWitness]:
    """LLL plus Babai on the projected lattice; ``gamma = 2^(n/2 + 1)``."""
    gamma = lll_gamma(instance.n, bits)
    if not instance.U_basis:
        d2, witness = _rounding_witness(instance)
        return DistanceEstimate(sqrt_upper(d2, bits), gamma, d2), witness
    comp = invariant_complement(instance)
    if not comp.H:
        return DistanceEstimate(Fraction(0), gamma, Fraction(0)), _witness(instance, comp, [])
    pt = comp.project(instance.t)
    # Babai on the reduced basis, coefficients mapped back to the H-basis
    rd = _reduce(comp.generators())
    z = _babai_coeffs(rd, pt)
    k = len(z)
    beta = [sum(rd.T[i][j] * z[i] for i in range(k)) for j in range(k)]
    witness = _witness(instance, comp, beta)
    d2 = witness.residual2(instance.t)
    exact = d2 if d2 == 0 else None
    return DistanceEstimate(sqrt_upper(d2, bits), gamma, exact), witness


def sldp_separation(instance: SldpInstance) -> Fraction:
    """A positive rational ``s`` such that ``dist(t + U, Z^n)`` is 0 or at least ``s``.

    With ``q`` the common denominator of ``t``, the vector ``q (Ht - beta)``
    is integral and ``(H H^T)^-1 = adj / det``, so a nonzero squared distance
    is at least ``1 / (q^2 det(H H^T))``.
    """
    from ..exactlinalg.matrix import common_denominator, det

    comp = invariant_complement(instance)
    q = common_denominator(instance.t)
    D = det(gram(comp.H)) if comp.H else 1
    return sqrt_lower(Fraction(1, q * q * D), 16)


def affine_lattice_nonempty(t: Sequence, U_basis: Sequence[Sequence[int]],
                            complement: Optional[Sequence[Sequence[int]]] = None) -> bool:
    """Exact decision of ``(t + U) ∩ Z^n != ∅`` via the Smith form of the U-columns.

    With ``S = P A Q`` for ``A`` the matrix whose columns span ``U``, the
    condition becomes: ``(P t)_i`` is an integer for every ``i`` beyond the
    rank of ``A``.
    """
    t = as_rat_vector(t)
    if not U_basis:
        return all(x.denominator == 1 for x in t)
    if complement is not None:
        # equivalent test: H t is integral for a saturated basis H of U^perp ∩ Z^n
        H = saturate(complement) if len(complement) else []
        return all(x.denominator == 1 for x in matvec(H, t))
    A = transpose(as_int_matrix(U_basis))  # n x r
    S, P, _ = snf(A)
    r = sum(1 for i in range(min(len(S), len(S[0]))) if S[i][i])
    Pt = matvec(P, t)
    return all(x.denominator == 1 for x in Pt[r:])
