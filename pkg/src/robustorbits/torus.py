"""Diagonal torus actions given by an integer weight matrix.

The torus ``(C^x)^d`` acts on ``C^n`` by ``(t . v)_j = v_j prod_i t_i^{M_ij}``.
Two vectors with nonzero entries lie in the same orbit exactly when all
invariant Laurent monomials ``x^alpha`` (``M alpha = 0``) agree on them, and
it suffices to check a lattice basis of those exponents.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import ContractError
from .exactlinalg.certified import floor_div
from .exactlinalg.gaussian import GaussianRational, as_gaussian_vector
from .exactlinalg.lp import simplex_max
from .exactlinalg.matrix import (as_int_matrix, as_rat_matrix, as_rat_vector,
                                 bit_length, rank, to_fraction,
                                 transpose)
from .exactlinalg.normal_forms import invariant_factors, kernel_lattice_basis
from .logspace.elementary import arg_turns, exp_complex, log_certified


@dataclass(frozen=True)
class TorusAction:
    """Weight matrix ``M`` (d x n); its columns are the weights."""
    M: tuple[tuple[int, ...], ...]

    def __init__(self, M: Sequence[Sequence[int]]):
        M = as_int_matrix(M)
        if not M or not M[0]:
            raise ContractError("weight matrix must be at least 1 x 1")
        if any(len(r) != len(M[0]) for r in M):
            raise ContractError("weight matrix rows have different lengths")
        object.__setattr__(self, "M", tuple(tuple(r) for r in M))

    @property
    def d(self) -> int:
        return len(self.M)

    @property
    def n(self) -> int:
        return len(self.M[0])

    @property
    def weights(self) -> list[tuple[int, ...]]:
        return [tuple(row[j] for row in self.M) for j in range(self.n)]

    @property
    def B(self) -> int:
        return bit_length(self.M)

    @property
    def rank(self) -> int:
        return rank(self.M)


@dataclass(frozen=True)
class InvariantMatrix:
    """Rows form a Z-basis of ``{alpha in Z^n : M alpha = 0}``."""
    H: tuple[tuple[int, ...], ...]
    n: int

    @property
    def k(self) -> int:
        return len(self.H)

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.H]


@lru_cache(maxsize=512)
def _invariant_rows(M: tuple) -> tuple:
    return tuple(tuple(r) for r in kernel_lattice_basis(M, len(M[0])))


def invariant_matrix(action: TorusAction, verify: bool = True) -> InvariantMatrix:
    """A reduced basis of the invariant lattice, checked to be saturated."""
    H = _invariant_rows(action.M)
    if verify and H:
        if any(sum(a * b for a, b in zip(mrow, h)) for mrow in action.M for h in H):
            raise AssertionError("invariant rows are not in the kernel")
        if any(f != 1 for f in invariant_factors(H)):
            raise AssertionError("invariant lattice basis is not saturated")
    return InvariantMatrix(H, action.n)


def _nonzero(v, name: str = "v") -> list[GaussianRational]:
    v = as_gaussian_vector(v)
    if any(not x for x in v):
        raise ContractError(f"{name} has a zero component")
    return v


def act_rational(action: TorusAction, t, v) -> list[GaussianRational]:
    """Exact action of a torus element with Gaussian-rational coordinates."""
    t = _nonzero(t, "t")
    v = as_gaussian_vector(v)
    if len(t) != action.d or len(v) != action.n:
        raise ContractError("dimension mismatch")
    out = []
    for j, vj in enumerate(v):
        num = den = GaussianRational(1)
        for i, ti in enumerate(t):
            e = action.M[i][j]
            if e > 0:
                num = num * ti ** e
            elif e < 0:
                den = den * ti ** (-e)
        out.append(vj * num / den)
    return out


def act(action: TorusAction, x, v, eps=Fraction(1, 1 << 64)) -> list[GaussianRational]:
    """``e^{y + 2 pi i z} . v`` with relative error below ``eps`` in every entry.

    ``x = (y, z)`` with rational ``y, z`` in ``Q^d``.  Entries whose exponent
    is purely a quarter turn are exact, so ``x = 0`` returns ``v`` itself.
    """
    eps = to_fraction(eps)
    if eps <= 0:
        raise ContractError("precision must be positive")
    y, z = (as_rat_vector(part) for part in x)
    v = as_gaussian_vector(v)
    if len(y) != action.d or len(z) != action.d or len(v) != action.n:
        raise ContractError("dimension mismatch")
    bits = max(1, floor_div(Fraction(1) / eps).bit_length() + 1)
    out = []
    for j, vj in enumerate(v):
        a = sum((y[i] * action.M[i][j] for i in range(action.d)), Fraction(0))
        b = sum((z[i] * action.M[i][j] for i in range(action.d)), Fraction(0))
        if (a or b) and not vj:
            raise ContractError("zero component with a nonzero weight")
        out.append(vj * exp_complex(a, b, bits) if (a or b) else vj)
    return out


def _exact_monomial_equal(v, w, alpha) -> bool:
    lhs = rhs = GaussianRational(1)
    for vj, wj, a in zip(v, w, alpha):
        a = int(a)
        if a > 0:
            lhs = lhs * vj ** a
            rhs = rhs * wj ** a
        elif a < 0:
            lhs = lhs * wj ** (-a)
            rhs = rhs * vj ** (-a)
    return lhs == rhs


# Precisions tried by the log-space refutation before exact arithmetic.
_REFUTE_BITS = (64, 256, 1024)


def _log_parts(v, bits: int):
    """Certified ``log|v_j|^2`` and ``Arg v_j`` in turns."""
    return ([log_certified(x.abs2(), bits) for x in v],
            [arg_turns(x.re, x.im, bits) for x in v])


def _refuted(lv, lw, alpha) -> bool:
    """True when the certified logs prove ``x^alpha(v) != x^alpha(w)``.

    Equality forces ``sum alpha_j (log|v_j|^2 - log|w_j|^2) = 0`` and
    ``sum alpha_j (Arg v_j - Arg w_j)`` to be an integer number of turns.
    """
    re = im = None
    for (mv, av), (mw, aw), a in zip(zip(*lv), zip(*lw), alpha):
        if not a:
            continue
        dr, di = (mv - mw) * int(a), (av - aw) * int(a)
        re = dr if re is None else re + dr
        im = di if im is None else im + di
    if re is None:
        return False
    if re.lo > 0 or re.hi < 0:
        return True
    return floor_div(im.lo) == floor_div(im.hi) and im.lo > floor_div(im.lo)


def _monomials_equal(v, w, rows) -> bool:
    rows = [[int(a) for a in h] for h in rows]
    if not rows:
        return True
    if all(sum(abs(a) for a in h) <= 4 for h in rows):
        return all(_exact_monomial_equal(v, w, h) for h in rows)
    for bits in _REFUTE_BITS:
        lv, lw = _log_parts(v, bits), _log_parts(w, bits)
        if any(_refuted(lv, lw, h) for h in rows):
            return False
    return all(_exact_monomial_equal(v, w, h) for h in rows)


def monomial_equal(v, w, alpha: Sequence[int]) -> bool:
    """Exact test of ``prod v_j^alpha_j == prod w_j^alpha_j``.

    Cross-multiplied so no division happens:
    ``prod_{a>0} v^a * prod_{a<0} w^-a == prod_{a>0} w^a * prod_{a<0} v^-a``.
    Large exponents are first screened in certified log space, which can
    only ever prove inequality; the final word is exact arithmetic.
    """
    v, w = _nonzero(v, "v"), _nonzero(w, "w")
    if len(v) != len(w) or len(v) != len(alpha):
        raise ContractError("dimension mismatch")
    return _monomials_equal(v, w, [alpha])


def orbit_equal_T(action: TorusAction, v, w, H=None) -> bool:
    """Same T-orbit iff every invariant monomial (rows of ``H``) agrees.

    ``H`` may be passed when a saturated kernel basis is already known.
    """
    v, w = _nonzero(v, "v"), _nonzero(w, "w")
    if len(v) != action.n or len(w) != action.n:
        raise ContractError("vectors must have length n")
    rows = H if H is not None else invariant_matrix(action, verify=False).H
    return _monomials_equal(v, w, rows)


def orbit_equal_K(action: TorusAction, v, w, H=None) -> bool:
    v, w = _nonzero(v, "v"), _nonzero(w, "w")
    if len(v) != len(w) or any(a.abs2() != b.abs2() for a, b in zip(v, w)):
        return False
    return orbit_equal_T(action, v, w, H)


@dataclass(frozen=True)
class OriginPosition:
    """Where a point sits relative to the weight polytope.

    ``position`` is ``"interior"``, ``"boundary"`` or ``"outside"`` (interior
    meaning the topological interior in ``R^d``).  ``degenerate`` is set when
    the weights do not affinely span ``R^d``, in which case the polytope has
    no interior at all and a point inside it is reported as boundary.
    """
    position: str
    degenerate: bool

    @property
    def interior(self) -> bool:
        return self.position == "interior"


def point_position(weights: Sequence[Sequence], p: Sequence) -> OriginPosition:
    """Classify ``p`` against ``conv(weights)`` by exact linear programming.

    ``p`` is in the relative interior iff ``p = sum l_i w_i`` with all
    ``l_i > 0`` and ``sum l_i = 1``; this is decided by maximising a common
    lower bound ``s`` on the ``l_i``.
    """
    W = as_rat_matrix(weights)          # rows are weights
    p = as_rat_vector(p)
    n, d = len(W), len(p)
    shifted = [[W[i][r] - p[r] for i in range(n)] for r in range(d)]   # d x n
    degenerate = rank(shifted + [[1] * n]) < d + 1
    # variables (mu_1..mu_n, s):  lambda = mu + s
    A = [row + [sum(row)] for row in shifted] + [[1] * n + [n]]
    b = [0] * d + [1]
    res = simplex_max([0] * n + [1], A, b)
    if res.status == "infeasible":
        return OriginPosition("outside", degenerate)
    if res.status == "unbounded":   # cannot happen: the last row bounds s
        raise AssertionError("unbounded polytope program")
    if res.value > 0 and not degenerate:
        return OriginPosition("interior", False)
    return OriginPosition("boundary", degenerate)


def polytope_origin_position(action: TorusAction) -> OriginPosition:
    return point_position(action.weights, [0] * action.d)


def translate_log(action: TorusAction, rho: Sequence, y: Sequence) -> list[Fraction]:
    """``rho + M^T y``: the real log-coordinates of ``e^y . v``."""
    Mt = transpose(action.M)
    return [to_fraction(r) + sum((a * to_fraction(b) for a, b in zip(col, y)), Fraction(0))
            for r, col in zip(rho, Mt)]


__all__ = [
    "InvariantMatrix", "OriginPosition", "TorusAction", "act", "act_rational",
    "invariant_matrix", "monomial_equal", "orbit_equal_K", "orbit_equal_T",
    "point_position", "polytope_origin_position", "translate_log",
]
