"""JSON encoding of the domain types.

Rationals travel as exact strings ``"p/q"`` (or ``"p"``), never as floats.
Gaussian rationals become ``{"re": ..., "im": ...}``.  Decoding accepts the
same shapes plus plain JSON integers and decimal literals such as ``0.4``,
which are read exactly (``0.4 == 2/5``).  ``dumps`` sorts keys so identical
inputs always produce byte-identical output.
"""
from __future__ import annotations

import json
from fractions import Fraction
from functools import singledispatch
from typing import Any

from .errors import ContractError
from .exactlinalg.certified import Certified, CertifiedComplex
from .exactlinalg.gaussian import GaussianRational
from .lattices.cvp import CvpInstance, DistanceEstimate
from .lattices.sldp import SldpInstance, SldpWitness
from .lifting import LiftResult
from .logspace.metric import QuotientPoint


def parse_rational(x: Any) -> Fraction:
    if isinstance(x, bool):
        raise ContractError("booleans are not numbers")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # decimal literals from JSON: read the shortest repr exactly
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ContractError(f"not a rational number: {x!r}") from exc
    if isinstance(x, Fraction):
        return x
    raise ContractError(f"not a rational number: {x!r}")


def parse_int(x: Any) -> int:
    q = parse_rational(x)
    if q.denominator != 1:
        raise ContractError(f"expected an integer, got {x!r}")
    return q.numerator


def parse_gaussian(x: Any) -> GaussianRational:
    if isinstance(x, dict):
        unknown = set(x) - {"re", "im"}
        if unknown:
            raise ContractError(f"unexpected keys in Gaussian rational: {sorted(unknown)}")
        return GaussianRational(parse_rational(x.get("re", 0)), parse_rational(x.get("im", 0)))
    if isinstance(x, list) and len(x) == 2:
        return GaussianRational(parse_rational(x[0]), parse_rational(x[1]))
    return GaussianRational(parse_rational(x))


def parse_vector(xs: Any) -> list[Fraction]:
    if not isinstance(xs, list):
        raise ContractError("expected a list of numbers")
    return [parse_rational(x) for x in xs]


def parse_int_matrix(rows: Any) -> list[list[int]]:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise ContractError("expected a list of integer rows")
    return [[parse_int(x) for x in r] for r in rows]


def parse_gaussian_vector(xs: Any) -> list[GaussianRational]:
    if not isinstance(xs, list):
        raise ContractError("expected a list of (Gaussian) rationals")
    return [parse_gaussian(x) for x in xs]


def rat(q) -> str:
    return str(Fraction(q))


def int_rows(A) -> list[list[str]]:
    """Integer matrices travel as decimal strings, like rationals."""
    return [[str(int(x)) for x in r] for r in A]


@singledispatch
def to_json(obj) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, (list, tuple)):
        return [to_json(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    raise TypeError(f"cannot serialise {type(obj).__name__}")


@to_json.register
def _(obj: Fraction):
    return rat(obj)


@to_json.register
def _(obj: GaussianRational):
    return {"re": rat(obj.re), "im": rat(obj.im)}


@to_json.register
def _(obj: Certified):
    return {"value": rat(obj.value), "err": rat(obj.err)}


@to_json.register
def _(obj: CertifiedComplex):
    return {"re": to_json(obj.re), "im": to_json(obj.im)}


@to_json.register
def _(obj: DistanceEstimate):
    return {
        "D": rat(obj.D),
        "gamma": rat(obj.gamma),
        "squared_exact": None if obj.squared_exact is None else rat(obj.squared_exact),
        "lower": None if obj.lower is None else rat(obj.lower),
        "notes": list(obj.notes),
    }


@to_json.register
def _(obj: QuotientPoint):
    return {"rho": [rat(x) for x in obj.rho], "theta": [rat(x) for x in obj.theta],
            "err": rat(obj.err)}


@to_json.register
def _(obj: SldpInstance):
    out = {"t": [rat(x) for x in obj.t], "U": int_rows(obj.U_basis)}
    if obj.complement is not None:
        out["complement"] = int_rows(obj.complement)
    return out


@to_json.register
def _(obj: SldpWitness):
    return {"u": [rat(x) for x in obj.u], "alpha": [str(a) for a in obj.alpha]}


@to_json.register
def _(obj: CvpInstance):
    return {"t": [rat(x) for x in obj.t], "G": int_rows(obj.G)}


@to_json.register
def _(obj: LiftResult):
    return {"n": obj.n, "m": obj.m, "s_total": obj.s_total, "s": obj.s, "f": obj.f,
            "p": obj.p, "N": obj.N, "X": int_rows(obj.X),
            "Y": [[rat(x) for x in row] for row in obj.Y]}


def _register_late():
    """Types from modules that import this one lazily."""
    from .rop import SepBound, Witness
    from .torus import TorusAction

    @to_json.register(TorusAction)
    def _(obj):
        return {"M": int_rows(obj.M)}

    @to_json.register(SepBound)
    def _(obj):
        return {"eps": rat(obj.eps), "is_default": obj.is_default}

    @to_json.register(Witness)
    def _(obj):
        return {"y": [rat(x) for x in obj.y], "z": [rat(x) for x in obj.z]}


_register_late()


def from_json(kind: type, data: Any):
    """Inverse of :func:`to_json` for the domain types."""
    try:
        return _from_json(kind, data)
    except (KeyError, IndexError) as exc:
        raise ContractError(f"missing field {exc} for {kind.__name__}") from exc


def _from_json(kind: type, data: Any):
    from .rop import SepBound, Witness
    from .torus import TorusAction

    if not isinstance(data, (dict, list, str, int, float)):
        raise ContractError("malformed input")
    if kind is Fraction:
        return parse_rational(data)
    if kind is GaussianRational:
        return parse_gaussian(data)
    _need_object(data)
    if kind is Certified:
        return Certified(parse_rational(data["value"]), parse_rational(data.get("err", 0)))
    if kind is CertifiedComplex:
        return CertifiedComplex(from_json(Certified, data["re"]), from_json(Certified, data["im"]))
    if kind is DistanceEstimate:
        se, lo = data.get("squared_exact"), data.get("lower")
        return DistanceEstimate(parse_rational(data["D"]), parse_rational(data["gamma"]),
                                None if se is None else parse_rational(se),
                                tuple(data.get("notes", ())),
                                lower=None if lo is None else parse_rational(lo))
    if kind is QuotientPoint:
        return QuotientPoint(parse_vector(data["rho"]), parse_vector(data.get("theta", [0] * len(data["rho"]))),
                             parse_rational(data.get("err", 0)))
    if kind is SldpInstance:
        comp = data.get("complement")
        return SldpInstance(parse_vector(data["t"]), parse_int_matrix(data.get("U", [])),
                            None if comp is None else parse_int_matrix(comp))
    if kind is SldpWitness:
        return SldpWitness(tuple(parse_vector(data["u"])), tuple(parse_int(a) for a in data["alpha"]))
    if kind is CvpInstance:
        return CvpInstance(parse_vector(data["t"]), parse_int_matrix(data["G"]))
    if kind is LiftResult:
        return LiftResult(n=data["n"], s_total=data["s_total"],
                          Y=[parse_vector(r) for r in data.get("Y", [])], m=data["m"],
                          s=data.get("s", 0), f=data.get("f", 1), p=data.get("p", 0),
                          N=data.get("N", 0), X=parse_int_matrix(data.get("X", [])))
    if kind is TorusAction:
        return TorusAction(parse_int_matrix(data["M"]))
    if kind is SepBound:
        return SepBound(parse_rational(data["eps"]), bool(data.get("is_default", False)))
    if kind is Witness:
        return Witness(tuple(parse_vector(data["y"])), tuple(parse_vector(data["z"])))
    raise TypeError(f"no decoder for {kind.__name__}")


def _need_object(data) -> None:
    if not isinstance(data, dict):
        raise ContractError("expected a JSON object")


def dumps(obj) -> str:
    return json.dumps(to_json(obj), sort_keys=True, separators=(",", ":"))


__all__ = [
    "dumps", "from_json", "parse_gaussian", "parse_gaussian_vector", "parse_int",
    "parse_int_matrix", "parse_rational", "parse_vector", "rat", "to_json",
]
