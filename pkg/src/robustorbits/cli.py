"""Command-line front end.

Every subcommand reads one JSON document (inline, ``@path`` or ``-`` for
stdin) and writes one JSON document to standard output.  Numbers are exact
strings ``"p/q"``.  Exit codes: 0 success, 1 failed verification, 2 contract
violation or malformed input (a JSON diagnostic is printed), 3 refusal by
the enumeration dimension guard.

Input schemas (all keys are JSON object members)::

    orbit-eq          {"M": [[int]], "v": [z], "w": [z]}
    orbit-dist        delta metric: {"M", "p": {"rho", "theta"}, "q": {...}}
                      log / euclid: {"M", "v", "w"}
    sldp              {"t": [q], "U": [[int]], "complement"?: [[int]]}
    cvp               {"t": [q], "G": [[int]]}          (G has basis columns)
    lift              {"G": [[int]]}
    reduce cvp-to-sldp  {"t", "G"}
    reduce sldp-to-rop  {"t", "U"}
    reduce cvp-to-rop   {"t", "G"}
    kempf-ness solve    {"M", "v"} or {"weights": [[int]], "q": [q]}
    kempf-ness orbit-eq {"M", "v", "w"}
    abc-lambda        {"v": [z], "e": [int]}

Here ``q`` is a rational (``"3/4"``, ``2`` or ``0.4``) and ``z`` a Gaussian
rational (a rational, ``[re, im]`` or ``{"re": .., "im": ..}``).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

from .errors import ContractError, DimensionGuardError
from .exactlinalg.certified import sqrt_lower, sqrt_upper
from .lattices.cvp import CvpInstance, DistanceEstimate, babai_nearest_plane, cvp_exact
from .lattices.lll import lll_reduce_rows
from .lattices.sldp import SldpInstance, sldp_exact_witness, sldp_h_based, sldp_lll
from .lifting import ExactAnswer, cvp_to_sldp, lift_lattice
from .logspace.metric import BACKENDS, QuotientPoint, linear_form_in_logs
from .serialize import (from_json, parse_gaussian_vector, parse_int_matrix, parse_rational,
                        parse_vector, rat, to_json)
from .torus import TorusAction, orbit_equal_K, orbit_equal_T

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_CONTRACT, EXIT_GUARD = 0, 1, 2, 3


@dataclass(frozen=True)
class JobSpec:
    """A validated invocation."""
    command: str
    action: Optional[str]
    data: Any
    bits: int
    sep_eps: Optional[Fraction]
    backend: str
    max_enum_dim: Optional[int]
    group: str = "T"
    metric: str = "delta"
    N: Optional[int] = None
    only: tuple[int, ...] = ()


# input helpers

def _read_input(src: Optional[str]) -> Any:
    if src is None:
        raise ContractError("missing JSON input")
    if src == "-":
        text = sys.stdin.read()
    elif src.startswith("@"):
        try:
            with open(src[1:], encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ContractError(f"cannot read {src[1:]}: {exc.strerror}") from exc
    else:
        text = src
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ContractError(f"malformed JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from exc


def _obj(data: Any) -> dict:
    if not isinstance(data, dict):
        raise ContractError("expected a JSON object")
    return data


def _field(data: dict, key: str) -> Any:
    if key not in data:
        raise ContractError(f"missing field {key!r}")
    return data[key]


def _action(data: dict) -> TorusAction:
    return TorusAction(parse_int_matrix(_field(data, "M")))


def _estimate(est: DistanceEstimate) -> dict:
    from .rop import CONDITIONAL, DEFAULT_SEP_WARNING

    out = to_json(est)
    warnings = [n for n in est.notes if n == DEFAULT_SEP_WARNING]
    if CONDITIONAL in est.notes:
        warnings.append("gamma is conditional on the separation bound; D and lower are unconditional")
    out["warnings"] = warnings
    return out


def _sep(job: JobSpec):
    from .rop import SepBound
    return None if job.sep_eps is None else SepBound(job.sep_eps)


# subcommands

def cmd_orbit_eq(job: JobSpec) -> dict:
    data = _obj(job.data)
    action = _action(data)
    v = parse_gaussian_vector(_field(data, "v"))
    w = parse_gaussian_vector(_field(data, "w"))
    return {"T_equal": orbit_equal_T(action, v, w), "K_equal": orbit_equal_K(action, v, w)}


def cmd_orbit_dist(job: JobSpec) -> dict:
    from .rop import rop_delta, rop_dist_K, rop_logdist

    data = _obj(job.data)
    action = _action(data)
    if job.metric == "delta":
        p = from_json(QuotientPoint, _field(data, "p"))
        q = from_json(QuotientPoint, _field(data, "q"))
        est = rop_delta(action, p, q, job.group, job.backend, job.bits)
    else:
        v = parse_gaussian_vector(_field(data, "v"))
        w = parse_gaussian_vector(_field(data, "w"))
        if job.metric == "log":
            est = rop_logdist(action, v, w, job.group, _sep(job), job.backend, job.bits)
        elif job.group == "K":
            est = rop_dist_K(action, v, w, _sep(job), job.backend, job.bits)
        else:
            raise ContractError("the euclid metric is only supported for the compact group K")
    out = _estimate(est)
    out.update(group=job.group, metric=job.metric, backend=job.backend)
    return out


def _sldp_instance(data: dict) -> SldpInstance:
    return from_json(SldpInstance, data)


def cmd_sldp(job: JobSpec) -> dict:
    inst = _sldp_instance(_obj(job.data))
    if job.backend == "exact":
        d2, witness = sldp_exact_witness(inst, job.max_enum_dim)
        est = DistanceEstimate(sqrt_upper(d2, job.bits), Fraction(1), d2,
                               lower=sqrt_lower(d2, job.bits))
    elif job.backend == "h":
        est, witness = sldp_h_based(inst, job.bits)
    else:
        est, witness = sldp_lll(inst, job.bits)
    out = _estimate(est)
    out.update(backend=job.backend, witness=to_json(witness))
    return out


def cmd_cvp(job: JobSpec) -> dict:
    inst = from_json(CvpInstance, _obj(job.data))
    if job.backend == "exact":
        point, d2 = cvp_exact(inst, job.max_enum_dim)
        return {"backend": "exact", "point": to_json(point), "squared_exact": rat(d2),
                "D": rat(sqrt_upper(d2, job.bits))}
    basis = lll_reduce_rows([list(c) for c in zip(*inst.G)])
    point = babai_nearest_plane(basis, inst.t)
    d2 = sum(((a - b) ** 2 for a, b in zip(point, inst.t)), Fraction(0))
    return {"backend": job.backend, "point": to_json(point), "squared_residual": rat(d2),
            "D": rat(sqrt_upper(d2, job.bits)), "gamma": rat(Fraction(2) ** ((inst.m + 1) // 2 + 1))}


def cmd_lift(job: JobSpec) -> dict:
    G = parse_int_matrix(_field(_obj(job.data), "G"))
    return to_json(lift_lattice(G))


def cmd_reduce(job: JobSpec) -> dict:
    from .rop import cvp_to_rop_pipeline, reduce_sldp_to_rop

    data = _obj(job.data)
    if job.action == "cvp-to-sldp":
        reduced = cvp_to_sldp(from_json(CvpInstance, data))
        assert not isinstance(reduced, ExactAnswer)
        return {"s_total": reduced.s_total, "instance": to_json(reduced.instance),
                "n": reduced.lift.n}
    if job.action == "sldp-to-rop":
        rop = reduce_sldp_to_rop(_sldp_instance(data), job.group, job.metric, job.bits)
        rop_est, back = rop.solve_back(job.backend, job.bits)
        scale = 1
    else:
        pipe = cvp_to_rop_pipeline(from_json(CvpInstance, data), job.group, job.metric, job.bits)
        rop, scale = pipe.rop, pipe.reduced.s_total
        rop_est, back = pipe.solve(job.backend, job.bits)
    out = {"group": job.group, "metric": job.metric, "backend": job.backend,
           "action": to_json(rop.action),
           "rop": _estimate(rop_est), "distance": _estimate(back), "s_total": scale}
    if rop.p is not None:
        out["p"], out["q"] = to_json(rop.p), to_json(rop.q)
    else:
        out["v"], out["w"] = to_json(rop.v), to_json(rop.w)
        out["sep"] = to_json(rop.sep)
    return out


def cmd_kempf_ness(job: JobSpec) -> dict:
    from .kempfness import KnProblem, example_6_3, kn_minimize, kn_orbit_equal

    if job.action == "example63":
        if job.N is None:
            raise ContractError("example63 needs --N")
        if job.N < 1:
            raise ContractError("--N must be positive")
        return to_json(example_6_3(job.N))
    data = _obj(job.data)
    if job.action == "orbit-eq":
        action = _action(data)
        v = parse_gaussian_vector(_field(data, "v"))
        w = parse_gaussian_vector(_field(data, "w"))
        return {"equal": kn_orbit_equal(action, v, w, _sep(job), job.backend, job.bits)}
    if "weights" in data:
        problem = KnProblem(parse_int_matrix(data["weights"]), parse_vector(_field(data, "q")))
    else:
        problem = KnProblem.from_action(_action(data), parse_gaussian_vector(_field(data, "v")))
    sol = kn_minimize(problem, Fraction(1, 1 << min(job.bits, 200)))
    return {"x": to_json(list(sol.x)), "grad_norm": rat(sol.grad_norm),
            "f_value": to_json(sol.f_value), "iterations": sol.iterations, "bits": sol.bits}


def cmd_abc_lambda(job: JobSpec) -> dict:
    data = _obj(job.data)
    v = parse_gaussian_vector(_field(data, "v"))
    e = [int(parse_rational(x)) if parse_rational(x).denominator == 1 else _bad_int(x)
         for x in _field(data, "e")]
    lam = linear_form_in_logs(v, e, Fraction(1, 1 << job.bits))
    return {"lambda": to_json(lam), "eps": rat(Fraction(1, 1 << job.bits))}


def _bad_int(x):
    raise ContractError(f"expected an integer exponent, got {x!r}")


def cmd_verify(job: JobSpec) -> tuple[dict, int]:
    from .acceptance import run_all

    results = run_all(job.only or None, log=lambda line: print(line, file=sys.stderr))
    ok = all(r.passed for r in results)
    report = {"passed": ok, "criteria": [r.as_dict() for r in results]}
    return report, EXIT_OK if ok else EXIT_VERIFY_FAILED


COMMANDS: dict[str, Callable[[JobSpec], Any]] = {
    "orbit-eq": cmd_orbit_eq,
    "orbit-dist": cmd_orbit_dist,
    "sldp": cmd_sldp,
    "cvp": cmd_cvp,
    "lift": cmd_lift,
    "reduce": cmd_reduce,
    "kempf-ness": cmd_kempf_ness,
    "abc-lambda": cmd_abc_lambda,
    "verify": cmd_verify,
}


# argument parsing

class _Parser(argparse.ArgumentParser):
    """Argument errors become contract violations instead of exit code 2 plus usage."""

    def error(self, message):
        raise ContractError(message)


def _rational_arg(text: str) -> Fraction:
    q = parse_rational(text)
    if q <= 0:
        raise ContractError("--sep-eps must be positive")
    return q


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--bits", type=int, default=64, help="precision: eps = 2^-bits")
    common.add_argument("--sep-eps", type=str, default=None, help="separation bound p/q")
    common.add_argument("--backend", choices=BACKENDS, default="exact")
    common.add_argument("--max-enum-dim", type=int, default=None,
                        help="enumeration guard (default 8 or ROBUSTORBITS_MAX_ENUM_DIM)")

    parser = _Parser(prog="robustorbits", description="Robust orbit problems for torus actions.",
                     parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, help_text, with_input=True):
        p = sub.add_parser(name, help=help_text, parents=[common])
        if with_input:
            p.add_argument("input", nargs="?", help="inline JSON, @path or - for stdin")
        return p

    add("orbit-eq", "exact orbit equality for T and K")
    p = add("orbit-dist", "orbit distance estimate")
    p.add_argument("--group", choices=("T", "K"), default="T")
    p.add_argument("--metric", choices=("delta", "log", "euclid"), default="delta")
    add("sldp", "shifted lattice distance")
    add("cvp", "closest vector problem")
    add("lift", "lattice lifting of G")
    p = add("reduce", "reductions between problems", with_input=False)
    p.add_argument("action", choices=("cvp-to-sldp", "sldp-to-rop", "cvp-to-rop"))
    p.add_argument("input", nargs="?")
    p.add_argument("--group", choices=("T", "K"), default="T")
    p.add_argument("--metric", choices=("delta", "log", "euclid"), default="delta")
    p = add("kempf-ness", "Kempf-Ness solver", with_input=False)
    p.add_argument("action", choices=("solve", "orbit-eq", "example63"))
    p.add_argument("input", nargs="?")
    p.add_argument("--N", type=int, default=None)
    add("abc-lambda", "linear form in logarithms")
    p = add("verify", "run the acceptance suite", with_input=False)
    p.add_argument("--only", type=str, default="", help="comma-separated criterion numbers")
    return parser


def parse_job(argv: list[str]) -> JobSpec:
    # argparse cannot place an optional positional after subcommand flags, so a
    # trailing input that it left over is picked up here
    ns, extra = build_parser().parse_known_args(argv)
    if extra:
        if len(extra) == 1 and hasattr(ns, "input") and ns.input is None \
                and (extra[0] == "-" or not extra[0].startswith("-")):
            ns.input = extra[0]
        else:
            raise ContractError(f"unrecognized arguments: {' '.join(extra)}")
    if ns.bits < 8 or ns.bits > 1 << 16:
        raise ContractError("--bits must lie in [8, 65536]")
    if ns.max_enum_dim is not None and ns.max_enum_dim < 1:
        raise ContractError("--max-enum-dim must be positive")
    sep = None if ns.sep_eps is None else _rational_arg(ns.sep_eps)
    needs_input = not (ns.command == "verify"
                       or (ns.command == "kempf-ness" and ns.action == "example63"))
    data = _read_input(getattr(ns, "input", None)) if needs_input else None
    only: tuple[int, ...] = ()
    if ns.command == "verify" and ns.only:
        try:
            only = tuple(int(x) for x in ns.only.split(","))
        except ValueError as exc:
            raise ContractError("--only takes comma-separated integers") from exc
    return JobSpec(command=ns.command, action=getattr(ns, "action", None), data=data,
                   bits=ns.bits, sep_eps=sep, backend=ns.backend,
                   max_enum_dim=ns.max_enum_dim, group=getattr(ns, "group", "T"),
                   metric=getattr(ns, "metric", "delta"), N=getattr(ns, "N", None), only=only)


def _emit(obj: Any, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def run(argv: Optional[list[str]] = None) -> int:
    """Parse, dispatch and print; returns the exit code."""
    argv = sys.argv[1:] if argv is None else argv
    if any(a in ("-h", "--help") for a in argv):
        build_parser().parse_args(argv)   # prints help and exits 0
    try:
        job = parse_job(argv)
        result = COMMANDS[job.command](job)
        code = EXIT_OK
        if isinstance(result, tuple):
            result, code = result
        _emit(result)
        return code
    except DimensionGuardError as exc:
        _emit({"error": "dimension_guard", "message": str(exc), "dim": exc.dim, "limit": exc.limit})
        return EXIT_GUARD
    except ValueError as exc:
        # ContractError and the shape/rank errors of exactlinalg are ValueErrors
        _emit({"error": "contract_violation", "message": str(exc)})
        return EXIT_CONTRACT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
