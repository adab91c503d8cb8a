"""Command-line entry point.

Every subcommand prints human-readable text by default and one JSON record
per result with ``--json``.  ``examples`` always prints JSON lines.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields, is_dataclass
from fractions import Fraction

from . import io
from .analysis import classify_quantifier, recognize_pp
from .formula import print_formula
from .golden import run_examples
from .groups import (
    TorsionGroupPresentation, compute_inv, eval_qf_torsion,
)
from .parser import ParseError, parse_formula
from .sequences import FiniteFamily, NaturalNumbers
from .structures import FiniteStructure, eval_formula_finite
from .torsion import dividing_line, ee_invariants_check, tor_divisibility, tor_membership
from .ultraproduct import (
    check_gamma_closed, check_gamma_nice, gamma_hull, membership_check,
    proper_extension_criterion, verify_los_finite,
)


def _plain(obj):
    """JSON-friendly rendering of verdict objects."""
    if is_dataclass(obj) and not isinstance(obj, type):
        out = {"verdict": getattr(obj, "verdict", type(obj).__name__)}
        for f in fields(obj):
            v = getattr(obj, f.name)
            if not callable(v):
                out[f.name] = _plain(v)
        return out
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, frozenset):
        return sorted((_plain(x) for x in obj), key=repr)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def _emit(args, record: dict, text: str) -> None:
    if args.json:
        print(json.dumps(record, sort_keys=True))
    else:
        print(text)


def _formulas(args, sig):
    if not args.formula:
        raise SystemExit("error: at least one --formula is required")
    return [parse_formula(t, sig) for t in args.formula]


def _seed() -> int:
    return int(os.environ.get("GAMMA_ULTRA_SEED", "0"))


# ------------------------------------------------------------- commands


def cmd_eval(args) -> int:
    M = io.load_structure(args.structure)
    sig = io.structure_signature(M)
    (f,) = _formulas(args, sig)[:1]
    env = {}
    for item in args.assign or []:
        name, _, value = item.partition("=")
        if isinstance(M, TorsionGroupPresentation):
            env[name] = io.load_element(M, value)
        else:
            env[name] = io._token(json.loads(value)) if value[:1] in "[{\"0123456789-" else value
    trace: list[str] = []
    if isinstance(M, FiniteStructure):
        value = eval_formula_finite(M, f, env, trace if args.trace else None)
    elif isinstance(M, NaturalNumbers):
        value = M.eval(f, env)
    else:
        value = eval_qf_torsion(M, f, env)
    record = {"formula": print_formula(f), "class": str(classify_quantifier(f, sig)), "value": value}
    if args.trace:
        record["trace"] = trace
    _emit(args, record, ("true" if value else "false") + ("\n" + "\n".join(trace) if args.trace and trace else ""))
    return 0


def cmd_inv(args) -> int:
    G = io.load_structure(args.structure)
    sig = io.structure_signature(G)
    phi, psi = parse_formula(args.phi, sig), parse_formula(args.psi, sig)
    trace: list[str] = []
    value = compute_inv(G, phi, psi, args.cap, trace)
    record = {"phi": str(recognize_pp(phi)), "psi": str(recognize_pp(psi)), "cap": args.cap, "value": str(value)}
    if args.trace:
        record["trace"] = trace
    _emit(args, record, str(value) + ("\n" + "\n".join(trace) if args.trace else ""))
    return 0


def cmd_member(args) -> int:
    ctx = io.load_context(args.context)
    seq = io.load_sequence(ctx, args.sequence)
    if args.tor:
        v = tor_membership(ctx.family, seq)
    else:
        v = membership_check(ctx, seq)
    _emit(args, {"sequence": seq.describe(), **_plain(v)}, f"{v.verdict}: {_summary(v)}")
    return 0


def _summary(v) -> str:
    if hasattr(v, "witness") and not callable(v.witness):
        return f"witness {v.witness}"
    if hasattr(v, "certificates"):
        return "; ".join(f"{j}: {s.describe()}" if hasattr(s, "describe") else str(s) for j, s in v.certificates)
    if hasattr(v, "order"):
        return f"order {v.order}"
    return getattr(v, "reason", "")


def cmd_divides(args) -> int:
    ctx = io.load_context(args.context)
    seq = io.load_sequence(ctx, args.sequence)
    r = tor_divisibility(ctx.family, seq, args.prime, args.exponent)
    holds = getattr(r, "holds", None)
    _emit(args, _plain(r), f"{holds}: {r.large_set.describe() if hasattr(r, 'large_set') else r.reason}")
    return 0


def cmd_hull(args) -> int:
    ctx = io.load_context(args.context)
    if not isinstance(ctx.family, FiniteFamily):
        raise SystemExit("error: hull needs a finite family")
    for i, M in enumerate(ctx.family.structures):
        rep = gamma_hull(M, ctx.gamma)
        closure = {s: (None if c is None else list(c)) for s, c in rep.closure}
        text = f"member {i}: hull {list(rep.elements)}; closed={rep.closed}"
        _emit(args, {"member": i, "elements": list(rep.elements), "closed": rep.closed,
                     "counterexamples": closure, "depth": rep.depth}, text)
    return 0


def cmd_closed(args) -> int:
    if args.torsion:
        from .analysis import tor_type
        v = check_gamma_closed("torsion", [tor_type(args.depth or 6)])
    else:
        ctx = io.load_context(args.context)
        v = check_gamma_closed(list(ctx.family.structures), ctx.gamma, args.depth)
    _emit(args, _plain(v), f"{v.verdict}: {_scheme_text(v)}")
    return 0 if v.verdict == "WitnessScheme" else 1


def _scheme_text(v) -> str:
    if v.verdict == "WitnessScheme":
        if v.rules:
            return "; ".join(f"{s}: {r}" for s, r in v.rules)
        return "; ".join(f"{s}: {len(e)} profiles" for s, e in v.table) or "vacuous"
    if v.verdict == "CounterExample":
        return f"{v.symbol} at {v.arguments} ({v.detail})"
    return f"{v.symbol}, profile {v.profile}, search depth {v.search_depth}"


def cmd_nice(args) -> int:
    ctx = io.load_context(args.context)
    sig = io.context_signature(ctx)
    v = check_gamma_nice(list(ctx.family.structures), ctx.gamma, _formulas(args, sig), args.depth)
    _emit(args, _plain(v), f"{v.verdict}: {_scheme_text(v)}")
    return 0 if v.verdict == "WitnessScheme" else 1


def cmd_los(args) -> int:
    ctx = io.load_context(args.context)
    sig = io.context_signature(ctx)
    report = verify_los_finite(ctx, _formulas(args, sig), args.samples, _seed())
    for e in report.entries:
        rec = {"formula": e.formula, "class": e.quant_class, "samples": e.samples,
               "left_to_right_failures": _plain(e.left_to_right_failures),
               "right_to_left_failures": _plain(e.right_to_left_failures), "skipped": e.skipped}
        text = (f"{e.formula} [{e.quant_class}]: {e.samples} samples, "
                f"{len(e.left_to_right_failures)} left-to-right and "
                f"{len(e.right_to_left_failures)} right-to-left failures"
                + (f" (skipped: {e.skipped})" if e.skipped else ""))
        _emit(args, rec, text)
    summary = {"collapse_holds": report.collapse_holds, "hull_closed": report.hull_closed,
               "quotient_size": report.quotient_size, "by_class": report.by_class(), "notes": report.notes}
    _emit(args, summary, f"quotient size {report.quotient_size}; collapse holds: {report.collapse_holds}")
    return 0


def cmd_ee(args) -> int:
    G = io.load_structure(args.structure)
    H = io.load_structure(args.other)
    v = ee_invariants_check(G, H, args.bound, args.cap)
    if v.verdict == "Distinguished":
        text = f"Distinguished: phi={v.phi} psi={v.psi} values {v.values[0]} vs {v.values[1]}"
        rec = {"verdict": v.verdict, "phi": str(v.phi), "psi": str(v.psi), "values": [str(x) for x in v.values]}
    else:
        text = f"Equivalent up to bound {v.bound}, cap {v.cap} ({v.pairs} pairs)"
        rec = _plain(v)
    _emit(args, rec, text)
    return 0


def cmd_dividing(args) -> int:
    from .analysis import tor_type
    G = io.load_structure(args.structure)
    v = dividing_line(G)
    pe = proper_extension_criterion(G, [tor_type(args.depth or 8)])
    rec = {**_plain(v), "proper_extension": pe.verdict}
    text = f"{v.verdict}: " + (f"n={v.n}, {v.description}" if v.verdict == "CaseB" else "; ".join(v.certificates))
    _emit(args, rec, text)
    return 0


def cmd_examples(args) -> int:
    outcomes = run_examples(args.ids or None)
    for o in outcomes:
        print(json.dumps(o.record(args.timing), sort_keys=True))
    return 0 if all(o.status == "Pass" for o in outcomes) else 1


# ----------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON records")
    common.add_argument("--trace", action="store_true", help="include evaluation traces")

    ap = argparse.ArgumentParser(prog="gamma-ultra", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula in a structure")
    p.add_argument("--structure", required=True)
    p.add_argument("--formula", action="append")
    p.add_argument("--assign", action="append", metavar="VAR=VALUE")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inv", parents=[common], help="compute Inv(G, phi, psi)")
    p.add_argument("--structure", required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(func=cmd_inv)

    p = sub.add_parser("member", parents=[common], help="membership of a sequence")
    p.add_argument("--context", required=True)
    p.add_argument("--sequence", required=True, help="JSON text or file")
    p.add_argument("--tor", action="store_true", help="search a uniform order instead of a witness")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("divides", parents=[common], help="p^k-divisibility of a torsion member")
    p.add_argument("--context", required=True)
    p.add_argument("--sequence", required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--exponent", type=int, required=True)
    p.set_defaults(func=cmd_divides)

    p = sub.add_parser("hull", parents=[common], help="hull of each family member")
    p.add_argument("--context", required=True)
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("closed-check", parents=[common], help="search a closure scheme")
    p.add_argument("--context")
    p.add_argument("--torsion", action="store_true", help="closed-form scheme for torsion modules")
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_closed)

    p = sub.add_parser("nice-check", parents=[common], help="search a niceness scheme")
    p.add_argument("--context", required=True)
    p.add_argument("--formula", action="append")
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_nice)

    p = sub.add_parser("los-verify", parents=[common], help="check transfer on a finite family")
    p.add_argument("--context", required=True)
    p.add_argument("--formula", action="append")
    p.add_argument("--samples", type=int, default=64)
    p.set_defaults(func=cmd_los)

    p = sub.add_parser("tor-ee", parents=[common], help="compare invariants of two groups")
    p.add_argument("--structure", required=True)
    p.add_argument("--other", required=True)
    p.add_argument("--bound", type=int, default=2)
    p.add_argument("--cap", type=int, default=4)
    p.set_defaults(func=cmd_ee)

    p = sub.add_parser("dividing-line", parents=[common], help="bounded-order dichotomy")
    p.add_argument("--structure", required=True)
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_dividing)

    p = sub.add_parser("examples", help="run the scripted examples (JSON lines)")
    p.add_argument("ids", nargs="*")
    p.add_argument("--timing", action="store_true", help="include elapsed seconds")
    p.set_defaults(func=cmd_examples)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, TypeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
