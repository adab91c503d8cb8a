"""Scripted worked examples with their expected outcomes.

Each example builds its data through the public API, runs the relevant
checks and compares the computed verdict with the expected one.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from .analysis import UnaryTypePresentation, tor_type
from .formula import Signature
from .groups import OMEGA, Cyclic, Prufer, Tail, TorsionGroupPresentation, cyclic_sum
from .parser import parse_formula
from .sequences import (
    NAT_SIGNATURE, ConstantPower, DefinableSequence, FiniteFamily, Frechet,
    GeometricNat, NaturalNumbers, PrincipalFinite, TailPower, TailUnit, constant,
)
from .structures import FiniteStructure, cyclic_group, structure_from_tables
from .torsion import (
    TorMembership, dividing_line, ee_invariants_check, tor_divisibility, tor_membership,
)
from .ultraproduct import (
    GammaContext, NotMember, ProperExtension, WitnessScheme, check_gamma_closed, gup_sum_check,
    membership_check, proper_extension_criterion, ultrapower_collapse_check, verify_los_finite,
)


# ----------------------------------------------------------------- data


def power_of_two_type(depth: int = 8) -> UnaryTypePresentation:
    """``x`` is nonzero and divisible by every power of two."""
    texts = ["~(x = 0)"] + [f"(2^{k} | x) & ~(x = 0)" for k in range(1, depth)]
    return UnaryTypePresentation.from_strings("p", texts, NAT_SIGNATURE)


def unbounded_type(depth: int = 8) -> UnaryTypePresentation:
    """``x`` exceeds every numeral."""
    return UnaryTypePresentation.from_strings("bounded", [f"lt({n}, x)" for n in range(depth)], NAT_SIGNATURE)


def arithmetic_context(gamma) -> GammaContext:
    return GammaContext(ConstantPower(NaturalNumbers()), Frechet(), (gamma,))


def two_sorted_surrogate(size: int = 16, depth: int = 8) -> tuple[FiniteStructure, UnaryTypePresentation]:
    """Two sorts ``N1``, ``N2`` (as unary predicates) truncated to ``size``
    elements each, a capped product ``mul12 : N1 x N2 -> N1``, the constant
    ``one`` in ``N1`` and constants ``c0, ...`` naming the first ``depth``
    elements of ``N2``.  The type says ``x`` is a nonstandard element of ``N2``."""
    funcs = [("mul12", 2), ("one", 0)] + [(f"c{i}", 0) for i in range(depth)]
    sig = Signature("two-sorted", tuple(funcs), (("N1", 1), ("N2", 1)))
    left = [f"a{i}" for i in range(size)]
    right = [f"b{i}" for i in range(size)]
    universe = left + right
    mul = {}
    for u in universe:
        for v in universe:
            if u in left and v in right:
                i, j = int(u[1:]), int(v[1:])
                mul[(u, v)] = f"a{min(i * j, size - 1)}"
            else:
                mul[(u, v)] = u
    tables = {"mul12": mul, "one": {(): "a1"}}
    for i in range(depth):
        tables[f"c{i}"] = {(): f"b{i}"}
    rels = {"N1": [(u,) for u in left], "N2": [(v,) for v in right]}
    M = structure_from_tables(sig, universe, tables, rels, "two-sorted surrogate")
    p = UnaryTypePresentation.from_strings("nonstandard", [f"N2(x) & ~(x = c{n})" for n in range(depth)], sig)
    return M, p


def not_closed_structure():
    sig = Signature("unary", (("F", 1),), (("R", 1),))
    M = structure_from_tables(sig, ["a", "b"], {"F": {("a",): "b", ("b",): "b"}},
                              {"R": [("a",)]}, "two-point")
    p = UnaryTypePresentation.from_strings("notR", ["~R(x)"], sig)
    return M, p


def dividing_line_inputs() -> list[tuple[str, TorsionGroupPresentation, str]]:
    return [
        ("sum of Z_2^n, n >= 1", TorsionGroupPresentation((Tail(2, 1, 1),)), "CaseB"),
        ("countably many Z_2", TorsionGroupPresentation((Cyclic(2, 1, OMEGA),)), "CaseB"),
        ("sum of Z_n (primary tails)", TorsionGroupPresentation(tuple(Tail(p, 1, 1) for p in (2, 3, 5, 7))), "CaseB"),
        ("Z(2^inf)", TorsionGroupPresentation((Prufer(2),)), "CaseA"),
        ("Q/Z surrogate", TorsionGroupPresentation(tuple(Prufer(p) for p in (2, 3, 5, 7))), "CaseA"),
    ]


# -------------------------------------------------------------- outcomes


@dataclass
class ExampleOutcome:
    id: str
    expected: str
    computed: str
    status: str
    detail: str = ""
    elapsed: float = 0.0

    def record(self, timing: bool = False) -> dict:
        out = {"id": self.id, "expected": self.expected, "computed": self.computed,
               "status": self.status, "detail": self.detail}
        if timing:
            out["elapsed"] = round(self.elapsed, 6)
        return out


def _nonclosure():
    ctx = arithmetic_context(power_of_two_type(8))
    one = constant(1)
    odd = DefinableSequence(GeometricNat(1, 2, -1))
    powers = DefinableSequence(GeometricNat(1, 2, 0))
    v1, v2, v3 = (membership_check(ctx, s) for s in (one, odd, powers))
    s = gup_sum_check(ctx, one, odd)
    certs = ", ".join(f"{j}:{c.describe()}" for j, c in v3.certificates) if isinstance(v3, NotMember) else ""
    computed = f"{v1.verdict},{v2.verdict},{v3.verdict},sum {s.verdict}"
    conclusive = isinstance(v3, NotMember) and v3.conclusive
    return "Member,Member,NotMember,sum NotMember", computed, f"certificates {certs}; conclusive={conclusive}"


def _los_failure():
    M, p = two_sorted_surrogate()
    ctx = GammaContext(FiniteFamily((M,)), PrincipalFinite(1, 0), (p,))
    psi = parse_formula("exists y. (N2(y) & mul12(one, y) = x)", M.signature)
    report = verify_los_finite(ctx, [psi], samples=64)
    e = report.entries[0]
    fails = sorted(str(t[0]) for t in e.left_to_right_failures)
    computed = "failure" if fails and not e.right_to_left_failures else "no failure"
    return "failure", computed, f"holds in every member but not in the product at {', '.join(fails)}"


def _collapse():
    v = ultrapower_collapse_check(arithmetic_context(unbounded_type(8)))
    return "Collapses", v.verdict, getattr(v, "reason", "")


def _closed():
    scheme = check_gamma_closed("torsion", [tor_type(6)])
    finite = check_gamma_closed([cyclic_group(6)], [tor_type(6)])
    M, p = not_closed_structure()
    bad = check_gamma_closed([M], [p])
    rules = dict(scheme.rules) if isinstance(scheme, WitnessScheme) else {}
    computed = f"{rules.get('+')};{finite.verdict};{bad.verdict}"
    return "g(n, m) = n*m;WitnessScheme;CounterExample", computed, f"counterexample arguments {getattr(bad, 'arguments', None)}"


def _divisible():
    fam = TailPower(2, 1, 1)
    f = DefinableSequence(TailUnit(1, 1))
    m = tor_membership(fam, f)
    results = [tor_divisibility(fam, f, 2, k) for k in range(1, 21)]
    ok = all(r.holds and isinstance(r.witness_membership, TorMembership) for r in results)
    order = m.order if isinstance(m, TorMembership) else None
    computed = f"order {order}; divisible k<=20: {ok}"
    return "order 2; divisible k<=20: True", computed, results[-1].large_set.describe()


def _dividing_line():
    parts = []
    agree = True
    for name, G, expected in dividing_line_inputs():
        d = dividing_line(G)
        pe = proper_extension_criterion(G, [tor_type(8)])
        agree &= (d.verdict == "CaseB") == (pe.verdict == "Yes")
        parts.append(f"{name}: {d.verdict}")
    computed = "; ".join(parts) + f"; agrees={agree}"
    expected = "; ".join(f"{n}: {e}" for n, _, e in dividing_line_inputs()) + "; agrees=True"
    return expected, computed, ""


def _proper_extension():
    G = TorsionGroupPresentation((Tail(2, 1, 1),))
    v = ultrapower_collapse_check(GammaContext(ConstantPower(G), Frechet(), (tor_type(8),)))
    return "ProperExtension", v.verdict, v.sequence.describe() if isinstance(v, ProperExtension) else ""


def _ee():
    v = ee_invariants_check(cyclic_sum([4]), cyclic_sum([2, 2]), 2, 4)
    w = ee_invariants_check(cyclic_sum([2, 4]), cyclic_sum([4, 2]), 2, 4)
    detail = ""
    if v.verdict == "Distinguished":
        detail = f"phi={v.phi} psi={v.psi} values={v.values[0]} vs {v.values[1]}"
    return "Distinguished;Equivalent", f"{v.verdict};{w.verdict}", detail


EXAMPLES: dict[str, Callable[[], tuple[str, str, str]]] = {
    "arithmetic-ultrapower-collapse": _collapse,
    "divisible-order-two-element": _divisible,
    "invariants-distinguish-z4": _ee,
    "los-failure-unbounded-sort": _los_failure,
    "nonclosure-under-addition": _nonclosure,
    "torsion-dividing-line": _dividing_line,
    "torsion-groups-closed": _closed,
    "torsion-ultrapower-extension": _proper_extension,
}


def run_examples(ids: list[str] | None = None) -> list[ExampleOutcome]:
    """Run the selected examples in id order."""
    chosen = sorted(ids) if ids else sorted(EXAMPLES)
    unknown = [i for i in chosen if i not in EXAMPLES]
    if unknown:
        raise KeyError(f"unknown example ids: {', '.join(unknown)}")
    out = []
    for ex_id in chosen:
        start = time.perf_counter()
        try:
            expected, computed, detail = EXAMPLES[ex_id]()
            if computed == expected:
                status = "Pass"
            else:
                status = "Undecided" if "Undecided" in computed else "Fail"
        except Exception as err:  # a crashing example is a failed example
            expected, computed, detail, status = "", f"error: {err}", type(err).__name__, "Fail"
        out.append(ExampleOutcome(ex_id, expected, computed, status, detail, time.perf_counter() - start))
    return out
