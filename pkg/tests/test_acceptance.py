"""Acceptance criteria, one test each, with stated tolerances and time limits.

Run with ``pytest tests/test_acceptance.py`` (the summary lists one
PASS/FAIL line per criterion) or directly as a script.
"""
from __future__ import annotations

import itertools
import random
import time

import pytest

from acceptance_log import record
from gammaultra.analysis import Ann, Div, PPNormal, tor_type
from gammaultra.formula import App, Var, factorize
from gammaultra.golden import (
    arithmetic_context, dividing_line_inputs, not_closed_structure, power_of_two_type,
    unbounded_type,
)
from gammaultra.groups import (
    Finite, TorsionGroupPresentation, abelian_groups_of_order, compute_inv, cyclic_sum,
    to_finite_structure,
)
from gammaultra.sequences import DefinableSequence, GeometricNat, TailPower, TailUnit, constant
from gammaultra.structures import cyclic_group, eval_term, finite_abelian_group, satisfaction_set
from gammaultra.torsion import (
    Distinguished, TorMembership, dividing_line, ee_invariants_check, order_propagation,
    tor_divisibility, tor_membership,
)
from gammaultra.ultraproduct import (
    CounterExample, FiniteSet, Member, NotMember, WitnessScheme, check_gamma_closed,
    gup_sum_check, membership_check, proper_extension_criterion, ultrapower_collapse_check,
    verify_los_finite,
)
from randgen import random_context, random_formulas


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_1_nonclosure_under_addition():
    with Clock() as c:
        ctx = arithmetic_context(power_of_two_type(8))
        one = constant(1)
        odd = DefinableSequence(GeometricNat(1, 2, -1))
        powers = DefinableSequence(GeometricNat(1, 2, 0))
        v1, v2, v3 = (membership_check(ctx, s) for s in (one, odd, powers))
        s = gup_sum_check(ctx, one, odd)
    certs_ok = isinstance(v3, NotMember) and [
        (j, cert) for j, cert in v3.certificates
    ] == [(k, FiniteSet(frozenset(range(k)))) for k in range(8)]
    ok = (isinstance(v1, Member) and isinstance(v2, Member) and certs_ok
          and isinstance(s, NotMember) and c.elapsed < 1.0)
    record(1, ok, f"{v1.verdict}, {v2.verdict}, {v3.verdict}; sum {s.verdict}", c.elapsed)
    assert ok


def test_criterion_2_arithmetic_ultrapower_collapses():
    with Clock() as c:
        v = ultrapower_collapse_check(arithmetic_context(unbounded_type(8)))
    ok = v.verdict == "Collapses" and c.elapsed < 1.0
    record(2, ok, v.verdict, c.elapsed)
    assert ok


def test_criterion_3_divisible_element_of_order_two():
    with Clock() as c:
        fam = TailPower(2, 1, 1)
        f = DefinableSequence(TailUnit(1, 1))
        m = tor_membership(fam, f)
        results = [tor_divisibility(fam, f, 2, k) for k in range(1, 21)]
    witnessed = all(r.holds and r.witness is not None and isinstance(r.witness_membership, TorMembership)
                    for r in results)
    ok = isinstance(m, TorMembership) and m.order == 2 and witnessed and c.elapsed < 1.0
    record(3, ok, f"order {getattr(m, 'order', None)}; 2^k divides for k=1..20: {witnessed}", c.elapsed)
    assert ok


def test_criterion_4_dividing_line():
    with Clock() as c:
        rows = []
        for name, G, expected in dividing_line_inputs():
            d = dividing_line(G)
            pe = proper_extension_criterion(G, [tor_type(8)])
            rows.append((name, d.verdict, expected, (d.verdict == "CaseB") == (pe.verdict == "Yes")))
    ok = all(v == e and agree for _, v, e, agree in rows)
    record(4, ok, "; ".join(f"{n}: {v}" for n, v, _, _ in rows), c.elapsed)
    assert ok


def test_criterion_5_universal_transfer_suite():
    runs, nontrivial = 250, 0
    qf_fail = univ_ltr = collapse_fail = 0
    with Clock() as c:
        for seed in range(runs):
            rng = random.Random(seed)
            ctx = random_context(rng)
            qf, univ = random_formulas(rng)
            report = verify_los_finite(ctx, qf + univ, samples=32, seed=seed)
            collapse_fail += not report.collapse_holds
            stats = report.by_class()
            q = stats.get("QuantifierFree", {})
            qf_fail += q.get("ltr_failures", 0) + q.get("rtl_failures", 0)
            univ_ltr += stats.get("Universal", {}).get("ltr_failures", 0)
            nontrivial += any(e.samples for e in report.entries)
    ok = qf_fail == 0 and univ_ltr == 0 and collapse_fail == 0 and c.elapsed < 60.0
    record(5, ok, f"{runs} runs ({nontrivial} with sampled tuples); quantifier-free failures {qf_fail}, "
                  f"universal left-to-right failures {univ_ltr}, collapse failures {collapse_fail}", c.elapsed)
    assert ok


def _pp_family(n: int) -> list[PPNormal]:
    primes = sorted(set(factorize(n)) | {2}) if n > 1 else [2]
    conds = []
    for p in primes:
        for e in (1, 2, 3):
            for coeff in (1, p):
                conds.append((Div(p, e, (("x", coeff),)),))
            conds.append((Ann((("x", p ** e),)),))
        for e, f in itertools.product((1, 2, 3), repeat=2):
            conds.append((Div(p, e, (("x", 1),)), Ann((("x", p ** f),))))
    return [PPNormal(cs, ("x",)) for cs in conds] + [PPNormal((), ("x",))]


def test_criterion_6_inv_matches_brute_force():
    pairs = mismatches = groups = 0
    with Clock() as c:
        for n in range(1, 65):
            forms = _pp_family(n)
            for G in abelian_groups_of_order(n):
                groups += 1
                M = to_finite_structure(G)
                sets = [satisfaction_set(M, f.to_formula(), "x") if f.conditions else frozenset(M.universe)
                        for f in forms]
                for (i, phi), (j, psi) in itertools.product(enumerate(forms), repeat=2):
                    pairs += 1
                    expected = len(sets[i]) // len(sets[i] & sets[j])
                    if compute_inv(G, phi, psi) != Finite(expected):
                        mismatches += 1
    ok = mismatches == 0 and c.elapsed < 120.0
    record(6, ok, f"{groups} groups, {pairs} pairs, {mismatches} mismatches", c.elapsed)
    assert ok


def _random_group_term(rng: random.Random, vars_: list[str], depth: int):
    if depth == 0 or rng.random() < 0.3:
        return Var(rng.choice(vars_))
    k = rng.randrange(3)
    if k == 0:
        return App("-", (_random_group_term(rng, vars_, depth - 1),))
    if k == 1:
        return App("0", ())
    return App("+", (_random_group_term(rng, vars_, depth - 1), _random_group_term(rng, vars_, depth - 1)))


def test_criterion_7_order_propagation():
    violations = 0
    rng = random.Random(7)
    with Clock() as c:
        for _ in range(500):
            moduli = [rng.choice([2, 3, 4, 5, 6, 8, 9, 12]) for _ in range(rng.randint(1, 2))]
            M = finite_abelian_group(moduli)
            vars_ = [f"v{i}" for i in range(rng.randint(1, 3))]
            tau = _random_group_term(rng, vars_, 4)
            env = {v: rng.choice(M.universe) for v in vars_}
            orders = {}
            for v, a in env.items():
                r = 1
                while M.scalar(r, a) != M.zero:
                    r += 1
                orders[v] = r
            bound = order_propagation(tau, orders)
            if M.scalar(bound, eval_term(M, tau, env)) != M.zero:
                violations += 1
    ok = violations == 0
    record(7, ok, f"500 trials, {violations} violations", c.elapsed)
    assert ok


def test_criterion_8_invariants_distinguish_and_permutation():
    with Clock() as c:
        d = ee_invariants_check(cyclic_sum([4]), cyclic_sum([2, 2]), 2, 4)
        base = cyclic_sum([2, 4, 3, 8])
        same = []
        for perm in itertools.permutations(base.summands):
            other = TorsionGroupPresentation(perm, "permuted")
            same.append(ee_invariants_check(base, other, 2, 4).verdict)
    pair_ok = (isinstance(d, Distinguished) and d.phi == PPNormal((Div(2, 1, (("x", 1),)),), ("x",))
               and d.psi == PPNormal((Ann((("x", 1),)),), ("x",)) and d.values == (Finite(2), Finite(1)))
    ok = pair_ok and all(v == "Equivalent" for v in same)
    record(8, ok, f"Z_4 vs Z_2+Z_2: {d.verdict} {getattr(d, 'values', '')}; "
                  f"{len(same)} permutations equivalent: {all(v == 'Equivalent' for v in same)}", c.elapsed)
    assert ok


def test_criterion_9_closed_checker_and_collapse():
    with Clock() as c:
        scheme = check_gamma_closed("torsion", [tor_type(6)])
        M, p = not_closed_structure()
        bad = check_gamma_closed([M], [p])
        finite = check_gamma_closed([cyclic_group(6)], [tor_type(6)])
        collapse = 0
        for seed in range(60):
            rng = random.Random(1000 + seed)
            report = verify_los_finite(random_context(rng), [], seed=seed)
            collapse += not report.collapse_holds
    rule = scheme.apply_rule("+", (3, 5)) if isinstance(scheme, WitnessScheme) else None
    ok = (rule == 15 and dict(scheme.rules).get("+") == "g(n, m) = n*m"
          and isinstance(bad, CounterExample) and bad.symbol == "F" and bad.arguments == ("a",)
          and isinstance(finite, WitnessScheme) and collapse == 0)
    record(9, ok, f"torsion scheme g_+(3,5)={rule}; two-point structure: {bad.verdict} at F{bad.arguments}; "
                  f"collapse failures {collapse}", c.elapsed)
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
