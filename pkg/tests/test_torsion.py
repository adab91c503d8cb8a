import random

import pytest
from hypothesis import given, settings, strategies as st

from gammaultra.analysis import InvariantsCondition, tor_type
from gammaultra.formula import App, ScalarMul, Var, group_signature
from gammaultra.groups import (
    OMEGA, Cyclic, Finite, Prufer, Tail, TorsionGroupPresentation, abelian_groups_of_order, cyclic_sum,
    order_of,
)
from gammaultra.parser import parse_formula, parse_term
from gammaultra.sequences import (
    ConstantElem, ConstantPower, DefinableSequence, FiniteSet, TailPower, TailSum, TailUnit, constant,
    sequence_value,
)
from gammaultra.structures import eval_term, finite_abelian_group
from gammaultra.torsion import (
    CaseA, CaseB, Distinguished, Equivalent, TorMembership, TorNotMember, dividing_line,
    ee_invariants_check, order_profile, order_propagation, term_variables, tor_divisibility,
    tor_los_pp_verify, tor_membership,
)
from gammaultra.ultraproduct import proper_extension_criterion

GROUP = group_signature()


def g(text):
    return parse_formula(text, GROUP)


def _order(M, a):
    r = 1
    while M.scalar(r, a) != M.zero:
        r += 1
    return r


def _term(rng, names, depth):
    if depth == 0 or rng.random() < 0.3:
        return Var(rng.choice(names))
    k = rng.randrange(4)
    if k == 0:
        return App("-", (_term(rng, names, depth - 1),))
    if k == 1:
        return ScalarMul(rng.randint(-4, 4), _term(rng, names, depth - 1))
    if k == 2:
        return App("0", ())
    return App("+", (_term(rng, names, depth - 1), _term(rng, names, depth - 1)))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9), st.lists(st.sampled_from([2, 3, 4, 6, 8, 9, 10]), min_size=1, max_size=2))
def test_propagated_order_annihilates_the_value(seed, moduli):
    rng = random.Random(seed)
    M = finite_abelian_group(moduli)
    names = ["x0", "x1", "x2"][: rng.randint(1, 3)]
    tau = _term(rng, names, 4)
    env = {v: rng.choice(M.universe) for v in names}
    orders = {v: _order(M, a) for v, a in env.items()}
    assert M.scalar(order_propagation(tau, orders), eval_term(M, tau, env)) == M.zero


def test_order_propagation_by_position():
    tau = parse_term("x0 + -(x1 + x10)", GROUP)
    assert term_variables(tau) == ["x0", "x1", "x10"]
    assert order_propagation(tau, [2, 3, 5]) == 30
    with pytest.raises(ValueError):
        order_propagation(tau, [2, 3])
    with pytest.raises(ValueError):
        order_propagation(tau, [0, 1, 1])


FAMILY = TailPower(2, 1, 1)


@pytest.mark.parametrize("tail,expected", [
    (TailUnit(1, 1), 2),
    (TailUnit(3, 2), 4),
    (TailSum((TailUnit(1, 1), TailUnit(1, 3))), 8),
    (ConstantElem(0), 1),
])
def test_tor_membership_orders(tail, expected):
    v = tor_membership(FAMILY, DefinableSequence(tail))
    assert isinstance(v, TorMembership) and v.order == expected


def test_generators_have_unbounded_order():
    v = tor_membership(FAMILY, DefinableSequence(TailUnit(1, None)))
    assert isinstance(v, TorNotMember)
    assert all(isinstance(s, FiniteSet) for _, s in v.certificates)


@pytest.mark.parametrize("k", range(1, 21))
def test_divisibility_witness_is_exact(k):
    f = DefinableSequence(TailUnit(1, 1))
    r = tor_divisibility(FAMILY, f, 2, k)
    assert r.holds and isinstance(r.witness_membership, TorMembership)
    start = max(r.large_set.complement, default=-1) + 1
    for n in range(start, start + 30):
        G = FAMILY.member(n)
        y = sequence_value(FAMILY, r.witness, n)
        assert G.scalar(2 ** k, y) == sequence_value(FAMILY, f, n)
        assert order_of(G, y) == 2 ** (k + 1)


def test_generator_is_not_divisible():
    with pytest.raises(ValueError):
        tor_divisibility(FAMILY, DefinableSequence(TailUnit(1, None)), 2, 1)


@pytest.mark.parametrize("q,k", [(3, 1), (3, 2), (5, 1), (7, 3)])
def test_other_primes_divide_in_two_groups(q, k):
    f = DefinableSequence(TailUnit(3, 3))
    r = tor_divisibility(FAMILY, f, q, k)
    assert r.holds
    for n in range(2, 30):
        G = FAMILY.member(n)
        assert G.scalar(q ** k, sequence_value(FAMILY, r.witness, n)) == sequence_value(FAMILY, f, n)


def test_constant_power_of_prufer_divides():
    G = TorsionGroupPresentation((Prufer(2),))
    fam = ConstantPower(G)
    f = constant(G.element([(0, 0, "1/2")]))
    r = tor_divisibility(fam, f, 2, 6)
    assert r.holds and r.witness_membership.order == 128


summands = st.one_of(
    st.builds(Cyclic, st.sampled_from([2, 3, 5]), st.integers(1, 3), st.one_of(st.integers(1, 2), st.just(OMEGA))),
    st.builds(Prufer, st.sampled_from([2, 3]), st.integers(1, 2)),
    st.builds(Tail, st.sampled_from([2, 3]), st.integers(1, 2), st.integers(0, 1)),
)


@settings(max_examples=150, deadline=None)
@given(st.lists(summands, min_size=1, max_size=4))
def test_dividing_line_agrees_with_extension_criterion(parts):
    G = TorsionGroupPresentation(tuple(parts))
    d = dividing_line(G)
    pe = proper_extension_criterion(G, [tor_type(8)])
    assert (d.verdict == "CaseB") == (pe.verdict == "Yes")
    infinite_bounded = any(isinstance(s, Tail) or (s.mult == OMEGA and not isinstance(s, Prufer)) for s in parts)
    assert isinstance(d, CaseB) == infinite_bounded
    if isinstance(d, CaseA):
        assert d.certificates


def test_omega_prufer_copies_are_case_b():
    assert isinstance(dividing_line(TorsionGroupPresentation((Prufer(3, OMEGA),))), CaseB)


def test_z4_and_klein_group_are_distinguished():
    v = ee_invariants_check(cyclic_sum([4]), cyclic_sum([2, 2]), 2, 4)
    assert isinstance(v, Distinguished)
    assert v.values == (Finite(2), Finite(1))


def test_tail_versus_tail_plus_z2():
    G = TorsionGroupPresentation((Tail(2, 1, 1),))
    H = TorsionGroupPresentation((Tail(2, 1, 1), Cyclic(2, 1)))
    v = ee_invariants_check(G, H, 2, 4)
    assert isinstance(v, Distinguished)


@settings(max_examples=40, deadline=None)
@given(st.lists(summands, min_size=1, max_size=3), st.randoms())
def test_permuted_presentations_are_equivalent(parts, rnd):
    G = TorsionGroupPresentation(tuple(parts))
    shuffled = list(parts)
    rnd.shuffle(shuffled)
    assert isinstance(ee_invariants_check(G, TorsionGroupPresentation(tuple(shuffled)), 2, 4), Equivalent)


@pytest.mark.parametrize("n", [8, 16, 12])
def test_groups_of_one_order_are_pairwise_distinguished(n):
    groups = abelian_groups_of_order(n)
    for i, G in enumerate(groups):
        for H in groups[i + 1:]:
            assert isinstance(ee_invariants_check(G, H, 2, 8), Distinguished), (G, H)


def test_ee_rejects_bad_bounds():
    with pytest.raises(ValueError):
        ee_invariants_check(cyclic_sum([2]), cyclic_sum([2]), 0, 4)


def test_pp_transfer_over_isomorphic_copies():
    G = cyclic_sum([4, 2])
    copies = [G, TorsionGroupPresentation(tuple(reversed(G.summands))), G]
    formulas = [g("2^1 | x"), g("exists y. 2*y = x"), g("~(2*x = 0) | 2^1 | x"),
                InvariantsCondition(g("x = x"), g("2^1 | x"), 2),
                InvariantsCondition(g("2*x = 0"), g("x = 0"), 5)]
    report = tor_los_pp_verify(copies, 1, formulas)
    assert report.ltr_failures == 0 and report.rtl_failures == 0
    assert sum(e.samples for e in report.entries) > 0


def test_pp_transfer_needs_isomorphic_members():
    with pytest.raises(ValueError):
        tor_los_pp_verify([cyclic_sum([4]), cyclic_sum([2, 2])], 0, [g("2^1 | x")])


def test_order_profile_separates_groups():
    assert order_profile(finite_abelian_group([4])) != order_profile(finite_abelian_group([2, 2]))
    assert order_profile(finite_abelian_group([2, 3])) == order_profile(finite_abelian_group([6]))
