import pytest
from hypothesis import given, strategies as st

from gammaultra.formula import Signature, group_signature
from gammaultra.parser import parse_formula
from gammaultra.structures import (
    EvaluationError, UnboundVariable, cyclic_group, eval_formula_finite, eval_term,
    finite_abelian_group, group_coordinates, group_index, satisfaction_set, structure_from_tables,
)
from gammaultra.parser import parse_term

GROUP = group_signature()


def g(text):
    return parse_formula(text, GROUP)


@pytest.mark.parametrize("moduli,text,expected", [
    ([4], "exists x. (2*x = 0 & ~(x = 0))", True),
    ([3], "exists x. (2*x = 0 & ~(x = 0))", False),
    ([2, 2], "forall x. 2*x = 0", True),
    ([4], "forall x. 2*x = 0", False),
    ([6], "forall x. exists y. y + y + y = x", False),
    ([5], "forall x. exists y. y + y + y = x", True),
])
def test_sentences_in_small_groups(moduli, text, expected):
    assert eval_formula_finite(finite_abelian_group(moduli), g(text)) is expected


@pytest.mark.parametrize("moduli", [[1], [2], [6], [2, 4], [3, 3, 2]])
def test_group_axioms_hold(moduli):
    M = finite_abelian_group(moduli)
    for text in ["forall x. forall y. x + y = y + x",
                 "forall x. forall y. forall z. (x + y) + z = x + (y + z)",
                 "forall x. (x + 0 = x & x + -x = 0)"]:
        assert eval_formula_finite(M, g(text))


@given(st.lists(st.integers(1, 6), min_size=1, max_size=3), st.data())
def test_coordinates_round_trip(moduli, data):
    size = 1
    for m in moduli:
        size *= m
    i = data.draw(st.integers(0, size - 1))
    assert group_index(moduli, group_coordinates(moduli, i)) == i


@given(st.integers(1, 12), st.integers(-30, 30), st.data())
def test_scalar_matches_repeated_addition(m, k, data):
    M = cyclic_group(m)
    a = data.draw(st.sampled_from(list(M.universe)))
    assert M.scalar(k, a) == (k * a) % m


def test_satisfaction_set_of_order_two_elements():
    M = cyclic_group(8)
    assert satisfaction_set(M, g("2*x = 0"), "x") == frozenset({0, 4})


def test_trace_records_quantifier_decisions():
    trace = []
    assert eval_formula_finite(cyclic_group(4), g("exists x. (2*x = 0 & ~(x = 0))"), trace=trace)
    assert trace and "witness 2" in trace[0]


def test_unbound_variable_is_reported():
    with pytest.raises(UnboundVariable):
        eval_formula_finite(cyclic_group(2), g("x = 0"))


def test_numeral_outside_universe():
    sig = Signature("n", (("+", 2),), (), None, True)
    M = structure_from_tables(sig, [0, 1], {"+": {(a, b): (a + b) % 2 for a in (0, 1) for b in (0, 1)}}, {})
    with pytest.raises(EvaluationError):
        eval_term(M, parse_term("7", sig), {})


def test_partial_table_is_rejected():
    sig = Signature("u", (("F", 1),), ())
    with pytest.raises(ValueError):
        structure_from_tables(sig, ["a", "b"], {"F": {("a",): "b"}}, {})


def test_table_value_outside_universe_is_rejected():
    sig = Signature("u", (("F", 1),), ())
    with pytest.raises(ValueError):
        structure_from_tables(sig, ["a"], {"F": {("a",): "z"}}, {})


def test_relations_and_restriction():
    sig = Signature("u", (("F", 1),), (("R", 1),))
    M = structure_from_tables(sig, ["a", "b"], {"F": {("a",): "b", ("b",): "b"}}, {"R": [("a",)]})
    assert eval_formula_finite(M, parse_formula("exists x. (R(x) & ~R(F(x)))", sig))
    reduct = M.restrict_signature(Signature("r", (), (("R", 1),)))
    assert reduct.signature.functions == ()
