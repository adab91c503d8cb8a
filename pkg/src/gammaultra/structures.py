"""Finite structures with explicit tables and brute-force satisfaction."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Hashable, Iterable, Mapping, Sequence

from .formula import (
    And, Divides, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel, ScalarMul,
    Signature, Term, Var, group_signature, print_formula,
)

Element = Hashable


class UnboundVariable(KeyError):
    pass


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteStructure:
    """A finite structure given by total tables.

    ``functions[sym]`` maps argument tuples to elements (constants use the
    empty tuple); ``relations[sym]`` is the set of tuples where it holds.
    """

    signature: Signature
    universe: tuple[Element, ...]
    functions: Mapping[str, Mapping[tuple, Element]]
    relations: Mapping[str, frozenset[tuple]] = field(default_factory=dict)
    name: str = "M"

    def __post_init__(self) -> None:
        if not self.universe:
            raise ValueError("universe must be non-empty")
        if len(set(self.universe)) != len(self.universe):
            raise ValueError("universe has repeated elements")
        members = set(self.universe)
        for sym, arity in self.signature.functions:
            table = self.functions.get(sym)
            if table is None:
                raise ValueError(f"missing table for function {sym}")
            for args in itertools.product(self.universe, repeat=arity):
                if args not in table:
                    raise ValueError(f"table for {sym} undefined at {args}")
                if table[args] not in members:
                    raise ValueError(f"{sym}{args} = {table[args]!r} is outside the universe")
        for sym, arity in self.signature.relations:
            for tup in self.relations.get(sym, ()):
                if len(tup) != arity or not set(tup) <= members:
                    raise ValueError(f"bad tuple {tup} in relation {sym}")

    @property
    def size(self) -> int:
        return len(self.universe)

    @cached_property
    def _rel(self) -> dict[str, frozenset]:
        return {sym: frozenset(self.relations.get(sym, ())) for sym, _ in self.signature.relations}

    def apply(self, symbol: str, args: tuple) -> Element:
        try:
            return self.functions[symbol][args]
        except KeyError:
            raise EvaluationError(f"cannot apply {symbol} to {args}") from None

    def holds(self, symbol: str, args: tuple) -> bool:
        return args in self._rel[symbol]

    # -- group helpers (only meaningful when +, -, 0 are present)
    @cached_property
    def zero(self) -> Element:
        return self.apply("0", ())

    def scalar(self, k: int, a: Element) -> Element:
        """``k*a`` by double-and-add in the ``+`` table."""
        if k < 0:
            return self.scalar(-k, self.apply("-", (a,)))
        out, base = self.zero, a
        while k:
            if k & 1:
                out = self.apply("+", (out, base))
            base = self.apply("+", (base, base))
            k >>= 1
        return out

    def restrict_signature(self, sig: Signature) -> "FiniteStructure":
        funcs = {s: self.functions[s] for s, _ in sig.functions}
        rels = {s: self._rel[s] for s, _ in sig.relations}
        return FiniteStructure(sig, self.universe, funcs, rels, self.name)

    def __repr__(self) -> str:
        return f"FiniteStructure({self.name!r}, size={self.size})"


def eval_term(M: FiniteStructure, t: Term, env: Mapping[str, Element]) -> Element:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UnboundVariable(f"unbound variable {t.name}") from None
    if isinstance(t, ScalarMul):
        return M.scalar(t.coeff, eval_term(M, t.term, env))
    if M.signature.numerals and t.symbol.isdigit() and t.symbol not in M.functions:
        raise EvaluationError(f"numeral {t.symbol} is not in a finite universe")
    return M.apply(t.symbol, tuple(eval_term(M, a, env) for a in t.args))


def eval_formula_finite(M: FiniteStructure, f: Formula, env: Mapping[str, Element] | None = None,
                        trace: list[str] | None = None) -> bool:
    """Tarskian truth in ``M`` by enumerating the universe at each quantifier.

    If ``trace`` is a list, one line per quantifier decision is appended.
    """
    env = dict(env or {})
    missing = f.free_vars - env.keys()
    if missing:
        raise UnboundVariable(f"unbound free variables: {', '.join(sorted(missing))}")
    return _eval(M, f, env, trace, 0)


def _eval(M, f, env, trace, depth) -> bool:
    if isinstance(f, Eq):
        return eval_term(M, f.left, env) == eval_term(M, f.right, env)
    if isinstance(f, Rel):
        return M.holds(f.symbol, tuple(eval_term(M, a, env) for a in f.args))
    if isinstance(f, Divides):
        target = eval_term(M, f.term, env)
        q = f.modulus
        return any(M.scalar(q, y) == target for y in M.universe)
    if isinstance(f, Not):
        return not _eval(M, f.body, env, trace, depth)
    if isinstance(f, And):
        return _eval(M, f.left, env, trace, depth) and _eval(M, f.right, env, trace, depth)
    if isinstance(f, Or):
        return _eval(M, f.left, env, trace, depth) or _eval(M, f.right, env, trace, depth)
    if isinstance(f, Implies):
        return (not _eval(M, f.left, env, trace, depth)) or _eval(M, f.right, env, trace, depth)
    if isinstance(f, (Forall, Exists)):
        want = isinstance(f, Exists)
        saved = env.get(f.var, _MISSING)
        result = not want
        decisive = None
        for a in M.universe:
            env[f.var] = a
            if _eval(M, f.body, env, trace, depth + 1) == want:
                result, decisive = want, a
                break
        if saved is _MISSING:
            env.pop(f.var, None)
        else:
            env[f.var] = saved
        if trace is not None:
            q = "exists" if want else "forall"
            if decisive is None:
                how = "no element works" if want else "every element satisfies the body"
            else:
                how = f"witness {decisive!r}" if want else f"counterexample {decisive!r}"
            trace.append(f"{'  ' * depth}{q} {f.var}: {how} -> {result}")
        return result
    raise TypeError(f"not a formula: {f!r}")


_MISSING = object()


def satisfaction_set(M: FiniteStructure, f: Formula, var: str = "x",
                     env: Mapping[str, Element] | None = None) -> frozenset:
    base = dict(env or {})
    out = []
    for a in M.universe:
        base[var] = a
        if eval_formula_finite(M, f, base):
            out.append(a)
    return frozenset(out)


# ------------------------------------------------------------ builders


def finite_abelian_group(moduli: Sequence[int], name: str | None = None) -> FiniteStructure:
    """``Z_{m_1} + ... + Z_{m_r}`` with elements numbered in mixed radix.

    Element ``i`` stands for the tuple given by :func:`group_coordinates`.
    """
    moduli = tuple(int(m) for m in moduli) or (1,)
    if any(m < 1 for m in moduli):
        raise ValueError("moduli must be positive")
    n = reduce(lambda a, b: a * b, moduli, 1)
    coords = [group_coordinates(moduli, i) for i in range(n)]
    index = {c: i for i, c in enumerate(coords)}
    plus = {}
    minus = {}
    for i, a in enumerate(coords):
        minus[(i,)] = index[tuple((-x) % m for x, m in zip(a, moduli))]
        for j, b in enumerate(coords):
            plus[(i, j)] = index[tuple((x + y) % m for x, y, m in zip(a, b, moduli))]
    funcs = {"+": plus, "-": minus, "0": {(): 0}}
    label = name or " + ".join(f"Z_{m}" for m in moduli)
    return FiniteStructure(group_signature(), tuple(range(n)), funcs, {}, label)


def cyclic_group(m: int) -> FiniteStructure:
    return finite_abelian_group((m,))


def group_coordinates(moduli: Sequence[int], i: int) -> tuple[int, ...]:
    out = []
    for m in reversed(moduli):
        out.append(i % m)
        i //= m
    return tuple(reversed(out))


def group_index(moduli: Sequence[int], coords: Sequence[int]) -> int:
    i = 0
    for c, m in zip(coords, moduli):
        i = i * m + (c % m)
    return i


def structure_from_tables(sig: Signature, universe: Iterable[Element],
                          functions: Mapping[str, Mapping[tuple, Element]],
                          relations: Mapping[str, Iterable[tuple]] | None = None,
                          name: str = "M") -> FiniteStructure:
    rels = {k: frozenset(tuple(t) for t in v) for k, v in (relations or {}).items()}
    return FiniteStructure(sig, tuple(universe), dict(functions), rels, name)


def describe(f: Formula) -> str:
    return print_formula(f)
