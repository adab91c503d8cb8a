"""Signatures, terms and first-order formulas.

All nodes are frozen dataclasses, so formulas hash, compare structurally and
can be shared freely.  ``str()`` of any node yields text that the parser in
:mod:`gammaultra.parser` reads back to the same tree.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Union

INFIX_FUNCTIONS = ("+",)
PREFIX_FUNCTIONS = ("-",)


@dataclass(frozen=True)
class Signature:
    """A first-order signature.

    ``functions`` and ``relations`` are tuples of ``(symbol, arity)`` pairs;
    a function of arity 0 is a constant.  ``scalar == "Z"`` enables integer
    scalar terms ``k*t`` and divisibility atoms ``p^n | t``.  With
    ``numerals`` set, every integer literal is a constant (used for the
    natural numbers).
    """

    name: str
    functions: tuple[tuple[str, int], ...] = ()
    relations: tuple[tuple[str, int], ...] = ()
    scalar: str | None = None
    numerals: bool = False

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for sym, arity in self.functions:
            if sym in seen:
                raise ValueError(f"duplicate symbol {sym!r}")
            if arity < 0:
                raise ValueError(f"negative arity for {sym!r}")
            seen.add(sym)
        for sym, arity in self.relations:
            if sym in seen:
                raise ValueError(f"duplicate symbol {sym!r}")
            if arity < 1:
                raise ValueError(f"relation {sym!r} needs arity >= 1")
            seen.add(sym)
        if self.scalar not in (None, "Z"):
            raise ValueError(f"unsupported scalar ring {self.scalar!r}")

    @cached_property
    def function_arity(self) -> dict[str, int]:
        return dict(self.functions)

    @cached_property
    def relation_arity(self) -> dict[str, int]:
        return dict(self.relations)

    def is_constant(self, symbol: str) -> bool:
        if self.function_arity.get(symbol) == 0:
            return True
        return self.numerals and symbol.isdigit()

    def arity(self, symbol: str) -> int | None:
        if symbol in self.function_arity:
            return self.function_arity[symbol]
        if self.numerals and symbol.isdigit():
            return 0
        return None

    def expand(self, name: str | None = None, functions=(), relations=()) -> "Signature":
        return Signature(
            name or self.name,
            self.functions + tuple(functions),
            self.relations + tuple(relations),
            self.scalar,
            self.numerals,
        )

    def relational_reduct(self) -> "Signature":
        return Signature(self.name + "-rel", (), self.relations, self.scalar, self.numerals)


def group_signature(extra_constants: Iterable[str] = ()) -> Signature:
    """The language of abelian groups / Z-modules: ``+``, ``-``, ``0``."""
    funcs = (("+", 2), ("-", 1), ("0", 0)) + tuple((c, 0) for c in extra_constants)
    return Signature("group", funcs, (), scalar="Z")


# --------------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        return print_term(self)


@dataclass(frozen=True)
class ScalarMul:
    coeff: int
    term: "Term"

    def __str__(self) -> str:
        return print_term(self)


Term = Union[Var, App, ScalarMul]

ZERO = App("0")


def add(a: Term, b: Term) -> App:
    return App("+", (a, b))


def neg(a: Term) -> App:
    return App("-", (a,))


def sub(a: Term, b: Term) -> App:
    return add(a, neg(b))


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, ScalarMul):
        return term_vars(t.term)
    out: frozenset[str] = frozenset()
    for a in t.args:
        out |= term_vars(a)
    return out


def term_symbols(t: Term) -> Iterator[str]:
    if isinstance(t, App):
        yield t.symbol
        for a in t.args:
            yield from term_symbols(a)
    elif isinstance(t, ScalarMul):
        yield from term_symbols(t.term)


def substitute_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, ScalarMul):
        return ScalarMul(t.coeff, substitute_term(t.term, mapping))
    if not t.args:
        return t
    return App(t.symbol, tuple(substitute_term(a, mapping) for a in t.args))


def replace_subterm(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    if isinstance(t, ScalarMul):
        return ScalarMul(t.coeff, replace_subterm(t.term, old, new))
    if isinstance(t, App) and t.args:
        return App(t.symbol, tuple(replace_subterm(a, old, new) for a in t.args))
    return t


# ------------------------------------------------------------------ formulas


class _Node:
    """Mixin giving every formula a cached free-variable set and ``str``."""

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return _free_vars(self)

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, eq=True)
class Eq(_Node):
    left: Term
    right: Term


@dataclass(frozen=True)
class Rel(_Node):
    symbol: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Divides(_Node):
    """``p^n | term``; sugar for ``exists y. p^n*y = term``."""

    p: int
    n: int
    term: Term

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.n < 1:
            raise ValueError("divisibility exponent must be >= 1")

    @property
    def modulus(self) -> int:
        return self.p ** self.n


@dataclass(frozen=True)
class Not(_Node):
    body: "Formula"


@dataclass(frozen=True)
class And(_Node):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or(_Node):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies(_Node):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall(_Node):
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists(_Node):
    var: str
    body: "Formula"


Formula = Union[Eq, Rel, Divides, Not, And, Or, Implies, Forall, Exists]
ATOMS = (Eq, Rel, Divides)
BINARY = (And, Or, Implies)
QUANTIFIERS = (Forall, Exists)


def _free_vars(f) -> frozenset[str]:
    if isinstance(f, Eq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Rel):
        out: frozenset[str] = frozenset()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Divides):
        return term_vars(f.term)
    if isinstance(f, Not):
        return f.body.free_vars
    if isinstance(f, BINARY):
        return f.left.free_vars | f.right.free_vars
    if isinstance(f, QUANTIFIERS):
        return f.body.free_vars - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def conj(items: Iterable[Formula]) -> Formula:
    """Left-associated conjunction; raises on an empty list."""
    items = list(items)
    if not items:
        raise ValueError("empty conjunction")
    out = items[0]
    for it in items[1:]:
        out = And(out, it)
    return out


def disj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        raise ValueError("empty disjunction")
    out = items[0]
    for it in items[1:]:
        out = Or(out, it)
    return out


def negate(f: Formula) -> Formula:
    """Negation that cancels a leading ``~``."""
    return f.body if isinstance(f, Not) else Not(f)


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not) or isinstance(f, QUANTIFIERS):
        yield from subformulas(f.body)
    elif isinstance(f, BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def atoms_of(f: Formula) -> Iterator[Formula]:
    for g in subformulas(f):
        if isinstance(g, ATOMS):
            yield g


def formula_symbols(f: Formula) -> set[str]:
    out: set[str] = set()
    for a in atoms_of(f):
        if isinstance(a, Eq):
            out.update(term_symbols(a.left))
            out.update(term_symbols(a.right))
        elif isinstance(a, Rel):
            out.add(a.symbol)
            for t in a.args:
                out.update(term_symbols(t))
        else:
            out.update(term_symbols(a.term))
    return out


def has_quantifier(f: Formula) -> bool:
    return any(isinstance(g, QUANTIFIERS) for g in subformulas(f))


def all_vars(f: Formula) -> set[str]:
    out: set[str] = set()
    for g in subformulas(f):
        if isinstance(g, QUANTIFIERS):
            out.add(g.var)
        elif isinstance(g, ATOMS):
            out |= g.free_vars
    return out


def fresh_name(avoid: set[str] | frozenset[str], stem: str = "v") -> str:
    i = 0
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def substitute(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Capture-avoiding simultaneous substitution of terms for free variables."""
    mapping = {k: v for k, v in mapping.items() if k in f.free_vars}
    if not mapping:
        return f
    if isinstance(f, Eq):
        return Eq(substitute_term(f.left, mapping), substitute_term(f.right, mapping))
    if isinstance(f, Rel):
        return Rel(f.symbol, tuple(substitute_term(a, mapping) for a in f.args))
    if isinstance(f, Divides):
        return Divides(f.p, f.n, substitute_term(f.term, mapping))
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping))
    if isinstance(f, BINARY):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    incoming: set[str] = set()
    for t in mapping.values():
        incoming |= term_vars(t)
    var, body = f.var, f.body
    if var in incoming:
        new = fresh_name(incoming | all_vars(body) | set(mapping), var)
        body = substitute(body, {var: Var(new)})
        var = new
    return type(f)(var, substitute(body, mapping))


def rename_free(f: Formula, old: str, new: str) -> Formula:
    return substitute(f, {old: Var(new)})


# ------------------------------------------------------------------- printing


def _is_simple(t: Term) -> bool:
    return isinstance(t, Var) or (isinstance(t, App) and (not t.args or t.symbol not in INFIX_FUNCTIONS + PREFIX_FUNCTIONS))


def _wrap(t: Term) -> str:
    s = print_term(t)
    return s if _is_simple(t) else f"({s})"


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, ScalarMul):
        return f"{t.coeff}*{_wrap(t.term)}"
    if not t.args:
        return t.symbol
    if t.symbol in INFIX_FUNCTIONS and len(t.args) == 2:
        left = print_term(t.args[0]) if isinstance(t.args[0], App) and t.args[0].symbol == "+" else _wrap_sum(t.args[0])
        return f"{left} {t.symbol} {_wrap_sum(t.args[1])}"
    if t.symbol in PREFIX_FUNCTIONS and len(t.args) == 1:
        return f"{t.symbol}{_wrap(t.args[0])}"
    return f"{t.symbol}(" + ", ".join(print_term(a) for a in t.args) + ")"


def _wrap_sum(t: Term) -> str:
    # Summands print bare except nested sums on the right, which need grouping
    # to survive left-associative re-parsing.
    if isinstance(t, App) and t.symbol == "+" and len(t.args) == 2:
        return f"({print_term(t)})"
    return print_term(t)


def _wrap_left(f: Formula) -> str:
    s = print_formula(f)
    return f"({s})" if isinstance(f, QUANTIFIERS) else s


def print_formula(f: Formula) -> str:
    if isinstance(f, Eq):
        return f"{print_term(f.left)} = {print_term(f.right)}"
    if isinstance(f, Rel):
        return f"{f.symbol}(" + ", ".join(print_term(a) for a in f.args) + ")"
    if isinstance(f, Divides):
        return f"{f.p}^{f.n} | {_wrap(f.term)}"
    if isinstance(f, Not):
        return f"~({print_formula(f.body)})"
    if isinstance(f, And):
        return f"({_wrap_left(f.left)} & {print_formula(f.right)})"
    if isinstance(f, Or):
        return f"({_wrap_left(f.left)} | {print_formula(f.right)})"
    if isinstance(f, Implies):
        return f"({_wrap_left(f.left)} -> {print_formula(f.right)})"
    if isinstance(f, Forall):
        return f"forall {f.var}. {print_formula(f.body)}"
    if isinstance(f, Exists):
        return f"exists {f.var}. {print_formula(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


# ------------------------------------------------------------ number theory


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial division; ``n`` must be nonzero."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(n: int) -> tuple[int, int] | None:
    f = factorize(n) if n > 1 else {}
    if len(f) != 1:
        return None
    (p, e), = f.items()
    return p, e


def valuation(n: int, p: int) -> int:
    """p-adic valuation; infinite valuation of 0 is reported as a large int."""
    if n == 0:
        return 1 << 30
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def first_primes(k: int) -> list[int]:
    out: list[int] = []
    n = 2
    while len(out) < k:
        if is_prime(n):
            out.append(n)
        n += 1
    return out
