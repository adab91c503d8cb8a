"""Ultrafilter descriptors, index families and finitely described sequences.

A :class:`DefinableSequence` is a closed-form tail plus finitely many
exceptional values.  The tail decider turns "the set of indices where a
formula holds of the sequence" into an explicit finite or cofinite set by
finding a threshold past which truth is periodic.
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Mapping, Union

from .analysis import linear_form
from .formula import (
    And, Divides, Eq, Formula, Implies, Not, Or, Rel, ScalarMul, Signature, Term,
    Var, atoms_of,
)
from .groups import (
    Cyclic, Tail, TorsionElement, TorsionGroupPresentation, UnsupportedFormula,
    ZERO_ELEMENT, eval_qf_torsion,
)
from .structures import FiniteStructure, eval_formula_finite


class Unrepresentable(ValueError):
    """A pointwise combination has no closed-form descriptor."""


# ------------------------------------------------------------- index sets


@dataclass(frozen=True)
class FiniteSet:
    elements: frozenset[int]

    def describe(self) -> str:
        if not self.elements:
            return "{}"
        top = max(self.elements)
        if self.elements == frozenset(range(top + 1)):
            return f"{{n < {top + 1}}}"
        return "{" + ", ".join(map(str, sorted(self.elements))) + "}"

    def initial_segment(self) -> int | None:
        n = len(self.elements)
        return n if self.elements == frozenset(range(n)) else None


@dataclass(frozen=True)
class CofiniteSet:
    complement: frozenset[int]

    def describe(self) -> str:
        if not self.complement:
            return "all indices"
        return "all n except " + ", ".join(map(str, sorted(self.complement)))


@dataclass(frozen=True)
class UndecidedSet:
    reason: str

    def describe(self) -> str:
        return f"undecided ({self.reason})"


IndexSet = Union[FiniteSet, CofiniteSet, UndecidedSet]


@dataclass(frozen=True)
class PrincipalFinite:
    size: int
    atom: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.atom < self.size:
            raise ValueError("atom must lie in the index set")

    def large(self, s: IndexSet) -> bool | None:
        if isinstance(s, UndecidedSet):
            return None
        if isinstance(s, FiniteSet):
            return self.atom in s.elements
        return self.atom not in s.complement

    def __str__(self) -> str:
        return f"principal({self.atom} of {self.size})"


@dataclass(frozen=True)
class Frechet:
    """Stand-in for a nonprincipal ultrafilter on omega: only finite and
    cofinite sets get an answer."""

    def large(self, s: IndexSet) -> bool | None:
        if isinstance(s, CofiniteSet):
            return True
        if isinstance(s, FiniteSet):
            return False
        return None

    def __str__(self) -> str:
        return "frechet"


Ultrafilter = Union[PrincipalFinite, Frechet]


# ------------------------------------------------------------ descriptors


@dataclass(frozen=True)
class ConstantElem:
    value: object

    def describe(self) -> str:
        return f"n -> {self.value}"


@dataclass(frozen=True)
class AffineNat:
    a: int
    b: int

    def describe(self) -> str:
        return f"n -> {self.a}*n + {self.b}"


@dataclass(frozen=True)
class GeometricNat:
    a: int
    c: int
    d: int

    def describe(self) -> str:
        return f"n -> {self.a}*{self.c}^n + {self.d}"


@dataclass(frozen=True)
class TailUnit:
    """``coeff * p^max(h(n) - j, 0)`` in component ``n`` (of tail summand
    ``summand`` when the family is a power of a presentation).  With ``j``
    omitted the value is ``coeff`` itself."""

    coeff: int
    j: int | None = None
    summand: int = 0

    def describe(self) -> str:
        if self.j is None:
            return f"n -> {self.coeff} in component n"
        return f"n -> {self.coeff}*p^(h(n)-{self.j}) in component n"


@dataclass(frozen=True)
class TailSum:
    parts: tuple[Union[ConstantElem, TailUnit], ...]

    def describe(self) -> str:
        return " + ".join(p.describe() for p in self.parts)


TailDescriptor = Union[ConstantElem, AffineNat, GeometricNat, TailUnit, TailSum]


@dataclass(frozen=True)
class DefinableSequence:
    tail: TailDescriptor
    exceptions: tuple[tuple[int, object], ...] = ()

    def __post_init__(self) -> None:
        keys = [n for n, _ in self.exceptions]
        if len(set(keys)) != len(keys) or any(n < 0 for n in keys):
            raise ValueError("exceptional indices must be distinct and non-negative")
        object.__setattr__(self, "exceptions", tuple(sorted(self.exceptions, key=lambda t: t[0])))

    @property
    def exception_map(self) -> dict[int, object]:
        return dict(self.exceptions)

    @property
    def exceptional_bound(self) -> int:
        return max((n + 1 for n, _ in self.exceptions), default=0)

    def with_exception(self, n: int, value) -> "DefinableSequence":
        ex = self.exception_map
        ex[n] = value
        return DefinableSequence(self.tail, tuple(ex.items()))

    def describe(self) -> str:
        s = self.tail.describe()
        if self.exceptions:
            s += " except " + ", ".join(f"{n} -> {v}" for n, v in self.exceptions)
        return s


def constant(value) -> DefinableSequence:
    return DefinableSequence(ConstantElem(value))


# -------------------------------------------------------- natural numbers


NAT_SIGNATURE = Signature(
    "arith", (("+", 2), ("mul", 2)), (("lt", 2), ("le", 2)), scalar="Z", numerals=True,
)


@dataclass(frozen=True)
class NaturalNumbers:
    """``(omega, +, mul, lt, le)`` with every numeral a constant.  Formulas are
    evaluated only when quantifier-free (divisibility atoms allowed)."""

    signature: Signature = NAT_SIGNATURE
    name: str = "N"

    def eval_term(self, t: Term, env: Mapping[str, int]) -> int:
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, ScalarMul):
            if t.coeff < 0:
                raise UnsupportedFormula("negative scalar in the natural numbers")
            return t.coeff * self.eval_term(t.term, env)
        if t.symbol.isdigit() and not t.args:
            return int(t.symbol)
        args = [self.eval_term(a, env) for a in t.args]
        if t.symbol == "+":
            return args[0] + args[1]
        if t.symbol == "mul":
            return args[0] * args[1]
        raise UnsupportedFormula(f"unknown function {t.symbol}")

    def eval(self, f: Formula, env: Mapping[str, int]) -> bool:
        if isinstance(f, Eq):
            return self.eval_term(f.left, env) == self.eval_term(f.right, env)
        if isinstance(f, Rel):
            a, b = (self.eval_term(t, env) for t in f.args)
            if f.symbol == "lt":
                return a < b
            if f.symbol == "le":
                return a <= b
            raise UnsupportedFormula(f"unknown relation {f.symbol}")
        if isinstance(f, Divides):
            return self.eval_term(f.term, env) % f.modulus == 0
        if isinstance(f, Not):
            return not self.eval(f.body, env)
        if isinstance(f, And):
            return self.eval(f.left, env) and self.eval(f.right, env)
        if isinstance(f, Or):
            return self.eval(f.left, env) or self.eval(f.right, env)
        if isinstance(f, Implies):
            return (not self.eval(f.left, env)) or self.eval(f.right, env)
        raise UnsupportedFormula("quantifiers are not evaluated in the natural numbers")


# Polynomials in one indeterminate, as {degree: coefficient}.
Poly = dict[int, int]


def _padd(a: Poly, b: Poly, s: int = 1) -> Poly:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + s * v
    return {k: v for k, v in out.items() if v}


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _poly_of_term(t: Term, x: Poly) -> Poly:
    if isinstance(t, Var):
        return dict(x)
    if isinstance(t, ScalarMul):
        return {k: t.coeff * v for k, v in _poly_of_term(t.term, x).items() if t.coeff * v}
    if t.symbol.isdigit() and not t.args:
        return {0: int(t.symbol)} if int(t.symbol) else {}
    args = [_poly_of_term(a, x) for a in t.args]
    if t.symbol == "+":
        return _padd(args[0], args[1])
    if t.symbol == "mul":
        return _pmul(args[0], args[1])
    raise UnsupportedFormula(f"unknown function {t.symbol}")


def _cauchy_bound(q: Poly) -> int:
    """Every real root of ``q`` has absolute value below the returned integer."""
    if not q:
        return 0
    deg = max(q)
    lead = abs(q[deg])
    return 1 + max((abs(v) for k, v in q.items() if k != deg), default=0) // lead + 1


def _pre_period(c: int, m: int) -> tuple[int, int]:
    """``(mu, lam)`` for the sequence ``c^n mod m``."""
    seen: dict[int, int] = {}
    v, n = 1 % m, 0
    while v not in seen:
        seen[v] = n
        v = v * c % m
        n += 1
    mu = seen[v]
    return mu, n - mu


# ------------------------------------------------------------- families


@dataclass(frozen=True)
class FiniteFamily:
    structures: tuple[FiniteStructure, ...]

    @property
    def size(self) -> int:
        return len(self.structures)

    def member(self, i: int):
        return self.structures[i]

    def describe(self) -> str:
        return "(" + ", ".join(m.name for m in self.structures) + ")"


@dataclass(frozen=True)
class ConstantPower:
    structure: Union[FiniteStructure, NaturalNumbers, TorsionGroupPresentation]

    size = None

    def member(self, i: int):
        return self.structure

    def describe(self) -> str:
        return f"{getattr(self.structure, 'name', 'M')}^omega"


@dataclass(frozen=True)
class TailPower:
    """The family ``Z_{p^h(i)}`` for ``i < omega``, ``h(i) = a*i + b``."""

    p: int
    a: int = 1
    b: int = 0

    size = None

    def h(self, i: int) -> int:
        return self.a * i + self.b

    def member(self, i: int) -> TorsionGroupPresentation:
        return TorsionGroupPresentation((Cyclic(self.p, self.h(i)),), f"Z_{self.p ** self.h(i)}")

    def describe(self) -> str:
        return f"(Z_{self.p}^({self.a}i+{self.b}))_i"


Family = Union[FiniteFamily, ConstantPower, TailPower]


def is_torsion_family(family: Family) -> bool:
    return isinstance(family, TailPower) or (
        isinstance(family, ConstantPower) and isinstance(family.structure, TorsionGroupPresentation))


def _tail_of(family: Family, summand: int) -> tuple[int, callable]:
    """Prime and height function of the summand a unit sequence moves along."""
    if isinstance(family, TailPower):
        return family.p, family.h
    s = family.structure.summands[summand]
    if isinstance(s, Tail):
        return s.p, s.h
    if isinstance(s, Cyclic):
        return s.p, (lambda n, k=s.k: k)
    return s.p, None


def _unit_value(family: Family, u: TailUnit, n: int):
    p, h = _tail_of(family, u.summand)
    if h is None:
        v = Fraction(u.coeff, p ** (u.j or 0))
    else:
        v = u.coeff if u.j is None else u.coeff * p ** max(h(n) - u.j, 0)
    if isinstance(family, TailPower):
        return v % p ** h(n)
    return family.structure.element([(u.summand, n, v)])


def _to_element(family: Family, n: int, value) -> object:
    """Normalize a raw value into an element of member ``n``."""
    if isinstance(family, TailPower):
        if isinstance(value, TorsionElement):
            return value
        return family.member(n).element([(0, 0, int(value))])
    if isinstance(family, ConstantPower) and isinstance(family.structure, TorsionGroupPresentation):
        if isinstance(value, TorsionElement):
            return value
        if isinstance(value, int) and value == 0:
            return ZERO_ELEMENT
        return family.structure.element(value)
    return value


def sequence_value(family: Family, f: DefinableSequence, n: int):
    """``f(n)`` as an element of the ``n``-th member."""
    ex = f.exception_map
    if n in ex:
        return _to_element(family, n, ex[n])
    t = f.tail
    if isinstance(t, ConstantElem):
        return _to_element(family, n, t.value)
    if isinstance(t, AffineNat):
        return t.a * n + t.b
    if isinstance(t, GeometricNat):
        v = t.a * t.c ** n + t.d
        if v < 0:
            raise ValueError(f"sequence value {v} at {n} is not a natural number")
        return v
    if isinstance(t, TailUnit):
        return _to_element(family, n, _unit_value(family, t, n))
    if isinstance(t, TailSum):
        G = family.member(n)
        out = ZERO_ELEMENT
        for part in t.parts:
            piece = DefinableSequence(part)
            out = G.add(out, sequence_value(family, piece, n))
        return out
    raise TypeError(f"unknown descriptor {t!r}")


def holds_at(family: Family, f: Formula, elem, n: int, var: str = "x") -> bool:
    M = family.member(n)
    if isinstance(M, FiniteStructure):
        return eval_formula_finite(M, f, {var: elem})
    if isinstance(M, NaturalNumbers):
        return M.eval(f, {var: elem})
    return eval_qf_torsion(M, f, {var: elem})


# ------------------------------------------------------------ the decider


def _nat_profile(f: Formula, t: TailDescriptor, var: str) -> tuple[int, int]:
    """Threshold and period past which truth of ``f`` at ``t(n)`` is periodic."""
    if isinstance(t, ConstantElem):
        return 0, 1
    if isinstance(t, AffineNat):
        x: Poly = {k: v for k, v in ((1, t.a), (0, t.b)) if v}
        geometric = None
    elif isinstance(t, GeometricNat):
        if t.c in (0, 1):
            return 1, 1
        x = {k: v for k, v in ((1, t.a), (0, t.d)) if v}
        geometric = t.c
    else:
        raise UnsupportedFormula(f"descriptor {t.describe()} over the natural numbers")
    threshold, period = 0, 1
    for atom in atoms_of(f):
        if isinstance(atom, Divides):
            q = _poly_of_term(atom.term, x)
            m = atom.modulus
            if geometric is None:
                th, per = 0, m
            else:
                th, per = _pre_period(geometric, m)
        else:
            if isinstance(atom, Eq):
                s, u = atom.left, atom.right
            else:
                s, u = atom.args
            q = _padd(_poly_of_term(s, x), _poly_of_term(u, x), -1)
            bound = _cauchy_bound(q)
            if geometric is None:
                th = bound
            else:
                th = 0
                while geometric ** th <= bound:
                    th += 1
            per = 1
        threshold = max(threshold, th)
        period = math.lcm(period, per)
    return threshold, period


def _torsion_profile(family: Family, f: Formula, t: TailDescriptor) -> tuple[int, int]:
    if isinstance(t, ConstantElem) and not isinstance(family, TailPower):
        return 0, 1
    parts = t.parts if isinstance(t, TailSum) else (t,)
    budget = 2
    for atom in atoms_of(f):
        if isinstance(atom, Divides):
            terms = [atom.term]
            budget += atom.n
        elif isinstance(atom, Eq):
            terms = [atom.left, atom.right]
        else:
            raise UnsupportedFormula(f"relation atom {atom} in a group formula")
        for term in terms:
            lf = linear_form(term)
            if lf is None:
                raise UnsupportedFormula(f"non-module term in {atom}")
            budget += sum(abs(c).bit_length() for c in lf.values())
    heights = []
    for part in parts:
        if isinstance(part, ConstantElem):
            if isinstance(family, TailPower):
                heights.append(budget + abs(int(part.value)).bit_length())
            continue
        heights.append(budget + (part.j or 0) + abs(part.coeff).bit_length())
    if not heights:
        return 0, 1
    summands = {p.summand for p in parts if isinstance(p, TailUnit)} or {0}
    need = max(heights)
    threshold = 0
    for s in summands:
        _, h = _tail_of(family, s)
        if isinstance(family, ConstantPower) and not isinstance(family.structure.summands[s], Tail):
            continue  # the value only moves between isomorphic components
        n = 0
        while h(n) < need:
            n += 1
        threshold = max(threshold, n)
    return threshold, 1


def satisfaction_indices(family: Family, f: Formula, seq: DefinableSequence, var: str = "x") -> IndexSet:
    """``{n : M_n |= f(seq(n))}`` as an explicit finite or cofinite set."""
    try:
        if isinstance(family, FiniteFamily):
            return FiniteSet(frozenset(
                n for n in range(family.size) if holds_at(family, f, sequence_value(family, seq, n), n, var)))
        M = family.member(0)
        if isinstance(family, ConstantPower) and isinstance(M, FiniteStructure):
            threshold, period = 0, 1
            if not isinstance(seq.tail, ConstantElem):
                return UndecidedSet("only constant tails over a finite structure")
        elif isinstance(M, NaturalNumbers):
            threshold, period = _nat_profile(f, seq.tail, var)
        else:
            threshold, period = _torsion_profile(family, f, seq.tail)
        start = max(threshold, seq.exceptional_bound)
        truth = [holds_at(family, f, sequence_value(family, seq, n), n, var) for n in range(start + period)]
    except UnsupportedFormula as err:
        return UndecidedSet(str(err))
    periodic = truth[start:]
    head = {n for n in range(start) if truth[n]}
    if not any(periodic):
        return FiniteSet(frozenset(head))
    if all(periodic):
        return CofiniteSet(frozenset(n for n in range(start) if not truth[n]))
    return UndecidedSet(f"holds on a periodic set with period {period} past index {start}")


# ------------------------------------------------------ pointwise algebra


def _add_tails(family: Family, s: TailDescriptor, t: TailDescriptor) -> TailDescriptor:
    if is_torsion_family(family):
        if isinstance(s, ConstantElem) and isinstance(t, ConstantElem):
            if isinstance(family, TailPower):
                return ConstantElem(int(s.value) + int(t.value))
            G = family.structure
            return ConstantElem(G.add(_to_element(family, 0, s.value), _to_element(family, 0, t.value)))
        parts: list = []
        for d in (s, t):
            parts.extend(d.parts if isinstance(d, TailSum) else (d,))
        merged: dict = {}
        consts = []
        for part in parts:
            if isinstance(part, TailUnit):
                key = (part.j, part.summand)
                merged[key] = merged.get(key, 0) + part.coeff
            elif isinstance(part, ConstantElem):
                consts.append(part)
            else:
                raise Unrepresentable(f"cannot add {part.describe()} in a torsion family")
        units = tuple(TailUnit(c, j, sm) for (j, sm), c in merged.items() if c)
        const = None
        for c in consts:
            const = c if const is None else _add_tails(family, const, c)
        out = units + ((const,) if const is not None else ())
        if len(out) == 1:
            return out[0]
        return TailSum(out)
    if isinstance(s, ConstantElem) and isinstance(t, ConstantElem):
        if isinstance(s.value, int) and isinstance(t.value, int):
            return ConstantElem(s.value + t.value)
        raise Unrepresentable("constant tails outside the natural numbers")
    if isinstance(t, ConstantElem):
        s, t = t, s
    if isinstance(s, ConstantElem):
        if isinstance(t, AffineNat):
            return AffineNat(t.a, t.b + s.value)
        if isinstance(t, GeometricNat):
            return GeometricNat(t.a, t.c, t.d + s.value)
    if isinstance(s, AffineNat) and isinstance(t, AffineNat):
        return AffineNat(s.a + t.a, s.b + t.b)
    if isinstance(s, GeometricNat) and isinstance(t, GeometricNat) and s.c == t.c:
        return GeometricNat(s.a + t.a, s.c, s.d + t.d)
    raise Unrepresentable(f"no closed form for ({s.describe()}) + ({t.describe()})")


def _add_values(family: Family, n: int, a, b):
    M = family.member(n)
    if isinstance(M, NaturalNumbers):
        return a + b
    if isinstance(M, TorsionGroupPresentation):
        return M.add(a, b)
    return M.apply("+", (a, b))


def add_sequences(family: Family, f: DefinableSequence, g: DefinableSequence) -> DefinableSequence:
    """The pointwise sum, with a closed-form tail; raises :class:`Unrepresentable`."""
    if isinstance(family, FiniteFamily):
        values = tuple((n, _add_values(family, n, sequence_value(family, f, n), sequence_value(family, g, n)))
                       for n in range(family.size))
        return DefinableSequence(ConstantElem(values[0][1]), values)
    if isinstance(family, ConstantPower) and isinstance(family.structure, FiniteStructure):
        if not (isinstance(f.tail, ConstantElem) and isinstance(g.tail, ConstantElem)):
            raise Unrepresentable("only constant tails over a finite structure")
        tail = ConstantElem(family.structure.apply("+", (f.tail.value, g.tail.value)))
    else:
        tail = _add_tails(family, f.tail, g.tail)
    keys = sorted(set(f.exception_map) | set(g.exception_map))
    ex = tuple((n, _add_values(family, n, sequence_value(family, f, n), sequence_value(family, g, n)))
               for n in keys)
    return DefinableSequence(tail, ex)
