"""Shape analysis of formulas: prenex forms, quantifier classes, p.p. normal
forms, unary type presentations and the formula builders built on them."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .formula import (
    ATOMS, BINARY, QUANTIFIERS, ZERO, And, App, Divides, Eq, Exists, Forall,
    Formula, Implies, Not, Or, Rel, ScalarMul, Signature, Term, Var, all_vars,
    conj, disj, factorize, fresh_name, has_quantifier, negate, replace_subterm,
    sub, substitute,
)


class QuantClass(enum.Enum):
    QUANTIFIER_FREE = "QuantifierFree"
    UNIVERSAL = "Universal"
    EXISTENTIAL = "Existential"
    EXISTS_FORALL = "ExistsForall"
    FORALL_EXISTS = "ForallExists"
    PP = "PP"
    BOOL_PP = "BoolPP"
    INVARIANTS_SENTENCE = "InvariantsSentence"
    OTHER = "Other"

    def __str__(self) -> str:
        return self.value


# ------------------------------------------------------------ normal forms


def nnf(f: Formula, expand_divides: bool = False) -> Formula:
    """Negation normal form.  Implications are unfolded; negations sit on atoms.

    With ``expand_divides`` each ``p^n | t`` becomes ``exists y. p^n*y = t``.
    """
    return _nnf(f, True, expand_divides, set(all_vars(f)))


def _nnf(f: Formula, positive: bool, expand: bool, used: set[str]) -> Formula:
    if isinstance(f, Divides) and expand:
        y = fresh_name(used, "y")
        used.add(y)
        f = Exists(y, Eq(ScalarMul(f.modulus, Var(y)), f.term))
    if isinstance(f, ATOMS):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return _nnf(f.body, not positive, expand, used)
    if isinstance(f, Implies):
        f = Or(Not(f.left), f.right)
    if isinstance(f, (And, Or)):
        left = _nnf(f.left, positive, expand, used)
        right = _nnf(f.right, positive, expand, used)
        is_and = isinstance(f, And) == positive
        return And(left, right) if is_and else Or(left, right)
    if isinstance(f, QUANTIFIERS):
        body = _nnf(f.body, positive, expand, used)
        is_all = isinstance(f, Forall) == positive
        return Forall(f.var, body) if is_all else Exists(f.var, body)
    raise TypeError(f"not a formula: {f!r}")


A, E = "A", "E"


@dataclass(frozen=True)
class Prenex:
    """A prenex form: quantifier blocks (kind, variables) over a matrix."""

    blocks: tuple[tuple[str, tuple[str, ...]], ...]
    matrix: Formula

    def to_formula(self) -> Formula:
        out = self.matrix
        for kind, names in reversed(self.blocks):
            for v in reversed(names):
                out = Forall(v, out) if kind == A else Exists(v, out)
        return out

    @property
    def prefix(self) -> str:
        return "".join(kind for kind, _ in self.blocks)


def _merge(a, b):
    """Interleave two block lists with the fewest alternations."""
    best = None
    for start in (A, E):
        i = j = 0
        kind = start
        out: list[tuple[str, list[str]]] = []
        while i < len(a) or j < len(b):
            names: list[str] = []
            if i < len(a) and a[i][0] == kind:
                names += a[i][1]
                i += 1
            if j < len(b) and b[j][0] == kind:
                names += b[j][1]
                j += 1
            if names:
                out.append((kind, names))
            kind = E if kind == A else A
        if best is None or len(out) < len(best):
            best = out
    return best


def _prenex(f: Formula):
    if isinstance(f, QUANTIFIERS):
        blocks, matrix = _prenex(f.body)
        kind = A if isinstance(f, Forall) else E
        if blocks and blocks[0][0] == kind:
            blocks = [(kind, [f.var] + blocks[0][1])] + blocks[1:]
        else:
            blocks = [(kind, [f.var])] + blocks
        return blocks, matrix
    if isinstance(f, (And, Or)):
        lb, lm = _prenex(f.left)
        rb, rm = _prenex(f.right)
        return _merge(lb, rb), type(f)(lm, rm)
    return [], f


def _make_bound_unique(f: Formula, used: set[str]) -> Formula:
    if isinstance(f, QUANTIFIERS):
        new = fresh_name(used, "b")
        used.add(new)
        body = substitute(f.body, {f.var: Var(new)})
        return type(f)(new, _make_bound_unique(body, used))
    if isinstance(f, Not):
        return Not(_make_bound_unique(f.body, used))
    if isinstance(f, BINARY):
        return type(f)(_make_bound_unique(f.left, used), _make_bound_unique(f.right, used))
    return f


def prenex_normal_form(f: Formula, expand_divides: bool = True) -> Prenex:
    """Prenex form with the fewest quantifier alternations.

    Bound variables are renamed canonically ``x0, x1, ...`` in binding order
    (another stem is picked if those names clash with free variables).
    """
    g = nnf(f, expand_divides)
    used = set(all_vars(g))
    g = _make_bound_unique(g, used)
    blocks, matrix = _prenex(g)
    bound = [v for _, names in blocks for v in names]
    stem = next(s for s in ("x", "v", "w", "u", "z")
                if not any(f"{s}{i}" in f.free_vars for i in range(len(bound))))
    mapping = {v: Var(f"{stem}{i}") for i, v in enumerate(bound)}
    matrix = substitute(matrix, mapping)
    out = tuple((k, tuple(mapping[v].name for v in names)) for k, names in blocks)
    return Prenex(out, matrix)


# ------------------------------------------------------- p.p. normal forms

LinComb = tuple[tuple[str, int], ...]


def _lc_add(a: dict[str, int], b: dict[str, int], scale: int = 1) -> dict[str, int]:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + scale * v
        if out[k] == 0:
            del out[k]
    return out


def linear_form(t: Term) -> dict[str, int] | None:
    """Integer linear combination of variables equal to ``t``, if ``t`` is a
    module term (``+``, ``-``, ``0``, scalars); otherwise ``None``."""
    if isinstance(t, Var):
        return {t.name: 1}
    if isinstance(t, ScalarMul):
        inner = linear_form(t.term)
        if inner is None:
            return None
        return {k: v * t.coeff for k, v in inner.items() if v * t.coeff}
    if t.symbol == "0" and not t.args:
        return {}
    if t.symbol == "+" and len(t.args) == 2:
        a, b = linear_form(t.args[0]), linear_form(t.args[1])
        if a is None or b is None:
            return None
        return _lc_add(a, b)
    if t.symbol == "-" and len(t.args) == 1:
        a = linear_form(t.args[0])
        return None if a is None else {k: -v for k, v in a.items()}
    return None


def _canon(lc: dict[str, int]) -> LinComb:
    items = tuple(sorted(lc.items()))
    if items and items[0][1] < 0:
        items = tuple((k, -v) for k, v in items)
    return items


def lincomb_term(lc: LinComb) -> Term:
    parts: list[Term] = []
    for name, c in lc:
        parts.append(Var(name) if c == 1 else ScalarMul(c, Var(name)))
    if not parts:
        return ZERO
    out = parts[0]
    for p in parts[1:]:
        out = App("+", (out, p))
    return out


def format_lincomb(lc: LinComb) -> str:
    if not lc:
        return "0"
    return " + ".join(name if c == 1 else f"{c}{name}" for name, c in lc)


@dataclass(frozen=True)
class Div:
    """``p^n`` divides the linear combination ``coeffs``."""

    p: int
    n: int
    coeffs: LinComb

    def __str__(self) -> str:
        return f"Div({self.p},{self.n},{format_lincomb(self.coeffs)})"


@dataclass(frozen=True)
class Ann:
    """The linear combination ``coeffs`` is zero."""

    coeffs: LinComb

    def __str__(self) -> str:
        return f"Ann({format_lincomb(self.coeffs)})"


Condition = Union[Div, Ann]


@dataclass(frozen=True)
class PPNormal:
    conditions: tuple[Condition, ...]
    variables: tuple[str, ...]

    def to_formula(self) -> Formula:
        return pp_to_formula(self)

    def condition_set(self) -> frozenset[Condition]:
        return frozenset(self.conditions)

    def __str__(self) -> str:
        return "[" + ", ".join(map(str, self.conditions)) + "]"


@dataclass(frozen=True)
class NotPP:
    reason: str
    subformula: Formula | None = None

    def __bool__(self) -> bool:
        return False


def pp_to_formula(pp: PPNormal) -> Formula:
    parts: list[Formula] = []
    for c in pp.conditions:
        if isinstance(c, Div):
            parts.append(Divides(c.p, c.n, lincomb_term(c.coeffs)))
        else:
            parts.append(Eq(lincomb_term(c.coeffs), ZERO))
    if not parts:
        v = pp.variables[0] if pp.variables else "x"
        return Eq(Var(v), Var(v))
    return conj(parts)


def _gather(f: Formula, bound: list[str], items: list[Formula]) -> NotPP | None:
    if isinstance(f, And):
        return _gather(f.left, bound, items) or _gather(f.right, bound, items)
    if isinstance(f, Exists):
        if f.var in bound:
            return NotPP("repeated bound variable", f)
        bound.append(f.var)
        return _gather(f.body, bound, items)
    if isinstance(f, (Eq, Divides)):
        items.append(f)
        return None
    kind = type(f).__name__
    return NotPP(f"{kind} is not allowed in a p.p. formula", f)


def _div_conditions(c: int, lc: dict[str, int]) -> list[Condition]:
    if not lc:
        return []
    return [Div(p, n, _canon(lc)) for p, n in sorted(factorize(c).items())]


def recognize_pp(f: Formula) -> PPNormal | NotPP:
    """Normalize a positive primitive formula into Div/Ann conditions.

    Accepts conjunctions of ``t = s`` and ``p^n | t`` under any number of
    existential quantifiers, provided every bound variable occurs linearly in
    exactly one equation (``exists y. c*y = t`` means ``c | t``).
    """
    bound: list[str] = []
    items: list[Formula] = []
    err = _gather(f, bound, items)
    if err is not None:
        return err
    if set(bound) & f.free_vars:
        return NotPP("bound variable shadows a free variable", f)
    conds: list[Condition] = []
    used: set[str] = set()
    for it in items:
        if isinstance(it, Divides):
            lc = linear_form(it.term)
            if lc is None:
                return NotPP("non-module term", it)
            if set(lc) & set(bound):
                return NotPP("bound variable inside a divisibility atom", it)
            if lc:
                conds.append(Div(it.p, it.n, _canon(lc)))
            continue
        left, right = linear_form(it.left), linear_form(it.right)
        if left is None or right is None:
            return NotPP("non-module term", it)
        lc = _lc_add(left, right, -1)
        here = [v for v in lc if v in bound]
        # bound variables whose coefficients cancel still count as used
        mentioned = {v for v in bound if v in it.free_vars}
        if len(mentioned) > 1:
            return NotPP("several bound variables in one equation", it)
        if mentioned & used:
            return NotPP("bound variable used in two conjuncts", it)
        used |= mentioned
        if not here:
            if lc:
                conds.append(Ann(_canon(lc)))
            continue
        y = here[0]
        c = lc.pop(y)
        conds.extend(_div_conditions(c, lc))
    # keep order of first appearance, drop duplicates
    seen: set[Condition] = set()
    ordered = []
    for c in conds:
        if c not in seen:
            seen.add(c)
            ordered.append(c)
    return PPNormal(tuple(ordered), tuple(sorted(f.free_vars)))


def is_bool_pp(f: Formula) -> bool:
    if isinstance(f, Not):
        return is_bool_pp(f.body)
    if isinstance(f, (Or, Implies)):
        return is_bool_pp(f.left) and is_bool_pp(f.right)
    if isinstance(f, And):
        if isinstance(recognize_pp(f), PPNormal):
            return True
        return is_bool_pp(f.left) and is_bool_pp(f.right)
    return isinstance(recognize_pp(f), PPNormal)


# ------------------------------------------------- invariants conditions


@dataclass(frozen=True)
class InvariantsCondition:
    """``Inv(phi, psi) >= k`` (``at_least``) or ``Inv(phi, psi) < k``.

    ``phi`` and ``psi`` are p.p. formulas in the single variable ``var``.
    """

    phi: Formula
    psi: Formula
    k: int
    at_least: bool = True
    var: str = "x"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        for g in (self.phi, self.psi):
            if not g.free_vars <= {self.var}:
                raise ValueError(f"{g} has free variables other than {self.var}")

    def negated(self) -> "InvariantsCondition":
        return InvariantsCondition(self.phi, self.psi, self.k, not self.at_least, self.var)

    def to_formula(self, names: Sequence[str] | None = None) -> Formula:
        return invariants_formula(self, names)

    def __str__(self) -> str:
        op = ">=" if self.at_least else "<"
        return f"Inv({self.phi}, {self.psi}) {op} {self.k}"


def invariants_formula(cond: InvariantsCondition, names: Sequence[str] | None = None) -> Formula:
    """The first-order sentence expressing an invariants condition."""
    k = cond.k
    if names is None:
        avoid = set(all_vars(cond.phi)) | set(all_vars(cond.psi))
        names = []
        for _ in range(k):
            names.append(fresh_name(avoid, "v"))
            avoid.add(names[-1])
    vs = [Var(n) for n in names]
    phis = [substitute(cond.phi, {cond.var: v}) for v in vs]
    psis = [substitute(cond.psi, {cond.var: sub(vs[j], vs[i])}) for i in range(k) for j in range(i)]
    if cond.at_least:
        body = conj(phis + [Not(p) for p in psis])
        quant = Exists
    else:
        body = disj([Not(p) for p in phis] + psis)
        quant = Forall
    for n in reversed(names):
        body = quant(n, body)
    return body


def _unspine(f: Formula, kind, count: int) -> list[Formula] | None:
    out: list[Formula] = []
    for _ in range(count - 1):
        if not isinstance(f, kind):
            return None
        out.append(f.right)
        f = f.left
    out.append(f)
    return out[::-1]


def recognize_invariants_sentence(f: Formula) -> InvariantsCondition | None:
    """Recover the invariants condition a sentence was built from, if any."""
    if f.free_vars or not isinstance(f, QUANTIFIERS):
        return None
    quant = type(f)
    names: list[str] = []
    g = f
    while isinstance(g, quant):
        names.append(g.var)
        g = g.body
    for k in range(len(names), 0, -1):
        body = f
        for _ in range(k):
            body = body.body
        count = k + k * (k - 1) // 2
        items = _unspine(body, And if quant is Exists else Or, count)
        if items is None:
            continue
        first = items[0]
        if quant is Forall:
            if not isinstance(first, Not):
                continue
            first = first.body
        avoid = set(all_vars(f))
        x = fresh_name(avoid, "x")
        phi = substitute(first, {names[0]: Var(x)})
        if k == 1:
            psi: Formula = Eq(Var(x), Var(x))
        else:
            item = items[k]
            if quant is Exists:
                if not isinstance(item, Not):
                    continue
                item = item.body
            diff = sub(Var(names[0]), Var(names[1]))
            psi = _replace_in_formula(item, diff, Var(x))
            if not psi.free_vars <= {x}:
                continue
        if not (isinstance(recognize_pp(phi), PPNormal) and isinstance(recognize_pp(psi), PPNormal)):
            continue
        if not phi.free_vars <= {x}:
            continue
        cond = InvariantsCondition(phi, psi, k, quant is Exists, x)
        try:
            rebuilt = invariants_formula(cond, names[:k])
        except ValueError:
            continue
        outer = f
        for _ in range(k):
            outer = outer.body
        if k == len(names) and rebuilt == f:
            return cond
    return None


def _replace_in_formula(f: Formula, old: Term, new: Term) -> Formula:
    if isinstance(f, Eq):
        return Eq(replace_subterm(f.left, old, new), replace_subterm(f.right, old, new))
    if isinstance(f, Divides):
        return Divides(f.p, f.n, replace_subterm(f.term, old, new))
    if isinstance(f, Rel):
        return Rel(f.symbol, tuple(replace_subterm(a, old, new) for a in f.args))
    if isinstance(f, Not):
        return Not(_replace_in_formula(f.body, old, new))
    if isinstance(f, BINARY):
        return type(f)(_replace_in_formula(f.left, old, new), _replace_in_formula(f.right, old, new))
    return type(f)(f.var, _replace_in_formula(f.body, old, new))


# ---------------------------------------------------------- classification


def _has_divides(f: Formula) -> bool:
    from .formula import atoms_of
    return any(isinstance(a, Divides) for a in atoms_of(f))


def classify_quantifier(f: Formula, sig: Signature | None = None) -> QuantClass:
    """The most specific transfer class of ``f``.

    Module-specific classes (PP, BoolPP, InvariantsSentence) are only
    considered when ``sig`` is omitted or carries scalars.
    """
    module = sig is None or sig.scalar is not None
    if not has_quantifier(f) and not _has_divides(f):
        return QuantClass.QUANTIFIER_FREE
    if module:
        if isinstance(recognize_pp(f), PPNormal):
            return QuantClass.PP
        if is_bool_pp(f):
            return QuantClass.BOOL_PP
        if recognize_invariants_sentence(f) is not None:
            return QuantClass.INVARIANTS_SENTENCE
    prefix = prenex_normal_form(f).prefix
    return {
        "": QuantClass.QUANTIFIER_FREE,
        "A": QuantClass.UNIVERSAL,
        "E": QuantClass.EXISTENTIAL,
        "EA": QuantClass.EXISTS_FORALL,
        "AE": QuantClass.FORALL_EXISTS,
    }.get(prefix, QuantClass.OTHER)


# ------------------------------------------------------ unary types


@dataclass(frozen=True)
class UnaryTypePresentation:
    """A finite truncation ``phi_0, ..., phi_{depth-1}`` of a unary type.

    Either ``listed`` gives the formulas explicitly or ``generator == "tor"``
    produces ``~((j+1)*x = 0)`` for ``j < depth``.
    """

    name: str
    depth: int
    listed: tuple[Formula, ...] | None = None
    generator: str | None = None
    var: str = "x"

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("truncation depth must be positive")
        if (self.listed is None) == (self.generator is None):
            raise ValueError("give exactly one of listed formulas or a generator")
        if self.generator not in (None, "tor"):
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.listed is not None:
            if len(self.listed) < self.depth:
                raise ValueError(f"type {self.name} lists {len(self.listed)} formulas, depth {self.depth}")
            for g in self.listed:
                if g.free_vars != {self.var}:
                    raise ValueError(f"type formula {g} must have exactly the free variable {self.var}")

    @property
    def formulas(self) -> tuple[Formula, ...]:
        if self.listed is not None:
            return self.listed[: self.depth]
        x = Var(self.var)
        return tuple(Not(Eq(ScalarMul(j + 1, x), ZERO)) for j in range(self.depth))

    def formula(self, index: int) -> Formula:
        return self.formulas[index]

    def truncate(self, depth: int) -> "UnaryTypePresentation":
        return UnaryTypePresentation(self.name, depth, self.listed, self.generator, self.var)

    @property
    def is_tor(self) -> bool:
        return self.generator == "tor"

    @classmethod
    def from_strings(cls, name: str, texts: Iterable[str], sig: Signature, var: str = "x",
                     depth: int | None = None) -> "UnaryTypePresentation":
        from .parser import parse_formula
        fs = tuple(parse_formula(t, sig) for t in texts)
        return cls(name, depth or len(fs), listed=fs, var=var)


def tor_type(depth: int, name: str = "tor") -> UnaryTypePresentation:
    return UnaryTypePresentation(name, depth, generator="tor")


ChoiceFunction = tuple[int, ...]
"""Index into each presented type's formula list, aligned with Gamma's order."""


def describe_choice(gamma: Sequence[UnaryTypePresentation], choice: ChoiceFunction) -> dict[str, int]:
    return {p.name: j for p, j in zip(gamma, choice)}


def build_psi_ell(gamma: Sequence[UnaryTypePresentation], ell: int) -> Formula:
    """``psi_ell(x)``: for every type, one of its first ``ell`` formulas fails."""
    if ell < 1:
        raise ValueError("ell must be positive")
    if not gamma:
        raise ValueError("empty Gamma has no psi_ell")
    parts = []
    for p in gamma:
        if p.depth < ell:
            raise ValueError(f"type {p.name} truncated at depth {p.depth} < {ell}")
        fs = [substitute(g, {p.var: Var("x")}) for g in p.formulas[:ell]]
        parts.append(disj(negate(g) for g in fs))
    return conj(parts)
