"""Countable torsion abelian groups presented as formal direct sums.

A presentation is a list of summands: ``Cyclic(p, k, mult)`` (``mult`` copies
of ``Z_{p^k}``), ``Prufer(p, mult)`` (copies of ``Z(p^inf)``) and
``Tail(p, a, b)`` (the sum over ``n`` of ``Z_{p^(a*n+b)}``).  Multiplicities
are positive integers or :data:`OMEGA`.  Elements are finite supports of
``(summand, component, value)`` triples.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence, Union

from .analysis import Ann, InvariantsCondition, NotPP, PPNormal, recognize_pp
from .formula import Formula, factorize, is_prime, valuation
from .structures import FiniteStructure, finite_abelian_group, group_index, satisfaction_set

OMEGA = "omega"
Mult = Union[int, str]
Value = Union[int, Fraction]


def _check_mult(mult: Mult) -> None:
    if mult != OMEGA and (not isinstance(mult, int) or mult < 1):
        raise ValueError(f"multiplicity must be a positive integer or omega, got {mult!r}")


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


@dataclass(frozen=True)
class Cyclic:
    p: int
    k: int
    mult: Mult = 1

    def __post_init__(self) -> None:
        _check_prime(self.p)
        _check_mult(self.mult)
        if self.k < 0:
            raise ValueError("exponent must be non-negative")

    def __str__(self) -> str:
        base = f"Z_{self.p ** self.k}"
        return base if self.mult == 1 else f"{base}^({self.mult})"


@dataclass(frozen=True)
class Prufer:
    p: int
    mult: Mult = 1

    def __post_init__(self) -> None:
        _check_prime(self.p)
        _check_mult(self.mult)

    def __str__(self) -> str:
        base = f"Z({self.p}^inf)"
        return base if self.mult == 1 else f"{base}^({self.mult})"


@dataclass(frozen=True)
class Tail:
    """Components ``Z_{p^h(n)}`` for ``n = 0, 1, 2, ...`` with ``h(n) = a*n + b``."""

    p: int
    a: int = 1
    b: int = 0

    def __post_init__(self) -> None:
        _check_prime(self.p)
        if self.a < 1 or self.b < 0:
            raise ValueError("tail exponent must be a*n + b with a >= 1, b >= 0")

    def h(self, n: int) -> int:
        return self.a * n + self.b

    @property
    def mult(self) -> str:
        return OMEGA

    def __str__(self) -> str:
        return f"sum_n Z_{self.p}^({self.a}n+{self.b})"


Summand = Union[Cyclic, Prufer, Tail]


class ElementError(ValueError):
    pass


@dataclass(frozen=True)
class TorsionElement:
    """Sorted nonzero support entries ``(summand, component, value)``."""

    support: tuple[tuple[int, int, Value], ...] = ()

    def __bool__(self) -> bool:
        return bool(self.support)

    def value_at(self, summand: int, component: int) -> Value:
        for s, c, v in self.support:
            if (s, c) == (summand, component):
                return v
        return 0

    def to_json(self) -> list:
        return [[s, c, v if isinstance(v, int) else _fraction_literal(v)] for s, c, v in self.support]

    def __str__(self) -> str:
        if not self.support:
            return "0"
        return " + ".join(f"{v}@{s}.{c}" for s, c, v in self.support)


def _fraction_literal(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


ZERO_ELEMENT = TorsionElement()


@dataclass(frozen=True)
class TorsionGroupPresentation:
    summands: tuple[Summand, ...]
    name: str = "G"

    def __post_init__(self) -> None:
        if not self.summands:
            raise ValueError("a presentation needs at least one summand")

    def __str__(self) -> str:
        return " + ".join(map(str, self.summands))

    # -- shape
    def component_modulus(self, summand: int, component: int) -> int | None:
        """Order of a component group; ``None`` for Prufer components."""
        s = self.summands[summand]
        if component < 0:
            raise ElementError("component index must be non-negative")
        if isinstance(s, Tail):
            return s.p ** s.h(component)
        if s.mult != OMEGA and component >= s.mult:
            raise ElementError(f"summand {summand} has only {s.mult} components")
        if isinstance(s, Cyclic):
            return s.p ** s.k
        return None

    @property
    def is_finite(self) -> bool:
        return all(isinstance(s, Cyclic) and s.mult != OMEGA for s in self.summands)

    @property
    def finite_moduli(self) -> tuple[int, ...]:
        if not self.is_finite:
            raise ValueError("presentation is infinite")
        return tuple(s.p ** s.k for s in self.summands for _ in range(s.mult))

    def order(self) -> int | None:
        if not self.is_finite:
            return None
        return reduce(lambda a, b: a * b, self.finite_moduli, 1)

    # -- elements
    def reduce_value(self, summand: int, component: int, value) -> Value:
        m = self.component_modulus(summand, component)
        if m is None:
            p = self.summands[summand].p
            v = Fraction(value) % 1
            if v.denominator != p ** valuation(v.denominator, p):
                raise ElementError(f"{value} is not in Z({p}^inf)")
            return v
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise ElementError(f"{value} is not a residue")
            value = value.numerator
        return int(value) % m

    def element(self, triples: Iterable[tuple[int, int, object]]) -> TorsionElement:
        acc: dict[tuple[int, int], Value] = {}
        for s, c, v in triples:
            if not 0 <= s < len(self.summands):
                raise ElementError(f"no summand {s}")
            key = (s, c)
            acc[key] = self.reduce_value(s, c, acc.get(key, 0) + _as_number(v))
        return TorsionElement(tuple(sorted((s, c, v) for (s, c), v in acc.items() if v != 0)))

    def add(self, a: TorsionElement, b: TorsionElement) -> TorsionElement:
        return self.element(a.support + b.support)

    def neg(self, a: TorsionElement) -> TorsionElement:
        return self.element((s, c, -v) for s, c, v in a.support)

    def scalar(self, k: int, a: TorsionElement) -> TorsionElement:
        return self.element((s, c, k * v) for s, c, v in a.support)

    def lincomb(self, coeffs: Sequence[tuple[str, int]], env: Mapping[str, TorsionElement]) -> TorsionElement:
        out = ZERO_ELEMENT
        for name, c in coeffs:
            out = self.add(out, self.scalar(c, env[name]))
        return out

    def component_order(self, summand: int, component: int, value: Value) -> int:
        m = self.component_modulus(summand, component)
        if m is None:
            return Fraction(value).denominator
        return m // math.gcd(int(value), m)

    def divisible_in_component(self, summand: int, component: int, value: Value, p: int, n: int) -> bool:
        m = self.component_modulus(summand, component)
        if m is None:
            return True
        return int(value) % math.gcd(p ** n, m) == 0

    def divisible(self, g: TorsionElement, p: int, n: int) -> bool:
        return all(self.divisible_in_component(s, c, v, p, n) for s, c, v in g.support)

    def divide(self, g: TorsionElement, p: int, n: int) -> TorsionElement | None:
        """Some ``y`` with ``p^n * y = g``, or ``None`` if there is none."""
        q = p ** n
        out = []
        for s, c, v in g.support:
            m = self.component_modulus(s, c)
            if m is None:
                out.append((s, c, Fraction(v) / q))
                continue
            d = math.gcd(q, m)
            if int(v) % d:
                return None
            # q/d is a unit mod m/d
            y = (int(v) // d) * pow(q // d, -1, m // d) % (m // d) if m // d > 1 else 0
            out.append((s, c, y))
        return self.element(out)

    def summand_order_bound(self, summand: int) -> int | None:
        s = self.summands[summand]
        return s.p ** s.k if isinstance(s, Cyclic) else None


def _as_number(v) -> Value:
    if isinstance(v, (int, Fraction)):
        return v
    if isinstance(v, str):
        return parse_value(v)
    raise ElementError(f"bad component value {v!r}")


def parse_value(text: str) -> Value:
    """``"3"`` or ``"a/p^k"`` / ``"a/b"``."""
    text = text.strip()
    if "/" not in text:
        return int(text)
    num, den = text.split("/", 1)
    if "^" in den:
        base, exp = den.split("^", 1)
        den_val = int(base) ** int(exp)
    else:
        den_val = int(den)
    return Fraction(int(num), den_val)


def order_of(G: TorsionGroupPresentation, g: TorsionElement) -> int:
    """Least positive ``r`` with ``r*g = 0``."""
    return reduce(math.lcm, (G.component_order(s, c, v) for s, c, v in g.support), 1)


def has_order(G: TorsionGroupPresentation, g: TorsionElement, r: int) -> bool:
    return r != 0 and r % order_of(G, g) == 0


# ------------------------------------------------------------------ p.p.


def as_pp(phi: Formula | PPNormal) -> PPNormal:
    if isinstance(phi, PPNormal):
        return phi
    pp = recognize_pp(phi)
    if isinstance(pp, NotPP):
        raise ValueError(f"not a p.p. formula: {pp.reason}")
    return pp


def eval_pp_torsion(G: TorsionGroupPresentation, pp: PPNormal | Formula,
                    elements: Sequence[TorsionElement] | Mapping[str, TorsionElement]) -> bool:
    pp = as_pp(pp)
    if isinstance(elements, Mapping):
        env = dict(elements)
        missing = set(pp.variables) - env.keys()
        if missing:
            raise ValueError(f"no value for {', '.join(sorted(missing))}")
    else:
        if len(elements) != len(pp.variables):
            raise ValueError(f"expected {len(pp.variables)} elements, got {len(elements)}")
        env = dict(zip(pp.variables, elements))
    for cond in pp.conditions:
        value = G.lincomb(cond.coeffs, env)
        if isinstance(cond, Ann):
            if value:
                return False
        elif not G.divisible(value, cond.p, cond.n):
            return False
    return True


# -------------------------------------------------------- invariant values


@dataclass(frozen=True)
class Finite:
    value: int

    def __post_init__(self) -> None:
        if self.value < 1:
            raise ValueError("index values are positive")

    def at_least(self, k: int) -> bool:
        return self.value >= k

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class AtLeast:
    cap: int

    def at_least(self, k: int) -> bool:
        if k <= self.cap:
            return True
        raise ValueError(f"value capped at {self.cap} cannot be compared with {k}")

    def __str__(self) -> str:
        return f">={self.cap}"


@dataclass(frozen=True)
class Infinite:
    def at_least(self, k: int) -> bool:
        return True

    def __str__(self) -> str:
        return "infinite"


InvariantValue = Union[Finite, AtLeast, Infinite]


def cap_value(v: InvariantValue, cap: int | None) -> InvariantValue:
    if cap is None:
        return v
    if isinstance(v, Infinite) or (isinstance(v, Finite) and v.value >= cap):
        return AtLeast(cap)
    return v


def _single_var(pp: PPNormal) -> str | None:
    if len(pp.variables) > 1:
        raise ValueError(f"expected one free variable, got {', '.join(pp.variables)}")
    return pp.variables[0] if pp.variables else None


def _coefficient(cond, var: str | None) -> int:
    if not cond.coeffs:
        return 0
    (name, c), = cond.coeffs
    return c


def _cyclic_level(conds, p: int, h: int) -> int:
    """``j`` with ``phi(Z_{p^h}) = p^j Z_{p^h}``."""
    j = 0
    for cond in conds:
        c = _coefficient(cond, None)
        v = min(valuation(c, p), h)
        if isinstance(cond, Ann):
            j = max(j, h - v)
        elif cond.p == p:
            j = max(j, max(min(cond.n, h) - v, 0))
    return j


def cyclic_index(phi: PPNormal, psi: PPNormal, p: int, h: int) -> int:
    """``Inv(Z_{p^h}, phi, psi)``.  Subgroups of a cyclic p-group form a chain,
    so both sides are ``p^j Z`` and the index is a power of ``p``."""
    jphi = _cyclic_level(phi.conditions, p, h)
    jboth = max(jphi, _cyclic_level(psi.conditions, p, h))
    return p ** (jboth - jphi)


def _prufer_level(conds, p: int) -> int | None:
    """``phi(Z(p^inf))`` is ``Z(p^inf)`` (``None``) or the ``p^v``-torsion."""
    level = None
    for cond in conds:
        if isinstance(cond, Ann):
            v = valuation(_coefficient(cond, None), p)
            level = v if level is None else min(level, v)
    return level


def prufer_index(phi: PPNormal, psi: PPNormal, p: int) -> InvariantValue:
    a = _prufer_level(phi.conditions, p)
    b = _prufer_level(psi.conditions, p)
    both = b if a is None else (a if b is None else min(a, b))
    if a is None:
        return Finite(1) if both is None else Infinite()
    return Finite(p ** (a - both))


def tail_stable_height(phi: PPNormal, psi: PPNormal, p: int) -> int:
    """A height past which the index exponent is affine in ``h``.

    Each level is a max of terms ``h - v`` (annihilators) and constants
    ``n - v`` (divisibility), so every breakpoint lies at or below the sum of
    the annihilator valuations and the divisibility exponents.
    """
    bound = 0
    for cond in phi.conditions + psi.conditions:
        if not cond.coeffs:
            continue
        if isinstance(cond, Ann):
            bound += valuation(_coefficient(cond, None), p)
        elif cond.p == p:
            bound += cond.n
    return bound


def tail_index(phi: PPNormal, psi: PPNormal, tail: Tail) -> InvariantValue:
    """Product over all components of a tail; ``Infinite`` if unbounded."""
    H = tail_stable_height(phi, psi, tail.p)
    total = 1
    n = 0
    while tail.h(n) <= H:
        total *= cyclic_index(phi, psi, tail.p, tail.h(n))
        n += 1
    # for h > H the exponent of the index is affine in h; sample two points
    e1 = cyclic_index(phi, psi, tail.p, H + 1)
    e2 = cyclic_index(phi, psi, tail.p, H + 2)
    if e1 != 1 or e2 != 1:
        return Infinite()
    return Finite(total)


def _times(a: InvariantValue, b: InvariantValue) -> InvariantValue:
    if isinstance(a, Infinite) or isinstance(b, Infinite):
        return Infinite()
    return Finite(a.value * b.value)


def compute_inv(G: TorsionGroupPresentation | FiniteStructure, phi, psi,
                cap: int | None = None, trace: list[str] | None = None) -> InvariantValue:
    """``Inv(G, phi, psi) = |phi(G) / (phi(G) & psi(G))|``, capped at ``cap``."""
    phi, psi = as_pp(phi), as_pp(psi)
    _single_var(phi), _single_var(psi)
    if isinstance(G, FiniteStructure):
        return cap_value(Finite(brute_force_inv(G, phi, psi)), cap)
    total: InvariantValue = Finite(1)
    for i, s in enumerate(G.summands):
        if isinstance(s, Cyclic):
            part: InvariantValue = Finite(cyclic_index(phi, psi, s.p, s.k))
            if s.mult == OMEGA:
                part = Finite(1) if part.value == 1 else Infinite()
            else:
                part = Finite(part.value ** s.mult)
        elif isinstance(s, Prufer):
            part = prufer_index(phi, psi, s.p)
            if isinstance(part, Finite) and part.value > 1:
                part = Infinite() if s.mult == OMEGA else Finite(part.value ** s.mult)
        else:
            part = tail_index(phi, psi, s)
        if trace is not None:
            trace.append(f"summand {i} ({s}): index {part}")
        total = _times(total, part)
    return cap_value(total, cap)


def brute_force_inv(M: FiniteStructure, phi, psi) -> int:
    phi, psi = as_pp(phi), as_pp(psi)
    fphi, fpsi = phi.to_formula(), psi.to_formula()
    x = _single_var(phi) or _single_var(psi) or "x"
    a = satisfaction_set(M, fphi, x) if phi.variables else frozenset(M.universe)
    b = satisfaction_set(M, fpsi, _single_var(psi) or x) if psi.variables else frozenset(M.universe)
    both = a & b
    if len(a) % len(both):
        raise ArithmeticError("satisfaction sets are not subgroups")
    return len(a) // len(both)


def eval_invariants_sentence(G, cond: InvariantsCondition) -> bool:
    value = compute_inv(G, cond.phi, cond.psi, cap=cond.k)
    big = value.at_least(cond.k)
    return big if cond.at_least else not big


# ---------------------------------------------------------------- catalog


def cyclic_sum(moduli: Sequence[int], name: str | None = None) -> TorsionGroupPresentation:
    """Presentation of ``Z_{m_1} + ... + Z_{m_r}`` split into primary parts."""
    summands = []
    for m in moduli:
        for p, k in sorted(factorize(m).items()) if m > 1 else []:
            summands.append(Cyclic(p, k))
    if not summands:
        summands = [Cyclic(2, 0)]
    return TorsionGroupPresentation(tuple(summands), name or "+".join(f"Z_{m}" for m in moduli))


def partitions(n: int, largest: int | None = None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def abelian_groups_of_order(n: int) -> list[TorsionGroupPresentation]:
    """Every abelian group of order ``n`` up to isomorphism."""
    if n == 1:
        return [TorsionGroupPresentation((Cyclic(2, 0),), "Z_1")]
    primes = sorted(factorize(n).items())
    choices = [[(p, part) for part in partitions(e)] for p, e in primes]
    out = []
    for combo in itertools.product(*choices):
        summands = tuple(Cyclic(p, k) for p, part in combo for k in part)
        name = " + ".join(f"Z_{s.p ** s.k}" for s in summands)
        out.append(TorsionGroupPresentation(summands, name))
    return out


def to_finite_structure(G: TorsionGroupPresentation) -> FiniteStructure:
    return finite_abelian_group(G.finite_moduli, name=G.name)


def element_to_index(G: TorsionGroupPresentation, g: TorsionElement) -> int:
    """Universe index in :func:`to_finite_structure` of a finite presentation."""
    slots = [(i, c) for i, s in enumerate(G.summands) for c in range(s.mult)]
    coords = [int(g.value_at(i, c)) for i, c in slots]
    return group_index(G.finite_moduli, coords)


def index_to_element(G: TorsionGroupPresentation, index: int) -> TorsionElement:
    from .structures import group_coordinates
    slots = [(i, c) for i, s in enumerate(G.summands) for c in range(s.mult)]
    coords = group_coordinates(G.finite_moduli, index)
    return G.element((i, c, v) for (i, c), v in zip(slots, coords))


def finite_elements(G: TorsionGroupPresentation) -> list[TorsionElement]:
    return [index_to_element(G, i) for i in range(G.order())]


class UnsupportedFormula(ValueError):
    pass


def eval_qf_torsion(G: TorsionGroupPresentation, f: Formula, env: Mapping[str, TorsionElement]) -> bool:
    """Truth of a boolean combination of module atoms and p.p. formulas in ``G``."""
    from .analysis import linear_form
    from .formula import And, Divides, Eq, Exists, Forall, Implies, Not, Or, Rel

    if isinstance(f, Eq):
        lf, rf = linear_form(f.left), linear_form(f.right)
        if lf is None or rf is None:
            raise UnsupportedFormula(f"non-module term in {f}")
        coeffs = dict(lf)
        for k, v in rf.items():
            coeffs[k] = coeffs.get(k, 0) - v
        return not G.lincomb(tuple(coeffs.items()), env)
    if isinstance(f, Divides):
        lf = linear_form(f.term)
        if lf is None:
            raise UnsupportedFormula(f"non-module term in {f}")
        return G.divisible(G.lincomb(tuple(lf.items()), env), f.p, f.n)
    if isinstance(f, Not):
        return not eval_qf_torsion(G, f.body, env)
    if isinstance(f, And):
        return eval_qf_torsion(G, f.left, env) and eval_qf_torsion(G, f.right, env)
    if isinstance(f, Or):
        return eval_qf_torsion(G, f.left, env) or eval_qf_torsion(G, f.right, env)
    if isinstance(f, Implies):
        return (not eval_qf_torsion(G, f.left, env)) or eval_qf_torsion(G, f.right, env)
    if isinstance(f, (Exists, Forall)):
        pp = recognize_pp(f)
        if isinstance(pp, PPNormal):
            return eval_pp_torsion(G, pp, env)
        if isinstance(f, Forall):
            pp = recognize_pp(_negated_body(f))
            if isinstance(pp, PPNormal):
                return not eval_pp_torsion(G, pp, env)
        raise UnsupportedFormula(f"quantified formula outside the p.p. fragment: {f}")
    if isinstance(f, Rel):
        raise UnsupportedFormula(f"relation {f.symbol} in a group formula")
    raise TypeError(f"not a formula: {f!r}")


def _negated_body(f):
    from .formula import Exists, negate
    return Exists(f.var, negate(f.body))
