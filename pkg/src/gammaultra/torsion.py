"""Orders, the torsion-type ultraproduct, invariants-based equivalence testing
and the bounded-order dichotomy."""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .analysis import Ann, Div, InvariantsCondition, PPNormal, tor_type
from .formula import (
    Divides, Eq, Formula, ScalarMul, Term, Var, ZERO, first_primes, term_vars,
)
from .groups import (
    OMEGA, Cyclic, Prufer, Tail, TorsionGroupPresentation, compute_inv,
    eval_invariants_sentence, to_finite_structure,
)
from .sequences import (
    CofiniteSet, ConstantElem, ConstantPower, DefinableSequence, FiniteFamily,
    FiniteSet, IndexSet, PrincipalFinite, TailPower, TailSum, TailUnit, UndecidedSet,
    satisfaction_indices, sequence_value,
)
from .structures import FiniteStructure, eval_formula_finite
from .ultraproduct import (
    FormulaTransfer, GammaContext, TransferReport, build_quotient,
    verify_los_finite,
)

# ------------------------------------------------------ order propagation


def _var_key(name: str):
    m = re.fullmatch(r"([A-Za-z_]*)(\d+)", name)
    return (m.group(1), int(m.group(2))) if m else (name, -1)


def term_variables(tau: Term) -> list[str]:
    """Free variables of a term, ``x0, x1, ..., x10`` in numeric order."""
    return sorted(term_vars(tau), key=_var_key)


def order_propagation(tau: Term, orders: Sequence[int] | Mapping[str, int]) -> int:
    """An order of ``tau(m_0, ...)`` computed from orders of the ``m_i``.

    Variables get their order, ``s*t`` and ``-t`` keep the order of ``t``, a
    sum multiplies the orders of its summands and ``0`` has order 1.
    """
    if not isinstance(orders, Mapping):
        names = term_variables(tau)
        if len(orders) < len(names):
            raise ValueError(f"need {len(names)} orders, got {len(orders)}")
        orders = dict(zip(names, orders))
    if any(r < 1 for r in orders.values()):
        raise ValueError("orders are positive integers")
    return _propagate(tau, orders)


def _propagate(t: Term, orders: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        return orders[t.name]
    if isinstance(t, ScalarMul):
        return _propagate(t.term, orders)
    if t.symbol == "+" and len(t.args) == 2:
        return _propagate(t.args[0], orders) * _propagate(t.args[1], orders)
    if t.symbol == "-" and len(t.args) == 1:
        return _propagate(t.args[0], orders)
    if t.symbol == "0" and not t.args:
        return 1
    raise ValueError(f"{t.symbol} is not a module operation")


# ------------------------------------------------------- tor-ultraproduct


@dataclass(frozen=True)
class TorMembership:
    order: int
    large_set: IndexSet

    verdict = "Member"


@dataclass(frozen=True)
class TorNotMember:
    certificates: tuple[tuple[int, IndexSet], ...]

    verdict = "NotMember"


@dataclass(frozen=True)
class TorUndecided:
    reason: str

    verdict = "Undecided"


def _annihilated(r: int) -> Formula:
    return Eq(ScalarMul(r, Var("x")), ZERO)


def _sample_span(f: DefinableSequence) -> int:
    parts = f.tail.parts if isinstance(f.tail, TailSum) else (f.tail,)
    extra = 0
    for part in parts:
        if isinstance(part, TailUnit):
            extra = max(extra, (part.j or 0) + abs(part.coeff).bit_length())
    return f.exceptional_bound + extra + 8


def _element_order(family, n: int, value) -> int:
    from .groups import order_of
    return order_of(family.member(n), value)


def tor_membership(family, f: DefinableSequence):
    """Is some single ``r`` an order of ``f(i)`` for cofinitely many ``i``?"""
    if not isinstance(family, (TailPower, ConstantPower)):
        raise TypeError("tor_membership works over omega-indexed torsion families")
    candidates = {1}
    try:
        for n in range(_sample_span(f)):
            candidates.add(_element_order(family, n, sequence_value(family, f, n)))
    except (ValueError, TypeError) as err:
        return TorUndecided(str(err))
    certs = []
    for r in sorted(candidates):
        s = satisfaction_indices(family, _annihilated(r), f)
        if isinstance(s, CofiniteSet):
            return TorMembership(r, s)
        if isinstance(s, UndecidedSet):
            return TorUndecided(s.reason)
        certs.append((r, s))
    return TorNotMember(tuple(certs))


@dataclass(frozen=True)
class DivisibilityResult:
    holds: bool
    large_set: IndexSet
    witness: DefinableSequence | None = None
    witness_membership: Union[TorMembership, TorNotMember, TorUndecided, None] = None
    order_bound: int | None = None


def _divide_part(family, part, p: int, k: int):
    if isinstance(part, TailUnit):
        q = family.p if isinstance(family, TailPower) else family.structure.summands[part.summand].p
        if q != p:
            # p is invertible modulo powers of q
            if part.j is None:
                return None
            mod = q ** part.j
            return TailUnit(part.coeff * pow(p ** k, -1, mod) % mod, part.j, part.summand)
        if part.j is None:
            if part.coeff % p ** k:
                return None
            return TailUnit(part.coeff // p ** k, None, part.summand)
        return TailUnit(part.coeff, part.j + k, part.summand)
    if isinstance(family, TailPower):
        v = int(part.value)
        return ConstantElem(v // p ** k) if v % p ** k == 0 else None
    y = family.structure.divide(part.value, p, k)
    return None if y is None else ConstantElem(y)


def tor_divisibility(family, f: DefinableSequence, p: int, k: int):
    """Is ``p^k | f`` in the tor-ultraproduct?  When it is, a witness sequence
    ``g`` with ``p^k * g(i) = f(i)`` on the large set is built and checked."""
    member = tor_membership(family, f)
    if not isinstance(member, TorMembership):
        raise ValueError(f"not a verified member ({member.verdict})")
    s = satisfaction_indices(family, Divides(p, k, Var("x")), f)
    if isinstance(s, UndecidedSet):
        return TorUndecided(s.reason)
    if not isinstance(s, CofiniteSet):
        return DivisibilityResult(False, s)
    parts = f.tail.parts if isinstance(f.tail, TailSum) else (f.tail,)
    divided = [_divide_part(family, part, p, k) for part in parts]
    if any(d is None for d in divided):
        return TorUndecided("no closed-form quotient for the tail")
    tail = divided[0] if len(divided) == 1 else TailSum(tuple(divided))
    exceptions = []
    for n, _ in f.exceptions:
        if n in s.complement:
            continue
        M = family.member(n)
        y = M.divide(sequence_value(family, f, n), p, k)
        exceptions.append((n, y))
    g = DefinableSequence(tail, tuple(exceptions))
    start = max(s.complement, default=-1) + 1
    for n in range(start, start + 64):
        M = family.member(n)
        if M.scalar(p ** k, sequence_value(family, g, n)) != sequence_value(family, f, n):
            raise AssertionError(f"witness fails at index {n}")
    return DivisibilityResult(True, s, g, tor_membership(family, g), p ** k * member.order)


# ------------------------------------------------------ dividing line


def bounded_order_families(G: TorsionGroupPresentation) -> list[tuple[int, str]]:
    """Each ``(n, description)`` where infinitely many elements have order
    dividing ``n``; sorted by ``n``."""
    out = []
    for i, s in enumerate(G.summands):
        if isinstance(s, Tail):
            out.append((s.p, f"p^(h(i)-1) in component i of summand {i} ({s}), all of order {s.p}"))
        elif s.mult == OMEGA and not (isinstance(s, Cyclic) and s.k == 0):
            what = "1/p" if isinstance(s, Prufer) else f"{s.p ** max(s.k - 1, 0)}"
            out.append((s.p, f"{what} in component i of summand {i} ({s}), all of order {s.p}"))
    out.sort(key=lambda t: t[0])
    return out


def finiteness_certificates(G: TorsionGroupPresentation) -> tuple[str, ...]:
    out = []
    for i, s in enumerate(G.summands):
        if isinstance(s, Prufer):
            out.append(f"summand {i}: {s.mult} copies of Z({s.p}^inf); elements of order dividing n "
                       f"form a finite group of size at most n^{s.mult}")
        else:
            out.append(f"summand {i}: finite ({s})")
    return tuple(out)


@dataclass(frozen=True)
class CaseA:
    certificates: tuple[str, ...]

    verdict = "CaseA"


@dataclass(frozen=True)
class CaseB:
    n: int
    description: str

    verdict = "CaseB"


def dividing_line(G: TorsionGroupPresentation):
    """CaseB when some ``n`` bounds the order of infinitely many elements."""
    fams = bounded_order_families(G)
    if fams:
        return CaseB(*fams[0])
    return CaseA(finiteness_certificates(G))


# ------------------------------------------------------- ee checking


@dataclass(frozen=True)
class Equivalent:
    bound: int
    cap: int
    pairs: int

    verdict = "Equivalent"


@dataclass(frozen=True)
class Distinguished:
    phi: PPNormal
    psi: PPNormal
    values: tuple

    verdict = "Distinguished"


def pp_candidates(bound: int, var: str = "x") -> tuple[list[PPNormal], list[PPNormal]]:
    """Single-condition formulas for the left and right slot of a pair."""
    primes = first_primes(bound)
    divs, anns = [], []
    coeffs = sorted({c for p in primes for c in range(1, p ** bound + 1)})
    for p in primes:
        for n in range(1, bound + 1):
            for c in range(1, p ** bound + 1):
                divs.append(PPNormal((Div(p, n, ((var, c),)),), (var,)))
    for c in coeffs:
        anns.append(PPNormal((Ann(((var, c),)),), (var,)))
    top = PPNormal((), (var,))
    return divs + anns + [top], anns + divs + [top]


def ee_invariants_check(G, H, bound: int, cap: int):
    """Compare capped invariants of ``G`` and ``H`` over every pair of the
    bounded family; the first disagreement is reported."""
    if bound < 1 or cap < 1:
        raise ValueError("bound and cap must be positive")
    lefts, rights = pp_candidates(bound)
    pairs = 0
    for phi in lefts:
        for psi in rights:
            pairs += 1
            a = compute_inv(G, phi, psi, cap)
            b = compute_inv(H, phi, psi, cap)
            if a != b:
                return Distinguished(phi, psi, (a, b))
    return Equivalent(bound, cap, pairs)


# -------------------------------------------------- p.p. transfer check


def order_profile(M: FiniteStructure) -> tuple:
    """Counts of element orders; determines a finite abelian group."""
    counts = Counter()
    for a in M.universe:
        r = 1
        while M.scalar(r, a) != M.zero:
            r += 1
        counts[r] += 1
    return tuple(sorted(counts.items()))


def tor_los_pp_verify(groups: Sequence[TorsionGroupPresentation | FiniteStructure], atom: int,
                      formulas: Sequence[Formula | InvariantsCondition], samples: int = 64,
                      seed: int = 0) -> TransferReport:
    """Transfer check for p.p. formulas, their boolean combinations and
    invariants sentences over pairwise isomorphic finite groups."""
    structures = [g if isinstance(g, FiniteStructure) else to_finite_structure(g) for g in groups]
    profiles = {order_profile(M) for M in structures}
    if len(profiles) != 1:
        raise ValueError("family members are not isomorphic")
    exponent = max(r for r, _ in next(iter(profiles)))
    ctx = GammaContext(FiniteFamily(tuple(structures)), PrincipalFinite(len(structures), atom),
                       (tor_type(exponent),))
    plain = [f for f in formulas if not isinstance(f, InvariantsCondition)]
    report = verify_los_finite(ctx, plain, samples, seed)
    report.notes.append("elementary equivalence checked as isomorphism (equal order profiles)")
    quotient = build_quotient(ctx, seed=seed).structure
    for cond in formulas:
        if not isinstance(cond, InvariantsCondition):
            continue
        entry = FormulaTransfer(str(cond), "InvariantsSentence")
        idx = frozenset(i for i, g in enumerate(groups) if eval_invariants_sentence(g, cond))
        left = bool(ctx.ultrafilter.large(FiniteSet(idx)))
        right = eval_formula_finite(quotient, cond.to_formula())
        entry.samples = 1
        if left == right:
            entry.both = int(left)
        elif left:
            entry.left_to_right_failures.append(())
        else:
            entry.right_to_left_failures.append(())
        report.entries.append(entry)
    return report
