"""The Gamma-ultraproduct: membership, hulls, closure/niceness schemes and
transfer verification."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

from .analysis import UnaryTypePresentation, classify_quantifier
from .formula import (
    Exists, Formula, Var, formula_symbols, negate, print_formula, substitute,
)
from .groups import TorsionGroupPresentation
from .sequences import (
    ConstantElem, ConstantPower, DefinableSequence, FiniteFamily, FiniteSet,
    Frechet, GeometricNat, AffineNat, IndexSet, NaturalNumbers, PrincipalFinite,
    TailPower, TailUnit, Ultrafilter, Unrepresentable, add_sequences, is_torsion_family,
    satisfaction_indices,
)
from .structures import FiniteStructure, eval_formula_finite


def _type_formula(p: UnaryTypePresentation, j: int, var: str = "x") -> Formula:
    return substitute(p.formula(j), {p.var: Var(var)})


def omits_truncation(M: FiniteStructure, p: UnaryTypePresentation, a) -> int | None:
    """Least ``j`` with ``M |= ~phi_j(a)``; ``None`` if ``a`` realizes the fragment."""
    for j, phi in enumerate(p.formulas):
        if not eval_formula_finite(M, phi, {p.var: a}):
            return j
    return None


# ----------------------------------------------------------------- context


@dataclass(frozen=True)
class OmissionViolation:
    member: int
    type_name: str
    element: object


@dataclass(frozen=True)
class GammaContext:
    """A family of structures, an ultrafilter and a presented Gamma.

    Members of finite families that realize a presented fragment are recorded
    in ``violations`` rather than rejected, so reports can mention them.
    """

    family: Union[FiniteFamily, ConstantPower, TailPower]
    ultrafilter: Ultrafilter
    gamma: tuple[UnaryTypePresentation, ...] = ()
    violations: tuple[OmissionViolation, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", tuple(self.gamma))
        if isinstance(self.family, FiniteFamily):
            if not isinstance(self.ultrafilter, PrincipalFinite):
                raise ValueError("a finite family needs a principal ultrafilter")
            if self.ultrafilter.size != self.family.size:
                raise ValueError("ultrafilter index set differs from the family size")
        elif not isinstance(self.ultrafilter, Frechet):
            raise ValueError("omega-indexed families use the Frechet descriptor")
        found = []
        members = []
        if isinstance(self.family, FiniteFamily):
            members = list(enumerate(self.family.structures))
        elif isinstance(self.family, ConstantPower) and isinstance(self.family.structure, FiniteStructure):
            members = [(0, self.family.structure)]
        for i, M in members:
            for p in self.gamma:
                for a in M.universe:
                    if omits_truncation(M, p, a) is None:
                        found.append(OmissionViolation(i, p.name, a))
        object.__setattr__(self, "violations", tuple(found))

    @property
    def depth(self) -> int:
        return max((p.depth for p in self.gamma), default=0)


# --------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Member:
    witness: tuple[int, ...]
    large_sets: tuple[IndexSet, ...]
    gamma_names: tuple[str, ...] = ()

    @property
    def choice(self) -> dict[str, int]:
        return dict(zip(self.gamma_names, self.witness))

    verdict = "Member"


@dataclass(frozen=True)
class NotMember:
    """No formula of ``type_name`` (up to ``depth``) fails on a large set.

    ``certificates`` lists, per formula index, the set of indices where that
    formula fails.  ``conclusive`` is set when these sets are finite initial
    segments growing with the index, the pattern that persists at every depth
    for types of increasing strength.
    """

    type_name: str
    certificates: tuple[tuple[int, IndexSet], ...]
    depth: int
    conclusive: bool = False

    verdict = "NotMember"


@dataclass(frozen=True)
class Undecided:
    reason: str

    verdict = "Undecided"


MembershipVerdict = Union[Member, NotMember, Undecided]


def _chain(certs) -> bool:
    last = -1
    for _, s in certs:
        if not isinstance(s, FiniteSet):
            return False
        seg = s.initial_segment()
        if seg is None or seg < last:
            return False
        last = seg
    return len(certs) > 1 and last > 0


def membership_check(ctx: GammaContext, f: DefinableSequence,
                     hints: Mapping[str, int] | None = None) -> MembershipVerdict:
    """Search a witness: per type, the first formula (hinted index first, then
    ascending) whose negation holds of ``f`` on a large set."""
    hints = hints or {}
    witness, sets = [], []
    for p in ctx.gamma:
        order = list(range(p.depth))
        if p.name in hints and 0 <= hints[p.name] < p.depth:
            order.remove(hints[p.name])
            order.insert(0, hints[p.name])
        certs = []
        undecided = None
        chosen = None
        for j in order:
            s = satisfaction_indices(ctx.family, negate(_type_formula(p, j)), f)
            large = ctx.ultrafilter.large(s)
            if large:
                chosen = (j, s)
                break
            if large is None:
                undecided = undecided or s
            certs.append((j, s))
        if chosen is None:
            if undecided is not None:
                return Undecided(f"type {p.name}: {undecided.describe()}")
            certs.sort(key=lambda t: t[0])
            return NotMember(p.name, tuple(certs), p.depth, _chain(certs))
        witness.append(chosen[0])
        sets.append(chosen[1])
    return Member(tuple(witness), tuple(sets), tuple(p.name for p in ctx.gamma))


def gup_sum_check(ctx: GammaContext, f: DefinableSequence, g: DefinableSequence) -> MembershipVerdict:
    """Membership of the pointwise sum of two members.

    For torsion families the witness predicted by multiplying orders is tried
    first.
    """
    vf, vg = membership_check(ctx, f), membership_check(ctx, g)
    for name, v in (("first", vf), ("second", vg)):
        if not isinstance(v, Member):
            raise ValueError(f"{name} summand is not a member ({v.verdict})")
    try:
        h = add_sequences(ctx.family, f, g)
    except Unrepresentable as err:
        return Undecided(str(err))
    hints = {}
    if is_torsion_family(ctx.family):
        for p, a, b in zip(ctx.gamma, vf.witness, vg.witness):
            if p.is_tor:
                hints[p.name] = (a + 1) * (b + 1) - 1
    return membership_check(ctx, h, hints)


def sum_sequence(ctx: GammaContext, f: DefinableSequence, g: DefinableSequence) -> DefinableSequence:
    return add_sequences(ctx.family, f, g)


# ------------------------------------------------------------------- hull


@dataclass(frozen=True)
class HullReport:
    elements: tuple
    closure: tuple[tuple[str, tuple | None], ...]
    depth: int

    @property
    def closed(self) -> bool:
        return all(c is None for _, c in self.closure)

    def counterexample(self, symbol: str) -> tuple | None:
        return dict(self.closure)[symbol]


def hull_elements(M: FiniteStructure, gamma: Sequence[UnaryTypePresentation]) -> tuple:
    return tuple(a for a in M.universe if all(omits_truncation(M, p, a) is not None for p in gamma))


def gamma_hull(M: FiniteStructure, gamma: Sequence[UnaryTypePresentation]) -> HullReport:
    """Elements omitting every presented fragment, with per-symbol closure."""
    if not isinstance(M, FiniteStructure):
        raise TypeError("hulls are computed for finite structures")
    hull = hull_elements(M, gamma)
    inside = set(hull)
    closure = []
    for sym, arity in M.signature.functions:
        bad = None
        for args in itertools.product(hull, repeat=arity):
            if M.apply(sym, args) not in inside:
                bad = args
                break
        closure.append((sym, bad))
    return HullReport(hull, tuple(closure), max((p.depth for p in gamma), default=0))


def hull_structure(M: FiniteStructure, report: HullReport) -> FiniteStructure:
    """The substructure on the hull; symbols the hull is not closed under are
    dropped from the signature."""
    inside = set(report.elements)
    keep = [(s, a) for s, a in M.signature.functions if report.counterexample(s) is None]
    funcs = {s: {args: v for args, v in M.functions[s].items() if set(args) <= inside} for s, _ in keep}
    rels = {s: frozenset(t for t in M.relations.get(s, ()) if set(t) <= inside) for s, _ in M.signature.relations}
    sig = type(M.signature)(M.signature.name + "-hull", tuple(keep), M.signature.relations,
                           M.signature.scalar, M.signature.numerals)
    return FiniteStructure(sig, report.elements, funcs, rels, f"hull({M.name})")


# ------------------------------------------------------- witness schemes


ChoiceTuple = tuple[int, ...]


@dataclass(frozen=True)
class WitnessScheme:
    """For each symbol (or existential formula), a map from argument witness
    profiles to an output choice function.  ``rules`` holds closed forms when
    the scheme is uniform."""

    table: tuple[tuple[str, tuple[tuple[tuple[ChoiceTuple, ...], ChoiceTuple], ...]], ...] = ()
    rules: tuple[tuple[str, str], ...] = ()
    apply_rule: Callable | None = field(default=None, compare=False)

    verdict = "WitnessScheme"

    def lookup(self, symbol: str, profile: tuple[ChoiceTuple, ...]) -> ChoiceTuple:
        return dict(dict(self.table)[symbol])[profile]


@dataclass(frozen=True)
class CounterExample:
    symbol: str
    arguments: tuple
    profile: tuple[ChoiceTuple, ...]
    member: int
    detail: str

    verdict = "CounterExample"


@dataclass(frozen=True)
class Inconclusive:
    symbol: str
    profile: tuple[ChoiceTuple, ...]
    search_depth: int

    verdict = "Inconclusive"


SchemeVerdict = Union[WitnessScheme, CounterExample, Inconclusive]


def _choice_functions(gamma, search_depth: int) -> list[ChoiceTuple]:
    return list(itertools.product(*[range(min(p.depth, search_depth)) for p in gamma]))


def _fails_all(M, gamma, choice: ChoiceTuple, a, memo) -> bool:
    """``M |= ~chi(p)(a)`` for every type ``p``."""
    key = (id(M), choice, a)
    if key not in memo:
        memo[key] = all(not eval_formula_finite(M, p.formula(j), {p.var: a}) for p, j in zip(gamma, choice))
    return memo[key]


def _tor_profile_hint(gamma, profile) -> ChoiceTuple | None:
    if not gamma or not all(p.is_tor for p in gamma):
        return None
    out = []
    for t, p in enumerate(gamma):
        r = 1
        for choice in profile:
            r *= choice[t] + 1
        if r > p.depth:
            return None
        out.append(r - 1)
    return tuple(out)


def _tor_scheme() -> WitnessScheme:
    from .torsion import order_propagation
    from .formula import App, Var as V

    def rule(symbol: str, orders: Sequence[int]) -> int:
        args = tuple(V(f"x{i}") for i in range(len(orders)))
        return order_propagation(App(symbol, args), list(orders))

    rules = (("+", "g(n, m) = n*m"), ("-", "g(n) = n"), ("0", "g() = 1"))
    return WitnessScheme((), rules, rule)


TORSION_TAG = "torsion"


def check_gamma_closed(family: Sequence[FiniteStructure] | str,
                       gamma: Sequence[UnaryTypePresentation], search_depth: int | None = None) -> SchemeVerdict:
    """Search, for every function symbol, an output witness per input profile
    that works uniformly across the family."""
    if isinstance(family, str):
        if family != TORSION_TAG:
            raise ValueError(f"unknown theory tag {family!r}")
        return _tor_scheme()
    gamma = tuple(gamma)
    if not gamma:
        return WitnessScheme()
    search_depth = search_depth or max(p.depth for p in gamma)
    choices = _choice_functions(gamma, search_depth)
    sig = family[0].signature
    memo: dict = {}
    table = []
    for sym, arity in sig.functions:
        entries = []
        for profile in itertools.product(choices, repeat=arity):
            instances = []
            for i, M in enumerate(family):
                for args in itertools.product(M.universe, repeat=arity):
                    if all(_fails_all(M, gamma, c, a, memo) for c, a in zip(profile, args)):
                        instances.append((i, M, args, M.apply(sym, args)))
            hint = _tor_profile_hint(gamma, profile)
            candidates = ([hint] if hint else []) + [c for c in choices if c != hint]
            found = None
            for chi in candidates:
                if all(_fails_all(M, gamma, chi, value, memo) for _, M, _, value in instances):
                    found = chi
                    break
            if found is None:
                for i, M, args, value in instances:
                    if any(omits_truncation(M, p, value) is None for p in gamma):
                        return CounterExample(sym, args, profile, i,
                                              f"{sym}{args} = {value!r} realizes a presented fragment")
                return Inconclusive(sym, profile, search_depth)
            entries.append((profile, found))
        table.append((sym, tuple(entries)))
    return WitnessScheme(tuple(table))


def _existential_block(f: Formula) -> tuple[list[str], Formula]:
    names = []
    while isinstance(f, Exists):
        names.append(f.var)
        f = f.body
    return names, f


def check_gamma_nice(family: Sequence[FiniteStructure], gamma: Sequence[UnaryTypePresentation],
                     formulas: Iterable[Formula], search_depth: int | None = None) -> SchemeVerdict:
    """For each existential formula, an output witness per parameter profile
    such that the existential always has a witness omitting Gamma that way."""
    gamma = tuple(gamma)
    if not gamma:
        return WitnessScheme()
    search_depth = search_depth or max(p.depth for p in gamma)
    choices = _choice_functions(gamma, search_depth)
    memo: dict = {}
    table = []
    for psi in formulas:
        ys, body = _existential_block(psi)
        if not ys:
            raise ValueError(f"not an existential formula: {psi}")
        params = sorted(psi.free_vars)
        label = print_formula(psi)
        entries = []
        for profile in itertools.product(choices, repeat=len(params)):
            instances = []
            for i, M in enumerate(family):
                for args in itertools.product(M.universe, repeat=len(params)):
                    if not all(_fails_all(M, gamma, c, a, memo) for c, a in zip(profile, args)):
                        continue
                    env = dict(zip(params, args))
                    sols = []
                    for ws in itertools.product(M.universe, repeat=len(ys)):
                        env.update(zip(ys, ws))
                        if eval_formula_finite(M, body, env):
                            sols.append(ws)
                    if sols:
                        instances.append((i, M, args, sols))
            found = None
            for chi in choices:
                if all(any(all(_fails_all(M, gamma, chi, w, memo) for w in ws) for ws in sols)
                       for _, M, _, sols in instances):
                    found = chi
                    break
            if found is None:
                for i, M, args, sols in instances:
                    inside = [ws for ws in sols
                              if all(omits_truncation(M, p, w) is not None for p in gamma for w in ws)]
                    if not inside:
                        return CounterExample(label, args, profile, i, "every witness realizes a presented fragment")
                return Inconclusive(label, profile, search_depth)
            entries.append((profile, found))
        table.append((label, tuple(entries)))
    return WitnessScheme(tuple(table))


# ------------------------------------------------------ transfer checking


@dataclass
class FormulaTransfer:
    formula: str
    quant_class: str
    samples: int = 0
    both: int = 0
    left_to_right_failures: list = field(default_factory=list)
    right_to_left_failures: list = field(default_factory=list)
    skipped: str | None = None


@dataclass
class TransferReport:
    entries: list[FormulaTransfer]
    collapse_holds: bool
    hull_closed: bool
    quotient_size: int
    notes: list[str] = field(default_factory=list)

    def by_class(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for e in self.entries:
            agg = out.setdefault(e.quant_class, {"samples": 0, "ltr_failures": 0, "rtl_failures": 0})
            agg["samples"] += e.samples
            agg["ltr_failures"] += len(e.left_to_right_failures)
            agg["rtl_failures"] += len(e.right_to_left_failures)
        return out

    @property
    def ltr_failures(self) -> int:
        return sum(len(e.left_to_right_failures) for e in self.entries)

    @property
    def rtl_failures(self) -> int:
        return sum(len(e.right_to_left_failures) for e in self.entries)


@dataclass(frozen=True)
class GammaQuotient:
    """The explicit Gamma-ultraproduct of a finite family under a principal
    ultrafilter: member sequences grouped by U-equality."""

    classes: dict
    structure: FiniteStructure | None
    collapse_holds: bool
    hull: HullReport


def _all_sequences(family: FiniteFamily, limit: int, rng: random.Random):
    total = 1
    for M in family.structures:
        total *= M.size
    if total <= limit:
        yield from itertools.product(*[M.universe for M in family.structures])
        return
    for _ in range(limit):
        yield tuple(rng.choice(M.universe) for M in family.structures)


def build_quotient(ctx: GammaContext, limit: int = 5000, seed: int = 0) -> GammaQuotient:
    """Materialize the quotient and check that ``[f] -> f(atom)`` is a bijection
    onto the hull of the atom's structure commuting with the tables."""
    fam, U = ctx.family, ctx.ultrafilter
    M0 = fam.structures[U.atom]
    report = gamma_hull(M0, ctx.gamma)
    rng = random.Random(seed)
    classes: dict = {}
    for seq in _all_sequences(fam, limit, rng):
        f = DefinableSequence(ConstantElem(seq[0]), tuple(enumerate(seq)))
        v = membership_check(ctx, f)
        if isinstance(v, Member):
            classes.setdefault(seq[U.atom], []).append(seq)
    ok = set(classes) <= set(report.elements)
    exhaustive = True
    total = 1
    for M in fam.structures:
        total *= M.size
    exhaustive = total <= limit
    if exhaustive:
        ok = ok and set(classes) == set(report.elements)
    structure = None
    if report.elements:
        structure = hull_structure(M0, report)
        # operations on representatives agree with the hull tables
        for sym, arity in structure.signature.functions:
            for args in itertools.product(sorted(classes, key=repr), repeat=arity):
                reps = [classes[a][0] for a in args]
                pointwise = tuple(fam.structures[i].apply(sym, tuple(r[i] for r in reps)) for i in range(fam.size))
                if pointwise[U.atom] != structure.apply(sym, args):
                    ok = False
    return GammaQuotient(classes, structure, ok, report)


def _sample_tuples(universe, k: int, count: int, rng: random.Random):
    if k == 0:
        return [()]
    total = len(universe) ** k
    if total <= count:
        return list(itertools.product(universe, repeat=k))
    return [tuple(rng.choice(universe) for _ in range(k)) for _ in range(count)]


def verify_los_finite(ctx: GammaContext, formulas: Sequence[Formula], samples: int = 64,
                      seed: int = 0) -> TransferReport:
    """Evaluate both sides of the transfer biconditional on sampled tuples.

    Left side: the set of indices where the formula holds is U-large.  Right
    side: truth in the materialized quotient.  Formulas using a symbol the
    hull is not closed under are skipped (relational reduct)."""
    fam, U = ctx.family, ctx.ultrafilter
    if not isinstance(fam, FiniteFamily):
        raise TypeError("verify_los_finite needs a finite family")
    rng = random.Random(seed)
    q = build_quotient(ctx, seed=seed)
    notes = [f"hull of member {U.atom} at depth {q.hull.depth}: {len(q.hull.elements)} elements"]
    if ctx.violations:
        notes.append(f"{len(ctx.violations)} family elements realize a presented fragment")
    entries = []
    reps = sorted(q.classes, key=repr)
    sig = fam.structures[0].signature
    for f in formulas:
        entry = FormulaTransfer(print_formula(f), str(classify_quantifier(f, sig)))
        entries.append(entry)
        if q.structure is None:
            entry.skipped = "empty quotient"
            continue
        kept = {s for s, _ in q.structure.signature.functions}
        missing = {s for s in formula_symbols(f) if sig.arity(s) is not None and s not in kept}
        if missing:
            entry.skipped = "hull not closed under " + ", ".join(sorted(missing))
            continue
        vars_ = sorted(f.free_vars)
        for tup in _sample_tuples(reps, len(vars_), samples, rng):
            seqs = [rng.choice(q.classes[a]) for a in tup]
            idx = frozenset(i for i, M in enumerate(fam.structures)
                            if eval_formula_finite(M, f, {v: s[i] for v, s in zip(vars_, seqs)}))
            left = bool(U.large(FiniteSet(idx)))
            right = eval_formula_finite(q.structure, f, dict(zip(vars_, tup)))
            entry.samples += 1
            if left and right:
                entry.both += 1
            elif left and not right:
                entry.left_to_right_failures.append(tup)
            elif right and not left:
                entry.right_to_left_failures.append(tup)
    return TransferReport(entries, q.collapse_holds, q.hull.closed, len(q.classes), notes)


# --------------------------------------------------------- ultrapowers


@dataclass(frozen=True)
class Yes:
    witness: tuple[int, ...]
    bound: int
    description: str

    verdict = "Yes"


@dataclass(frozen=True)
class No:
    reason: str
    certificates: tuple[str, ...] = ()

    verdict = "No"


def proper_extension_criterion(M, gamma: Sequence[UnaryTypePresentation]):
    """Is there an infinite set of elements all failing one fixed choice of
    formulas?  (Then the ultrapower properly extends ``M``.)"""
    if isinstance(M, FiniteStructure):
        return No("finite structure: no infinite subset")
    if isinstance(M, TorsionGroupPresentation):
        from .torsion import bounded_order_families, finiteness_certificates
        gamma = tuple(gamma)
        if not gamma or not all(p.is_tor for p in gamma):
            raise ValueError("presentations are analysed for the torsion type only")
        fams = bounded_order_families(M)
        if not fams:
            return No("every order bounds finitely many elements", finiteness_certificates(M))
        n, desc = fams[0]
        if any(p.depth < n for p in gamma):
            raise ValueError(f"truncation depth must be at least {n}")
        return Yes(tuple(n - 1 for _ in gamma), n, desc)
    raise TypeError(f"unsupported structure {M!r}")


@dataclass(frozen=True)
class Collapses:
    reason: str
    checks: tuple[tuple[str, str], ...] = ()

    verdict = "Collapses"


@dataclass(frozen=True)
class ProperExtension:
    sequence: DefinableSequence
    witness: tuple[int, ...]

    verdict = "ProperExtension"


def ultrapower_collapse_check(ctx: GammaContext):
    """Does the diagonal embedding onto the Gamma-ultrapower collapse?"""
    fam = ctx.family
    if not isinstance(fam, ConstantPower) or not isinstance(ctx.ultrafilter, Frechet):
        raise ValueError("needs a constant power under the Frechet descriptor")
    M = fam.structure
    if isinstance(M, FiniteStructure):
        return Collapses("finite structure: a member takes finitely many values, one on a large set")
    if isinstance(M, TorsionGroupPresentation):
        from .torsion import bounded_order_families
        fams = bounded_order_families(M)
        if not fams:
            return Collapses("each order is shared by finitely many elements")
        n, _ = fams[0]
        seq = order_bounded_sequence(M, n)
        v = membership_check(ctx, seq)
        if isinstance(v, Member):
            return ProperExtension(seq, v.witness)
        return Undecided(f"expected member is {v.verdict}")
    if isinstance(M, NaturalNumbers):
        identity = DefinableSequence(AffineNat(1, 0))
        checks = []
        unbounded = None
        for p in ctx.gamma:
            for j in range(p.depth):
                s = satisfaction_indices(fam, negate(_type_formula(p, j)), identity)
                if isinstance(s, FiniteSet):
                    checks.append((f"{p.name}[{j}]", f"negation bounded by {len(s.elements)}"))
                else:
                    unbounded = unbounded or f"{p.name}[{j}]"
        if unbounded is None:
            return Collapses("every witness formula's negation defines a finite set", tuple(checks))
        # some negation holds of infinitely many numbers; look for an unbounded member
        for probe in _unbounded_probes():
            v = membership_check(ctx, probe)
            if isinstance(v, Member):
                return ProperExtension(probe, v.witness)
        return Undecided(f"negation of {unbounded} defines an infinite set but no probe is a member")
    return Undecided("unsupported structure")


def _unbounded_probes() -> list[DefinableSequence]:
    probes = [DefinableSequence(AffineNat(a, b)) for a in range(1, 7) for b in range(a)]
    probes += [DefinableSequence(GeometricNat(1, c, d)) for c in (2, 3) for d in (-1, 0, 1)]
    return probes


def order_bounded_sequence(G: TorsionGroupPresentation, n: int) -> DefinableSequence:
    """A non-constant sequence of elements of order ``n`` (``n`` prime)."""
    from .groups import Cyclic, Prufer, Tail, OMEGA
    for i, s in enumerate(G.summands):
        if s.p != n:
            continue
        if isinstance(s, Tail):
            return DefinableSequence(TailUnit(1, 1, i))
        if isinstance(s, Cyclic) and s.mult == OMEGA and s.k >= 1:
            return DefinableSequence(TailUnit(1, 1, i))
        if isinstance(s, Prufer) and s.mult == OMEGA:
            return DefinableSequence(TailUnit(1, 1, i))
    raise ValueError(f"no infinite family of order {n}")
