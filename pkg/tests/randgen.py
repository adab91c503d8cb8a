"""Random small structures, types and formulas for the transfer suites."""
from __future__ import annotations

import random

from gammaultra.analysis import UnaryTypePresentation
from gammaultra.formula import Signature
from gammaultra.parser import parse_formula
from gammaultra.sequences import FiniteFamily, PrincipalFinite
from gammaultra.structures import structure_from_tables
from gammaultra.ultraproduct import GammaContext

SIG = Signature("fr", (("F", 1), ("G", 2)), (("R", 1), ("S", 2)))


def random_structure(rng: random.Random, size: int, name: str = "M"):
    universe = list(range(size))
    F = {(a,): rng.choice(universe) for a in universe}
    G = {(a, b): rng.choice(universe) for a in universe for b in universe}
    R = [(a,) for a in universe if rng.random() < 0.5]
    S = [(a, b) for a in universe for b in universe if rng.random() < 0.3]
    return structure_from_tables(SIG, universe, {"F": F, "G": G}, {"R": R, "S": S}, name)


def random_term(rng: random.Random, vars_: list[str], depth: int) -> str:
    if depth <= 0 or rng.random() < 0.4:
        return rng.choice(vars_)
    if rng.random() < 0.5:
        return f"F({random_term(rng, vars_, depth - 1)})"
    return f"G({random_term(rng, vars_, depth - 1)}, {random_term(rng, vars_, depth - 1)})"


def random_atom(rng: random.Random, vars_: list[str]) -> str:
    k = rng.randrange(3)
    if k == 0:
        return f"{random_term(rng, vars_, 1)} = {random_term(rng, vars_, 1)}"
    if k == 1:
        return f"R({random_term(rng, vars_, 1)})"
    return f"S({random_term(rng, vars_, 1)}, {random_term(rng, vars_, 1)})"


def random_qf(rng: random.Random, vars_: list[str], depth: int) -> str:
    if depth <= 1 or rng.random() < 0.3:
        return random_atom(rng, vars_)
    k = rng.randrange(3)
    if k == 0:
        return f"~({random_qf(rng, vars_, depth - 1)})"
    op = "&" if k == 1 else "|"
    return f"({random_qf(rng, vars_, depth - 1)}) {op} ({random_qf(rng, vars_, depth - 1)})"


def random_universal(rng: random.Random, depth: int) -> str:
    bound = ["y", "z"][: rng.randint(1, 2)]
    body = random_qf(rng, ["x"] + bound, depth)
    return "".join(f"forall {v}. " for v in bound) + f"({body})"


def random_type(rng: random.Random, name: str, depth: int) -> UnaryTypePresentation:
    texts = [random_qf(rng, ["x"], 2) for _ in range(depth)]
    return UnaryTypePresentation.from_strings(name, texts, SIG)


def random_context(rng: random.Random) -> GammaContext:
    n = rng.randint(1, 3)
    members = tuple(random_structure(rng, rng.randint(1, 6), f"M{i}") for i in range(n))
    gamma = tuple(random_type(rng, f"p{i}", rng.randint(1, 3)) for i in range(rng.randint(1, 2)))
    return GammaContext(FiniteFamily(members), PrincipalFinite(n, rng.randrange(n)), gamma)


def random_formulas(rng: random.Random, count: int = 4):
    qf = [parse_formula(random_qf(rng, ["x"], rng.randint(1, 3)), SIG) for _ in range(count)]
    univ = [parse_formula(random_universal(rng, rng.randint(1, 3)), SIG) for _ in range(count)]
    return qf, univ
