"""JSON documents for structures, contexts, sequences and elements."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .analysis import UnaryTypePresentation, tor_type
from .formula import Signature, group_signature
from .groups import (
    OMEGA, Cyclic, Prufer, Tail, TorsionElement, TorsionGroupPresentation,
    parse_value,
)
from .parser import parse_formula
from .sequences import (
    AffineNat, ConstantElem, ConstantPower, DefinableSequence, FiniteFamily,
    Frechet, GeometricNat, NaturalNumbers, PrincipalFinite, TailPower,
    TailSum, TailUnit,
)
from .structures import FiniteStructure, finite_abelian_group, structure_from_tables
from .ultraproduct import GammaContext


class DocumentError(ValueError):
    pass


def read_json(source: str | Path | dict) -> Any:
    if isinstance(source, (dict, list)):
        return source
    text = str(source)
    if text.lstrip().startswith(("{", "[")):
        return json.loads(text)
    with open(text, encoding="utf-8") as fh:
        return json.load(fh)


def _token(v):
    return tuple(_token(x) for x in v) if isinstance(v, list) else v


def load_signature(doc: dict) -> Signature:
    return Signature(
        doc.get("name", "L"),
        tuple((s, int(a)) for s, a in doc.get("functions", [])),
        tuple((s, int(a)) for s, a in doc.get("relations", [])),
        doc.get("scalar"),
        bool(doc.get("numerals", False)),
    )


def load_structure(source) -> FiniteStructure | TorsionGroupPresentation | NaturalNumbers:
    doc = read_json(source)
    kind = doc.get("kind")
    if kind == "finite":
        sig = load_signature(doc["signature"])
        universe = [_token(u) for u in doc["universe"]]
        funcs = {}
        for sym, rows in doc.get("functions", {}).items():
            funcs[sym] = {tuple(_token(x) for x in row[:-1]): _token(row[-1]) for row in rows}
        rels = {sym: [tuple(_token(x) for x in row) for row in rows]
                for sym, rows in doc.get("relations", {}).items()}
        return structure_from_tables(sig, universe, funcs, rels, doc.get("name", "M"))
    if kind == "abelian":
        return finite_abelian_group(doc["moduli"], doc.get("name"))
    if kind == "torsion":
        return TorsionGroupPresentation(tuple(_summand(s) for s in doc["summands"]), doc.get("name", "G"))
    if kind == "natural":
        return NaturalNumbers()
    raise DocumentError(f"unknown structure kind {kind!r}")


def _mult(v):
    return OMEGA if v in (OMEGA, "ω") else int(v)


def _summand(doc: dict):
    t = doc.get("type")
    if t == "cyclic":
        return Cyclic(int(doc["p"]), int(doc["k"]), _mult(doc.get("mult", 1)))
    if t == "prufer":
        return Prufer(int(doc["p"]), _mult(doc.get("mult", 1)))
    if t == "tail":
        h = doc.get("h", {})
        return Tail(int(doc["p"]), int(h.get("a", 1)), int(h.get("b", 0)))
    raise DocumentError(f"unknown summand type {t!r}")


def structure_signature(M) -> Signature:
    if isinstance(M, TorsionGroupPresentation):
        return group_signature()
    return M.signature


def load_element(G: TorsionGroupPresentation, doc) -> TorsionElement:
    doc = read_json(doc) if isinstance(doc, str) else doc
    return G.element((int(s), int(c), parse_value(v) if isinstance(v, str) else v) for s, c, v in doc)


def load_type(doc: dict, sig: Signature) -> UnaryTypePresentation:
    if doc.get("generator") == "tor":
        return tor_type(int(doc["depth"]), doc.get("name", "tor"))
    return UnaryTypePresentation.from_strings(
        doc.get("name", "p"), doc["formulas"], sig, doc.get("var", "x"), doc.get("depth"))


def load_context(source, base: Path | None = None) -> GammaContext:
    doc = read_json(source)
    if base is None and not isinstance(source, dict) and not str(source).lstrip().startswith("{"):
        base = Path(source).parent
    fam_doc = doc["family"]
    kind = fam_doc.get("kind")
    if kind == "finite":
        members = tuple(_member(m, base) for m in fam_doc["members"])
        family = FiniteFamily(members)
        sig = members[0].signature
    elif kind == "power":
        M = _member(fam_doc["structure"], base)
        family = ConstantPower(M)
        sig = structure_signature(M)
    elif kind == "tail":
        h = fam_doc.get("h", {})
        family = TailPower(int(fam_doc["p"]), int(h.get("a", 1)), int(h.get("b", 0)))
        sig = group_signature()
    else:
        raise DocumentError(f"unknown family kind {kind!r}")
    u = doc.get("ultrafilter", {"kind": "frechet"})
    if u["kind"] == "principal":
        size = family.size if isinstance(family, FiniteFamily) else 1
        ultra = PrincipalFinite(size, int(u.get("atom", 0)))
    elif u["kind"] == "frechet":
        ultra = Frechet()
    else:
        raise DocumentError(f"unknown ultrafilter kind {u['kind']!r}")
    gamma = tuple(load_type(t, sig) for t in doc.get("gamma", []))
    return GammaContext(family, ultra, gamma)


def _member(doc, base: Path | None):
    if isinstance(doc, str):
        path = Path(doc)
        if base is not None and not path.is_absolute():
            path = base / path
        return load_structure(str(path))
    if "file" in doc:
        return _member(doc["file"], base)
    return load_structure(doc)


def context_signature(ctx: GammaContext) -> Signature:
    fam = ctx.family
    if isinstance(fam, FiniteFamily):
        return fam.structures[0].signature
    if isinstance(fam, TailPower):
        return group_signature()
    return structure_signature(fam.structure)


def _value(ctx: GammaContext, v):
    fam = ctx.family
    if isinstance(fam, ConstantPower) and isinstance(fam.structure, TorsionGroupPresentation):
        return load_element(fam.structure, v) if isinstance(v, list) else v
    return _token(v)


def _tail(ctx: GammaContext, doc: dict):
    kind = doc["kind"]
    if kind == "constant":
        return ConstantElem(_value(ctx, doc["value"]))
    if kind == "affine":
        return AffineNat(int(doc["a"]), int(doc["b"]))
    if kind == "geometric":
        return GeometricNat(int(doc["a"]), int(doc["c"]), int(doc["d"]))
    if kind == "unit":
        j = doc.get("j")
        return TailUnit(int(doc.get("coeff", 1)), None if j is None else int(j), int(doc.get("summand", 0)))
    if kind == "sum":
        return TailSum(tuple(_tail(ctx, p) for p in doc["parts"]))
    raise DocumentError(f"unknown tail kind {kind!r}")


def load_sequence(ctx: GammaContext, source) -> DefinableSequence:
    doc = read_json(source)
    ex = tuple((int(n), _value(ctx, v)) for n, v in doc.get("exceptions", {}).items())
    return DefinableSequence(_tail(ctx, doc["tail"]), ex)


def parse_in(text: str, sig: Signature):
    return parse_formula(text, sig)
