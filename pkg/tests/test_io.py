from pathlib import Path

import pytest

from gammaultra import io
from gammaultra.groups import Cyclic, Prufer, Tail, TorsionGroupPresentation
from gammaultra.sequences import ConstantPower, FiniteFamily, Frechet, NaturalNumbers, PrincipalFinite, TailPower
from gammaultra.structures import FiniteStructure

DATA = Path(__file__).resolve().parents[1] / "data"


def test_structures_from_files():
    assert isinstance(io.load_structure(DATA / "z2.json"), FiniteStructure)
    assert io.load_structure(DATA / "z4.json").size == 4
    G = io.load_structure(DATA / "z2z2.json")
    assert isinstance(G, TorsionGroupPresentation) and G.summands == (Cyclic(2, 1, 2),)
    assert io.load_structure(DATA / "prufer2.json").summands == (Prufer(2),)
    assert io.load_structure(DATA / "tail2.json").summands == (Tail(2, 1, 1),)
    assert isinstance(io.load_structure({"kind": "natural"}), NaturalNumbers)


def test_inline_json_text():
    M = io.load_structure('{"kind": "abelian", "moduli": [2, 3]}')
    assert M.size == 6


def test_contexts():
    ctx = io.load_context(DATA / "z6-power.json")
    assert isinstance(ctx.family, FiniteFamily) and isinstance(ctx.ultrafilter, PrincipalFinite)
    assert ctx.gamma[0].is_tor and ctx.gamma[0].depth == 6
    ctx = io.load_context(DATA / "arith-powers.json")
    assert isinstance(ctx.family, ConstantPower) and isinstance(ctx.ultrafilter, Frechet)
    assert isinstance(io.load_context(DATA / "cyclic-tail.json").family, TailPower)


def test_sequence_documents():
    ctx = io.load_context(DATA / "cyclic-tail.json")
    seq = io.load_sequence(ctx, {"tail": {"kind": "sum", "parts": [{"kind": "unit", "coeff": 1, "j": 1},
                                                                     {"kind": "unit", "coeff": 1, "j": 2}]},
                                 "exceptions": {"0": 0}})
    assert seq.exception_map == {0: 0}


def test_torsion_elements():
    G = io.load_structure(DATA / "prufer2.json")
    x = io.load_element(G, '[[0, 0, "3/2^2"]]')
    assert str(x.value_at(0, 0)) == "3/4"


@pytest.mark.parametrize("doc", [
    {"kind": "weird"},
    {"kind": "torsion", "summands": [{"type": "weird", "p": 2}]},
])
def test_bad_documents(doc):
    with pytest.raises(io.DocumentError):
        io.load_structure(doc)


def test_bad_context():
    with pytest.raises(io.DocumentError):
        io.load_context({"family": {"kind": "weird"}})
