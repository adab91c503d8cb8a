import json
from pathlib import Path

import pytest

from gammaultra.cli import main
from gammaultra.golden import EXAMPLES

DATA = Path(__file__).resolve().parents[1] / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_eval_text_and_trace(capsys):
    code, out = run(capsys, "eval", "--structure", DATA / "z4.json",
                    "--formula", "exists x. (2*x = 0 & ~(x = 0))", "--trace")
    assert code == 0
    assert out.splitlines()[0] == "true" and "witness 2" in out


def test_eval_json(capsys):
    code, out = run(capsys, "eval", "--structure", DATA / "z2.json", "--formula", "forall x. x + x = 0", "--json")
    record = json.loads(out)
    assert code == 0 and record["value"] is True and record["class"] == "Universal"


def test_eval_torsion_assignment(capsys):
    code, out = run(capsys, "eval", "--structure", DATA / "tail2.json", "--formula", "2^3 | x",
                    "--assign", "x=[[0,4,16]]")
    assert code == 0 and out.strip() == "true"


def test_parse_error_exit_code(capsys):
    code = main(["eval", "--structure", str(DATA / "z4.json"), "--formula", "forall x. (x = x"])
    err = capsys.readouterr().err
    assert code == 2 and "position 16" in err


@pytest.mark.parametrize("phi,psi,cap,expected", [
    ("2*x = 0", "(2^2 | x) & 2*x = 0", None, "4"),
    ("x = x", "2^1 | x", "8", ">=8"),
])
def test_inv(capsys, phi, psi, cap, expected):
    argv = ["inv", "--structure", DATA / "tail2.json", "--phi", phi, "--psi", psi]
    if cap:
        argv += ["--cap", cap]
    code, out = run(capsys, *argv)
    assert code == 0 and out.strip() == expected


def test_member_verdicts(capsys):
    ctx = DATA / "arith-powers.json"
    _, out = run(capsys, "member", "--context", ctx, "--sequence",
                 '{"tail": {"kind": "geometric", "a": 1, "c": 2, "d": -1}}', "--json")
    assert json.loads(out)["verdict"] == "Member"
    _, out = run(capsys, "member", "--context", ctx, "--sequence",
                 '{"tail": {"kind": "geometric", "a": 1, "c": 2, "d": 0}}')
    assert out.startswith("NotMember")


def test_tor_member_and_divides(capsys):
    ctx = DATA / "cyclic-tail.json"
    seq = '{"tail": {"kind": "unit", "coeff": 1, "j": 1}}'
    _, out = run(capsys, "member", "--context", ctx, "--sequence", seq, "--tor")
    assert out.strip() == "Member: order 2"
    code, out = run(capsys, "divides", "--context", ctx, "--sequence", seq, "--prime", "2", "--exponent", "5")
    assert code == 0 and out.startswith("True")


def test_closed_checks(capsys):
    code, out = run(capsys, "closed-check", "--torsion")
    assert code == 0 and "g(n, m) = n*m" in out
    code, out = run(capsys, "closed-check", "--context", DATA / "two-point.json")
    assert code == 1 and out.startswith("CounterExample")


def test_hull_and_nice(capsys):
    _, out = run(capsys, "hull", "--context", DATA / "two-point.json")
    assert "closed=False" in out
    code, out = run(capsys, "nice-check", "--context", DATA / "z6-power.json", "--formula", "exists y. y + y = x")
    assert code == 0 and out.startswith("WitnessScheme")


def test_los_verify(capsys):
    code, out = run(capsys, "los-verify", "--context", DATA / "z6-power.json",
                    "--formula", "forall y. x + y = y + x", "--formula", "exists y. y + y = x")
    assert code == 0 and "collapse holds: True" in out
    assert out.count("0 left-to-right and 0 right-to-left failures") == 2


def test_tor_ee_and_dividing_line(capsys):
    _, out = run(capsys, "tor-ee", "--structure", DATA / "z4.json", "--other", DATA / "z2z2.json")
    assert out.startswith("Distinguished") and "values 2 vs 1" in out
    _, out = run(capsys, "dividing-line", "--structure", DATA / "tail2.json")
    assert out.startswith("CaseB")
    _, out = run(capsys, "dividing-line", "--structure", DATA / "prufer2.json", "--json")
    assert json.loads(out)["verdict"] == "CaseA"


def test_examples_are_deterministic_jsonl(capsys):
    code, first = run(capsys, "examples")
    _, second = run(capsys, "examples")
    records = [json.loads(line) for line in first.splitlines()]
    assert code == 0 and first == second
    assert [r["id"] for r in records] == sorted(EXAMPLES)
    assert all(r["status"] == "Pass" and "elapsed" not in r for r in records)


def test_examples_subset_with_timing(capsys):
    code, out = run(capsys, "examples", "torsion-groups-closed", "--timing")
    (record,) = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and record["id"] == "torsion-groups-closed" and "elapsed" in record


def test_unknown_example_is_an_error(capsys):
    assert main(["examples", "no-such-example"]) == 2
