"""Recursive-descent parser for the ASCII formula grammar.

Precedence, loosest first: ``->``, ``|``, ``&``, ``~``; binary connectives
associate to the left.  ``forall v.`` / ``exists v.`` scope to the end of the
enclosing parenthesis (or the input).  ``p^n | t`` and ``k | t`` (``k`` a prime
power) are divisibility atoms; ``|`` anywhere else is disjunction.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    And, App, Divides, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel,
    ScalarMul, Signature, Term, Var, prime_power,
)

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[~&|().,=+\-*^]))"
)
_VARIABLE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")
KEYWORDS = ("forall", "exists")


class ParseError(ValueError):
    def __init__(self, message: str, pos: int | None = None, expected: str | None = None):
        self.pos = pos
        self.expected = expected
        where = f" at position {pos}" if pos is not None else ""
        super().__init__(f"{message}{where}")


class FormulaSyntaxError(ParseError):
    pass


class UndeclaredSymbol(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(text, i)
        if not m or m.end() == i:
            raise FormulaSyntaxError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        tok = m.group(kind)
        start = m.start(kind)
        if kind == "op":
            kind = tok
        elif kind == "arrow":
            kind = "->"
        elif kind == "ident" and tok in KEYWORDS:
            kind = tok
        out.append(Token(kind, tok, start))
        i = m.end()
    out.append(Token("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.sig = sig
        self.toks = tokenize(text)
        self.i = 0
        self.furthest: FormulaSyntaxError | None = None

    # -- helpers
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, expected: str) -> FormulaSyntaxError:
        tok = self.peek()
        found = tok.text or "end of input"
        err = FormulaSyntaxError(f"expected {expected}, found {found!r}", tok.pos, expected)
        if self.furthest is None or (err.pos or 0) >= (self.furthest.pos or 0):
            self.furthest = err
        return err

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise self.fail(repr(kind))
        self.i += 1
        return tok

    def accept(self, kind: str) -> bool:
        if self.peek().kind == kind:
            self.i += 1
            return True
        return False

    # -- formulas
    def formula(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.accept("|"):
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.accept("&"):
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.i += 1
            return Not(self.unary())
        if tok.kind in KEYWORDS:
            self.i += 1
            name = self.expect("ident")
            if not _VARIABLE.match(name.text) or self.sig.arity(name.text) is not None:
                raise FormulaSyntaxError(f"{name.text!r} is not a variable name", name.pos, "variable")
            self.expect(".")
            body = self.formula()
            return (Forall if tok.kind == "forall" else Exists)(name.text, body)
        if tok.kind == "(":
            save = self.i
            try:
                self.i += 1
                inner = self.formula()
                self.expect(")")
                return inner
            except FormulaSyntaxError:
                self.i = save
                return self.atom()
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "int" and self.peek(1).kind in ("^", "|"):
            return self.divides()
        if tok.kind == "ident" and tok.text in self.sig.relation_arity:
            self.i += 1
            args = self.arguments(tok)
            arity = self.sig.relation_arity[tok.text]
            if len(args) != arity:
                raise ArityMismatch(f"relation {tok.text} takes {arity} arguments, got {len(args)}", tok.pos)
            return Rel(tok.text, tuple(args))
        left = self.term()
        self.expect("=")
        return Eq(left, self.term())

    def divides(self) -> Formula:
        base = self.expect("int")
        if self.sig.scalar is None:
            raise FormulaSyntaxError("divisibility needs a scalar signature", base.pos)
        if self.accept("^"):
            exp = self.expect("int")
            p, n = int(base.text), int(exp.text)
            pp = prime_power(p)
            if pp is None or pp[1] != 1 or n < 1:
                raise FormulaSyntaxError(f"{base.text}^{exp.text} is not a prime power", base.pos)
        else:
            pp = prime_power(int(base.text))
            if pp is None:
                raise FormulaSyntaxError(f"{base.text} is not a prime power", base.pos)
            p, n = pp
        self.expect("|")
        return Divides(p, n, self.summand())

    def arguments(self, head: Token) -> list[Term]:
        self.expect("(")
        args = [self.term()]
        while self.accept(","):
            args.append(self.term())
        self.expect(")")
        return args

    # -- terms
    def term(self) -> Term:
        left = self.summand()
        while self.peek().kind in ("+", "-"):
            op = self.peek()
            self._need_symbol("+", 2, op)
            self.i += 1
            right = self.summand()
            if op.kind == "-":
                self._need_symbol("-", 1, op)
                right = App("-", (right,))
            left = App("+", (left, right))
        return left

    def summand(self) -> Term:
        tok = self.peek()
        if tok.kind == "-":
            if self.peek(1).kind == "int" and self.peek(2).kind == "*":
                self.i += 1
                k = int(self.expect("int").text)
                self._need_scalar(tok)
                self.expect("*")
                return ScalarMul(-k, self.summand())
            self._need_symbol("-", 1, tok)
            self.i += 1
            return App("-", (self.summand(),))
        if tok.kind == "int" and self.peek(1).kind == "*":
            self.i += 2
            self._need_scalar(tok)
            return ScalarMul(int(tok.text), self.summand())
        return self.primary()

    def primary(self) -> Term:
        tok = self.peek()
        if tok.kind == "(":
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        if tok.kind == "int":
            self.i += 1
            if not self.sig.is_constant(tok.text):
                raise UndeclaredSymbol(f"undeclared constant {tok.text}", tok.pos)
            return App(tok.text)
        if tok.kind == "ident":
            self.i += 1
            arity = self.sig.arity(tok.text)
            if arity is None:
                if tok.text in self.sig.relation_arity:
                    raise FormulaSyntaxError(f"relation {tok.text} used as a term", tok.pos)
                if _VARIABLE.match(tok.text) and self.peek().kind != "(":
                    return Var(tok.text)
                raise UndeclaredSymbol(f"undeclared symbol {tok.text}", tok.pos)
            if arity == 0:
                return App(tok.text)
            args = self.arguments(tok)
            if len(args) != arity:
                raise ArityMismatch(f"function {tok.text} takes {arity} arguments, got {len(args)}", tok.pos)
            return App(tok.text, tuple(args))
        raise self.fail("a term")

    def _need_scalar(self, tok: Token) -> None:
        if self.sig.scalar is None:
            raise FormulaSyntaxError("scalar multiplication needs a scalar signature", tok.pos)

    def _need_symbol(self, sym: str, arity: int, tok: Token) -> None:
        if self.sig.function_arity.get(sym) != arity:
            raise UndeclaredSymbol(f"undeclared symbol {sym}", tok.pos)


def parse_formula(text: str, sig: Signature) -> Formula:
    """Parse ``text`` over ``sig``; raises a :class:`ParseError` subclass."""
    p = _Parser(text, sig)
    try:
        f = p.formula()
        if p.peek().kind != "eof":
            raise p.fail("end of input")
    except FormulaSyntaxError as err:
        best = p.furthest
        if best is not None and (best.pos or 0) > (err.pos or 0):
            raise best from None
        raise
    return f


def parse_term(text: str, sig: Signature) -> Term:
    p = _Parser(text, sig)
    t = p.term()
    if p.peek().kind != "eof":
        raise p.fail("end of input")
    return t
