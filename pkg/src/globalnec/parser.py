"""Recursive-descent parser for the ASCII formula grammar.

Precedence, tightest first: ``~``, ``&``, ``|``, ``->`` (right
associative), ``<->``.  Quantifiers extend as far right as possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    BOT,
    And,
    Atom,
    Exists,
    Forall,
    Formula,
    Iff,
    Imp,
    MetaF,
    ModApp,
    Not,
    Numeral,
    Or,
    Pair,
    Plus,
    PredApp,
    Quote,
    Succ,
    Term,
    Times,
    Var,
    exam_disjunction,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset()):
        self.line = line
        self.col = col
        self.expected = expected
        exp = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{line}:{col}: {message}{exp}")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op><->|->|[~&|(){}\[\],.+*])
  | (?P<meta>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_KEYWORDS = {"forall", "exists", "pair", "quote"}
_EXAM = re.compile(r"T(\d+)$")


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            for i, ch in enumerate(m.group(), start=pos):
                if ch == "\n":
                    line, line_start = line + 1, i + 1
        else:
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, expected: set[str], what: str | None = None):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(what or f"unexpected {found}", t.line, t.col, frozenset(expected))

    def eat(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind == "eof":
            self.fail({text})
        t = self.tok
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    # formulas

    def formula(self) -> Formula:
        left = self.imp()
        while self.at("<->"):
            self.i += 1
            left = Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.i += 1
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.at("|"):
            self.i += 1
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.at("~"):
            self.i += 1
            return Not(self.unary())
        t = self.tok
        if t.kind == "name" and t.text in ("forall", "exists"):
            self.i += 1
            v = self.tok
            if v.kind != "name" or not v.text[0].islower() or v.text in _KEYWORDS:
                self.fail({"variable"})
            self.i += 1
            self.eat(".")
            body = self.formula()
            return (Forall if t.text == "forall" else Exists)(v.text, body)
        return self.primary()

    def primary(self) -> Formula:
        t = self.tok
        if self.at("("):
            self.i += 1
            f = self.formula()
            self.eat(")")
            return f
        if t.kind == "meta":
            self.i += 1
            return MetaF(t.text[1:])
        if t.kind != "name":
            self.fail({"(", "~", "atom", "Bot", "operator", "forall", "exists"})
        name = t.text
        self.i += 1
        if name == "Bot":
            return BOT
        if name == "Psi":
            return Atom("Psi")
        if name[0].islower():
            if name in _KEYWORDS:
                self.i -= 1
                self.fail({"atom"}, f"keyword {name!r} cannot start a formula")
            return Atom(name)
        m = _EXAM.match(name)
        if m and not self.at("(") and not self.at("{") and not self.at("["):
            i = int(m.group(1))
            if i < 1:
                self.i -= 1
                self.fail(set(), "T0 is not defined")
            return exam_disjunction(i)
        if name == "InW":
            self.eat("(")
            a = self.term()
            self.eat(",")
            b = self.term()
            self.eat(")")
            return PredApp("InW", (a, b))
        if self.at("("):
            self.i += 1
            f = self.formula()
            self.eat(")")
            if name == "Dia":
                return Not(ModApp("Box", Not(f)))
            return ModApp(name, f)
        if self.at("{"):
            self.i += 1
            f = self.formula()
            self.eat("}")
            return PredApp(name, (Quote(f),))
        if self.at("["):
            self.i += 1
            args = [self.term()]
            while self.at(","):
                self.i += 1
                args.append(self.term())
            self.eat("]")
            return PredApp(name, tuple(args))
        self.fail({"(", "{", "["})

    # terms

    def term(self) -> Term:
        left = self.product()
        while self.at("+"):
            self.i += 1
            left = Plus(left, self.product())
        return left

    def product(self) -> Term:
        left = self.tatom()
        while self.at("*"):
            self.i += 1
            left = Times(left, self.tatom())
        return left

    def tatom(self) -> Term:
        t = self.tok
        if self.at("("):
            self.i += 1
            r = self.term()
            self.eat(")")
            return r
        if t.kind == "num":
            self.i += 1
            return Numeral(int(t.text))
        if t.kind == "name":
            if t.text == "S" and self.peek().text == "(":
                self.i += 1
                self.eat("(")
                r = self.term()
                self.eat(")")
                return Succ(r)
            if t.text == "pair":
                self.i += 1
                self.eat("(")
                a = self.term()
                self.eat(",")
                b = self.term()
                self.eat(")")
                return Pair(a, b)
            if t.text == "quote":
                self.i += 1
                self.eat("{")
                f = self.formula()
                self.eat("}")
                return Quote(f)
            if t.text[0].islower() and t.text not in _KEYWORDS:
                self.i += 1
                return Var(t.text)
        self.fail({"numeral", "variable", "S(", "pair(", "quote{", "("})


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        p.fail({"end of input"})
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.tok.kind != "eof":
        p.fail({"end of input"})
    return t
