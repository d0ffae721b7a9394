"""Recursive-descent parser for the expression text format.

Grammar (whitespace insignificant)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*' factor) | ('/' rational))*
    factor := atom ('^' ['-'] int)?
    atom   := rational | 'i' | ident | deriv | '(' expr ')'
    deriv  := ident '^(' int (',' int)* ')' | ident "'"+

The canonical printer in :mod:`superint.symcore` emits this format.
"""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .symcore import DPoly, GaussRat, Symbol, base, function_deps, hbar_symbol, jet, param

_PARAM_PATTERNS = [
    r"A_\d+_\d+_\d+", r"[abcekrst]\d+", r"[abc]", r"sigma", r"Lambda", r"lambda", r"cgamma", r"sgamma",
    r"(?:[abc]\d*|sigma|Lambda)_y", r"z0", r"omega\d", r"alpha", r"beta", r"gamma", r"delta", r"mu", r"nu", r"kappa", r"u",
]
_PARAM_RE = re.compile("|".join(f"(?:{p})" for p in _PARAM_PATTERNS) + r"\Z")
_KNOWN = ["x", "y", "z", "hbar", "V1", "V2", "F", "U", "P1", "F1", "F2", "U1", "U2",
          "sigma", "Lambda", "lambda", "cgamma", "sgamma", "z0", "a0", "b0", "c1", "f_0_2", "A_0_3_0"]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, suggestions: Optional[List[str]] = None):
        self.line = line
        self.column = column
        self.suggestions = suggestions or []
        text = f"{message} at line {line}, column {column}"
        if self.suggestions:
            text += f" (did you mean: {', '.join(self.suggestions)})"
        super().__init__(text)


@dataclass
class Token:
    kind: str  # num, ident, op, end
    text: str
    col: int


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def tokenize(text: str, line: int = 1) -> List[Token]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].isspace():
            break
        m = _TOKEN_RE.match(text, pos)
        if m.group(1) is not None:
            out.append(Token("num", m.group(1), m.start(1) + 1))
        elif m.group(2) is not None:
            out.append(Token("ident", m.group(2), m.start(2) + 1))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()',":
                raise ParseError(f"unexpected character {ch!r}", line, m.start(3) + 1)
            out.append(Token("op", ch, m.start(3) + 1))
        pos = m.end()
    out.append(Token("end", "", n + 1))
    return out


def classify_identifier(name: str) -> Optional[Symbol]:
    """Symbol for a non-derivative identifier, or None if unknown."""
    if name in ("x", "y", "z"):
        return base(name)
    if name == "hbar":
        return hbar_symbol()
    if function_deps(name) is not None:
        return jet(name)
    if _PARAM_RE.match(name):
        return param(name)
    return None


class _Parser:
    def __init__(self, text: str, line: int):
        self.toks = tokenize(text, line)
        self.i = 0
        self.line = line

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Token] = None, suggestions=None):
        tok = tok or self.tok
        raise ParseError(msg, self.line, tok.col, suggestions)

    def accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str):
        if not self.accept(op):
            what = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            self.error(f"expected {op!r}, found {what}")

    def int_(self) -> int:
        neg = self.accept("-")
        if self.tok.kind != "num":
            self.error("expected integer")
        v = int(self.tok.text)
        self.i += 1
        return -v if neg else v

    def parse(self) -> DPoly:
        if self.tok.kind == "end":
            self.error("empty expression")
        e = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")
        return e

    def expr(self) -> DPoly:
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        acc = self.term().scale(sign)
        while True:
            if self.accept("+"):
                acc = acc + self.term()
            elif self.accept("-"):
                acc = acc - self.term()
            else:
                return acc

    def term(self) -> DPoly:
        acc = self.factor()
        while True:
            if self.accept("*"):
                acc = acc * self.factor()
            elif self.accept("/"):
                if self.tok.kind != "num":
                    self.error("division only by rational constants")
                acc = acc.scale(Fraction(1) / self.rational())
            else:
                return acc

    def rational(self) -> Fraction:
        v = Fraction(int(self.tok.text))
        self.i += 1
        return v

    def factor(self) -> DPoly:
        a = self.atom()
        if self.accept("^"):
            e = self.int_()
            if e < 0 and len(a.terms) != 1:
                self.error("negative power of a non-monomial")
            a = a ** e
        return a

    def atom(self) -> DPoly:
        t = self.tok
        if t.kind == "num":
            v = self.rational()
            if self.tok.kind == "op" and self.tok.text == "/" and self.toks[self.i + 1].kind == "num":
                self.i += 1
                den = self.rational()
                if den == 0:
                    self.error("zero denominator", t)
                v = v / den
            return DPoly.constant(v)
        if t.kind == "op" and t.text == "(":
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.i += 1
            if t.text == "i":
                return DPoly.constant(GaussRat(0, 1))
            return self.ident(t)
        if t.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected {t.text!r}")

    def ident(self, t: Token) -> DPoly:
        name = t.text
        deps = function_deps(name)
        if deps is not None:
            index = [0] * len(deps)
            if (self.tok.kind == "op" and self.tok.text == "^" and self.toks[self.i + 1].kind == "op"
                    and self.toks[self.i + 1].text == "("):
                self.i += 2
                idx = [self.int_()]
                while self.accept(","):
                    idx.append(self.int_())
                self.expect(")")
                if len(idx) != len(deps):
                    self.error(f"{name} takes a {len(deps)}-component derivative index", t)
                index = idx
            else:
                primes = 0
                while self.accept("'"):
                    primes += 1
                if primes:
                    if len(deps) != 1:
                        self.error(f"primes are ambiguous for {name}", t)
                    index = [primes]
            return DPoly.from_symbol(jet(name, tuple(index), deps))
        s = classify_identifier(name)
        if s is None:
            sugg = difflib.get_close_matches(name, _KNOWN, n=3)
            self.error(f"unknown identifier {name!r}", t, sugg)
        return DPoly.from_symbol(s)


def parse_expression(text: str, line: int = 1) -> DPoly:
    """Parse ``text`` into a DPoly; raises :class:`ParseError` with position."""
    return _Parser(text, line).parse()
