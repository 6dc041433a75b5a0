"""Tokenizer and recursive-descent parser for the weight language.

    weight   = "piecewise" "{" piece { ";" piece } "}" | expr ;
    piece    = interval ":" expr ;
    interval = ("(" | "[") bound "," bound (")" | "]") ;
    bound    = rational | "inf" | "-inf" ;
    expr     = term { ("+"|"-") term } ;
    term     = factor { ("*"|"/") factor } ;
    factor   = base [ "^" rational ] ;
    base     = "n" | "|n|" | rational | "exp(" expr ")" | "log(" expr ")"
             | "max(" expr "," expr ")" | "min(" expr "," expr ")" | "(" expr ")" ;

Unary minus in front of a factor is accepted as an extension.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import NamedTuple

from ..core import SlalgError
from .expr import Abs, BinOp, Const, Func, Neg, Node, Pow, Var
from .interval import Interval


class ParseError(SlalgError, ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class Token(NamedTuple):
    kind: str
    value: str
    pos: int


_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<word>[A-Za-z_]+)|(?P<sym>[{}();:\[\],+\-*/^|]))"
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str):
        raise ParseError(message, self.tok.pos, self.text)

    def accept(self, value: str) -> bool:
        if self.tok.value == value and self.tok.kind != "end":
            self.i += 1
            return True
        return False

    def expect(self, value: str):
        if not self.accept(value):
            found = self.tok.value or "end of input"
            self.error(f"expected {value!r}, found {found!r}")

    def parse_weight(self) -> list[tuple[Interval | None, Node]]:
        if self.tok.kind == "word" and self.tok.value == "piecewise":
            self.i += 1
            self.expect("{")
            pieces = [self.parse_piece()]
            while self.accept(";"):
                if self.tok.value == "}":
                    break
                pieces.append(self.parse_piece())
            self.expect("}")
        else:
            pieces = [(None, self.parse_expr())]
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.value!r}")
        return pieces

    def parse_piece(self):
        interval = self.parse_interval()
        self.expect(":")
        return interval, self.parse_expr()

    def parse_interval(self) -> Interval:
        start = self.tok.pos
        if self.accept("("):
            lo_closed = False
        elif self.accept("["):
            lo_closed = True
        else:
            self.error("expected '(' or '[' to open an interval")
        lo = self.parse_bound()
        self.expect(",")
        hi = self.parse_bound()
        if self.accept(")"):
            hi_closed = False
        elif self.accept("]"):
            hi_closed = True
        else:
            self.error("expected ')' or ']' to close an interval")
        if lo == "inf" or hi == "-inf":
            raise ParseError("interval bounds are reversed", start, self.text)
        lo = None if lo == "-inf" else lo
        hi = None if hi == "inf" else hi
        if (lo is None and lo_closed) or (hi is None and hi_closed):
            raise ParseError("an infinite bound must be open", start, self.text)
        interval = Interval(lo, hi, lo_closed, hi_closed)
        if interval.is_empty:
            raise ParseError(f"empty interval {interval}", start, self.text)
        return interval

    def parse_bound(self):
        negative = self.accept("-")
        if not negative:
            self.accept("+")
        if self.tok.kind == "word" and self.tok.value == "inf":
            self.i += 1
            return "-inf" if negative else "inf"
        value = self.parse_rational()
        return -value if negative else value

    def parse_rational(self) -> Fraction:
        if self.tok.kind != "int":
            self.error("expected a number")
        num = int(self.tok.value)
        self.i += 1
        if self.tok.value == "/" and self.tokens[self.i + 1].kind == "int":
            self.i += 1
            den = int(self.tok.value)
            if den == 0:
                self.error("zero denominator")
            self.i += 1
            return Fraction(num, den)
        return Fraction(num)

    def parse_signed_rational(self) -> Fraction:
        if self.accept("("):
            value = self.parse_signed_rational()
            self.expect(")")
            return value
        negative = self.accept("-")
        value = self.parse_rational()
        return -value if negative else value

    def parse_expr(self) -> Node:
        node = self.parse_term()
        while self.tok.value in ("+", "-") and self.tok.kind == "sym":
            op = self.tok.value
            self.i += 1
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> Node:
        node = self.parse_factor()
        while self.tok.value in ("*", "/") and self.tok.kind == "sym":
            op = self.tok.value
            self.i += 1
            node = BinOp(op, node, self.parse_factor())
        return node

    def parse_factor(self) -> Node:
        if self.accept("-"):
            return Neg(self.parse_factor())
        base = self.parse_base()
        if self.accept("^"):
            return Pow(base, self.parse_signed_rational())
        return base

    def parse_base(self) -> Node:
        tok = self.tok
        if tok.kind == "int":
            # a literal p/q binds tighter than division only inside exponents
            self.i += 1
            return Const(Fraction(int(tok.value)))
        if tok.kind == "word":
            if tok.value == "n":
                self.i += 1
                return Var()
            if tok.value in ("exp", "log"):
                self.i += 1
                self.expect("(")
                arg = self.parse_expr()
                self.expect(")")
                return Func(tok.value, arg)
            if tok.value in ("max", "min"):
                self.i += 1
                self.expect("(")
                a = self.parse_expr()
                self.expect(",")
                b = self.parse_expr()
                self.expect(")")
                return BinOp(tok.value, a, b)
            self.error(f"unknown name {tok.value!r}")
        if self.accept("|"):
            if not (self.tok.kind == "word" and self.tok.value == "n"):
                self.error("only |n| is allowed between bars")
            self.i += 1
            self.expect("|")
            return Abs(Var())
        if self.accept("("):
            node = self.parse_expr()
            self.expect(")")
            return node
        self.error(f"unexpected {tok.value or 'end of input'!r}")


def parse_pieces(text: str) -> list[tuple[Interval | None, Node]]:
    return Parser(text).parse_weight()


def parse_expr(text: str) -> Node:
    p = Parser(text)
    node = p.parse_expr()
    if p.tok.kind != "end":
        p.error(f"unexpected {p.tok.value!r}")
    return node
