"""Text front-end for bracket expressions.

Grammar (whitespace is insignificant)::

    expr    := ['-'] term (('+' | '-') term)*
    term    := [scalar] bracket+          juxtaposition = composition
    bracket := '[' label ',' label ']'
    label   := [number] ident ('+' ident)*
    scalar  := number | number 'i' | 'i' | fraction forms | '(' complex ')'

``[kA,kB]`` is folded into ``k[A,B]`` while parsing.  Composition is only
attempted by :meth:`Expr.evaluate`, so ``[A,B][C,D]`` parses fine and fails
later with :class:`~duronlab.process.UndefinedComposition`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache, reduce

from duronlab.exact import GaussRat, format_scalar, parse_scalar
from duronlab.process import ProcessBracket, ProcessElement, compose


class ParseError(SyntaxError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


_NUM = r"\d+(?:\.\d+)?"
_TOKEN = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<scalar>\([^()]*\)|{_NUM}(?:/\d+)?i(?:/\d+)?|{_NUM}(?:/\d+)?|i(?:/\d+)?(?![A-Za-z0-9_]))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[\[\],+\-])
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


@dataclass(frozen=True)
class Term:
    scalar: GaussRat
    brackets: tuple

    def evaluate(self) -> ProcessBracket:
        b = reduce(compose, self.brackets)
        return b * self.scalar


@dataclass(frozen=True)
class Expr:
    terms: tuple

    def evaluate(self) -> ProcessElement:
        return ProcessElement(tuple(t.evaluate() for t in self.terms))

    def pretty(self) -> str:
        return pretty(self)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None, kind=None):
        tok = self.toks[self.i]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = repr(value) if value is not None else kind
            got = repr(tok[1]) if tok[0] != "end" else "end of input"
            raise ParseError(f"expected {want}, got {got}", tok[2], self.text)
        self.i += 1
        return tok

    def expr(self) -> Expr:
        sign = 1
        if self.peek()[1] == "-":
            self.take("-")
            sign = -1
        terms = [self.term(sign)]
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            terms.append(self.term(-1 if op == "-" else 1))
        self.take(kind="end")
        return Expr(tuple(terms))

    def term(self, sign: int) -> Term:
        k = GaussRat(sign)
        if self.peek()[0] == "scalar":
            k = k * _scalar(self.take()[1])
        brackets = [self.bracket()]
        while self.peek()[1] == "[":
            brackets.append(self.bracket())
        # rule (1): move inner strengths onto the term scalar
        for b in brackets:
            k = k * b.strength
        return Term(k, tuple(ProcessBracket(b.left, b.right) for b in brackets))

    def bracket(self) -> ProcessBracket:
        self.take("[")
        kl, left = self.label()
        self.take(",")
        kr, right = self.label()
        self.take("]")
        return ProcessBracket.scaled(kl, left, kr, right)

    def label(self):
        k = GaussRat(1)
        if self.peek()[0] == "scalar" and self.toks[self.i + 1][0] == "ident":
            k = _scalar(self.take()[1])
        names = [self.ident()]
        while self.peek()[1] == "+":
            self.take("+")
            names.append(self.ident())
        return k, "+".join(names)

    def ident(self) -> str:
        # a lone ``i`` is lexed as the imaginary unit; inside brackets it is a label
        if self.peek()[0] == "scalar" and self.peek()[1] == "i":
            return self.take()[1]
        return self.take(kind="ident")[1]


@lru_cache(maxsize=4096)
def _scalar(text: str) -> GaussRat:
    return parse_scalar(text)


def parse(text: str) -> Expr:
    """Parse a bracket expression into an unevaluated :class:`Expr`."""
    return _Parser(text).expr()


def evaluate(text: str) -> ProcessElement:
    return parse(text).evaluate().normalized()


def pretty(expr: Expr) -> str:
    out = []
    for n, t in enumerate(expr.terms):
        k = t.scalar
        neg = format_scalar(k).startswith("-")
        mag = -k if neg else k
        coef = "" if mag == 1 else format_scalar(mag)
        body = coef + "".join(f"[{b.left},{b.right}]" for b in t.brackets)
        if n == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
