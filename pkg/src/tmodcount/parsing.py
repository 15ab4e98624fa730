"""A small arithmetic-expression reader shared by every text format.

The grammar is the usual one (``+ - * / ^``, parentheses, integer literals,
names, function calls and bracketed row lists).  Parsing evaluates directly
through caller-supplied callbacks, so the same reader builds twisted
polynomials, multivariate polynomials and local-field elements.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Callable

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^(),\[\];]))")


@dataclass
class Token:
    kind: str  # 'num', 'name', 'op', 'end'
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, col0: int = 1, source: str | None = None) -> list[Token]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos, source)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(Token("num", m.group(1), line, col0 + start))
        elif m.group(2):
            toks.append(Token("name", m.group(2), line, col0 + start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            toks.append(Token("op", op, line, col0 + start))
        pos = m.end()
    toks.append(Token("end", "", line, col0 + n))
    return toks


class Evaluator:
    """Recursive-descent evaluation of one expression.

    number(k) -> value for an integer literal; name(s) -> value for a bare
    name; call(s, args) for ``s(args)``; rows(list of lists) for ``[[..],..]``.
    """

    def __init__(
        self,
        number: Callable[[int], Any],
        name: Callable[[str], Any],
        call: Callable[[str, list], Any] | None = None,
        rows: Callable[[list], Any] | None = None,
        source: str | None = None,
    ):
        self.number = number
        self.name = name
        self.call = call
        self.rows = rows
        self.source = source

    def parse(self, text: str, line: int = 1, col: int = 1):
        self.toks = tokenize(text, line, col, self.source)
        self.i = 0
        value = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            self.fail(f"unexpected {tok.text!r}", tok)
        return value

    # helpers
    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op: str) -> Token:
        tok = self.take()
        if tok.kind != "op" or tok.text != op:
            self.fail(f"expected {op!r}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def fail(self, msg, tok):
        raise ParseError(msg, tok.line, tok.col, self.source)

    def _guard(self, fn, tok, *args):
        try:
            return fn(*args)
        except ParseError:
            raise
        except (ValueError, TypeError, ZeroDivisionError, KeyError, ArithmeticError) as exc:
            self.fail(str(exc) or type(exc).__name__, tok)

    # grammar
    def expr(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.take()
            value = self.term()
            if tok.text == "-":
                value = self._guard(lambda v: -v, tok, value)
        else:
            value = self.term()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.take()
                rhs = self.term()
                if tok.text == "+":
                    value = self._guard(lambda a, b: a + b, tok, value, rhs)
                else:
                    value = self._guard(lambda a, b: a - b, tok, value, rhs)
            else:
                return value

    def term(self):
        value = self.unary()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.take()
                rhs = self.unary()
                if tok.text == "*":
                    value = self._guard(lambda a, b: a * b, tok, value, rhs)
                else:
                    value = self._guard(lambda a, b: a / b, tok, value, rhs)
            else:
                return value

    def unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.take()
            value = self.unary()
            return self._guard(lambda v: -v, tok, value)
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.take()
            sign = 1
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "-":
                self.take()
                sign = -1
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "(":
                self.take()
                sgn2 = 1
                if self.peek().kind == "op" and self.peek().text == "-":
                    self.take()
                    sgn2 = -1
                num = self.take()
                if num.kind != "num":
                    self.fail("exponent must be an integer", num)
                self.expect(")")
                k = sgn2 * int(num.text)
            else:
                num = self.take()
                if num.kind != "num":
                    self.fail("exponent must be an integer", num)
                k = int(num.text)
            return self._guard(lambda b, e: b**e, tok, base, sign * k)
        return base

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            return self._guard(self.number, tok, int(tok.text))
        if tok.kind == "name":
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "(":
                self.take()
                args = []
                if not (self.peek().kind == "op" and self.peek().text == ")"):
                    args.append(self.expr())
                    while self.peek().kind == "op" and self.peek().text in ",;":
                        self.take()
                        args.append(self.expr())
                self.expect(")")
                if self.call is None:
                    self.fail(f"unknown function {tok.text!r}", tok)
                return self._guard(self.call, tok, tok.text, args)
            return self._guard(self.name, tok, tok.text)
        if tok.kind == "op" and tok.text == "(":
            value = self.expr()
            self.expect(")")
            return value
        if tok.kind == "op" and tok.text == "[":
            if self.rows is None:
                self.fail("matrices are not allowed here", tok)
            return self._guard(self.rows, tok, self.bracket_list())
        self.fail(f"unexpected {tok.text or 'end of input'!r}", tok)

    def bracket_list(self):
        """Parse the inside of '[' ... ']' (the '[' already consumed)."""
        items = []
        while True:
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "[":
                self.take()
                items.append(self.bracket_list())
            else:
                items.append(self.expr())
            tok = self.take()
            if tok.kind == "op" and tok.text == "]":
                return items
            if not (tok.kind == "op" and tok.text == ","):
                self.fail(f"expected ',' or ']', found {tok.text!r}", tok)


def split_top_level(text: str, sep: str = ";") -> list[str]:
    """Split on ``sep`` outside brackets and parentheses."""
    depth, cur, out = 0, [], []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out if s.strip()]
