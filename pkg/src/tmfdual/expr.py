"""Expression grammar for relations, differentials and stabilizer inputs.

EBNF::

    relation := expr ( "=" | "->" ) expr
    expr     := [ "+" | "-" ] term { ( "+" | "-" ) term }
    term     := factor { "*" factor }
    factor   := atom [ "^" [ "-" ] INTEGER ]
    atom     := INTEGER | NAME | "(" expr ")"

NAME is an ASCII identifier or one of the unicode aliases in ``ALIASES``.
Parsing yields a ``Poly``: a map from monomials (sorted tuples of
``(name, exponent)``) to integer coefficients.  Negative exponents are only
accepted on single symbols; whether a symbol is invertible is decided by the
consumer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

ALIASES = {
    "η": "eta", "ν": "nu", "μ": "mu", "ε": "eps", "κ": "kappa", "κ̄": "kbar",
    "Δ": "D", "ω": "w", "c₄": "c4", "c₆": "c6", "epsilon": "eps",
    "Delta": "D", "omega": "w", "kappabar": "kbar",
}

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by name
Poly = dict       # dict[Monomial, int]


class ExpressionError(ValueError):
    """Parse failure with a 1-based line/column position."""

    def __init__(self, message: str, text: str, pos: int, line: int = 1):
        self.text = text
        self.pos = pos
        self.line = line
        self.column = pos + 1
        super().__init__(f"line {line}, column {self.column}: {message}\n  {text}\n  {' ' * pos}^")


_TOKEN = re.compile(r"\s*(?:(\d+)|(->|[-+*^=()])|(κ̄|[A-Za-z_][A-Za-z_0-9]*|[ηνμεκΔω]|c₄|c₆))")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "op", "name", "end"
    value: str
    pos: int


def tokenize(text: str, line: int = 1) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExpressionError(f"unexpected character {text[bad]!r}", text, bad, line)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(Token("int", m.group(1), start))
        elif m.group(2):
            out.append(Token("op", m.group(2), start))
        else:
            name = m.group(3)
            out.append(Token("name", ALIASES.get(name, name), start))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


def _mono_mul(x: Monomial, y: Monomial) -> Monomial:
    d = dict(x)
    for name, e in y:
        d[name] = d.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in d.items() if e != 0))


def poly_add(p: Poly, q: Poly, sign: int = 1) -> Poly:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


class _Parser:
    def __init__(self, text: str, line: int, names: set[str] | None):
        self.text = text
        self.line = line
        self.names = names
        self.toks = tokenize(text, line)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ExpressionError(msg, self.text, tok.pos, self.line)

    def expect(self, value: str):
        t = self.peek()
        if t.kind != "op" or t.value != value:
            self.error(f"expected {value!r}")
        self.take()

    def expr(self) -> Poly:
        sign = 1
        t = self.peek()
        if t.kind == "op" and t.value in "+-":
            self.take()
            sign = -1 if t.value == "-" else 1
        acc = poly_add({}, self.term(), sign)
        while True:
            t = self.peek()
            if t.kind == "op" and t.value in ("+", "-"):
                self.take()
                acc = poly_add(acc, self.term(), -1 if t.value == "-" else 1)
            else:
                return acc

    def term(self) -> Poly:
        acc = self.factor()
        while self.peek().kind == "op" and self.peek().value == "*":
            self.take()
            acc = poly_mul(acc, self.factor())
        return acc

    def factor(self) -> Poly:
        start = self.peek()
        base = self.atom()
        if self.peek().kind == "op" and self.peek().value == "^":
            self.take()
            neg = False
            if self.peek().kind == "op" and self.peek().value == "-":
                self.take()
                neg = True
            t = self.peek()
            if t.kind != "int":
                self.error("expected integer exponent")
            self.take()
            e = int(t.value)
            if neg:
                if len(base) != 1 or next(iter(base.values())) != 1 or len(next(iter(base))) != 1:
                    self.error("negative exponent only allowed on a single symbol", start)
                ((name, _),) = next(iter(base))
                return {((name, -e),): 1} if e else {(): 1}
            out: Poly = {(): 1}
            for _ in range(e):
                out = poly_mul(out, base)
            return out
        return base

    def atom(self) -> Poly:
        t = self.peek()
        if t.kind == "int":
            self.take()
            n = int(t.value)
            return {(): n} if n else {}
        if t.kind == "name":
            if self.names is not None and t.value not in self.names:
                self.error(f"unknown symbol {t.value!r}")
            self.take()
            return {((t.value, 1),): 1}
        if t.kind == "op" and t.value == "(":
            self.take()
            inner = self.expr()
            self.expect(")")
            return inner
        self.error("expected a number, symbol or '('")


def parse_expr(text: str, names: set[str] | None = None, line: int = 1) -> Poly:
    p = _Parser(text, line, names)
    out = p.expr()
    if p.peek().kind != "end":
        p.error("unexpected trailing input")
    return out


def parse_relation(text: str, names: set[str] | None = None, line: int = 1) -> tuple[Poly, Poly]:
    p = _Parser(text, line, names)
    lhs = p.expr()
    t = p.peek()
    if t.kind != "op" or t.value not in ("=", "->"):
        p.error("expected '=' or '->'")
    p.take()
    rhs = p.expr()
    if p.peek().kind != "end":
        p.error("unexpected trailing input")
    return lhs, rhs


def format_monomial(m: Monomial, order: list[str] | None = None) -> str:
    if not m:
        return "1"
    items = list(m)
    if order is not None:
        rank = {n: i for i, n in enumerate(order)}
        items.sort(key=lambda ne: rank.get(ne[0], len(rank)))
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in items)
