"""Element expressions: parsing, canonical printing and evaluation in a tower.

Grammar, loosest binding first::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" INT)*
    atom   := RATIONAL | SYMBOL | "(" expr ")"

``RATIONAL`` is ``123`` or ``3/2`` written without spaces (``3 / 2`` is a
division).  Symbols are ``u<i>``, ``v<i>``, ``x<i>_<j>`` and ``y<i>_<j>``
with ``i != j``; pair symbols are stored with the larger index first, so
``x0_1`` and ``x1_0`` are the same symbol.  Printing is fully parenthesized,
and ``parse_expr(print_expr(e)) == e`` for every tree ``e``.
"""

import re
from dataclasses import dataclass

from flint import fmpq

from .errors import ExprSyntaxError, SymbolError


@dataclass(frozen=True)
class Num:
    value: fmpq  # non-negative; negation is a Neg node

    def __hash__(self):
        return hash((self.value.p, self.value.q))


@dataclass(frozen=True)
class Sym:
    name: str  # "u", "v", "x" or "y"
    i: int
    j: int = None


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Div:
    left: object
    right: object


BINARY = {"+": Add, "-": Sub, "*": Mul, "/": Div}
SYMBOL_OF = {cls: op for op, cls in BINARY.items()}

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")
_VERTEX = re.compile(r"([uv])(0|[1-9]\d*)$")
_PAIR = re.compile(r"([xy])(0|[1-9]\d*)_(0|[1-9]\d*)$")


def make_symbol(text):
    m = _VERTEX.match(text)
    if m:
        return Sym(m.group(1), int(m.group(2)))
    m = _PAIR.match(text)
    if m:
        i, j = int(m.group(2)), int(m.group(3))
        if i == j:
            raise SymbolError(f"{text}: a pair symbol needs two distinct vertices")
        return Sym(m.group(1), max(i, j), min(i, j))
    raise SymbolError(f"{text}: expected u<i>, v<i>, x<i>_<j> or y<i>_<j>")


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        kind = "num" if m.group(1) else "name" if m.group(2) else "op"
        tokens.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def take(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def fail(self, what):
        kind, val, off = self.peek()
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"expected {what}, found {found}", off)

    def expr(self):
        out = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            out = BINARY[op](out, self.term())
        return out

    def term(self):
        out = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            out = BINARY[op](out, self.unary())
        return out

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        out = self.atom()
        while self.peek()[:2] == ("op", "^"):
            self.take()
            kind, val, _ = self.peek()
            if kind != "num" or "/" in val:
                self.fail("a non-negative integer exponent")
            self.take()
            out = Pow(out, int(val))
        return out

    def atom(self):
        kind, val, off = self.peek()
        if kind == "num":
            self.take()
            num, _, den = val.partition("/")
            if den and int(den) == 0:
                raise ExprSyntaxError("zero denominator in a rational literal", off)
            return Num(fmpq(int(num), int(den) if den else 1))
        if kind == "name":
            self.take()
            return make_symbol(val)
        if (kind, val) == ("op", "("):
            self.take()
            out = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.fail("')'")
            self.take()
            return out
        self.fail("a number, a symbol or '('")


def parse_expr(text):
    """Expression tree of ``text``; ``ExprSyntaxError`` carries the offending offset."""
    p = _Parser(text)
    out = p.expr()
    if p.peek()[0] != "end":
        p.fail("an operator or end of input")
    return out


def print_expr(e):
    """Canonical, fully parenthesized text of a tree."""
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Sym):
        return f"{e.name}{e.i}" if e.j is None else f"{e.name}{e.i}_{e.j}"
    if isinstance(e, Neg):
        return f"(-{print_expr(e.arg)})"
    if isinstance(e, Pow):
        return f"({print_expr(e.base)}^{e.exp})"
    return f"({print_expr(e.left)} {SYMBOL_OF[type(e)]} {print_expr(e.right)})"


def symbols(e):
    """Set of symbols occurring in a tree."""
    if isinstance(e, Sym):
        return {e}
    if isinstance(e, Num):
        return set()
    if isinstance(e, (Neg, Pow)):
        return symbols(e.arg if isinstance(e, Neg) else e.base)
    return symbols(e.left) | symbols(e.right)


def eval_expr(e, tower):
    """Exact ``TowerElem`` of a tree; raises ``DivisionByZero`` and ``VertexOutOfRange``."""
    return tower.elem(_eval(e, tower, {}))


def _eval(e, T, memo):
    got = memo.get(e)
    if got is not None:
        return got
    if isinstance(e, Num):
        out = e.value
    elif isinstance(e, Sym):
        out = T.gen(e.name, e.i) if e.j is None else T.gen(e.name, e.i, e.j)
        out = out.raw
    elif isinstance(e, Neg):
        out = T.neg(_eval(e.arg, T, memo))
    elif isinstance(e, Pow):
        out = T.power(_eval(e.base, T, memo), e.exp)
    else:
        a, b = _eval(e.left, T, memo), _eval(e.right, T, memo)
        out = {Add: T.add, Sub: T.sub, Mul: T.mul, Div: T.div}[type(e)](a, b)
    memo[e] = out
    return out
