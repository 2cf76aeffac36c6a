"""Lexer and Pratt parser for the expression language.

Binding powers, loosest first: ``+ -``, then ``* /``, then unary minus, then
``^``.  The right operand of ``^`` is always a rational literal, read
greedily with an optional sign and denominator, so ``x^-1/2`` is
``x^(-1/2)``, matching how monomials are printed.
"""

import re
from dataclasses import dataclass, field
from typing import Optional

from ..errors import DSLSyntaxError
from ..rationals import as_rational, fmt

MAX_DEPTH = 200

CALLS = {
    "terms": (2, 2),
    "D": (1, 2),
    "logof": (1, 1),
    "expof": (1, 1),
    "rlog": (1, 1),
    "complog": (2, 2),
    "subst": (2, 2),
    "pow": (2, 2),
    "taylor": (3, 4),
    "trunc": (2, 2),
    "ord": (1, 1),
    "cmp": (2, 2),
    "geom": (1, 1),
    "almost_regular": (1, 2),
    "germ": (1, 1),
}

KEYWORDS = {"let", "x", "exp", "log"}


# -- AST -----------------------------------------------------------------------------
# positions are excluded from equality so that parse(unparse(a)) == a


@dataclass(frozen=True)
class Node:
    pos: tuple = field(default=(1, 1), compare=False, repr=False)


@dataclass(frozen=True)
class Num(Node):
    value: int = 0


@dataclass(frozen=True)
class Name(Node):
    id: str = ""


@dataclass(frozen=True)
class Atom(Node):
    """A monomial generator: level -1 (exp), 0 (x) or k >= 1 (log[k])."""

    level: int = 0


@dataclass(frozen=True)
class ScalarLit(Node):
    """``exp(arg)`` or ``log(arg)`` applied to a constant."""

    fn: str = "exp"
    arg: Optional[Node] = None


@dataclass(frozen=True)
class Neg(Node):
    operand: Optional[Node] = None


@dataclass(frozen=True)
class BinOp(Node):
    op: str = "+"
    left: Optional[Node] = None
    right: Optional[Node] = None


@dataclass(frozen=True)
class Pow(Node):
    base: Optional[Node] = None
    exponent: object = 1


@dataclass(frozen=True)
class Call(Node):
    fn: str = ""
    args: tuple = ()


@dataclass(frozen=True)
class ListLit(Node):
    items: tuple = ()


@dataclass(frozen=True)
class Let(Node):
    name: str = ""
    expr: Optional[Node] = None


# -- lexer ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<int>[0-9]+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),;=\[\]])
""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text):
    out = []
    line, line_start = 1, 0
    i = 0
    n = len(text)
    while i < n:
        m = _TOKEN.match(text, i)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {text[i]!r}", line, i - line_start + 1)
        kind = m.lastgroup
        col = i - line_start + 1
        if kind == "nl":
            out.append(Token("sep", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind == "op":
            out.append(Token("sep" if m.group() == ";" else "op", m.group(), line, col))
        elif kind in ("int", "name"):
            out.append(Token(kind, m.group(), line, col))
        i = m.end()
    out.append(Token("eof", "", line, n - line_start + 1))
    return out


# -- parser ----------------------------------------------------------------------------

_INFIX = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_UNARY_BP = 30


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0
        self.depth = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return DSLSyntaxError(msg, tok.line, tok.col)

    def advance(self):
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text):
        t = self.tok
        return t.kind == "op" and t.text == text

    def expect(self, text):
        if not self.at(text):
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        return self.advance()

    # statements

    def program(self):
        stmts = []
        while True:
            while self.tok.kind == "sep":
                self.advance()
            if self.tok.kind == "eof":
                return stmts
            stmts.append(self.statement())
            if self.tok.kind not in ("sep", "eof"):
                raise self.error(f"unexpected {self.tok.text!r} after statement")

    def statement(self):
        t = self.tok
        if t.kind == "name" and t.text == "let":
            self.advance()
            name = self.tok
            if name.kind != "name" or name.text in KEYWORDS or name.text in CALLS:
                raise self.error("expected a name to bind")
            self.advance()
            self.expect("=")
            return Let((t.line, t.col), name.text, self.expr(0))
        return self.expr(0)

    # expressions

    def expr(self, rbp):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.error("expression nested too deeply")
        try:
            left = self.prefix()
            while True:
                t = self.tok
                if t.kind != "op" or t.text not in _INFIX:
                    break
                bp = _INFIX[t.text]
                if bp <= rbp:
                    break
                self.advance()
                if t.text == "^":
                    left = Pow((t.line, t.col), left, self.exponent())
                else:
                    left = BinOp((t.line, t.col), t.text, left, self.expr(bp))
            return left
        finally:
            self.depth -= 1

    def exponent(self):
        paren = self.at("(")
        if paren:
            self.advance()
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        elif self.at("+"):
            self.advance()
        num = self.tok
        if num.kind != "int":
            raise self.error("exponent must be a rational literal")
        self.advance()
        value = as_rational(int(num.text)) * sign
        if self.at("/") and self.toks[self.i + 1].kind == "int":
            self.advance()
            den = int(self.advance().text)
            if den == 0:
                raise self.error("zero denominator in exponent")
            value = value / den
        if paren:
            self.expect(")")
        return value

    def args(self):
        self.expect("(")
        items = []
        if not self.at(")"):
            items.append(self.expr(0))
            while self.at(","):
                self.advance()
                items.append(self.expr(0))
        self.expect(")")
        return tuple(items)

    def prefix(self):
        t = self.tok
        pos = (t.line, t.col)
        if t.kind == "int":
            self.advance()
            return Num(pos, int(t.text))
        if t.kind == "op":
            if t.text == "-":
                self.advance()
                return Neg(pos, self.expr(_UNARY_BP))
            if t.text == "(":
                self.advance()
                inner = self.expr(0)
                self.expect(")")
                return inner
            if t.text == "[":
                self.advance()
                items = []
                if not self.at("]"):
                    items.append(self.expr(0))
                    while self.at(","):
                        self.advance()
                        items.append(self.expr(0))
                self.expect("]")
                return ListLit(pos, tuple(items))
            raise self.error(f"unexpected {t.text!r}")
        if t.kind == "name":
            self.advance()
            name = t.text
            if name == "x":
                return Atom(pos, 0)
            if name in ("exp", "log"):
                if self.at("("):
                    args = self.args()
                    if len(args) != 1:
                        raise self.error(f"{name}(...) takes one argument", t)
                    return ScalarLit(pos, name, args[0])
                if name == "exp":
                    return Atom(pos, -1)
                if self.at("["):
                    self.advance()
                    k = self.tok
                    if k.kind != "int" or int(k.text) < 1:
                        raise self.error("log[k] needs an integer k >= 1")
                    self.advance()
                    self.expect("]")
                    return Atom(pos, int(k.text))
                return Atom(pos, 1)
            if name == "let":
                raise self.error("'let' is only allowed at the start of a statement", t)
            if name in CALLS and self.at("("):
                args = self.args()
                lo, hi = CALLS[name]
                if not lo <= len(args) <= hi:
                    want = str(lo) if lo == hi else f"{lo}-{hi}"
                    raise self.error(f"{name} takes {want} arguments, got {len(args)}", t)
                return Call(pos, name, args)
            return Name(pos, name)
        raise self.error("unexpected end of input" if t.kind == "eof" else f"unexpected {t.text!r}")


def parse_program(text):
    """Parse a sequence of statements separated by newlines or ``;``."""
    return _Parser(text).program()


def parse(text):
    """Parse a single expression (or let statement)."""
    stmts = parse_program(text)
    if len(stmts) != 1:
        raise DSLSyntaxError(f"expected one statement, found {len(stmts)}", 1, 1)
    return stmts[0]


# -- unparse -------------------------------------------------------------------------------


def _prec(node):
    if isinstance(node, BinOp):
        return _INFIX[node.op]
    if isinstance(node, Neg):
        return _UNARY_BP
    if isinstance(node, Pow):
        return 40
    return 100


def unparse(node):
    """Text that parses back to an equal AST."""
    if isinstance(node, Let):
        return f"let {node.name} = {unparse(node.expr)}"
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Name):
        return node.id
    if isinstance(node, Atom):
        return {-1: "exp", 0: "x", 1: "log"}.get(node.level, f"log[{node.level}]")
    if isinstance(node, ScalarLit):
        return f"{node.fn}({unparse(node.arg)})"
    if isinstance(node, Neg):
        inner = unparse(node.operand)
        if _prec(node.operand) < _UNARY_BP:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Pow):
        base = unparse(node.base)
        if _prec(node.base) <= 40:
            base = f"({base})"
        # parenthesised so that a following "/ n" is not read as a denominator
        return f"{base}^({fmt(node.exponent)})"
    if isinstance(node, BinOp):
        p = _INFIX[node.op]
        left = unparse(node.left)
        if _prec(node.left) < p:
            left = f"({left})"
        right = unparse(node.right)
        # left-associative: an equal-precedence right operand needs parentheses
        if _prec(node.right) <= p:
            right = f"({right})"
        return f"{left} {node.op} {right}"
    if isinstance(node, Call):
        return f"{node.fn}({', '.join(unparse(a) for a in node.args)})"
    if isinstance(node, ListLit):
        return "[" + ", ".join(unparse(a) for a in node.items) + "]"
    raise TypeError(f"not an AST node: {node!r}")
