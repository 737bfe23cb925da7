"""A tiny arithmetic expression language in one variable.

Grammar (loosest binding first)::

    expr   := expr ('+' | '-') expr
            | expr ('*' | '/') expr
            | '-' expr
            | expr '^' expr          (right associative)
            | NUMBER | VAR | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'

Expressions evaluate to :class:`~minkcurve.jets.Jet` objects, which gives
exact derivatives to any requested order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import jets
from .errors import DomainError, ParseError, UnknownFunction

FUNCTIONS = {
    "sin": jets.sin,
    "cos": jets.cos,
    "sinh": jets.sinh,
    "cosh": jets.cosh,
    "tanh": jets.tanh,
    "exp": jets.exp,
    "log": jets.log,
    "sqrt": jets.sqrt,
    "abs": jets.abs_,
}
CONSTANTS = {"pi": math.pi, "e": math.e}

DEFAULT_ORDER = 6

# binding powers
ADD, MUL, NEG, POW, ATOM = 10, 20, 30, 40, 100


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str = "s"


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Const, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'num', 'name', 'op', 'end'
    text: str
    offset: int


def tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(pos, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, variable: str):
        self.toks = tokenize(text)
        self.i = 0
        self.variable = variable

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        tok = self.next()
        if tok.text != text:
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(tok.offset, f"expected {text!r}, found {found}")

    def parse(self) -> Expr:
        e = self.expr(0)
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(tok.offset, f"unexpected {tok.text!r}")
        return e

    def expr(self, rbp: int) -> Expr:
        left = self.prefix(self.next())
        while True:
            tok = self.peek()
            lbp = _infix_bp(tok)
            if lbp <= rbp:
                return left
            self.next()
            if tok.text == "^":
                right = self.expr(POW - 1)
            else:
                right = self.expr(lbp)
            left = BinOp(tok.text, left, right)

    def prefix(self, tok: _Tok) -> Expr:
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "name":
            if tok.text == self.variable:
                return Var(tok.text)
            if tok.text in CONSTANTS:
                return Const(tok.text)
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr(0)
                self.expect(")")
                return Call(tok.text, arg)
            raise UnknownFunction(tok.offset, f"unknown identifier {tok.text!r}")
        if tok.text == "(":
            e = self.expr(0)
            self.expect(")")
            return e
        if tok.text == "-":
            return Neg(self.expr(NEG))
        if tok.kind == "end":
            raise ParseError(tok.offset, "unexpected end of input")
        raise ParseError(tok.offset, f"unexpected {tok.text!r}")


def _infix_bp(tok: _Tok) -> int:
    if tok.kind != "op":
        return 0
    return {"+": ADD, "-": ADD, "*": MUL, "/": MUL, "^": POW}.get(tok.text, 0)


def parse(text: str, variable: str = "s") -> Expr:
    """Parse ``text`` into an AST.  Raises :class:`ParseError` with a byte offset."""
    return _Parser(text, variable).parse()


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return {"+": ADD, "-": ADD, "*": MUL, "/": MUL, "^": POW}[e.op]
    if isinstance(e, Neg):
        return NEG
    return ATOM


def to_string(e: Expr) -> str:
    """Print with the minimum parentheses needed for ``parse`` to rebuild ``e``."""
    if isinstance(e, Num):
        if not math.isfinite(e.value) or e.value < 0:
            raise ValueError(f"literal {e.value!r} has no source form")
        return repr(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    if isinstance(e, Neg):
        inner = to_string(e.operand)
        return "-" + (f"({inner})" if _prec(e.operand) < NEG else inner)
    p = _prec(e)
    left, right = to_string(e.left), to_string(e.right)
    right_assoc = e.op == "^"
    lp, rp = _prec(e.left), _prec(e.right)
    if lp < p or (lp == p and right_assoc):
        left = f"({left})"
    if rp < p or (rp == p and not right_assoc):
        right = f"({right})"
    sep = "^" if right_assoc else f" {e.op} "
    return f"{left}{sep}{right}"


def depends_on_variable(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, (Num, Const)):
        return False
    if isinstance(e, Neg):
        return depends_on_variable(e.operand)
    if isinstance(e, Call):
        return depends_on_variable(e.arg)
    return depends_on_variable(e.left) or depends_on_variable(e.right)


def _eval(e: Expr, x: jets.Jet) -> jets.Jet:
    if isinstance(e, Var):
        return x
    if isinstance(e, Num):
        return jets.Jet.constant(e.value, x.order, x.shape)
    if isinstance(e, Const):
        return jets.Jet.constant(CONSTANTS[e.name], x.order, x.shape)
    if isinstance(e, Neg):
        return -_eval(e.operand, x)
    if isinstance(e, Call):
        return FUNCTIONS[e.func](_eval(e.arg, x))
    a = _eval(e.left, x)
    if e.op == "^" and not depends_on_variable(e.right):
        p = float(_eval(e.right, jets.Jet.constant(0.0, 0)).value)
        if p.is_integer():
            return jets.ipow(a, int(p))
        return jets.rpow(a, p)
    b = _eval(e.right, x)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        return a / b
    return jets.exp(b * jets.log(a))


def eval_jet(e: Expr | str, s, order: int = DEFAULT_ORDER, variable: str = "s") -> jets.Jet:
    """Jet of ``e`` at ``s`` (scalar or array) up to derivative ``order``."""
    if order < 0:
        raise ValueError("order must be non-negative")
    if isinstance(e, str):
        e = parse(e, variable)
    s_arr = np.asarray(s, dtype=float)
    try:
        out = _eval(e, jets.Jet.variable(s_arr, order))
    except DomainError as exc:
        raise type(exc)(f"{exc} while evaluating {to_string(e)!r} at s={_locate(s_arr, str(exc))}") from None
    if not np.all(np.isfinite(out.c)):
        raise DomainError(f"non-finite value evaluating {to_string(e)!r}")
    return out


def _locate(s: np.ndarray, message: str):
    m = re.search(r"batch index \(([\d, ]+)\)", message)
    if s.ndim == 0:
        return float(s)
    if m:
        idx = tuple(int(v) for v in m.group(1).split(",") if v.strip())
        try:
            return float(s[idx[-s.ndim:]])
        except IndexError:
            pass
    return "<array>"


def evaluate(e: Expr | str, s, variable: str = "s") -> np.ndarray:
    return eval_jet(e, s, 0, variable).value
