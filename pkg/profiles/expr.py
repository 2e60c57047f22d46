"""
Radial profile expression language.

A small recursive-descent parser for u(r) profiles such as the
Schwarzschild factor "-c*ln(1 + m/(2*r^p))". The only variable is r; named
parameters are allowed when declared at parse time, plus the constant pi.

Grammar (lowest to highest precedence):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?            # right-associative
    atom   := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'

FUNC is one of ln, exp, sin, cos, sqrt. Errors carry the UTF-8 byte offset
of the offending token and the tokens that would have been accepted.

Usage:
    from profiles.expr import parse, print_expr, jet_eval

    e = parse("-(2/3)*ln(1+r^-3)")
    jet_eval(e, 1.0, order=3)    # (u, u', u'', u''')
    print_expr(e)                # canonical text, parse(print_expr(e)) == e
"""

import logging
import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from core.exceptions import ExprDomainError, ExprSyntaxError
from profiles.taylor import TaylorJet

logger = logging.getLogger(__name__)

FUNCTIONS = ('ln', 'exp', 'sin', 'cos', 'sqrt')
CONSTANTS = {'pi': math.pi}
VARIABLE = 'r'

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


# AST nodes

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: 'Expr'


@dataclass(frozen=True)
class BinOp:
    op: str
    left: 'Expr'
    right: 'Expr'


@dataclass(frozen=True)
class Call:
    func: str
    arg: 'Expr'


Expr = Union[Num, Var, Neg, BinOp, Call]


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(text):
    """Split text into tokens with byte offsets; ends with an 'eof' token."""
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        offset = len(text[:pos].encode('utf-8'))
        if match is None:
            raise ExprSyntaxError(
                f"unexpected character {text[pos]!r}", offset,
                expected=('number', 'name', 'operator'),
            )
        kind = match.lastgroup
        if kind != 'ws':
            tokens.append(Token(kind, match.group(), offset))
        pos = match.end()
    tokens.append(Token('eof', '', len(text.encode('utf-8'))))
    return tokens


class _Parser:
    def __init__(self, text, params):
        self.tokens = tokenize(text)
        self.pos = 0
        self.params = frozenset(params)

    @property
    def current(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, expected):
        tok = self.current
        found = 'end of input' if tok.kind == 'eof' else repr(tok.text)
        raise ExprSyntaxError(f"{message}, found {found}", tok.offset, expected)

    def expect_op(self, text):
        if self.current.kind == 'op' and self.current.text == text:
            return self.advance()
        self.fail(f"expected '{text}'", (repr(text),))

    def is_op(self, *ops):
        return self.current.kind == 'op' and self.current.text in ops

    def parse(self):
        node = self.expr()
        if self.current.kind != 'eof':
            self.fail("unexpected token", ("operator", "end of input"))
        return node

    def expr(self):
        node = self.term()
        while self.is_op('+', '-'):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.is_op('*', '/'):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.is_op('-'):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.is_op('^'):
            self.advance()
            return BinOp('^', base, self.unary())
        return base

    def atom(self):
        tok = self.current
        if tok.kind == 'number':
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ExprSyntaxError("number out of range", tok.offset, ('number',))
            return Num(value)
        if tok.kind == 'name':
            self.advance()
            if tok.text in FUNCTIONS:
                self.expect_op('(')
                arg = self.expr()
                self.expect_op(')')
                return Call(tok.text, arg)
            if tok.text == VARIABLE or tok.text in CONSTANTS or tok.text in self.params:
                return Var(tok.text)
            raise ExprSyntaxError(
                f"unknown identifier '{tok.text}'", tok.offset,
                expected=(VARIABLE,) + tuple(sorted(self.params)) + tuple(FUNCTIONS),
            )
        if self.is_op('('):
            self.advance()
            node = self.expr()
            self.expect_op(')')
            return node
        self.fail("expected an operand", ('number', VARIABLE, 'function', "'('", "'-'"))


def parse(text, params=()):
    """
    Parse profile text into an Expr.

    Args:
        text: Expression source
        params: Names of parameters that may appear in the text

    Raises:
        ExprSyntaxError: With the byte offset and expected tokens
    """
    return _Parser(text, params).parse()


# printing

_PREC = {'+': 1, '-': 1, '*': 2, '/': 2, '^': 4}


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    return 5


def _format_number(value):
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def print_expr(node):
    """Canonical text with the fewest parentheses that re-parse to the same tree."""
    if isinstance(node, Num):
        return _format_number(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({print_expr(node.arg)})"
    if isinstance(node, Neg):
        inner = print_expr(node.operand)
        return f"-({inner})" if _prec(node.operand) < 3 else f"-{inner}"
    left, right = print_expr(node.left), print_expr(node.right)
    if node.op in ('+', '-'):
        if _prec(node.right) <= 1:
            right = f"({right})"
        return f"{left} {node.op} {right}"
    if node.op in ('*', '/'):
        if _prec(node.left) < 2:
            left = f"({left})"
        if _prec(node.right) <= 2:
            right = f"({right})"
        return f"{left}{node.op}{right}"
    if _prec(node.left) < 5:
        left = f"({left})"
    if _prec(node.right) < 3:
        right = f"({right})"
    return f"{left}^{right}"


# evaluation

def _float_binop(op, a, b):
    if op == '+':
        return a + b
    if op == '-':
        return a - b
    if op == '*':
        return a * b
    if op == '/':
        if b == 0:
            raise ExprDomainError("division by zero")
        return a / b
    if a == 0 and b < 0:
        raise ExprDomainError("division by zero")
    if a < 0 and not float(b).is_integer():
        raise ExprDomainError("non-integer power of a non-positive base")
    try:
        return float(a ** b)
    except OverflowError as exc:
        raise ExprDomainError("overflow") from exc


def _float_call(func, x):
    if func == 'ln':
        if x <= 0:
            raise ExprDomainError("ln of a non-positive value")
        return math.log(x)
    if func == 'sqrt':
        if x < 0:
            raise ExprDomainError("sqrt of a negative value")
        return math.sqrt(x)
    try:
        return getattr(math, func)(x)
    except OverflowError as exc:
        raise ExprDomainError("overflow") from exc


def _jet_binop(op, a, b):
    if op == '+':
        return a + b
    if op == '-':
        return a - b
    if op == '*':
        return a * b
    if op == '/':
        return a / b
    return a ** b


def _jet_call(func, x):
    if func == 'ln':
        return x.log()
    return getattr(x, func)()


def _evaluate(node, r_jet, params):
    try:
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Var):
            if node.name == VARIABLE:
                return r_jet
            if node.name in CONSTANTS:
                return CONSTANTS[node.name]
            if node.name not in params:
                raise ExprDomainError(f"parameter '{node.name}' has no value")
            return float(params[node.name])
        if isinstance(node, Neg):
            return -_evaluate(node.operand, r_jet, params)
        if isinstance(node, Call):
            arg = _evaluate(node.arg, r_jet, params)
            if isinstance(arg, TaylorJet):
                return _jet_call(node.func, arg)
            return _float_call(node.func, arg)
        left = _evaluate(node.left, r_jet, params)
        right = _evaluate(node.right, r_jet, params)
        if isinstance(left, TaylorJet) or isinstance(right, TaylorJet):
            if not isinstance(left, TaylorJet):
                left = TaylorJet.constant(left, right)
            return _jet_binop(node.op, left, right)
        return _float_binop(node.op, left, right)
    except ExprDomainError as exc:
        if exc.subexpression:
            raise
        raise ExprDomainError(str(exc), subexpression=print_expr(node)) from None


def jet_eval(node, r, order=3, params=None):
    """
    Value and derivatives of an expression in r.

    Args:
        node: Parsed Expr
        r: Radius (float or array of radii)
        order: Highest derivative, 0..3
        params: Values of the declared parameters

    Returns:
        Tuple (u, u', ..., u^(order)); arrays when r is an array

    Raises:
        ExprDomainError: Naming the offending subexpression
    """
    r_jet = TaylorJet.variable(r, order)
    result = _evaluate(node, r_jet, params or {})
    if isinstance(result, TaylorJet):
        derivs = result.derivatives()
        shape = np.shape(r)
        return tuple(np.broadcast_to(d, shape).copy() if shape else float(d) for d in derivs)
    shape = np.shape(r)
    values = (result,) + (0.0,) * order
    return tuple(np.full(shape, v) if shape else float(v) for v in values)


def evaluate(node, r, params=None):
    """Plain value of an expression at r."""
    return jet_eval(node, r, order=0, params=params)[0]


def free_names(node):
    """Parameter names referenced by an expression."""
    if isinstance(node, Var):
        return set() if node.name == VARIABLE or node.name in CONSTANTS else {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Neg,)):
        return free_names(node.operand)
    if isinstance(node, Call):
        return free_names(node.arg)
    return free_names(node.left) | free_names(node.right)
