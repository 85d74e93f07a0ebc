"""Parser and evaluator for the small formula language used to define
problems: right-hand sides f(x, y), memory kernels K(x, t, y) and exact
solutions y(x).

Grammar (EBNF; whitespace between tokens is ignored):

    expr     = term , { ( "+" | "-" ) , term } ;
    term     = unary , { ( "*" | "/" ) , unary } ;
    unary    = "-" , unary | power ;
    power    = atom , [ "^" , unary ] ;
    atom     = number | variable
             | function , "(" , expr , ")"
             | "(" , expr , ")" ;

    number   = digits , [ "." , [ digits ] ] , [ exponent ]
             | "." , digits , [ exponent ] ;
    exponent = ( "e" | "E" ) , [ "+" | "-" ] , digits ;
    variable = "x" | "t" | "y" ;
    function = "sin" | "cos" | "tan" | "exp" | "log" | "sqrt" | "abs" ;

"+", "-", "*" and "/" associate to the left.  "^" associates to the right
and binds tighter than unary minus, so -x^2 means -(x^2) and 2^3^2 means
2^(3^2) = 512.  There is no implicit multiplication: write 2*x, not 2x.
log is the natural logarithm.

Evaluation is plain IEEE double precision.  Out-of-domain arguments (log
of a non-positive value, square root of a negative, division by zero, a
negative base under a fractional power) raise EvalError instead of
silently producing NaN.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

VARIABLES = ("x", "t", "y")

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
}


class ParseError(ValueError):
    """Input text rejected; `position` is the 0-based offset of the fault."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class EvalError(ValueError):
    """Evaluation failed: unbound variable or out-of-domain argument."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if self.name not in VARIABLES:
            raise ValueError(f"unknown variable {self.name!r}")


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expression"
    right: "Expression"

    def __post_init__(self):
        if self.op not in "+-*/^" or len(self.op) != 1:
            raise ValueError(f"unknown operator {self.op!r}")


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expression"

    def __post_init__(self):
        if self.func not in FUNCTIONS:
            raise ValueError(f"unknown function {self.func!r}")


Expression = Union[Num, Var, Neg, BinOp, Call]


_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_OPERATOR_CHARS = "+-*/^()"


@dataclass(frozen=True)
class _Token:
    kind: str  # "num", "name", "op" or "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        m = _NUMBER_RE.match(text, pos)
        if m:
            tokens.append(_Token("num", m.group(), pos))
            pos = m.end()
            continue
        m = _NAME_RE.match(text, pos)
        if m:
            tokens.append(_Token("name", m.group(), pos))
            pos = m.end()
            continue
        if ch in _OPERATOR_CHARS:
            tokens.append(_Token("op", ch, pos))
            pos += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", pos)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.index = 0

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def take(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def at_op(self, chars: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in chars

    def expr(self) -> Expression:
        node = self.term()
        while self.at_op("+-"):
            op = self.take().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.unary()
        while self.at_op("*/"):
            op = self.take().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expression:
        if self.at_op("-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.at_op("^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expression:
        tok = self.peek()
        if tok.kind == "num":
            self.take()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError(f"numeric literal {tok.text!r} out of range", tok.pos)
            return Num(value)
        if tok.kind == "name":
            self.take()
            if self.at_op("("):
                if tok.text not in FUNCTIONS:
                    raise ParseError(f"unknown function {tok.text!r}", tok.pos)
                self.take()
                arg = self.expr()
                closing = self.peek()
                if not self.at_op(")"):
                    raise ParseError("unbalanced parenthesis: expected ')'", closing.pos)
                self.take()
                return Call(tok.text, arg)
            if tok.text in FUNCTIONS:
                raise ParseError(f"function {tok.text!r} needs a parenthesized argument", tok.pos)
            if tok.text not in VARIABLES:
                raise ParseError(f"unknown identifier {tok.text!r}", tok.pos)
            return Var(tok.text)
        if self.at_op("("):
            self.take()
            node = self.expr()
            closing = self.peek()
            if not self.at_op(")"):
                raise ParseError("unbalanced parenthesis: expected ')'", closing.pos)
            self.take()
            return node
        if tok.kind == "end":
            raise ParseError("unexpected end of input", tok.pos)
        raise ParseError(f"unexpected token {tok.text!r}", tok.pos)


def parse(text: str) -> Expression:
    """Parse `text` into an immutable expression tree.

    Raises ParseError (with a 0-based offset) on any malformed input,
    including unknown identifiers and unknown functions.
    """
    tokens = _tokenize(text)
    if tokens[0].kind == "end":
        raise ParseError("empty expression", 0)
    parser = _Parser(tokens)
    node = parser.expr()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ParseError(f"trailing input starting at {trailing.text!r}", trailing.pos)
    return node


def evaluate(expression: Expression, env: dict) -> float:
    """Evaluate the tree with the variable bindings in `env`.

    Every free variable of the expression must be bound; unbound variables
    and out-of-domain arguments raise EvalError naming the offender.
    """
    if isinstance(expression, Num):
        return expression.value
    if isinstance(expression, Var):
        try:
            return float(env[expression.name])
        except KeyError:
            raise EvalError(f"unbound variable {expression.name!r}") from None
    if isinstance(expression, Neg):
        return -evaluate(expression.operand, env)
    if isinstance(expression, BinOp):
        left = evaluate(expression.left, env)
        right = evaluate(expression.right, env)
        op = expression.op
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if right == 0.0:
                raise EvalError("division by zero")
            return left / right
        try:
            return math.pow(left, right)
        except ValueError:
            raise EvalError(f"invalid power: base {left!r}, exponent {right!r}") from None
        except OverflowError:
            raise EvalError(f"overflow in power: base {left!r}, exponent {right!r}") from None
    arg = evaluate(expression.arg, env)
    name = expression.func
    if name == "log" and arg <= 0.0:
        raise EvalError(f"log of non-positive value {arg!r}")
    if name == "sqrt" and arg < 0.0:
        raise EvalError(f"sqrt of negative value {arg!r}")
    try:
        return FUNCTIONS[name](arg)
    except (ValueError, OverflowError) as err:
        raise EvalError(f"{name}({arg!r}) failed: {err}") from None


def free_variables(expression: Expression) -> set:
    """Set of variable names occurring in the expression."""
    if isinstance(expression, Num):
        return set()
    if isinstance(expression, Var):
        return {expression.name}
    if isinstance(expression, Neg):
        return free_variables(expression.operand)
    if isinstance(expression, BinOp):
        return free_variables(expression.left) | free_variables(expression.right)
    return free_variables(expression.arg)


# Precedence levels used by the printer; atoms sit above every operator.
_LEVEL_ADD = 1
_LEVEL_MUL = 2
_LEVEL_NEG = 3
_LEVEL_POW = 4
_LEVEL_ATOM = 5


def _level(expression: Expression) -> int:
    if isinstance(expression, (Num, Var, Call)):
        return _LEVEL_ATOM
    if isinstance(expression, Neg):
        return _LEVEL_NEG
    return {"+": _LEVEL_ADD, "-": _LEVEL_ADD,
            "*": _LEVEL_MUL, "/": _LEVEL_MUL,
            "^": _LEVEL_POW}[expression.op]


def _wrap(expression: Expression, minimum: int) -> str:
    text = unparse(expression)
    if _level(expression) < minimum:
        return f"({text})"
    return text


def unparse(expression: Expression) -> str:
    """Render a tree back to text.

    Re-parsing the result of unparse(parse(text)) yields a structurally
    identical tree (numeric literals are printed with repr, which is
    exact for doubles).
    """
    if isinstance(expression, Num):
        return repr(expression.value)
    if isinstance(expression, Var):
        return expression.name
    if isinstance(expression, Neg):
        return "-" + _wrap(expression.operand, _LEVEL_NEG)
    if isinstance(expression, Call):
        return f"{expression.func}({unparse(expression.arg)})"
    op = expression.op
    if op == "^":
        # base must be an atom; the exponent grammar slot is a unary
        return _wrap(expression.left, _LEVEL_ATOM) + "^" + _wrap(expression.right, _LEVEL_NEG)
    level = _level(expression)
    # left-associative: a same-level right operand needs parentheses
    return (_wrap(expression.left, level) + op + _wrap(expression.right, level + 1))
