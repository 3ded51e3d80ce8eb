"""A small language for univariate real functions of ``x``.

Grammar (whitespace insignificant)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := number | "x" | "pi" | "e" | ident "(" expr ")" | "(" expr ")"
    ident  := abs | sqrt | exp | log | sin | cos

``^`` is right-associative and binds tighter than unary minus, so
``-x^2`` is ``-(x^2)`` and ``2^-1`` is ``0.5``.

Parsed expressions compile to closures that accept a float, a numpy array
or a :class:`~hhverify.dual.DualValue`, so one tree serves plain, vectorized
and forward-mode evaluation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Union

import numpy as np

from .dual import DualValue, variable
from .errors import (
    DomainError,
    EmptyExpressionError,
    ExprSyntaxError,
    UnknownIdentifierError,
)

UNARY_OPS = ("neg", "abs", "sqrt", "exp", "log", "sin", "cos")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")
FUNCTIONS = ("abs", "sqrt", "exp", "log", "sin", "cos")
CONSTANTS = {"pi": math.pi, "e": math.e}

_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}
_BINARY_FOR = {v: k for k, v in _SYMBOL.items()}

# Bounds both parser recursion and the height of the tree it returns, which
# keeps serialize, compile and evaluation well inside the interpreter stack.
MAX_DEPTH = 100
INTEGER_EXPONENT_TOL = 1e-12


@dataclass(frozen=True)
class Constant:
    value: float

    def __post_init__(self) -> None:
        v = self.value
        if not math.isfinite(v) or math.copysign(1.0, v) < 0:
            # Negative literals are spelled neg(constant); keeps serialization round-trippable.
            raise ValueError(f"constant must be finite and non-negative, got {v!r}")


@dataclass(frozen=True)
class Variable:
    pass


@dataclass(frozen=True)
class Unary:
    op: str
    child: "Node"

    def __post_init__(self) -> None:
        if self.op not in UNARY_OPS:
            raise ValueError(f"unknown unary operator {self.op!r}")


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"

    def __post_init__(self) -> None:
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary operator {self.op!r}")


Node = Union[Constant, Variable, Unary, Binary]


def serialize(node: Node) -> str:
    """Canonical, fully parenthesized text for ``node``."""
    if isinstance(node, Constant):
        return repr(float(node.value))
    if isinstance(node, Variable):
        return "x"
    if isinstance(node, Unary):
        if node.op == "neg":
            return f"(-{serialize(node.child)})"
        return f"{node.op}({serialize(node.child)})"
    return f"({serialize(node.left)} {_SYMBOL[node.op]} {serialize(node.right)})"


def contains_variable(node: Node) -> bool:
    if isinstance(node, Variable):
        return True
    if isinstance(node, Unary):
        return contains_variable(node.child)
    if isinstance(node, Binary):
        return contains_variable(node.left) or contains_variable(node.right)
    return False


# ---------------------------------------------------------------------------
# Tokenizer and parser

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_ATOM_START = frozenset({"number", "x", "identifier", "(", "-"})
_AFTER_OPERAND = frozenset({"+", "-", "*", "/", "^", "end of input"})


@dataclass
class _Token:
    kind: str  # "num", "ident", "op", "eof"
    text: str
    offset: int  # byte offset


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    byte = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", byte, _ATOM_START)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), byte))
        byte += len(m.group().encode("utf-8"))
        pos = m.end()
    tokens.append(_Token("eof", "", byte))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0
        self.depth = 0
        self.heights: dict[int, int] = {}

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _is_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def _advance(self) -> _Token:
        t = self.tok
        self.i += 1
        return t

    def _expect(self, op: str) -> None:
        if not self._is_op(op):
            raise ExprSyntaxError(self._describe(), self.tok.offset, frozenset({op}))
        self._advance()

    def _describe(self) -> str:
        if self.tok.kind == "eof":
            return "unexpected end of input"
        return f"unexpected token {self.tok.text!r}"

    def _build(self, node: Node, offset: int, *children: Node) -> Node:
        h = 1 + max(self.heights.get(id(c), 1) for c in children)
        if h > MAX_DEPTH:
            raise ExprSyntaxError("expression nested too deeply", offset)
        self.heights[id(node)] = h
        return node

    def _enter(self) -> None:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ExprSyntaxError("expression nested too deeply", self.tok.offset)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            raise ExprSyntaxError(self._describe(), self.tok.offset, _AFTER_OPERAND)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self._is_op("+", "-"):
            t = self._advance()
            rhs = self.term()
            node = self._build(Binary(_BINARY_FOR[t.text], node, rhs), t.offset, node, rhs)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self._is_op("*", "/"):
            t = self._advance()
            rhs = self.unary()
            node = self._build(Binary(_BINARY_FOR[t.text], node, rhs), t.offset, node, rhs)
        return node

    def unary(self) -> Node:
        self._enter()
        try:
            if self._is_op("-"):
                t = self._advance()
                child = self.unary()
                return self._build(Unary("neg", child), t.offset, child)
            return self.power()
        finally:
            self.depth -= 1

    def power(self) -> Node:
        base = self.atom()
        if self._is_op("^"):
            t = self._advance()
            exponent = self.unary()
            return self._build(Binary("pow", base, exponent), t.offset, base, exponent)
        return base

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self._advance()
            value = float(t.text)
            if not math.isfinite(value):
                raise ExprSyntaxError(f"numeric literal {t.text!r} overflows", t.offset)
            return Constant(value)
        if t.kind == "ident":
            self._advance()
            if t.text == "x":
                return Variable()
            if t.text in CONSTANTS:
                return Constant(CONSTANTS[t.text])
            if t.text in FUNCTIONS:
                self._expect("(")
                child = self.expr()
                self._expect(")")
                return self._build(Unary(t.text, child), t.offset, child)
            raise UnknownIdentifierError(t.text, t.offset)
        if self._is_op("("):
            self._advance()
            node = self.expr()
            self._expect(")")
            return node
        raise ExprSyntaxError(self._describe(), t.offset, frozenset({"number", "x", "identifier", "("}))


def parse_node(source: str | bytes) -> Node:
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ExprSyntaxError("invalid UTF-8", exc.start) from None
    if not source.strip():
        raise EmptyExpressionError()
    return _Parser(_tokenize(source)).parse()


# ---------------------------------------------------------------------------
# Compilation to closures

Fn = Callable[[Any], Any]


def _val(v: Any) -> Any:
    return v.value if isinstance(v, DualValue) else v


def _one_like(v: Any) -> Any:
    if isinstance(v, DualValue):
        if isinstance(v.value, np.ndarray):
            return DualValue(np.ones_like(v.value, dtype=float), np.zeros_like(v.value, dtype=float))
        return DualValue(1.0, 0.0)
    return np.ones_like(v, dtype=float) if isinstance(v, np.ndarray) else 1.0


def _int_power(v: Any, n: int, node: Node) -> Any:
    if n == 0:
        return _one_like(v)
    if n < 0:
        if np.any(_val(v) == 0):
            raise DomainError("0 raised to a negative power", node)
        return 1.0 / _int_power(v, -n, node)
    result = None
    base = v
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _const_power(v: Any, c: float, node: Node) -> Any:
    val = _val(v)
    if np.any(val < 0):
        raise DomainError("non-integer power of a negative base", node)
    if c < 0 and np.any(val == 0):
        raise DomainError("0 raised to a negative power", node)
    value = np.power(val, c)
    if not isinstance(v, DualValue):
        return value
    d = v.deriv
    if c < 1 and np.any((val == 0) & (d != 0)):
        raise DomainError("power with exponent < 1 is not differentiable at 0", node)
    with np.errstate(divide="ignore", invalid="ignore"):
        deriv = np.where(d == 0, 0.0, c * np.power(val, c - 1.0) * d)
    if not isinstance(deriv, np.ndarray) or deriv.ndim == 0:
        deriv = float(deriv)
    return DualValue(value, deriv)


def _compile(node: Node) -> Fn:
    if isinstance(node, Constant):
        c = float(node.value)
        return lambda x: c
    if isinstance(node, Variable):
        return lambda x: x
    if isinstance(node, Unary):
        return _compile_unary(node, _compile(node.child))
    return _compile_binary(node, _compile(node.left), _compile(node.right))


def _compile_unary(node: Unary, child: Fn) -> Fn:
    op = node.op
    if op == "neg":
        return lambda x: -child(x)
    if op == "abs":
        return lambda x: abs(child(x))

    def apply(x: Any) -> Any:
        v = child(x)
        val = _val(v)
        if op == "log":
            if np.any(val <= 0):
                raise DomainError("log of a non-positive value", node)
        elif op == "sqrt":
            if np.any(val < 0):
                raise DomainError("sqrt of a negative value", node)
            if isinstance(v, DualValue) and np.any((val == 0) & (v.deriv != 0)):
                raise DomainError("sqrt is not differentiable at 0", node)
        if isinstance(v, DualValue):
            return getattr(v, op)()
        return getattr(np, op)(v)

    return apply


def _compile_binary(node: Binary, left: Fn, right: Fn) -> Fn:
    op = node.op
    if op == "add":
        return lambda x: left(x) + right(x)
    if op == "sub":
        return lambda x: left(x) - right(x)
    if op == "mul":
        return lambda x: left(x) * right(x)
    if op == "div":
        def divide(x: Any) -> Any:
            num, den = left(x), right(x)
            if np.any(_val(den) == 0):
                raise DomainError("division by zero", node)
            return num / den
        return divide

    if not contains_variable(node.right):
        try:
            with np.errstate(all="ignore"):
                c = float(right(0.0))
        except DomainError as exc:
            err = exc

            def failing(x: Any) -> Any:
                raise err
            return failing
        n = round(c) if math.isfinite(c) else None
        if n is not None and abs(c - n) <= INTEGER_EXPONENT_TOL:
            return lambda x: _int_power(left(x), int(n), node)
        return lambda x: _const_power(left(x), c, node)

    def general_power(x: Any) -> Any:
        base, expo = left(x), right(x)
        if np.any(_val(base) <= 0):
            raise DomainError("variable exponent requires a positive base", node)
        if isinstance(base, DualValue) or isinstance(expo, DualValue):
            return (DualValue.lift(expo) * DualValue.lift(base).log()).exp()
        return np.power(base, expo)

    return general_power


# ---------------------------------------------------------------------------
# Public surface


@dataclass(frozen=True)
class Expression:
    """A parsed function of ``x``. Immutable; evaluation is pure."""

    root: Node
    _fn: Fn = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_fn", _compile(self.root))

    def __str__(self) -> str:
        return serialize(self.root)

    def __call__(self, x: Any) -> Any:
        return evaluate(self, x)

    def derivative(self, x: Any) -> Any:
        return derivative_value(self, x)


def parse(source: str | bytes) -> Expression:
    """Parse expression text into an :class:`Expression`.

    Raises:
        ExprSyntaxError: malformed input, with byte offset and expected tokens.
        UnknownIdentifierError: an identifier outside ``x``, ``pi``, ``e`` and
            the function table.
        EmptyExpressionError: blank input.
    """
    return Expression(parse_node(source))


def _coerce(x: Any) -> Any:
    if isinstance(x, np.ndarray) or isinstance(x, (list, tuple)):
        return np.asarray(x, dtype=float)
    return float(x)


def _shape_like(r: Any, x: Any) -> Any:
    if isinstance(x, np.ndarray):
        return np.asarray(r, dtype=float) + np.zeros_like(x)
    return float(r)


def evaluate(expr: Expression, x: Any) -> Any:
    """Value of ``expr`` at ``x`` (a float or an array of points)."""
    x = _coerce(x)
    with np.errstate(all="ignore"):
        return _shape_like(expr._fn(x), x)


def evaluate_dual(expr: Expression, x: Any) -> DualValue:
    """Value and derivative together."""
    x = _coerce(x)
    with np.errstate(all="ignore"):
        r = expr._fn(variable(x))
    if not isinstance(r, DualValue):
        return DualValue(_shape_like(r, x), _shape_like(0.0, x))
    return DualValue(_shape_like(r.value, x), _shape_like(r.deriv, x))


def derivative_value(expr: Expression, x: Any) -> Any:
    """f'(x) by forward-mode propagation; abs'(0) is taken as 0."""
    return evaluate_dual(expr, x).deriv
