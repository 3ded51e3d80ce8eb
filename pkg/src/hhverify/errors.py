"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations

from typing import Any


class HHError(Exception):
    """Base class for all errors raised by hhverify."""


class ParameterError(HHError, ValueError):
    """An argument violates a documented precondition."""


class ExprSyntaxError(HHError, ValueError):
    """The expression text does not match the grammar.

    ``offset`` is a byte offset into the UTF-8 encoded source and
    ``expected`` the set of tokens that would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        self.reason = message
        detail = f"syntax error at offset {offset}: {message}"
        if self.expected:
            detail += " (expected " + ", ".join(repr(t) for t in sorted(self.expected)) + ")"
        super().__init__(detail)


class EmptyExpressionError(ExprSyntaxError):
    def __init__(self) -> None:
        super().__init__("empty input", 0, frozenset({"expression"}))


class UnknownIdentifierError(ExprSyntaxError):
    def __init__(self, name: str, offset: int):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset)


class DomainError(HHError, ArithmeticError):
    """Evaluation left the real domain of some sub-expression."""

    def __init__(self, message: str, node: Any = None):
        self.node = node
        where = f" in {node}" if node is not None else ""
        super().__init__(message + where)


class QuadratureError(HHError, ArithmeticError):
    """Adaptive quadrature exhausted its evaluation budget."""

    def __init__(self, message: str, deepest: tuple[float, float] | None = None):
        self.deepest = deepest
        super().__init__(message)


class BoundViolationError(HHError, AssertionError):
    """A certified inequality instance came out with negative slack.

    ``reproduction`` holds everything needed to replay the failing case.
    """

    def __init__(self, message: str, reproduction: dict[str, Any]):
        self.reproduction = reproduction
        super().__init__(message)
