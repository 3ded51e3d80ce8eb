"""Numerical verification of Hermite-Hadamard type inequalities for
functions whose derivative magnitude is quasi-convex."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BoundViolationError,
    DomainError,
    ExprSyntaxError,
    HHError,
    ParameterError,
    QuadratureError,
)
from .exprlang import Expression, derivative_value, evaluate, parse  # noqa: E402
from .numerics import Interval, grid_scan, integrate_adaptive, minimize_scalar  # noqa: E402
from .hhbounds import ExponentParams, reduction_check, verify  # noqa: E402

__all__ = [
    "BoundViolationError",
    "DomainError",
    "ExponentParams",
    "ExprSyntaxError",
    "Expression",
    "HHError",
    "Interval",
    "ParameterError",
    "QuadratureError",
    "derivative_value",
    "evaluate",
    "grid_scan",
    "integrate_adaptive",
    "minimize_scalar",
    "parse",
    "reduction_check",
    "verify",
]
