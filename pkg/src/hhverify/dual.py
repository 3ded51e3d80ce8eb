"""Dual numbers for first-order forward-mode differentiation.

Both components may be Python floats or numpy arrays of matching shape;
array duals evaluate a derivative at many points in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np


@dataclass(frozen=True)
class DualValue:
    """value + deriv*eps with eps**2 == 0."""

    value: Any
    deriv: Any

    @staticmethod
    def lift(other: Any) -> "DualValue":
        if isinstance(other, DualValue):
            return other
        return DualValue(other, 0.0 * other if isinstance(other, np.ndarray) else 0.0)

    def __add__(self, other: Any) -> "DualValue":
        o = DualValue.lift(other)
        return DualValue(self.value + o.value, self.deriv + o.deriv)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "DualValue":
        o = DualValue.lift(other)
        return DualValue(self.value - o.value, self.deriv - o.deriv)

    def __rsub__(self, other: Any) -> "DualValue":
        return DualValue.lift(other) - self

    def __mul__(self, other: Any) -> "DualValue":
        o = DualValue.lift(other)
        return DualValue(self.value * o.value, self.value * o.deriv + self.deriv * o.value)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "DualValue":
        o = DualValue.lift(other)
        value = self.value / o.value
        return DualValue(value, (self.deriv - value * o.deriv) / o.value)

    def __rtruediv__(self, other: Any) -> "DualValue":
        return DualValue.lift(other) / self

    def __neg__(self) -> "DualValue":
        return DualValue(-self.value, -self.deriv)

    # Elementary functions. Domain checks belong to the caller.

    def exp(self) -> "DualValue":
        e = np.exp(self.value)
        return DualValue(e, e * self.deriv)

    def log(self) -> "DualValue":
        return DualValue(np.log(self.value), self.deriv / self.value)

    def sin(self) -> "DualValue":
        return DualValue(np.sin(self.value), np.cos(self.value) * self.deriv)

    def cos(self) -> "DualValue":
        return DualValue(np.cos(self.value), -np.sin(self.value) * self.deriv)

    def sqrt(self) -> "DualValue":
        r = np.sqrt(self.value)
        # d/dx sqrt(u) at u == 0 is only finite when u' == 0; take 0 there.
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(self.deriv == 0, 0.0, self.deriv / (2.0 * r))
        return DualValue(r, d if isinstance(self.value, np.ndarray) else float(d))

    def __abs__(self) -> "DualValue":
        # abs'(0) := 0, the symmetric subgradient.
        s = np.sign(self.value)
        return DualValue(np.abs(self.value), s * self.deriv)


def variable(x: Any) -> DualValue:
    """Seed the independent variable: derivative one everywhere."""
    if isinstance(x, np.ndarray):
        return DualValue(x, np.ones_like(x, dtype=float))
    return DualValue(x, 1.0)
