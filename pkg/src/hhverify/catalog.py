"""Built-in test functions and a seeded generator of admissible functions.

Every generated ``f`` has ``|f'|`` quasi-convex on the configured interval
by construction:

* ``monomial-kink``: f'(t) = c*sign(t-m)*|t-m|^k, so |f'| is a valley at m;
* ``monotone-exp``: f'(t) = c*exp(s*t), |f'| is monotone;
* ``shifted-odd-power``: f'(t) = c*(t-m)^k with odd integer k, a valley at m.

``f`` is the exact antiderivative of the family formula, written in the
expression language so that forward-mode differentiation applies to it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import ParameterError
from .exprlang import Expression, parse
from .numerics import Interval

FAMILIES = ("monomial-kink", "monotone-exp", "shifted-odd-power")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    source: str
    interval: Interval
    description: str
    convex: bool
    derivative_quasiconvex: bool
    foil: bool = False

    @property
    def expression(self) -> Expression:
        return parse(self.source)

    @property
    def label(self) -> str:
        return f"catalog:{self.name}"


CATALOG: dict[str, CatalogEntry] = {
    e.name: e
    for e in [
        CatalogEntry("identity", "x", Interval(0.0, 1.0), "u", True, True),
        CatalogEntry("square", "x^2", Interval(0.0, 1.0), "u^2", True, True),
        CatalogEntry("cube", "x^3", Interval(-1.0, 1.0), "u^3 (monotone, not convex)", False, True),
        CatalogEntry("exp", "exp(x)", Interval(0.0, 1.0), "e^u", True, True),
        CatalogEntry("sqrtabs", "sqrt(abs(x))", Interval(0.25, 4.0),
                     "sqrt|u| away from its cusp (concave here)", False, True),
        CatalogEntry("abskink", "abs(x - 0.3)", Interval(0.0, 1.0), "|u - m| with m = 0.3", True, True),
        CatalogEntry("neglog", "-log(x)", Interval(0.5, 2.0), "-ln u on a positive interval", True, True),
        CatalogEntry("negsquare", "-x^2", Interval(-1.0, 1.0),
                     "concave, not quasi-convex; |f'| is still a valley", False, True, foil=True),
        CatalogEntry("sin10", "sin(10*x)", Interval(0.0, 1.0),
                     "|f'| oscillates, hypotheses fail", False, False, foil=True),
    ]
}


def lookup(name: str) -> CatalogEntry:
    key = name.removeprefix("catalog:")
    try:
        return CATALOG[key]
    except KeyError:
        raise ParameterError(
            f"unknown catalog function {name!r}; choose from {', '.join(CATALOG)}"
        ) from None


@dataclass(frozen=True)
class GeneratorConfig:
    """Seeded generator settings. ``family=None`` draws a family per trial."""

    seed: int = 42
    family: Optional[str] = None
    interval: Interval = field(default_factory=lambda: Interval(0.0, 1.0))
    scale: tuple[float, float] = (0.5, 2.0)

    def __post_init__(self) -> None:
        if self.family is not None and self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        lo, hi = self.scale
        if not (np.isfinite(lo) and np.isfinite(hi) and 0 < lo <= hi):
            raise ParameterError("scale bounds must satisfy 0 < low <= high")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class GeneratedFunction:
    family: str
    params: dict[str, float]
    f: Expression
    df: Expression
    interval: Interval
    seed: int
    trial: Optional[int]

    @property
    def label(self) -> str:
        suffix = "" if self.trial is None else f":trial={self.trial}"
        return f"gen:{self.family}:seed={self.seed}{suffix}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.label,
            "family": self.family,
            "params": dict(self.params),
            "f": str(self.f),
            "df": str(self.df),
            "interval": {"a": self.interval.a, "b": self.interval.b},
        }


def trial_rng(seed: int, trial: Optional[int]) -> np.random.Generator:
    """Independent stream per (seed, trial), usable in any execution order."""
    if trial is None:
        return np.random.default_rng(np.random.SeedSequence(seed))
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def _num(v: float) -> str:
    # Parenthesized so negative values compose with any operator.
    return f"({float(v)!r})"


def generate(
    config: GeneratorConfig,
    trial: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> GeneratedFunction:
    """Draw one admissible function; deterministic in ``(seed, trial)``."""
    rng = trial_rng(config.seed, trial) if rng is None else rng
    family = config.family or FAMILIES[int(rng.integers(len(FAMILIES)))]
    iv = config.interval
    lo, hi = config.scale
    c = float(rng.uniform(lo, hi)) * (1.0 if rng.random() < 0.5 else -1.0)
    inner = (iv.a + 0.1 * iv.length, iv.b - 0.1 * iv.length)

    if family == "monomial-kink":
        m = float(rng.uniform(*inner))
        k = float(rng.uniform(1.0, 3.0))
        params = {"c": c, "m": m, "k": k}
        f = f"{_num(c / (k + 1.0))} * abs(x - {_num(m)})^{_num(k + 1.0)}"
        df = f"{_num(c)} * (x - {_num(m)}) * abs(x - {_num(m)})^{_num(k - 1.0)}"
    elif family == "monotone-exp":
        s = float(rng.uniform(0.25, 3.0)) * (1.0 if rng.random() < 0.5 else -1.0)
        params = {"c": c, "s": s}
        f = f"{_num(c / s)} * exp({_num(s)} * x)"
        df = f"{_num(c)} * exp({_num(s)} * x)"
    else:
        m = float(rng.uniform(*inner))
        k = int(rng.choice([1, 3, 5]))
        params = {"c": c, "m": m, "k": float(k)}
        f = f"{_num(c / (k + 1))} * (x - {_num(m)})^{k + 1}"
        df = f"{_num(c)} * (x - {_num(m)})^{k}"

    return GeneratedFunction(family, params, parse(f), parse(df), iv, int(config.seed), trial)
