"""Hermite-Hadamard type deviations, the integral identity, and all bounds.

Notation: ``f`` is an :class:`~hhverify.exprlang.Expression`, ``iv = [a, b]``,
``x`` the free evaluation point, ``L = b - a``. The quantity bounded by the
three x-dependent theorems is the endpoint-weighted deviation

    | ((b - x) f(b) + (x - a) f(a)) / L  -  (1/L) int_a^b f(u) du |,

which at ``x = (a + b)/2`` is the trapezoid deviation bounded by the
midpoint baselines ``ion1``, ``ion2``, ``eq1``, ``eq2``, ``eq3``.

Derivative magnitudes |f'(a)|, |f'(b)|, |f'(x)| come from forward-mode
differentiation. Bound functions accept a scalar ``x`` or a numpy array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import __version__
from .errors import BoundViolationError, ParameterError
from .exprlang import Expression, derivative_value, evaluate
from .numerics import Interval, QuadratureResult, integrate_adaptive
from .quasiconvexity import (
    DEFAULT_SAMPLES,
    DEFAULT_TOL,
    QuasiConvexityVerdict,
    check_quasiconvex,
    power_of_abs,
)

THEOREMS = ("ion1", "ion2", "eq1", "eq2", "eq3", "thm6", "thm7", "thm8")
BASELINES = ("ion1", "ion2", "eq1", "eq2", "eq3")
NEW_THEOREMS = ("thm6", "thm7", "thm8")

# Which quasi-convexity hypothesis each bound rests on.
HYPOTHESIS_OF = {
    "ion1": "h1", "eq1": "h1", "thm6": "h1",
    "ion2": "hp", "eq2": "hp", "thm7": "hp",
    "eq3": "hq", "thm8": "hq",
}
# Midpoint reductions: new bound at x = (a+b)/2 vs. the earlier midpoint bound.
REDUCTIONS = (("thm6", "eq1"), ("thm7", "eq2"), ("thm8", "eq3"))

QUAD_TOL = 1e-10
SLACK_TOL = 1e-9
REDUCTION_TOL = 1e-12

SATISFIED = "satisfied"
VIOLATED = "violated"
NOT_CERTIFIED = "hypothesis-not-certified"


@dataclass(frozen=True)
class ExponentParams:
    """Hoelder exponent ``p > 1`` and power-mean exponent ``q >= 1``."""

    p: float = 2.0
    q: float = 2.0

    def __post_init__(self) -> None:
        _check_p(self.p)
        _check_q(self.q)

    @property
    def conjugate(self) -> float:
        """p/(p-1), the exponent paired with ``p``."""
        return self.p / (self.p - 1.0)


def _check_p(p: float) -> None:
    if not (math.isfinite(p) and p > 1):
        raise ParameterError(f"p must be > 1, got {p!r}")


def _check_q(q: float) -> None:
    if not (math.isfinite(q) and q >= 1):
        raise ParameterError(f"q must be >= 1, got {q!r}")


def _check_x(iv: Interval, x: Any) -> None:
    if not np.all((np.asarray(x) >= iv.a) & (np.asarray(x) <= iv.b)):
        raise ParameterError(f"x must lie in [{iv.a!r}, {iv.b!r}]")


def _out(v: Any) -> Any:
    return float(v) if np.ndim(v) == 0 else np.asarray(v, dtype=float)


def abs_derivative(f: Expression, x: Any) -> Any:
    return np.abs(derivative_value(f, x))


# ---------------------------------------------------------------------------
# Left-hand sides


def mean_integral(f: Expression, iv: Interval, tol: float = QUAD_TOL) -> QuadratureResult:
    """(1/L) int_a^b f, with the quadrature error estimate scaled the same way."""
    r = integrate_adaptive(lambda u: evaluate(f, u), iv, tol)
    return QuadratureResult(r.value / iv.length, r.error_estimate / iv.length, r.evaluations)


def weighted_endpoint(f: Expression, iv: Interval, x: Any) -> Any:
    """((b - x) f(b) + (x - a) f(a)) / L."""
    a, b = iv.a, iv.b
    return ((b - np.asarray(x)) * evaluate(f, b) + (np.asarray(x) - a) * evaluate(f, a)) / iv.length


def signed_deviation(
    f: Expression, iv: Interval, x: Any, tol: float = QUAD_TOL, *, mean: Optional[QuadratureResult] = None
) -> Any:
    _check_x(iv, x)
    mean = mean_integral(f, iv, tol) if mean is None else mean
    return _out(weighted_endpoint(f, iv, x) - mean.value)


def lhs_weighted(
    f: Expression, iv: Interval, x: Any, tol: float = QUAD_TOL, *, mean: Optional[QuadratureResult] = None
) -> Any:
    """Absolute endpoint-weighted deviation at ``x``.

    Pass a precomputed ``mean`` to share one quadrature across many x.
    """
    return _out(np.abs(signed_deviation(f, iv, x, tol, mean=mean)))


def trapezoid_deviation(
    f: Expression, iv: Interval, tol: float = QUAD_TOL, *, mean: Optional[QuadratureResult] = None
) -> float:
    mean = mean_integral(f, iv, tol) if mean is None else mean
    return abs((evaluate(f, iv.a) + evaluate(f, iv.b)) / 2.0 - mean.value)


# Both kernels vanish at t = 1, where a sample cannot see a jump of f'.
# Geometric panels toward t = 1 keep such a jump between weighted samples.
_GRADED = 1.0 - 2.0 ** -np.arange(1, 48)


@dataclass(frozen=True)
class Lemma1Result:
    lhs: float
    rhs: float
    residual: float
    quadrature_error: float


def lemma1_sides(
    f: Expression, iv: Interval, x: float, tol: float = QUAD_TOL, *, mean: Optional[QuadratureResult] = None
) -> Lemma1Result:
    """Both sides of the integral identity, kernels exactly as printed.

    rhs = (x-a)^2/L * int_0^1 (t-1) f'(tx + (1-t)a) dt
        + (b-x)^2/L * int_0^1 (1-t) f'(tx + (1-t)b) dt
    """
    _check_x(iv, x)
    a, b, L = iv.a, iv.b, iv.length
    mean = mean_integral(f, iv, tol) if mean is None else mean
    lhs = float(weighted_endpoint(f, iv, x)) - mean.value
    unit = Interval(0.0, 1.0)
    left = integrate_adaptive(
        lambda t: (t - 1.0) * derivative_value(f, t * x + (1.0 - t) * a), unit, tol, breakpoints=_GRADED
    )
    right = integrate_adaptive(
        lambda t: (1.0 - t) * derivative_value(f, t * x + (1.0 - t) * b), unit, tol, breakpoints=_GRADED
    )
    wl, wr = (x - a) ** 2 / L, (b - x) ** 2 / L
    rhs = wl * left.value + wr * right.value
    err = mean.error_estimate + wl * left.error_estimate + wr * right.error_estimate
    return Lemma1Result(lhs, rhs, abs(lhs - rhs), err)


def lemma1_residual(f: Expression, iv: Interval, x: float, tol: float = QUAD_TOL) -> float:
    """|LHS - RHS| of the integral identity; zero up to quadrature error."""
    return lemma1_sides(f, iv, x, tol).residual


# ---------------------------------------------------------------------------
# Right-hand sides


def _pmax(u: Any, v: Any, r: float) -> Any:
    """(max{u^r, v^r})^(1/r), evaluated literally."""
    return np.maximum(u**r, v**r) ** (1.0 / r)


def thm6_terms(f: Expression, iv: Interval, x: Any) -> tuple[Any, Any]:
    _check_x(iv, x)
    a, b, L = iv.a, iv.b, iv.length
    x = np.asarray(x, dtype=float)
    dx, da, db = abs_derivative(f, x), abs_derivative(f, a), abs_derivative(f, b)
    left = (x - a) ** 2 / (2.0 * L) * np.maximum(dx, da)
    right = (b - x) ** 2 / (2.0 * L) * np.maximum(dx, db)
    return _out(left), _out(right)


def bound_thm6(f: Expression, iv: Interval, x: Any) -> Any:
    """(x-a)^2/(2L) max{|f'(x)|,|f'(a)|} + (b-x)^2/(2L) max{|f'(x)|,|f'(b)|}."""
    left, right = thm6_terms(f, iv, x)
    return _out(left + right)


def thm7_terms(f: Expression, iv: Interval, x: Any, p: float) -> tuple[Any, Any]:
    _check_p(p)
    _check_x(iv, x)
    a, b, L = iv.a, iv.b, iv.length
    x = np.asarray(x, dtype=float)
    r = p / (p - 1.0)
    k = (1.0 / (p + 1.0)) ** (1.0 / p)
    dx, da, db = abs_derivative(f, x), abs_derivative(f, a), abs_derivative(f, b)
    left = (x - a) ** 2 / L * k * _pmax(dx, da, r)
    right = (b - x) ** 2 / L * k * _pmax(dx, db, r)
    return _out(left), _out(right)


def bound_thm7(f: Expression, iv: Interval, x: Any, p: float) -> Any:
    """Hoelder-type bound with factor (1/(p+1))^(1/p) and exponent p/(p-1)."""
    left, right = thm7_terms(f, iv, x, p)
    return _out(left + right)


def thm8_terms(f: Expression, iv: Interval, x: Any, q: float) -> tuple[Any, Any]:
    _check_q(q)
    _check_x(iv, x)
    a, b, L = iv.a, iv.b, iv.length
    x = np.asarray(x, dtype=float)
    dx, da, db = abs_derivative(f, x), abs_derivative(f, a), abs_derivative(f, b)
    left = (x - a) ** 2 / (2.0 * L) * _pmax(dx, da, q)
    right = (b - x) ** 2 / (2.0 * L) * _pmax(dx, db, q)
    return _out(left), _out(right)


def bound_thm8(f: Expression, iv: Interval, x: Any, q: float) -> Any:
    """Power-mean bound; coincides with :func:`bound_thm6` at q = 1."""
    left, right = thm8_terms(f, iv, x, q)
    return _out(left + right)


def bound_baseline(
    f: Expression, iv: Interval, theorem: str, params: ExponentParams = ExponentParams()
) -> float:
    """Earlier midpoint bounds on the trapezoid deviation.

    ``ion1``: L/4 max{|f'(a)|, |f'(b)|}
    ``ion2``: L/(2 (p+1)^(1/p)) (max{|f'(a)|^r, |f'(b)|^r})^(1/r), r = p/(p-1)
    ``eq1``:  L/8 [max{|f'(m)|,|f'(a)|} + max{|f'(m)|,|f'(b)|}], m = (a+b)/2
    ``eq2``:  L/4 (1/(p+1))^(1/p) [(max{..}^r)^(1/r) + (max{..}^r)^(1/r)]
    ``eq3``:  L/8 [(max{..}^q)^(1/q) + (max{..}^q)^(1/q)]
    """
    if theorem not in BASELINES:
        raise ParameterError(f"{theorem!r} is not a baseline bound; choose from {', '.join(BASELINES)}")
    a, b, L = iv.a, iv.b, iv.length
    da, db, dm = (float(abs_derivative(f, t)) for t in (a, b, iv.midpoint))
    p, q = params.p, params.q
    r = params.conjugate
    if theorem == "ion1":
        return L / 4.0 * max(da, db)
    if theorem == "ion2":
        return float(L / (2.0 * (p + 1.0) ** (1.0 / p)) * _pmax(da, db, r))
    if theorem == "eq1":
        return L / 8.0 * (max(dm, da) + max(dm, db))
    if theorem == "eq2":
        return float(L / 4.0 * (1.0 / (p + 1.0)) ** (1.0 / p) * (_pmax(dm, da, r) + _pmax(dm, db, r)))
    return float(L / 8.0 * (_pmax(dm, da, q) + _pmax(dm, db, q)))


def bound_new(f: Expression, iv: Interval, theorem: str, x: Any, params: ExponentParams) -> Any:
    if theorem == "thm6":
        return bound_thm6(f, iv, x)
    if theorem == "thm7":
        return bound_thm7(f, iv, x, params.p)
    if theorem == "thm8":
        return bound_thm8(f, iv, x, params.q)
    raise ParameterError(f"{theorem!r} is not one of {', '.join(NEW_THEOREMS)}")


# ---------------------------------------------------------------------------
# Classical inequality and reductions


@dataclass(frozen=True)
class ClassicHHResult:
    midpoint_value: float
    mean_value: float
    endpoint_mean: float
    holds: bool
    equality: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "midpoint_value": self.midpoint_value,
            "mean_value": self.mean_value,
            "endpoint_mean": self.endpoint_mean,
            "holds": self.holds,
            "equality": self.equality,
        }


def classic_hh_check(
    f: Expression, iv: Interval, tol: float = QUAD_TOL, *, mean: Optional[QuadratureResult] = None
) -> ClassicHHResult:
    """f((a+b)/2) <= mean of f <= (f(a)+f(b))/2, checked within ``tol``.

    Meant for convex ``f``; concave inputs fail the ordering.
    """
    mean = mean_integral(f, iv, tol) if mean is None else mean
    slack = tol + mean.error_estimate
    mid = float(evaluate(f, iv.midpoint))
    ends = (float(evaluate(f, iv.a)) + float(evaluate(f, iv.b))) / 2.0
    holds = mid <= mean.value + slack and mean.value <= ends + slack
    equality = abs(mid - mean.value) <= slack and abs(ends - mean.value) <= slack
    return ClassicHHResult(mid, mean.value, ends, holds, equality)


@dataclass(frozen=True)
class ReductionPair:
    theorem: str
    baseline: str
    theorem_value: float
    baseline_value: float
    relative_difference: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "theorem": self.theorem,
            "baseline": self.baseline,
            "theorem_value": self.theorem_value,
            "baseline_value": self.baseline_value,
            "relative_difference": self.relative_difference,
            "passed": self.passed,
        }


def relative_difference(u: float, v: float) -> float:
    scale = max(abs(u), abs(v))
    return 0.0 if scale == 0 else abs(u - v) / scale


def reduction_check(
    f: Expression, iv: Interval, params: ExponentParams = ExponentParams(), tol: float = REDUCTION_TOL
) -> list[ReductionPair]:
    """Compare thm6/7/8 at the midpoint with eq1/eq2/eq3. No quadrature involved."""
    m = iv.midpoint
    pairs = []
    for thm, base in REDUCTIONS:
        u = float(bound_new(f, iv, thm, m, params))
        v = bound_baseline(f, iv, base, params)
        rd = relative_difference(u, v)
        pairs.append(ReductionPair(thm, base, u, v, rd, rd <= tol))
    return pairs


# ---------------------------------------------------------------------------
# Verification reports


def certify_hypotheses(
    f: Expression,
    iv: Interval,
    params: ExponentParams,
    samples: int = DEFAULT_SAMPLES,
    tol: float = DEFAULT_TOL,
) -> dict[str, QuasiConvexityVerdict]:
    """Sampling verdicts for |f'|, |f'|^(p/(p-1)) and |f'|^q on ``iv``."""
    df = lambda t: derivative_value(f, t)  # noqa: E731
    return {
        "h1": check_quasiconvex(power_of_abs(df, 1.0), iv, samples, tol),
        "hp": check_quasiconvex(power_of_abs(df, params.conjugate), iv, samples, tol),
        "hq": check_quasiconvex(power_of_abs(df, params.q), iv, samples, tol),
    }


NOTES = (
    "quasi-convexity hypotheses are certified by deterministic sampling plus "
    "a direct counterexample check; holds=true is evidence, not proof",
    "identity kernels are used as printed: (t-1) for the a-side integral, "
    "(1-t) for the b-side integral",
    "baseline bounds (ion1, ion2, eq1, eq2, eq3) are compared against the "
    "trapezoid deviation, i.e. the weighted deviation at x=(a+b)/2",
)


@dataclass
class BoundReport:
    function: str
    interval: Interval
    x: float
    params: ExponentParams
    lhs: float
    lhs_trapezoid: float
    bounds: dict[str, float]
    slacks: dict[str, float]
    hypotheses: dict[str, QuasiConvexityVerdict]
    statuses: dict[str, str]
    satisfied: dict[str, bool]
    lemma1_residual: float
    quadrature_error: float
    slack_tol: float
    classic: Optional[ClassicHHResult] = None
    notes: tuple[str, ...] = NOTES
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def violations(self) -> list[str]:
        return [t for t in THEOREMS if self.statuses[t] == VIOLATED]

    @property
    def uncertified(self) -> list[str]:
        return [t for t in THEOREMS if self.statuses[t] == NOT_CERTIFIED]

    @property
    def outcome(self) -> str:
        if self.violations:
            return "violation"
        if self.uncertified:
            return NOT_CERTIFIED
        return "ok"

    def reproduction(self) -> dict[str, Any]:
        return {
            "function": self.function,
            "interval": {"a": self.interval.a, "b": self.interval.b},
            "x": self.x,
            "params": {"p": self.params.p, "q": self.params.q},
            **self.extra,
        }

    def to_dict(self, command: str = "verify") -> dict[str, Any]:
        out: dict[str, Any] = {
            "command": command,
            "function": self.function,
            "interval": {"a": self.interval.a, "b": self.interval.b},
            "x": self.x,
            "params": {"p": self.params.p, "q": self.params.q},
            "lhs": self.lhs,
            "lhs_trapezoid": self.lhs_trapezoid,
            "bounds": dict(self.bounds),
            "slacks": dict(self.slacks),
            "hypotheses": {k: v.to_dict() for k, v in self.hypotheses.items()},
            "lemma1_residual": self.lemma1_residual,
            "quadrature_error": self.quadrature_error,
            "slack_tol": self.slack_tol,
            "satisfied": dict(self.satisfied),
            "status": dict(self.statuses),
            "outcome": self.outcome,
            "classic_hh": self.classic.to_dict() if self.classic else None,
            "notes": list(self.notes),
            "tool_version": __version__,
        }
        if self.violations:
            out["reproduction"] = self.reproduction()
        return out


def verify(
    f: Expression,
    iv: Interval,
    x: Optional[float] = None,
    params: ExponentParams = ExponentParams(),
    tol: float = QUAD_TOL,
    *,
    label: Optional[str] = None,
    slack_tol: float = SLACK_TOL,
    samples: int = DEFAULT_SAMPLES,
    qc_tol: float = DEFAULT_TOL,
    hypotheses: Optional[dict[str, QuasiConvexityVerdict]] = None,
    mean: Optional[QuadratureResult] = None,
    strict: bool = False,
    extra: Optional[dict[str, Any]] = None,
) -> BoundReport:
    """Run every check for one ``(f, [a, b], x, p, q)`` instance.

    An entry whose hypothesis is not certified is marked
    ``hypothesis-not-certified`` instead of pass/fail. With ``strict=True`` a
    certified entry with slack below ``-(slack_tol + quadrature error)``
    raises :class:`BoundViolationError` carrying reproduction data.
    """
    x = iv.midpoint if x is None else float(x)
    _check_x(iv, x)
    mean = mean_integral(f, iv, tol) if mean is None else mean
    hyp = certify_hypotheses(f, iv, params, samples, qc_tol) if hypotheses is None else hypotheses

    lhs = float(lhs_weighted(f, iv, x, tol, mean=mean))
    lhs_mid = trapezoid_deviation(f, iv, tol, mean=mean)
    lemma = lemma1_sides(f, iv, x, tol, mean=mean)

    bounds = {t: bound_baseline(f, iv, t, params) for t in BASELINES}
    for t in NEW_THEOREMS:
        bounds[t] = float(bound_new(f, iv, t, x, params))
    bounds = {t: bounds[t] for t in THEOREMS}

    quad_err = mean.error_estimate
    allowance = slack_tol + quad_err
    slacks, satisfied, statuses = {}, {}, {}
    for t in THEOREMS:
        slacks[t] = bounds[t] - (lhs_mid if t in BASELINES else lhs)
        satisfied[t] = bool(slacks[t] >= -allowance)
        if not hyp[HYPOTHESIS_OF[t]].holds:
            statuses[t] = NOT_CERTIFIED
        else:
            statuses[t] = SATISFIED if satisfied[t] else VIOLATED

    report = BoundReport(
        function=label or str(f),
        interval=iv,
        x=x,
        params=params,
        lhs=lhs,
        lhs_trapezoid=lhs_mid,
        bounds=bounds,
        slacks=slacks,
        hypotheses=hyp,
        statuses=statuses,
        satisfied=satisfied,
        lemma1_residual=lemma.residual,
        quadrature_error=quad_err,
        slack_tol=allowance,
        classic=classic_hh_check(f, iv, tol, mean=mean),
        extra={"expression": str(f), "tol": tol, **(extra or {})},
    )
    if strict and report.violations:
        raise BoundViolationError(
            f"certified bound(s) violated: {', '.join(report.violations)}", report.reproduction()
        )
    return report
