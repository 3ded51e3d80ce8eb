"""Sweeps over the free point x, bound-minimizing x, and seeded fuzz campaigns."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .catalog import GeneratorConfig, generate, trial_rng
from .errors import HHError, ParameterError
from .exprlang import Expression
from .hhbounds import (
    NEW_THEOREMS,
    QUAD_TOL,
    SLACK_TOL,
    THEOREMS,
    ExponentParams,
    bound_new,
    bound_thm6,
    bound_thm7,
    bound_thm8,
    certify_hypotheses,
    lhs_weighted,
    mean_integral,
    verify,
)
from .numerics import Interval, MinimizationResult, minimize_scalar
from .quasiconvexity import QuasiConvexityVerdict

SWEEP_COLUMNS = ("x", "lhs", "rhs6", "rhs7", "rhs8", "slack6", "slack7", "slack8")
HISTOGRAM_BUCKETS = 20

# Two zipped grids; each pair is one ExponentParams.
DEFAULT_PARAMS_GRID = tuple(
    ExponentParams(p, q) for p, q in zip((1.5, 2.0, 3.0, 10.0), (1.0, 1.5, 2.0, 5.0))
)


@dataclass
class SweepTable:
    rows: list[tuple[float, ...]]
    function: str
    interval: Interval
    params: ExponentParams
    tol: float
    quadrature_error: float
    hypotheses: dict[str, QuasiConvexityVerdict]

    def column(self, name: str) -> np.ndarray:
        return np.array([r[SWEEP_COLUMNS.index(name)] for r in self.rows])

    def min_slack(self, which: str = "slack6") -> tuple[int, float]:
        col = self.column(which)
        k = int(np.argmin(col))
        return k, float(col[k])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for row in self.rows:
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": "sweep",
            "function": self.function,
            "interval": {"a": self.interval.a, "b": self.interval.b},
            "params": {"p": self.params.p, "q": self.params.q},
            "tol": self.tol,
            "quadrature_error": self.quadrature_error,
            "hypotheses": {k: v.to_dict() for k, v in self.hypotheses.items()},
            "columns": list(SWEEP_COLUMNS),
            "rows": [list(r) for r in self.rows],
        }


def sweep_x(
    f: Expression,
    iv: Interval,
    n: int = 101,
    params: ExponentParams = ExponentParams(),
    tol: float = QUAD_TOL,
    *,
    label: Optional[str] = None,
    certify: bool = True,
) -> SweepTable:
    """Tabulate lhs, the three x-dependent bounds and their slacks on an n-point grid.

    The mean integral does not depend on x and is computed once.
    """
    if n < 2:
        raise ParameterError("sweep needs n >= 2")
    xs = iv.grid(n)
    mean = mean_integral(f, iv, tol)
    lhs = lhs_weighted(f, iv, xs, tol, mean=mean)
    r6 = bound_thm6(f, iv, xs)
    r7 = bound_thm7(f, iv, xs, params.p)
    r8 = bound_thm8(f, iv, xs, params.q)
    rows = [
        tuple(float(v) for v in (x, l, a, b, c, a - l, b - l, c - l))
        for x, l, a, b, c in zip(xs, lhs, r6, r7, r8)
    ]
    hyp = certify_hypotheses(f, iv, params) if certify else {}
    return SweepTable(rows, label or str(f), iv, params, tol, mean.error_estimate, hyp)


@dataclass(frozen=True)
class OptimalX:
    """Bound-minimizing x for one theorem, next to the midpoint value."""

    theorem: str
    result: MinimizationResult
    midpoint_value: float

    @property
    def improvement(self) -> float:
        return self.midpoint_value - self.result.min_value

    def to_dict(self) -> dict[str, Any]:
        return {
            "theorem": self.theorem,
            "argmin": self.result.argmin,
            "min_value": self.result.min_value,
            "iterations": self.result.iterations,
            "midpoint_value": self.midpoint_value,
            "improvement": self.improvement,
        }


def optimal_x(
    f: Expression,
    iv: Interval,
    theorem: str = "thm6",
    params: ExponentParams = ExponentParams(),
    tol: float = 1e-10,
) -> OptimalX:
    """Exploratory search for the x minimizing a bound; the midpoint is the reference choice."""
    if theorem not in NEW_THEOREMS:
        raise ParameterError(f"optimal_x works on {', '.join(NEW_THEOREMS)}, not {theorem!r}")
    g = lambda x: bound_new(f, iv, theorem, x, params)  # noqa: E731
    result = minimize_scalar(g, iv, tol, vectorized=True)
    return OptimalX(theorem, result, float(g(iv.midpoint)))


# ---------------------------------------------------------------------------
# Fuzzing


@dataclass
class TrialOutcome:
    trial: int
    family: str
    label: str
    x: float
    slacks: dict[str, float]
    ratios: dict[str, float]
    degenerate: dict[str, bool]
    violations: list[dict[str, Any]]
    uncertified: int
    error: Optional[str] = None


@dataclass
class FuzzSummary:
    seed: int
    trials: int
    violations: int
    hypothesis_failures: int
    errors: int
    min_slack: dict[str, float]
    histogram: dict[str, list[int]]
    degenerate: dict[str, int]
    families: dict[str, int]
    violation_cases: list[dict[str, Any]] = field(default_factory=list)
    error_cases: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": "fuzz",
            "seed": self.seed,
            "trials": self.trials,
            "violations": self.violations,
            "hypothesis_failures": self.hypothesis_failures,
            "errors": self.errors,
            "min_slack": dict(self.min_slack),
            "slack_ratio_histogram": {
                "buckets": HISTOGRAM_BUCKETS,
                "range": [0.0, 1.0],
                "counts": {k: list(v) for k, v in self.histogram.items()},
                "rhs_zero_lhs_positive": dict(self.degenerate),
            },
            "families": dict(self.families),
            "violation_cases": list(self.violation_cases),
            "error_cases": list(self.error_cases),
        }


def slack_ratio(lhs: float, rhs: float) -> tuple[float, bool]:
    """lhs/rhs for the histogram; 0 when both vanish, flagged when only rhs does."""
    if rhs == 0.0:
        return 0.0, lhs > 0.0
    return lhs / rhs, False


def bucket_of(ratio: float) -> int:
    return min(max(int(math.floor(ratio * HISTOGRAM_BUCKETS)), 0), HISTOGRAM_BUCKETS - 1)


def run_trial(
    config: GeneratorConfig,
    trial: int,
    params_grid: Sequence[ExponentParams],
    tol: float = QUAD_TOL,
    slack_tol: float = SLACK_TOL,
) -> TrialOutcome:
    """One fuzz trial; depends only on ``(config, trial)``."""
    rng = trial_rng(config.seed, trial)
    try:
        gen = generate(config, trial, rng)
    except HHError as exc:
        return TrialOutcome(trial, config.family or "?", "", math.nan, {}, {}, {}, [], 0, str(exc))
    iv = gen.interval
    x = float(rng.uniform(iv.a, iv.b))
    slacks: dict[str, float] = {}
    ratios: dict[str, float] = {}
    degenerate: dict[str, bool] = {}
    violations: list[dict[str, Any]] = []
    uncertified = 0
    try:
        mean = mean_integral(gen.f, iv, tol)
        for params in params_grid:
            report = verify(
                gen.f, iv, x, params, tol,
                label=gen.label, slack_tol=slack_tol, mean=mean,
                extra={"seed": config.seed, "trial": trial, "family": gen.family, "generator": gen.params},
            )
            uncertified += len(report.uncertified)
            for t in THEOREMS:
                s = report.slacks[t]
                slacks[t] = min(slacks.get(t, math.inf), s)
            for t in NEW_THEOREMS:
                ratio, flag = slack_ratio(report.lhs, report.bounds[t])
                key = f"{t}@p={params.p!r},q={params.q!r}"
                ratios[key] = ratio
                degenerate[key] = flag
            if report.violations:
                violations.append({"theorems": report.violations, **report.reproduction()})
    except HHError as exc:
        return TrialOutcome(trial, gen.family, gen.label, x, {}, {}, {}, [], 0, str(exc))
    return TrialOutcome(trial, gen.family, gen.label, x, slacks, ratios, degenerate, violations, uncertified)


def summarize(seed: int, outcomes: Iterable[TrialOutcome]) -> FuzzSummary:
    """Order-insensitive aggregation: outcomes are sorted by trial index first."""
    outcomes = sorted(outcomes, key=lambda o: o.trial)
    min_slack = {t: math.inf for t in THEOREMS}
    histogram = {t: [0] * HISTOGRAM_BUCKETS for t in NEW_THEOREMS}
    degenerate = {t: 0 for t in NEW_THEOREMS}
    families: dict[str, int] = {}
    summary = FuzzSummary(seed, len(outcomes), 0, 0, 0, min_slack, histogram, degenerate, families)
    for o in outcomes:
        if o.error is not None:
            summary.errors += 1
            summary.error_cases.append({"trial": o.trial, "seed": seed, "error": o.error})
            continue
        families[o.family] = families.get(o.family, 0) + 1
        for t, s in o.slacks.items():
            min_slack[t] = min(min_slack[t], s)
        for key, ratio in o.ratios.items():
            t = key.split("@")[0]
            if o.degenerate[key]:
                degenerate[t] += 1
            else:
                histogram[t][bucket_of(ratio)] += 1
        summary.violations += len(o.violations)
        summary.violation_cases.extend(o.violations)
        if o.uncertified:
            summary.hypothesis_failures += 1
    return summary


def fuzz(
    config: GeneratorConfig,
    trials: int = 1000,
    params_grid: Sequence[ExponentParams] = DEFAULT_PARAMS_GRID,
    tol: float = QUAD_TOL,
    *,
    slack_tol: float = SLACK_TOL,
) -> FuzzSummary:
    """Generate ``trials`` admissible functions and verify every bound on each.

    Trial ``i`` draws its function and its x from a stream keyed by
    ``(seed, i)``, so results do not depend on evaluation order.
    Generator and domain errors are counted, not raised.
    """
    if trials < 1:
        raise ParameterError("fuzz needs trials >= 1")
    if not params_grid:
        raise ParameterError("params grid is empty")
    outcomes = [run_trial(config, i, params_grid, tol, slack_tol) for i in range(trials)]
    return summarize(config.seed, outcomes)
