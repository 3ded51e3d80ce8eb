"""Adaptive quadrature, bracketed golden-section minimization, grid scans."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .errors import ParameterError, QuadratureError

MAX_EVALUATIONS = 1_000_000
MIN_GRID = 1025
INITIAL_PANELS = 16
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Interval:
    """Closed interval [a, b] with a < b, both finite."""

    a: float
    b: float

    def __post_init__(self) -> None:
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ParameterError("interval endpoints must be finite")
        if not a < b:
            raise ParameterError("require a < b")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return (self.a + self.b) / 2.0

    def grid(self, n: int) -> np.ndarray:
        """``n`` equally spaced points including both endpoints."""
        xs = np.linspace(self.a, self.b, n)
        xs[-1] = self.b
        return xs

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.b


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class MinimizationResult:
    argmin: float
    min_value: float
    iterations: int


def as_vectorized(f: Callable[..., Any], vectorized: bool) -> Callable[[np.ndarray], np.ndarray]:
    """Wrap ``f`` so it maps a 1-d array of points to an array of values."""
    if vectorized:
        def call(xs: np.ndarray) -> np.ndarray:
            return np.broadcast_to(np.asarray(f(xs), dtype=float), xs.shape)
    else:
        def call(xs: np.ndarray) -> np.ndarray:
            return np.fromiter((f(float(t)) for t in xs), dtype=float, count=len(xs))
    return call


def integrate_adaptive(
    f: Callable[..., Any],
    iv: Interval,
    tol: float = 1e-10,
    *,
    vectorized: bool = True,
    max_evaluations: int = MAX_EVALUATIONS,
    initial_panels: int = INITIAL_PANELS,
    breakpoints: Sequence[float] = (),
) -> QuadratureResult:
    """Integrate ``f`` over ``iv`` to absolute tolerance ``tol``.

    Globally adaptive bisection. Each panel carries five equally spaced
    samples; the single Simpson rule and the two-panel composite Simpson rule
    form the embedded pair, the panel's contribution is their Richardson
    (Boole) combination, and the undivided Simpson difference is its error
    estimate. A panel is accepted once its estimate is below its share of
    ``tol`` proportional to its width, so the total estimate never exceeds
    ``tol``. All panels still active at a given level are evaluated in one
    batched call of ``f``.

    Args:
        f: Integrand. With ``vectorized=True`` it must accept a numpy array.
        iv: Integration interval.
        tol: Absolute tolerance, > 0.
        vectorized: Whether ``f`` accepts arrays.
        max_evaluations: Evaluation budget.
        initial_panels: Number of equal panels the search starts from.
        breakpoints: Extra panel edges, e.g. known kinks or a graded mesh
            toward a point where a weight factor vanishes.

    Raises:
        QuadratureError: budget exhausted; ``deepest`` is the narrowest
            unresolved panel.
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    if initial_panels < 1:
        raise ParameterError("initial_panels must be >= 1")
    F = as_vectorized(f, vectorized)
    a, b = iv.a, iv.b
    width = b - a

    # Several starting panels, so that one 5-point stencil cannot step over
    # a kink or jump whose samples happen to fit a single smooth rule.
    edges = a + width * np.arange(initial_panels + 1) / initial_panels
    edges[-1] = b
    extra = np.asarray(breakpoints, dtype=float)
    edges = np.unique(np.concatenate([edges, extra[(extra > a) & (extra < b)]]))
    lo, hi = edges[:-1], edges[1:]
    pts = lo[:, None] + (hi - lo)[:, None] * np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    pts[:, -1] = hi
    vals = np.asarray(F(pts.ravel()), dtype=float).reshape(-1, 5)
    evaluations = pts.size

    accepted_values: list[float] = []
    accepted_errors: list[float] = []
    while True:
        w = hi - lo
        s1 = w / 6.0 * (vals[:, 0] + 4.0 * vals[:, 2] + vals[:, 4])
        s2 = w / 12.0 * (vals[:, 0] + 4.0 * vals[:, 1] + 2.0 * vals[:, 2] + 4.0 * vals[:, 3] + vals[:, 4])
        boole = s2 + (s2 - s1) / 15.0
        err = np.abs(s2 - s1)
        if not np.all(np.isfinite(boole)):
            raise QuadratureError("integrand is not finite on the interval")
        # Panels too narrow to bisect in floating point (a jump in f) are
        # accepted as is; their error is of order jump * ulp.
        unsplittable = w <= 4.0 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi))
        done = (err <= tol * (w / width)) | unsplittable
        accepted_values.extend(boole[done].tolist())
        accepted_errors.extend(err[done].tolist())
        if done.all():
            break

        lo, hi, vals = lo[~done], hi[~done], vals[~done]
        w = hi - lo
        mid = lo + w / 2.0
        if evaluations + 4 * len(lo) > max_evaluations:
            k = int(np.argmin(w))
            raise QuadratureError(
                f"no convergence within {max_evaluations} evaluations; "
                f"deepest unresolved interval [{lo[k]!r}, {hi[k]!r}]",
                deepest=(float(lo[k]), float(hi[k])),
            )
        new = np.concatenate([lo + w / 8.0, lo + 3.0 * w / 8.0, mid + w / 8.0, mid + 3.0 * w / 8.0])
        fn = F(new).reshape(4, -1)
        evaluations += new.size
        left = np.column_stack([vals[:, 0], fn[0], vals[:, 1], fn[1], vals[:, 2]])
        right = np.column_stack([vals[:, 2], fn[2], vals[:, 3], fn[3], vals[:, 4]])
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        vals = np.concatenate([left, right])

    error_estimate = math.fsum(accepted_errors)
    if error_estimate > tol:
        raise QuadratureError(
            f"error estimate {error_estimate!r} exceeds tol {tol!r} at floating-point resolution"
        )
    return QuadratureResult(
        value=math.fsum(accepted_values),
        error_estimate=error_estimate,
        evaluations=evaluations,
    )


def _golden(g: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float, int]:
    """Golden-section search on [lo, hi]; returns (x, g(x), iterations)."""
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = g(x1), g(x2)
    iterations = 0
    while hi - lo > tol and iterations < 200:
        iterations += 1
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = g(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = g(x2)
    if f1 <= f2:
        return x1, f1, iterations
    return x2, f2, iterations


def minimize_scalar(
    g: Callable[..., Any],
    iv: Interval,
    tol: float = 1e-10,
    *,
    vectorized: bool = False,
    grid: int = MIN_GRID,
    refine: int = 4,
) -> MinimizationResult:
    """Minimize ``g`` over ``iv``: grid bracketing, then golden-section refinement.

    The ``refine`` lowest local minima of a ``grid``-point scan are each
    refined inside their neighbouring grid cells. Ties go to the smaller x,
    so a constant ``g`` returns ``argmin == iv.a``.
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    if grid < 3:
        raise ParameterError("grid needs at least 3 points")
    xs = iv.grid(grid)
    ys = as_vectorized(g, vectorized)(xs)
    ys = np.where(np.isnan(ys), np.inf, ys)

    best = int(np.argmin(ys))
    best_x, best_y = float(xs[best]), float(ys[best])

    interior = (ys[1:-1] <= ys[:-2]) & (ys[1:-1] <= ys[2:])
    candidates = [0] if ys[0] <= ys[1] else []
    candidates += (np.flatnonzero(interior) + 1).tolist()
    if ys[-1] <= ys[-2]:
        candidates.append(grid - 1)
    candidates.sort(key=lambda i: (ys[i], i))

    def scalar(t: float) -> float:
        v = float(np.asarray(g(np.array([t])) if vectorized else g(t)).reshape(-1)[0])
        return math.inf if math.isnan(v) else v

    iterations = 0
    for i in candidates[:refine]:
        lo, hi = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, grid - 1)])
        x, y, it = _golden(scalar, lo, hi, tol)
        iterations += it
        # Only a strict improvement displaces the grid point: ties keep the smaller x.
        if y < best_y:
            best_x, best_y = x, y
    return MinimizationResult(argmin=best_x, min_value=best_y, iterations=iterations)


def grid_scan(
    g: Callable[..., Any], iv: Interval, n: int, *, vectorized: bool = False
) -> list[tuple[float, float]]:
    """``n`` equally spaced samples ``(x, g(x))`` in ascending x, endpoints included."""
    if n < 2:
        raise ParameterError("grid_scan needs n >= 2")
    xs = iv.grid(n)
    ys = as_vectorized(g, vectorized)(xs)
    return [(float(x), float(y)) for x, y in zip(xs, ys)]
