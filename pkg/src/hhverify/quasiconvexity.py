"""Sampling certificates for quasi-convexity and a grid shape classifier.

A function g is quasi-convex on [a, b] when
``g(lam*x + (1-lam)*y) <= max(g(x), g(y))`` for all x, y in [a, b] and
lam in [0, 1]. For continuous g this is the same as g being monotone or
valley-shaped, which :func:`classify_shape` checks independently.

Tolerances are absolute for values of magnitude up to 1 and relative above
that: a sample violates the definition when its excess exceeds
``tol * max(1, |max(g(x), g(y))|)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np
from scipy.stats import qmc

from .errors import ParameterError
from .numerics import Interval, as_vectorized

DEFAULT_TOL = 1e-9
DEFAULT_SAMPLES = 1024
DEFAULT_PAIR_GRID = 33


@dataclass(frozen=True)
class QuasiConvexityVerdict:
    """Outcome of :func:`check_quasiconvex`.

    ``holds=False`` comes with a counterexample ``(x, y, lam)`` that violates
    the definition when evaluated directly. ``holds=True`` is sampling
    evidence only.
    """

    holds: bool
    margin: float
    counterexample: Optional[tuple[float, float, float]] = None
    samples: int = 0
    tol: float = DEFAULT_TOL
    method: str = "sampling"

    def to_dict(self) -> dict[str, Any]:
        return {
            "holds": self.holds,
            "margin": self.margin,
            "counterexample": list(self.counterexample) if self.counterexample else None,
            "samples": self.samples,
            "tol": self.tol,
            "method": self.method,
        }


@dataclass(frozen=True)
class ShapeClass:
    variant: str  # nondecreasing | nonincreasing | valley | other
    pivot_index: Optional[int] = None
    pivot: Optional[float] = None

    @property
    def quasiconvex_shape(self) -> bool:
        return self.variant != "other"


def _scaled(tol: float, ref: Any) -> Any:
    return tol * np.maximum(1.0, np.abs(ref))


def sample_triples(iv: Interval, samples: int, pair_grid: int = DEFAULT_PAIR_GRID) -> np.ndarray:
    """Deterministic (x, y, lam) test triples, shape (N, 3).

    All midpoints of pairs from a ``pair_grid``-point grid come first,
    followed by ``samples`` points of an unscrambled Halton sequence.
    """
    g = iv.grid(pair_grid)
    i, j = np.triu_indices(pair_grid, k=1)
    pairs = np.column_stack([g[i], g[j], np.full(i.size, 0.5)])
    u = qmc.Halton(d=3, scramble=False).random(samples)
    halton = np.column_stack([iv.a + iv.length * u[:, 0], iv.a + iv.length * u[:, 1], u[:, 2]])
    return np.vstack([pairs, halton])


def _excess(G: Callable[[np.ndarray], np.ndarray], triples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x, y, lam = triples[:, 0], triples[:, 1], triples[:, 2]
    # Rounding can push the combination a hair outside [min, max]; clamp it back.
    z = np.clip(lam * x + (1.0 - lam) * y, np.minimum(x, y), np.maximum(x, y))
    n = len(x)
    vals = G(np.concatenate([x, y, z]))
    gx, gy, gz = vals[:n], vals[n : 2 * n], vals[2 * n :]
    top = np.maximum(gx, gy)
    return gz - top, top


def check_quasiconvex(
    g: Callable[..., Any],
    iv: Interval,
    samples: int = DEFAULT_SAMPLES,
    tol: float = DEFAULT_TOL,
    *,
    vectorized: bool = True,
    pair_grid: int = DEFAULT_PAIR_GRID,
) -> QuasiConvexityVerdict:
    """Test the quasi-convexity definition for ``g`` on deterministic samples.

    Returns the worst excess ``g(z) - max(g(x), g(y))`` seen; ``holds`` is
    false as soon as one triple exceeds the (scaled) tolerance, and the
    counterexample is the triple with the largest scaled excess, earliest
    first on ties.
    """
    if samples < 8:
        raise ParameterError("check_quasiconvex needs samples >= 8")
    if tol < 0:
        raise ParameterError("tol must be non-negative")
    G = as_vectorized(g, vectorized)
    triples = sample_triples(iv, samples, pair_grid)
    excess, top = _excess(G, triples)
    if np.any(np.isnan(excess)):
        k = int(np.flatnonzero(np.isnan(excess))[0])
        return QuasiConvexityVerdict(False, float("nan"), tuple(map(float, triples[k])), len(triples), tol)
    score = excess / _scaled(1.0, top)
    worst = int(np.argmax(score))
    margin = float(np.max(excess))
    if excess[worst] > _scaled(tol, top[worst]):
        return QuasiConvexityVerdict(False, margin, tuple(map(float, triples[worst])), len(triples), tol)
    return QuasiConvexityVerdict(True, margin, None, len(triples), tol)


def violation_of(g: Callable[[float], float], triple: tuple[float, float, float]) -> float:
    """Direct scalar re-evaluation of a triple's excess over max(g(x), g(y))."""
    x, y, lam = triple
    z = min(max(lam * x + (1.0 - lam) * y, min(x, y)), max(x, y))
    return float(g(z)) - max(float(g(x)), float(g(y)))


def classify_shape(
    g: Callable[..., Any],
    iv: Interval,
    gridsize: int = 1024,
    tol: float = DEFAULT_TOL,
    *,
    vectorized: bool = True,
) -> ShapeClass:
    """Classify the grid restriction of ``g`` by the signs of its first differences.

    A difference counts as a rise or a fall only when it exceeds the scaled
    tolerance; flat steps are neutral. Exactly one fall-to-rise change gives
    ``valley``, with the pivot at the lowest grid value.
    """
    if gridsize < 16:
        raise ParameterError("classify_shape needs gridsize >= 16")
    xs = iv.grid(gridsize)
    ys = as_vectorized(g, vectorized)(xs)
    d = np.diff(ys)
    thresh = _scaled(tol, np.maximum(np.abs(ys[:-1]), np.abs(ys[1:])))
    signs = np.where(d > thresh, 1, np.where(d < -thresh, -1, 0))
    if not np.any(signs < 0):
        return ShapeClass("nondecreasing")
    if not np.any(signs > 0):
        return ShapeClass("nonincreasing")
    nz = signs[signs != 0]
    changes = np.flatnonzero(nz[1:] != nz[:-1])
    if changes.size == 1 and nz[0] < 0:
        k = int(np.argmin(ys))
        return ShapeClass("valley", k, float(xs[k]))
    return ShapeClass("other")


def power_of_abs(df: Callable[..., Any], r: float) -> Callable[[np.ndarray], np.ndarray]:
    """``t -> |df(t)|**r``, the predicate argument of the bound hypotheses."""
    def g(t: Any) -> Any:
        return np.abs(df(t)) ** r
    return g

