"""Curvature k_X(T) of metric triples.

For a triple T in a metric space X, ``g_X(T)`` is the least total distance
from a point of X to the three points of T, and ``k_X(T)`` is the curvature
k <= Lambda(sides) at which the model-surface value S(sides, k) equals it.
Because ``k -> S(sides, k)`` increases strictly from the semiperimeter (as
k -> -inf) to ``a + b`` (at k = Lambda), the inversion is a one-dimensional
bracketed root search.
"""

from __future__ import annotations

import logging
import math
from typing import Iterable, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed, effective_n_jobs
from scipy.optimize import brentq

from .config import DEFAULT_CONFIG, SolverConfig
from .exceptions import InvalidInputError, MetricTriplesError
from .metric_data import FiniteMetricSpace
from .model_surface import AmbientDescriptor, SurfacePoint, minimize_distance_sum
from .records import (CAPPED, DEGENERATE, ERROR, FINITE, NEG_INFINITY, CurvatureReport,
                      MetricTriple)
from .sides import NEG_INF, TripleSides
from .steiner import lambda_critical, s_value

log = logging.getLogger(__name__)

# the lower bracket search gives up here and reports -inf
K_FLOOR = -1e12
# S flattens out quadratically as k -> Lambda, so capping is left to rounding
# noise only; a wider band would swallow genuine curvatures just below Lambda
CAP_RTOL = 8 * np.finfo(float).eps

__all__ = [
    "MetricTriple", "CurvatureReport", "g_of_triple", "continuum_g", "continuum_g_batch",
    "invert_curvature", "report_from_g", "curvature_report",
]


def g_of_triple(space: FiniteMetricSpace, triple: MetricTriple) -> float:
    """Exact minimum over the points of ``space`` of the distance sum to the triple."""
    d = space.d
    return float(np.min(d[triple.i] + d[triple.j] + d[triple.l]))


def continuum_g(points: Sequence[SurfacePoint], ambient: Optional[AmbientDescriptor] = None) -> float:
    """Minimum of the distance sum over the whole model surface carrying the points."""
    if len(points) != 3:
        raise InvalidInputError(f"need exactly three points, got {len(points)}")
    ambient = ambient or points[0].ambient
    for p in points:
        if p.ambient != ambient:
            raise InvalidInputError(f"point on {p.ambient} does not live on {ambient}")
    anchors = np.stack([p.coords for p in points])
    return float(minimize_distance_sum(anchors, ambient).value[0])


def continuum_g_batch(space: FiniteMetricSpace, triples: Sequence[MetricTriple]) -> np.ndarray:
    """``continuum_g`` for many triples of a point-cloud space in one vectorised pass."""
    if space.ambient is None:
        raise InvalidInputError("continuum mode needs a space with an ambient and coordinates")
    if not triples:
        return np.empty(0)
    idx = np.array([t.indices for t in triples])
    return minimize_distance_sum(space.points[idx], space.ambient).value


def invert_curvature(sides, g: float, config: SolverConfig = DEFAULT_CONFIG, *,
                     lam: Optional[float] = None):
    """Solve ``S(sides, k) = g`` for ``k`` in ``[-inf, Lambda(sides)]``.

    Returns ``(k, status)``.  A ``g`` equal to ``a + b`` up to rounding maps
    to ``(Lambda, "capped_at_lambda")``; one within ``tol_invert`` (relative)
    of the semiperimeter to ``(-inf, "neg_infinity")``.  Degenerate sides give ``(-inf,
    "degenerate")`` because S does not depend on k there.

    Raises
    ------
    InvalidInputError
        If ``g`` lies outside ``[semiperimeter, a + b]`` beyond the tolerance.
    """
    sides = TripleSides.coerce(sides)
    g = float(g)
    tol = config.tol_invert
    lo_bound, hi_bound = sides.semiperimeter, sides.a + sides.b
    if not (lo_bound * (1 - tol) <= g <= hi_bound * (1 + tol)):
        raise InvalidInputError(
            f"g = {g!r} outside [{lo_bound!r}, {hi_bound!r}] for sides {sides.as_tuple()}: "
            "the distances are not metric-consistent"
        )
    if sides.degenerate:
        return NEG_INF, DEGENERATE
    if lam is None:
        lam = lambda_critical(sides, config)
    if lam == NEG_INF:
        return NEG_INF, DEGENERATE
    if g >= hi_bound * (1 - CAP_RTOL):
        return lam, CAPPED
    if g <= lo_bound * (1 + tol):
        return NEG_INF, NEG_INFINITY

    def f(k):
        return s_value(sides, k, config, lam=lam).value - g

    hi = lam
    lo = min(lam, 0.0) - 1.0
    while f(lo) >= 0.0:
        hi, lo = lo, 2.0 * lo
        if lo < K_FLOOR:
            log.warning("no lower bracket above k=%g for g=%r, sides %s; reporting -inf",
                        K_FLOOR, g, sides.as_tuple())
            return NEG_INF, NEG_INFINITY
    k = brentq(f, lo, hi, xtol=tol, rtol=max(tol, 4.5e-16), maxiter=200)
    return float(k), FINITE


def report_from_g(triple: MetricTriple, g: float, config: SolverConfig = DEFAULT_CONFIG) -> CurvatureReport:
    """Build one report from a known ``g``; failures become an error row."""
    lam = math.nan
    try:
        lam = lambda_critical(triple.sides, config)
        k, status = invert_curvature(triple.sides, g, config, lam=lam)
        return CurvatureReport(triple, float(g), lam, k, status)
    except MetricTriplesError as exc:
        return CurvatureReport(triple, float(g), lam, math.nan, ERROR, str(exc))


def _report_chunk(triples, gs, config):
    return [report_from_g(t, g, config) for t, g in zip(triples, gs)]


def curvature_report(space: FiniteMetricSpace, triples: Iterable[MetricTriple], mode: str = "discrete",
                     config: SolverConfig = DEFAULT_CONFIG, n_jobs: int = 1):
    """Compute ``g``, Lambda and ``k_X`` for every triple, in input order.

    ``mode="discrete"`` minimises over the points of the space;
    ``mode="continuum"`` over the whole model surface the points lie on.
    Work is split into contiguous chunks across ``n_jobs`` workers and
    merged back in order, so output does not depend on the worker count.
    """
    triples = list(triples)
    if mode == "discrete":
        gs = [g_of_triple(space, t) for t in triples]
    elif mode == "continuum":
        try:
            gs = list(continuum_g_batch(space, triples))
        except InvalidInputError:
            raise
        except MetricTriplesError as exc:
            return [CurvatureReport(t, math.nan, math.nan, math.nan, ERROR, str(exc)) for t in triples]
    else:
        raise InvalidInputError(f"mode must be 'discrete' or 'continuum', got {mode!r}")
    if n_jobs == 1 or len(triples) < 64:
        return _report_chunk(triples, gs, config)
    n_chunks = max(1, min(len(triples), 4 * effective_n_jobs(n_jobs)))
    bounds = np.linspace(0, len(triples), n_chunks + 1).astype(int)
    parts = Parallel(n_jobs=n_jobs)(
        delayed(_report_chunk)(triples[s:e], gs[s:e], config) for s, e in zip(bounds[:-1], bounds[1:]) if e > s
    )
    return [r for part in parts for r in part]
