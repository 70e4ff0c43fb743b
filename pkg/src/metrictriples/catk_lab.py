"""Experiments around the bound k_X(T) <= k for triples in CAT(k) spaces.

Contents: the side-length gate ``h_k``, the comparison configuration used
to compare a triple with its model triangle and the function ``f(sigma)``
built on it, numeric checks of the supporting inequalities, synthetic
CAT(k) space generators, and the end-to-end bound verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.optimize import bisect

from .config import DEFAULT_CONFIG, SolverConfig
from .exceptions import DomainError, InvalidInputError, SolverError
from .metric_data import FiniteMetricSpace, enumerate_triples, format_float, write_rows
from .model_surface import (AmbientDescriptor, SurfacePoint, TriangleRealization, _polar, diameter,
                            geodesic_point, orientation, realize_triangle, surface_distance,
                            triangle_angles)
from .records import DEGENERATE, ERROR, NEG_INFINITY, CurvatureReport
from .sides import TripleSides, check_curvature
from .steiner import lambda_critical, s_value
from .triple_curvature import curvature_report, report_from_g

# constant of the hyperbolic gate, as used by the bound
H_NEGATIVE = 1.3877
VIOLATION_TOL = 1e-4
VIOLATION_HEADER = ("i", "j", "l", "a", "b", "c", "g", "kX", "k", "margin")
FAMILIES = ("sphere_sample", "hyperbolic_sample", "euclidean_convex", "metric_tree", "unit_discrete")
ANGLE_TOL = 1e-8
ON_GEODESIC_TOL = 1e-9


# ---------------------------------------------------------------------------
# the gate and its constant


def h_k(k: float) -> float:
    """Largest side length admitted by the bound at curvature ``k``.

    >>> h_k(1.0) == math.pi / 2
    True
    >>> h_k(-4.0)
    0.69385
    """
    k = check_curvature(k)
    if k > 0:
        return math.pi / (2.0 * math.sqrt(k))
    if k == 0:
        return math.inf
    return H_NEGATIVE / math.sqrt(-k)


def _gate_cubic(t):
    return 315.0 - 168.0 * t + 10.0 * t * t - 4.0 * t ** 3


def derive_h_constant(tol: float = 1e-12):
    """Re-derive the hyperbolic gate constant.

    Returns ``(t_star, h)`` where ``t_star`` is the root in (1.5, 2) of
    ``315 - 168 t + 10 t^2 - 4 t^3`` and ``h = sqrt(t_star)``.
    """
    t_star = bisect(_gate_cubic, 1.5, 2.0, xtol=tol)
    return t_star, math.sqrt(t_star)


def _ratio(regime, a, b, x):
    if regime == "hyperbolic_sinh":
        return np.sinh(a * x) / np.sinh(b * x)
    return np.sin(a * x) / np.sin(b * x)


def check_ratio_convexity(a: float, b: float, regime: str = "hyperbolic_sinh", grid: int = 200,
                          step: float = 1e-4) -> float:
    """Extremal second difference of ``sn(a x) / sn(b x)`` over ``x in (0, 1]``.

    For ``regime="hyperbolic_sinh"`` (ratio of sinh) the maximum is returned,
    which should be <= 0 (concave) for ``0 < a <= b <= 1.3877``.  For
    ``regime="spherical_sin"`` the minimum, which should be >= 0 (convex).
    Differences are central with spacing ``step``, divided by ``step**2``.
    """
    a, b = float(a), float(b)
    if not 0 < a <= b:
        raise InvalidInputError(f"need 0 < a <= b, got a={a!r}, b={b!r}")
    if regime not in ("hyperbolic_sinh", "spherical_sin"):
        raise InvalidInputError(f"unknown regime {regime!r}")
    if regime == "spherical_sin" and b >= math.pi:
        raise InvalidInputError(f"spherical ratio needs b < pi, got {b!r}")
    # grid points keep x - step > 0 and x + step within the ratio's domain
    x = np.linspace(step, 1.0, grid + 1)[1:]
    d2 = (_ratio(regime, a, b, x + step) - 2.0 * _ratio(regime, a, b, x) + _ratio(regime, a, b, x - step)) / step ** 2
    return float(np.max(d2) if regime == "hyperbolic_sinh" else np.min(d2))


# ---------------------------------------------------------------------------
# comparison configuration


@dataclass(frozen=True, eq=False)
class ComparisonConfiguration:
    """Model triangle A*B*C* with its Fermat point O* and the foot D* on B*C*.

    ``s = |A*O*| / |A*D*|`` and ``t = |B*D*| / |B*C*|``.  ``alpha`` and
    ``gamma`` are the angles of triangle B*O*D* at O* and D*.  Lengths
    ``ao, od, ad, bd, cd`` are kept for the sigma-family.
    """

    sides: TripleSides
    k: float
    realization: TriangleRealization
    fermat: SurfacePoint
    D: SurfacePoint
    s: float
    t: float
    alpha: float
    gamma: float
    legs: tuple
    ao: float
    od: float
    ad: float
    bd: float
    cd: float

    @property
    def sigma_min(self) -> float:
        """Smallest sigma for which the triangles A'B'D' and A'C'D' exist."""
        a, b, c = self.sides.as_tuple()
        return max(abs(c - self.bd), abs(b - self.cd)) / self.ad


def comparison_config(sides, k: float, config: SolverConfig = DEFAULT_CONFIG) -> ComparisonConfiguration:
    """Build the comparison configuration of ``sides`` in M_k.

    A* is the vertex opposite the shortest side ``a = |B*C*|``.  O* is placed
    from the Fermat legs (the distance to A* and the angle at A* of triangle
    A*O*B*); D* is found by bisection along B*C* on the side of the line
    A*O* it falls.

    Raises
    ------
    DomainError
        If the Steiner minimum sits at a vertex (``k >= Lambda``), a side
        exceeds ``h_k(k)``, or the perimeter is too large for M_k.
    """
    sides = TripleSides.coerce(sides)
    k = check_curvature(k)
    a, b, c = sides.as_tuple()
    if sides.degenerate or not k < lambda_critical(sides, config):
        raise DomainError(f"sides {sides.as_tuple()} have a vertex Steiner minimum at k={k!r}")
    if c > h_k(k) * (1 + 1e-12):
        raise DomainError(f"side {c!r} exceeds h_k({k!r}) = {h_k(k)!r}")
    if sides.perimeter >= 2.0 * diameter(k):
        raise DomainError(f"perimeter {sides.perimeter!r} too large for k={k!r}")

    ev = s_value(sides, k, config)
    x, y, z = ev.legs
    tri = realize_triangle(sides, k)
    amb = tri.ambient
    theta = triangle_angles((x, y, c), k)[1]
    O = SurfacePoint(amb, _polar(amb, x, theta))
    for P, want, name in ((tri.B, y, "B"), (tri.C, z, "C")):
        got = surface_distance(O, P)
        if abs(got - want) > 1e-9 * max(1.0, want):
            raise SolverError(f"Fermat point misplaced: |O{name}| = {got!r}, leg {want!r}")

    def side_of(u):
        return orientation(tri.A, O, geodesic_point(tri.B, tri.C, u))

    u = bisect(side_of, 0.0, 1.0, xtol=1e-13)
    D = geodesic_point(tri.B, tri.C, u)
    ad = surface_distance(tri.A, D)
    od = surface_distance(O, D)
    bd = surface_distance(tri.B, D)
    cd = surface_distance(tri.C, D)
    if abs(x + od - ad) > ON_GEODESIC_TOL * max(1.0, ad):
        raise SolverError(f"O* is off the geodesic A*D*: |AO|+|OD|-|AD| = {x + od - ad!r}")
    gamma, _, alpha = triangle_angles((y, od, bd), k)
    cfg = ComparisonConfiguration(
        sides=sides, k=k, realization=tri, fermat=O, D=D, s=x / ad, t=bd / a,
        alpha=alpha, gamma=gamma, legs=(x, y, z), ao=x, od=od, ad=ad, bd=bd, cd=cd,
    )
    worst = max(abs(t - 2.0 * math.pi / 3.0) for t in fermat_angles(cfg))
    if worst > ANGLE_TOL:
        raise SolverError(f"Fermat angles miss 2 pi / 3 by {worst:.3e}")
    return cfg


def fermat_angles(cfg: ComparisonConfiguration):
    """Angles AOB, BOC, COA at the Fermat point (each 2 pi / 3 ideally)."""
    a, b, c = cfg.sides.as_tuple()
    x, y, z = cfg.legs
    k = cfg.k
    return (triangle_angles((x, y, c), k)[2], triangle_angles((y, z, a), k)[2],
            triangle_angles((z, x, b), k)[2])


def _regime(k):
    return 0 if k == 0 else (1 if k > 0 else -1)


def _sn_ratio(regime, p, q, sigma):
    """``sn(sigma p) / sn(sigma q)`` with its ``sigma -> 0`` limit ``p / q``."""
    if sigma == 0.0 or regime == 0:
        return p / q
    if regime > 0:
        return math.sin(sigma * p) / math.sin(sigma * q)
    return math.sinh(sigma * p) / math.sinh(sigma * q)


def _unit_ob(regime, ab, bd, ao, od, sigma):
    ad = ao + od
    if regime == 0:
        sq = (od * ab * ab + ao * bd * bd) / ad - sigma * sigma * ao * od
        return math.sqrt(max(sq, 0.0))
    w_a = _sn_ratio(regime, od, ad, sigma)
    w_d = _sn_ratio(regime, ao, ad, sigma)
    if regime > 0:
        p = math.cos(ab) * w_a + math.cos(bd) * w_d
        return math.acos(min(1.0, max(-1.0, p)))
    p = math.cosh(ab) * w_a + math.cosh(bd) * w_d
    return math.acosh(max(1.0, p))


def _check_sigma(sigma):
    sigma = float(sigma)
    if not 0.0 <= sigma <= 1.0:
        raise InvalidInputError(f"sigma must lie in [0, 1], got {sigma!r}")
    return sigma


def ob_length(cfg: ComparisonConfiguration, sigma: float, vertex: str = "B") -> float:
    """``|O'B'|`` (or ``|O'C'|`` with ``vertex="C"``) in the sigma-configuration.

    Uses the law-of-cosines expression in terms of the starred lengths,
    which extends continuously to ``sigma = 0``.
    """
    sigma = _check_sigma(sigma)
    a, b, c = cfg.sides.as_tuple()
    side, foot = (c, cfg.bd) if vertex == "B" else (b, cfg.cd)
    regime = _regime(cfg.k)
    r = math.sqrt(abs(cfg.k)) if regime else 1.0
    return _unit_ob(regime, side * r, foot * r, cfg.ao * r, cfg.od * r, sigma) / r


def f_sigma(cfg: ComparisonConfiguration, sigma: float) -> float:
    """``|A'O'| + |B'O'| + |C'O'|`` for the configuration shrunk along A'D' by ``sigma``."""
    sigma = _check_sigma(sigma)
    return sigma * cfg.ao + ob_length(cfg, sigma, "B") + ob_length(cfg, sigma, "C")


def f_sigma_limit(cfg: ComparisonConfiguration) -> float:
    """Closed form of ``f(0)``: the two Stewart-type limits of ``|B'O'|`` and ``|C'O'|``."""
    a, b, c = cfg.sides.as_tuple()
    s = cfg.s
    regime = _regime(cfg.k)
    r = math.sqrt(abs(cfg.k)) if regime else 1.0
    out = 0.0
    for side, foot in ((c, cfg.bd), (b, cfg.cd)):
        if regime == 0:
            out += math.sqrt((1 - s) * side * side + s * foot * foot)
        elif regime > 0:
            out += math.acos((1 - s) * math.cos(side * r) + s * math.cos(foot * r)) / r
        else:
            out += math.acosh((1 - s) * math.cosh(side * r) + s * math.cosh(foot * r)) / r
    return out


def ob_length_geometric(cfg: ComparisonConfiguration, sigma: float, vertex: str = "B") -> float:
    """``|O'B'|`` by explicitly building triangle A'B'D' in M_k.

    Only defined for ``sigma >= cfg.sigma_min``; an independent check on
    :func:`ob_length`.
    """
    sigma = _check_sigma(sigma)
    a, b, c = cfg.sides.as_tuple()
    side, foot = (c, cfg.bd) if vertex == "B" else (b, cfg.cd)
    ad = sigma * cfg.ad
    angle_at_a = triangle_angles((foot, side, ad), cfg.k)[0]
    amb = AmbientDescriptor.for_curvature(cfg.k)
    A = SurfacePoint(amb, _polar(amb, 0.0, 0.0))
    D = SurfacePoint(amb, _polar(amb, ad, 0.0))
    B = SurfacePoint(amb, _polar(amb, side, angle_at_a))
    O = geodesic_point(A, D, cfg.s)
    return surface_distance(O, B)


def ob_derivative(cfg: ComparisonConfiguration, sigma: float, vertex: str = "B") -> float:
    """Analytic ``d|O'B'| / d sigma`` through the angles of triangle B'O'D'.

    ``-|O*A*| cos(alpha) - |A*D*| sn(sigma |A*O*|) / sn(sigma |A*D*|) sin(alpha) cot(gamma)``
    with ``alpha`` at O' and ``gamma`` at D'; requires ``sigma > 0``.
    """
    sigma = _check_sigma(sigma)
    if sigma == 0.0:
        raise InvalidInputError("the angle form of the derivative needs sigma > 0")
    a, b, c = cfg.sides.as_tuple()
    foot = cfg.bd if vertex == "B" else cfg.cd
    ob = ob_length(cfg, sigma, vertex)
    od = sigma * cfg.od
    gamma, _, alpha = triangle_angles((ob, od, foot), cfg.k)
    regime = _regime(cfg.k)
    r = math.sqrt(abs(cfg.k)) if regime else 1.0
    ratio = _sn_ratio(regime, cfg.ao * r, cfg.ad * r, sigma)
    return -cfg.ao * math.cos(alpha) - cfg.ad * ratio * math.sin(alpha) / math.tan(gamma)


def cotangent_residual(ob: float, od: float, bd: float) -> float:
    """Residual of the cotangent identity for a unit-sphere triangle B'O'D'.

    ``cot|O'B'| - (cot|O'D'| cos(alpha) + cot(gamma) sin(alpha) / sin|O'D'|)``
    where ``alpha`` is the angle at O' and ``gamma`` the angle at D'.
    """
    gamma, _, alpha = triangle_angles((ob, od, bd), 1.0)
    rhs = math.cos(alpha) / math.tan(od) + math.sin(alpha) / (math.tan(gamma) * math.sin(od))
    return 1.0 / math.tan(ob) - rhs


def random_gated_sides(rng: np.random.Generator, k: float, config: SolverConfig = DEFAULT_CONFIG,
                       max_tries: int = 10000) -> TripleSides:
    """Random sides within ``h_k(k)`` (or 3 when unbounded) with an interior Fermat point at ``k``."""
    cap = min(h_k(k), 3.0)
    for _ in range(max_tries):
        v = rng.uniform(0.05, 1.0, 3) * cap
        try:
            sides = TripleSides(*v)
        except InvalidInputError:
            continue
        if sides.degenerate or sides.perimeter >= 2.0 * diameter(k):
            continue
        if k < lambda_critical(sides, config):
            return sides
    raise SolverError(f"no admissible sides found for k={k!r} in {max_tries} tries")


# ---------------------------------------------------------------------------
# generators and the bound


@dataclass(frozen=True)
class CatExperimentSpec:
    """One seeded bound-verification run.

    ``mode="continuum"`` minimises over the model surface (or uses the tree
    median for ``metric_tree``); ``mode="discrete"`` only over the sample,
    which can only overestimate k_X.
    """

    family: str
    k: float
    n: int = 40
    seed: int = 0
    mode: str = "continuum"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"family must be one of {FAMILIES}, got {self.family!r}")
        k = check_curvature(self.k)
        expect = {"sphere_sample": k > 0, "hyperbolic_sample": k < 0, "euclidean_convex": k == 0,
                  "metric_tree": k <= 0, "unit_discrete": True}[self.family]
        if not expect:
            raise InvalidInputError(f"k={k!r} is inconsistent with family {self.family!r}")
        if self.mode not in ("discrete", "continuum"):
            raise InvalidInputError(f"mode must be 'discrete' or 'continuum', got {self.mode!r}")
        if self.mode == "continuum" and self.family == "unit_discrete":
            raise InvalidInputError("unit_discrete has no continuum; use mode='discrete'")
        if self.n < 3:
            raise InvalidInputError(f"need at least 3 points, got n={self.n}")


def _ball_sample(rng, amb, radius, n):
    # area-uniform radius in a geodesic disk; exact for the plane, close enough elsewhere
    r = radius * np.sqrt(rng.uniform(size=n))
    th = rng.uniform(0.0, 2.0 * math.pi, size=n)
    return np.array([_polar(amb, float(ri), float(ti)) for ri, ti in zip(r, th)])


def random_tree_metric(n: int, rng: np.random.Generator, low: float = 0.1, high: float = 1.0) -> np.ndarray:
    """Path metric of a random rooted tree on ``n`` vertices with edge lengths in [low, high]."""
    d = np.zeros((n, n))
    for v in range(1, n):
        parent = int(rng.integers(0, v))
        w = rng.uniform(low, high)
        d[v, :v] = d[parent, :v] + w
        d[:v, v] = d[v, :v]
    return d


def generate_space(spec: CatExperimentSpec) -> FiniteMetricSpace:
    """The seeded sample space described by ``spec``."""
    rng = np.random.default_rng(spec.seed)
    if spec.family in ("sphere_sample", "hyperbolic_sample"):
        amb = AmbientDescriptor.for_curvature(spec.k)
        return FiniteMetricSpace.from_points(_ball_sample(rng, amb, h_k(spec.k) / 2.0, spec.n), amb)
    if spec.family == "euclidean_convex":
        amb = AmbientDescriptor.euclidean(2)
        return FiniteMetricSpace.from_points(_ball_sample(rng, amb, 1.0, spec.n), amb)
    if spec.family == "metric_tree":
        return FiniteMetricSpace(random_tree_metric(spec.n, rng))
    d = np.ones((spec.n, spec.n))
    np.fill_diagonal(d, 0.0)
    return FiniteMetricSpace(d)


@dataclass
class ViolationReport:
    """Outcome of :func:`verify_cat_bound`.

    ``worst_margin`` is the largest ``k_X - k`` over tested triples (``-inf``
    when every k_X is ``-inf``); ``violations`` lists those above the
    tolerance.
    """

    spec: CatExperimentSpec
    tested: int
    skipped: int
    worst_margin: float
    violations: List[CurvatureReport] = field(default_factory=list)
    reports: List[CurvatureReport] = field(default_factory=list)
    errors: int = 0

    @property
    def count(self) -> int:
        return len(self.violations)

    def summary(self) -> str:
        label = " (upper estimate)" if self.spec.mode == "discrete" and self.spec.family != "unit_discrete" else ""
        return (f"{self.spec.family} k={format_float(float(self.spec.k))} n={self.spec.n} seed={self.spec.seed} "
                f"mode={self.spec.mode}{label}: tested={self.tested} skipped={self.skipped} "
                f"errors={self.errors} violations={self.count} worst_margin={format_float(self.worst_margin)}")


def verify_cat_bound(spec: CatExperimentSpec, config: SolverConfig = DEFAULT_CONFIG, n_jobs: int = 1,
                     tol: float = VIOLATION_TOL) -> ViolationReport:
    """Check ``k_X(T) <= k`` over every gated, non-degenerate triple of the generated space.

    ``unit_discrete`` is not a CAT(k) space; it is run ungated as the
    equality case ``k_X = Lambda(1, 1, 1)``.
    """
    space = generate_space(spec)
    gate = math.inf if spec.family == "unit_discrete" else h_k(spec.k)
    triples, skipped = [], 0
    for tr in enumerate_triples(space, "all"):
        if tr.sides.c > gate or tr.sides.degenerate:
            skipped += 1
        else:
            triples.append(tr)
    if spec.family == "metric_tree" and spec.mode == "continuum":
        # the tree median attains the semiperimeter lower bound
        reports = [report_from_g(t, t.sides.semiperimeter, config) for t in triples]
    else:
        reports = curvature_report(space, triples, spec.mode, config, n_jobs=n_jobs)
    k = float(spec.k)
    errors = sum(1 for r in reports if r.status == ERROR)
    margins = [r.k_value - k for r in reports if r.status not in (ERROR, DEGENERATE)]
    worst = max(margins) if margins else -math.inf
    violations = [r for r in reports if r.status not in (ERROR, DEGENERATE, NEG_INFINITY)
                  and r.k_value > k + tol]
    return ViolationReport(spec, len(reports), skipped, worst, violations, reports, errors)


def violation_rows(report: ViolationReport):
    k = float(report.spec.k)
    for r in report.violations:
        t = r.triple
        yield (t.i, t.j, t.l, *(format_float(v) for v in (*t.sides.as_tuple(), r.g, r.k_value, k, r.k_value - k)))


def write_violations(report: ViolationReport, sink) -> None:
    """Violation rows as CSV with header ``i,j,l,a,b,c,g,kX,k,margin``."""
    write_rows(VIOLATION_HEADER, violation_rows(report), sink)
