"""The comparison function S(a, b, c, k) and the critical curvature Lambda(a, b, c).

S is the least total distance from a point of the model surface M_k to the
vertices of a triangle with sides ``a <= b <= c``.  While the angle at C is
below 2pi/3 the minimum sits at the interior Fermat point O, where the three
legs x = |OA|, y = |OB|, z = |OC| meet at 2pi/3 and satisfy, on the unit
sphere,

    cos a = cos y cos z - 1/2 sin y sin z   (and cyclically),

with cosh/+ on the hyperbolic plane and ``a^2 = y^2 + z^2 + yz`` in the
plane.  Once the angle at C reaches 2pi/3 -- exactly when ``k >= Lambda`` --
the minimum is the vertex value ``a + b``.

Newton's method runs on the half-angle rewriting of the trig system,

    4 sn^2(a/2) = sn^2((y - z)/2) + 3 sn^2((y + z)/2),

which is algebraically the same equation but keeps full relative precision
for small or very large triangles.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from ._numerics import damped_newton, half_angle_sq, logcosh, logsinh
from .config import DEFAULT_CONFIG, SolverConfig
from .exceptions import DomainError, InvalidInputError, SolverError
from .model_surface import minimize_distance_sum, realize_triangle, _dist
from .sides import NEG_INF, TripleSides, check_curvature

log = logging.getLogger(__name__)

FERMAT_INTERIOR = "fermat_interior"
VERTEX_C = "vertex_C"
SQRT3 = math.sqrt(3.0)
# relative slack on the curvature upper bound (2 pi / perimeter)^2
DOMAIN_RTOL = 1e-12
ZERO_LAMBDA_RTOL = 1e-12


@dataclass(frozen=True)
class SteinerEvaluation:
    """Result of evaluating S(a, b, c, k).

    ``legs`` are the distances (x, y, z) from the Fermat point to A, B, C
    and are ``None`` in the vertex case.  ``residual`` is the largest
    residual of the defining system, measured relative to its natural scale
    (1 on the sphere, ``cosh(side)`` on the hyperbolic plane, ``side^2`` in
    the plane).
    """

    value: float
    legs: Optional[Tuple[float, float, float]]
    minimizer_kind: str
    residual: float = 0.0
    iterations: int = 0
    k: float = math.nan

    @property
    def is_vertex(self) -> bool:
        return self.minimizer_kind == VERTEX_C


@dataclass(frozen=True)
class PolynomialVars:
    """Variables of the polynomial form of the leg system.

    X, Y, Z are sin (or sinh) of the legs, u, v, w cos (or cosh) of the sides.
    """

    X: float
    Y: float
    Z: float
    u: float
    v: float
    w: float

    @property
    def D(self) -> float:
        u, v, w = self.u, self.v, self.w
        return 4 * u * u + 4 * v * v + 4 * w * w - 8 * u * v * w


# ---------------------------------------------------------------------------
# critical curvature


def _angle_c_gap(a, b, c):
    """``k -> sin^2(angle_C / 2) - 3/4``; increasing in k, zero at angle 2pi/3."""
    return lambda k: half_angle_sq(a, b, c, k) - 0.75


def lambda_critical(sides, config: SolverConfig = DEFAULT_CONFIG) -> float:
    """Critical curvature Lambda(a, b, c).

    The curvature at which the angle opposite the longest side of the
    comparison triangle equals 2pi/3: 0 when ``c^2 = a^2 + b^2 + ab``,
    positive when ``c^2`` is smaller, negative when larger, and ``-inf`` for
    degenerate triples (``c = a + b``), where the angle is pi for every k.

    >>> round(lambda_critical((1, 1, 1)), 4)
    3.6505
    """
    sides = TripleSides.coerce(sides)
    if sides.degenerate:
        return NEG_INF
    a, b, c = sides.as_tuple()
    q = a * a + b * b + a * b
    gap0 = q - c * c
    if abs(gap0) <= ZERO_LAMBDA_RTOL * q:
        return 0.0
    phi = _angle_c_gap(a, b, c)
    rtol = max(config.tol_bisect, 4.5e-16)
    if gap0 > 0:
        k_max = sides.max_curvature
        grid = [k_max * (i / 16.0) for i in range(1, 17)]
        signs = [phi(k) >= 0.0 for k in grid]
        try:
            first = signs.index(True)
        except ValueError:
            raise DomainError(
                f"no critical curvature below the domain bound {k_max!r} for {sides}"
            ) from None
        changes = sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1)
        if changes > 1:
            log.warning("angle criterion changes sign %d times on (0, %r] for %s", changes, k_max, sides)
        lo = grid[first - 1] if first > 0 else 0.0
        hi = grid[first]
        root = bisect(phi, lo, hi, xtol=1e-300, rtol=rtol, maxiter=400)
        if not root < k_max:
            raise DomainError(f"critical curvature {root!r} not below the domain bound {k_max!r}")
        return root
    # negative root: the angle shrinks to 0 as k -> -inf
    hi = -1.0 / sides.perimeter ** 2
    if phi(hi) < 0.0:
        lo, hi = hi, 0.0
    else:
        lo = 2.0 * hi
        while phi(lo) >= 0.0:
            hi, lo = lo, 2.0 * lo
            if lo < -1e300:
                log.warning("no negative critical curvature found for %s; reporting -inf", sides)
                return NEG_INF
    return bisect(phi, lo, hi, xtol=1e-300, rtol=rtol, maxiter=400)


def lambda_equation_residual(sides, k: float) -> float:
    """Residual of the trigonometric equation that defines Lambda, at ``k``.

    ``cos(c s) - cos(a s) cos(b s) + 1/2 sin(a s) sin(b s)`` with ``s = sqrt(k)``
    (cosh/sinh version divided by ``cosh(c s)`` for ``k < 0``; ``(a^2 + b^2 +
    ab - c^2)/c^2`` at ``k = 0``).
    """
    a, b, c = TripleSides.coerce(sides).as_tuple()
    if k > 0:
        s = math.sqrt(k)
        return math.cos(c * s) - math.cos(a * s) * math.cos(b * s) + 0.5 * math.sin(a * s) * math.sin(b * s)
    if k < 0:
        s = math.sqrt(-k)
        lc = logcosh(c * s)
        t1 = math.exp(logcosh(a * s) + logcosh(b * s) - lc)
        t2 = 0.5 * math.exp(logsinh(a * s) + logsinh(b * s) - lc)
        return 1.0 - t1 - t2
    return (a * a + b * b + a * b - c * c) / (c * c)


# ---------------------------------------------------------------------------
# Fermat legs


def euclidean_legs(sides: TripleSides):
    """Closed-form Fermat legs (x, y, z) in the plane (interior case only).

    With ``P = xy + yz + zx = 4 Delta / sqrt(3)`` and ``S = x + y + z`` the
    three relations give ``x = (b^2 + c^2 - a^2 + P) / (2 S)`` and cyclically.
    """
    a, b, c = sides.as_tuple()
    area = sides.heron_area
    S = math.sqrt(0.5 * (a * a + b * b + c * c + 4.0 * SQRT3 * area))
    P = 4.0 * area / SQRT3
    return (
        (b * b + c * c - a * a + P) / (2.0 * S),
        (a * a + c * c - b * b + P) / (2.0 * S),
        (a * a + b * b - c * c + P) / (2.0 * S),
    ), S


# pairs of legs meeting opposite each side: a <-> (y, z), b <-> (x, z), c <-> (x, y)
_PAIRS = ((1, 2), (0, 2), (0, 1))


def _ratio_terms(regime, u, half):
    """``(sn^2(u)/sn^2(half), d/du of it)`` for the unit regime."""
    if regime > 0:
        den = math.sin(half) ** 2
        su, cu = math.sin(u), math.cos(u)
        return su * su / den, 2.0 * su * cu / den
    if regime < 0:
        if u == 0.0:
            return 0.0, 0.0
        lh = logsinh(half)
        au = abs(u)
        ls = logsinh(au)
        # clipped exponents keep far-off trial points finite
        val = math.exp(min(2.0 * (ls - lh), 700.0))
        der = 2.0 * math.exp(min(ls + logcosh(au) - 2.0 * lh, 700.0))
        return val, der if u > 0 else -der
    den = half * half
    return u * u / den, 2.0 * u / den


def _leg_system(sides3, regime):
    def residual(x):
        out = np.empty(3)
        for i, (p, q) in enumerate(_PAIRS):
            half = 0.5 * sides3[i]
            t1, _ = _ratio_terms(regime, 0.5 * (x[p] - x[q]), half)
            t2, _ = _ratio_terms(regime, 0.5 * (x[p] + x[q]), half)
            out[i] = 0.25 * (t1 + 3.0 * t2) - 1.0
        return out

    def jacobian(x):
        J = np.zeros((3, 3))
        for i, (p, q) in enumerate(_PAIRS):
            half = 0.5 * sides3[i]
            _, d1 = _ratio_terms(regime, 0.5 * (x[p] - x[q]), half)
            _, d2 = _ratio_terms(regime, 0.5 * (x[p] + x[q]), half)
            J[i, p] = 0.25 * (0.5 * d1 + 1.5 * d2)
            J[i, q] = 0.25 * (-0.5 * d1 + 1.5 * d2)
        return J

    return residual, jacobian


def _feasible(regime):
    if regime > 0:
        return lambda x: bool(np.all(x > 0.0) and np.all(x < math.pi))
    return lambda x: bool(np.all(x > 0.0))


def trig_residuals(sides, legs, regime: int):
    """Residuals of the displayed leg system, each at its natural scale.

    regime +1: ``cos y cos z - 1/2 sin y sin z - cos a``;
    regime -1: ``(cosh y cosh z + 1/2 sinh y sinh z - cosh a) / cosh a``;
    regime 0: ``(y^2 + z^2 + yz - a^2) / a^2``.
    """
    s = tuple(TripleSides.coerce(sides).as_tuple())
    x = tuple(float(v) for v in legs)
    out = []
    for i, (p, q) in enumerate(_PAIRS):
        lp, lq, side = x[p], x[q], s[i]
        if regime > 0:
            r = math.cos(lp) * math.cos(lq) - 0.5 * math.sin(lp) * math.sin(lq) - math.cos(side)
        elif regime < 0:
            lc = logcosh(side)
            t1 = math.exp(logcosh(lp) + logcosh(lq) - lc)
            t2 = 0.5 * math.exp(logsinh(lp) + logsinh(lq) - lc) if lp > 0 and lq > 0 else 0.0
            r = t1 + t2 - 1.0
        else:
            r = (lp * lp + lq * lq + lp * lq - side * side) / (side * side)
        out.append(r)
    return tuple(out)


def _solve_legs(sides: TripleSides, regime: int, config: SolverConfig):
    """Newton on the unit-regime leg system, with continuation as fallback."""
    s3 = sides.as_tuple()
    residual, jacobian = _leg_system(s3, regime)
    feasible = _feasible(regime)
    e_legs, _ = euclidean_legs(sides)
    guesses = [np.array(e_legs)]
    if regime < 0:
        a, b, c = s3
        guesses.append(np.array([(b + c - a) / 2, (a + c - b) / 2, (a + b - c) / 2]))
        guesses.sort(key=lambda g: float(np.max(np.abs(residual(g)))))
    kw = dict(tol=config.tol_newton, max_iter=config.max_iter, accept_tol=100.0 * config.tol_newton,
              feasible=feasible)
    last_error = None
    for g in guesses:
        if not feasible(g):
            continue
        try:
            res = damped_newton(residual, jacobian, g, **kw)
            return res.x, res.iterations
        except SolverError as exc:
            last_error = exc
    # continuation along the scaled family tau * sides, tau: 0 -> 1
    for n_steps in (8, 32, 128):
        try:
            x = np.array(e_legs) / n_steps
            total = 0
            for j in range(1, n_steps + 1):
                tau = j / n_steps
                r_j, j_j = _leg_system(tuple(tau * v for v in s3), regime)
                res = damped_newton(r_j, j_j, x, **kw)
                total += res.iterations
                x = res.x * ((j + 1) / j)
            return res.x, total
        except SolverError as exc:
            last_error = exc
    raise SolverError(
        f"could not solve the Fermat leg system for {sides} (regime {regime:+d})",
        getattr(last_error, "diagnostics", {}),
    )


def _evaluate_unit(sides: TripleSides, regime: int, config: SolverConfig) -> SteinerEvaluation:
    legs, iterations = _solve_legs(sides, regime, config)
    legs = tuple(float(v) for v in legs)
    resid = max(abs(r) for r in trig_residuals(sides, legs, regime))
    return SteinerEvaluation(
        value=math.fsum(legs), legs=legs, minimizer_kind=FERMAT_INTERIOR,
        residual=resid, iterations=iterations, k=float(regime),
    )


def _vertex(sides: TripleSides, k: float) -> SteinerEvaluation:
    return SteinerEvaluation(sides.a + sides.b, None, VERTEX_C, 0.0, 0, k)


# ---------------------------------------------------------------------------
# public evaluators


def s_euclidean(sides, config: SolverConfig = DEFAULT_CONFIG) -> SteinerEvaluation:
    """S(a, b, c, 0) from the Heron-area closed form.

    >>> round(s_euclidean((1, 1, 1)).value ** 2, 12)
    3.0
    """
    sides = TripleSides.coerce(sides)
    a, b, c = sides.as_tuple()
    q = a * a + b * b + a * b
    if sides.degenerate or c * c >= q * (1.0 - ZERO_LAMBDA_RTOL):
        return _vertex(sides, 0.0)
    legs, S = euclidean_legs(sides)
    residual, jacobian = _leg_system(sides.as_tuple(), 0)
    res = damped_newton(residual, jacobian, legs, tol=config.tol_newton, max_iter=config.max_iter,
                        accept_tol=1e-10, feasible=_feasible(0))
    legs = tuple(float(v) for v in res.x)
    resid = max(abs(r) for r in trig_residuals(sides, legs, 0))
    return SteinerEvaluation(S, legs, FERMAT_INTERIOR, resid, res.iterations, 0.0)


def s_unit_sphere(sides, config: SolverConfig = DEFAULT_CONFIG) -> SteinerEvaluation:
    """S(a, b, c, 1) in the interior Fermat case (requires Lambda > 1).

    >>> round(s_unit_sphere((1, 1, 1)).value, 4)
    1.76
    """
    sides = TripleSides.coerce(sides)
    if not sides.perimeter < 2.0 * math.pi:
        raise DomainError(f"perimeter {sides.perimeter!r} must be below 2*pi on the unit sphere")
    lam = lambda_critical(sides, config)
    if not lam > 1.0:
        raise DomainError(f"Lambda{sides.as_tuple()} = {lam!r} <= 1: the minimum sits at vertex C")
    return _evaluate_unit(sides, +1, config)


def s_unit_hyperbolic(sides, config: SolverConfig = DEFAULT_CONFIG) -> SteinerEvaluation:
    """S(a, b, c, -1) in the interior Fermat case (requires Lambda > -1)."""
    sides = TripleSides.coerce(sides)
    lam = lambda_critical(sides, config)
    if not lam > -1.0:
        raise DomainError(f"Lambda{sides.as_tuple()} = {lam!r} <= -1: the minimum sits at vertex C")
    return _evaluate_unit(sides, -1, config)


def check_domain(sides: TripleSides, k: float):
    if k > sides.max_curvature * (1.0 + DOMAIN_RTOL):
        raise DomainError(
            f"k = {k!r} exceeds (2*pi/perimeter)^2 = {sides.max_curvature!r} for sides {sides.as_tuple()}"
        )


def s_value(sides, k: float, config: SolverConfig = DEFAULT_CONFIG, *,
            lam: Optional[float] = None) -> SteinerEvaluation:
    """S(a, b, c, k) for any admissible curvature ``k <= (2 pi / perimeter)^2``.

    ``lam`` may pass a precomputed Lambda(sides) to skip recomputing it.
    For ``k != 0`` the value comes from the unit model through
    ``S(a, b, c, k) = S(a r, b r, c r, +-1) / r`` with ``r = sqrt(|k|)``.
    """
    sides = TripleSides.coerce(sides)
    k = check_curvature(k)
    check_domain(sides, k)
    if lam is None:
        lam = lambda_critical(sides, config)
    if sides.degenerate or k >= lam:
        return _vertex(sides, k)
    if k == 0.0:
        return s_euclidean(sides, config)
    r = math.sqrt(abs(k))
    unit = _evaluate_unit(sides.scaled(r), 1 if k > 0 else -1, config)
    legs = tuple(v / r for v in unit.legs)
    return SteinerEvaluation(unit.value / r, legs, FERMAT_INTERIOR, unit.residual, unit.iterations, k)


def s_curve(sides, ks, config: SolverConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Vectorised convenience: S(sides, k) for every k in ``ks``."""
    sides = TripleSides.coerce(sides)
    lam = lambda_critical(sides, config)
    return np.array([s_value(sides, k, config, lam=lam).value for k in ks])


def polynomial_vars(sides, legs, regime: str) -> PolynomialVars:
    a, b, c = TripleSides.coerce(sides).as_tuple()
    x, y, z = legs
    if regime == "spherical":
        return PolynomialVars(math.sin(x), math.sin(y), math.sin(z), math.cos(a), math.cos(b), math.cos(c))
    if regime == "hyperbolic":
        return PolynomialVars(math.sinh(x), math.sinh(y), math.sinh(z), math.cosh(a), math.cosh(b), math.cosh(c))
    raise InvalidInputError(f"regime must be 'spherical' or 'hyperbolic', got {regime!r}")


def polynomial_residuals(sides, legs, regime: str):
    """Signed residuals of the polynomial form of the leg system.

    Returned in the order of the equations pairing (X, Y), (X, Z), (Y, Z),
    i.e. the ones carrying ``4w^2``, ``4v^2`` and ``4u^2``.  In the spherical
    regime an equation reads ``(3u^2+1)X^2 + (3v^2+1)Y^2 + (6uv-2w)XY
    - 3X^2Y^2 + 4w^2 - D``; the hyperbolic one flips the sign of the
    quartic term and of ``4w^2 - D``.
    """
    pv = polynomial_vars(sides, legs, regime)
    X, Y, Z, u, v, w, D = pv.X, pv.Y, pv.Z, pv.u, pv.v, pv.w, pv.D

    def eq(P, Q, cp, cq, opp):
        base = (3 * cp * cp + 1) * P * P + (3 * cq * cq + 1) * Q * Q + (6 * cp * cq - 2 * opp) * P * Q
        if regime == "spherical":
            return base - 3 * P * P * Q * Q + 4 * opp * opp - D
        return base + 3 * P * P * Q * Q - 4 * opp * opp + D

    return (eq(X, Y, u, v, w), eq(X, Z, u, w, v), eq(Y, Z, v, w, u))


def fermat_oracle(sides, k: float) -> SteinerEvaluation:
    """S(a, b, c, k) by direct minimisation of |PA| + |PB| + |PC| over M_k.

    Independent of the closed forms and trig systems: realizes the triangle
    in coordinates and minimises the distance sum numerically.
    """
    sides = TripleSides.coerce(sides)
    k = check_curvature(k)
    check_domain(sides, k)
    if sides.degenerate:
        return _vertex(sides, k)
    tri = realize_triangle(sides, k)
    res = minimize_distance_sum(tri.vertices, tri.ambient)
    if res.vertex[0] >= 0:
        return SteinerEvaluation(float(res.value[0]), None, VERTEX_C, 0.0, res.iterations, k)
    legs = tuple(float(v) for v in _dist(res.point[0][None, :], tri.vertices, tri.ambient))
    return SteinerEvaluation(float(res.value[0]), legs, FERMAT_INTERIOR, 0.0, res.iterations, k)
