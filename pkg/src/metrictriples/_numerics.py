"""Low-level numerical kernels used across the package.

Everything here works on plain Python floats (scalar hot paths) unless the
name says otherwise.  The curvature-generalised sine ``sn_k`` and friends
are the glue that lets one formula serve the sphere, the plane and the
hyperbolic plane, continuously in ``k``.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .exceptions import SolverError

LOG2 = math.log(2.0)
# Above this scaled argument we switch hyperbolic products to log space.
_LOG_SWITCH = 300.0


def logsinh(x: float) -> float:
    """``log(sinh(x))`` for ``x > 0`` without overflow."""
    if x < 20.0:
        return math.log(math.sinh(x))
    return x - LOG2 + math.log1p(-math.exp(-2.0 * x))


def logcosh(x: float) -> float:
    x = abs(x)
    return x - LOG2 + math.log1p(math.exp(-2.0 * x))


def sn_k(k: float, t: float) -> float:
    """Generalised sine: ``sin(sqrt(k) t)/sqrt(k)``, ``t``, ``sinh(sqrt(-k) t)/sqrt(-k)``."""
    if k > 0.0:
        r = math.sqrt(k)
        return math.sin(r * t) / r
    if k < 0.0:
        r = math.sqrt(-k)
        return math.sinh(r * t) / r
    return t


def cs_k(k: float, t: float) -> float:
    """Generalised cosine, the derivative of :func:`sn_k`."""
    if k > 0.0:
        return math.cos(math.sqrt(k) * t)
    if k < 0.0:
        return math.cosh(math.sqrt(-k) * t)
    return 1.0


def ct_k(k: float, t: float) -> float:
    """Generalised cotangent ``cs_k/sn_k`` (the Hessian weight of a distance function)."""
    if k > 0.0:
        r = math.sqrt(k)
        return r / math.tan(r * t)
    if k < 0.0:
        r = math.sqrt(-k)
        return r / math.tanh(r * t)
    return 1.0 / t


def half_angle_sq(p: float, q: float, r: float, k: float) -> float:
    """``sin^2(theta/2)`` for the angle between sides ``p``, ``q`` opposite ``r`` in M_k.

    Uses the product form ``sn((r+p-q)/2) sn((r-p+q)/2) / (sn(p) sn(q))``
    which is free of the cancellation that plagues ``cos c - cos a cos b``
    for thin or small triangles, and is continuous through ``k = 0``.
    """
    u1 = 0.5 * (r + p - q)
    u2 = 0.5 * (r - p + q)
    if u1 <= 0.0 or u2 <= 0.0:
        return 0.0 if (u1 >= 0.0 and u2 >= 0.0) else -1.0
    if k == 0.0:
        return (u1 * u2) / (p * q)
    if k > 0.0:
        s = math.sqrt(k)
        return (math.sin(s * u1) * math.sin(s * u2)) / (math.sin(s * p) * math.sin(s * q))
    s = math.sqrt(-k)
    if s * max(p, q, r) < _LOG_SWITCH:
        return (math.sinh(s * u1) * math.sinh(s * u2)) / (math.sinh(s * p) * math.sinh(s * q))
    return math.exp(logsinh(s * u1) + logsinh(s * u2) - logsinh(s * p) - logsinh(s * q))


def clamp_unit(x: float, slack: float = 1e-12, what: str = "value") -> float:
    """Clamp ``x`` into ``[-1, 1]`` if it strays by at most ``slack``."""
    if x > 1.0:
        if x - 1.0 > slack:
            raise ValueError(f"{what} {x!r} exceeds 1 by more than {slack}")
        return 1.0
    if x < -1.0:
        if -1.0 - x > slack:
            raise ValueError(f"{what} {x!r} is below -1 by more than {slack}")
        return -1.0
    return x


class NewtonResult(NamedTuple):
    x: np.ndarray
    residual: float
    iterations: int


def damped_newton(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    x0,
    *,
    tol: float = 1e-12,
    max_iter: int = 100,
    max_halvings: int = 30,
    accept_tol: float | None = None,
    feasible: Callable[[np.ndarray], bool] | None = None,
    polish: int = 2,
) -> NewtonResult:
    """Newton's method with step halving on a small dense system.

    A step is accepted once the max-norm of the residual decreases; the step
    length is halved up to ``max_halvings`` times otherwise.  When no
    halving helps (round-off floor) the iteration stops and the current
    point is accepted if its residual is below ``accept_tol``.  After
    convergence up to ``polish`` extra full steps push the solution to the
    round-off floor, which matters where callers difference nearby values.

    Raises
    ------
    SolverError
        If the residual is not below ``accept_tol`` (default ``100 * tol``)
        after ``max_iter`` iterations or at stagnation.
    """
    accept_tol = 100.0 * tol if accept_tol is None else accept_tol
    x = np.array(x0, dtype=float)
    r = residual(x)
    norm = float(np.max(np.abs(r)))
    it = 0
    while it < max_iter and norm > tol:
        it += 1
        try:
            step = np.linalg.solve(jacobian(x), -r)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        for _ in range(max_halvings + 1):
            xn = x + lam * step
            if feasible is None or feasible(xn):
                rn = residual(xn)
                nn = float(np.max(np.abs(rn)))
                if nn < norm:
                    break
            lam *= 0.5
        else:
            break
        x, r, norm = xn, rn, nn
    if norm <= tol:
        for _ in range(polish):
            try:
                xn = x + np.linalg.solve(jacobian(x), -r)
            except np.linalg.LinAlgError:
                break
            if feasible is not None and not feasible(xn):
                break
            rn = residual(xn)
            nn = float(np.max(np.abs(rn)))
            if not nn <= norm:
                break
            x, r, norm = xn, rn, nn
    if not math.isfinite(norm) or norm > accept_tol:
        raise SolverError(
            f"Newton iteration did not converge (residual {norm:.3e} after {it} iterations)",
            {"iterations": it, "residual": norm, "x": x.tolist()},
        )
    return NewtonResult(x, norm, it)
