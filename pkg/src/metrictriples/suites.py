"""Named batches of numeric checks behind ``mtc suite`` and the figure grids."""

from __future__ import annotations

import itertools
import math
from typing import Callable, List, NamedTuple

import numpy as np

from .catk_lab import (check_ratio_convexity, comparison_config, cotangent_residual,
                       derive_h_constant, f_sigma, h_k, ob_derivative, ob_length,
                       random_gated_sides)
from .config import DEFAULT_CONFIG, SolverConfig
from .exceptions import InvalidInputError
from .metric_data import FiniteMetricSpace
from .sides import TripleSides
from .steiner import lambda_critical, polynomial_residuals, s_value
from .triple_curvature import g_of_triple, invert_curvature

SUITES = ("lemmas", "properties")


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{self.name}: {self.detail} {'PASS' if self.passed else 'FAIL'}"


def random_sides(rng: np.random.Generator, low: float = 0.1, high: float = 2.0) -> TripleSides:
    """Uniform random sides, redrawn until they satisfy the triangle inequality."""
    while True:
        v = np.sort(rng.uniform(low, high, 3))
        if v[2] < v[0] + v[1]:
            return TripleSides(*v)


def random_k_below_lambda(rng: np.random.Generator, sides: TripleSides, width: float = 10.0,
                          config: SolverConfig = DEFAULT_CONFIG) -> float:
    """A curvature in ``[L - width * max(1, |L|), L]`` with ``L`` = Lambda (kept inside the sphere domain).

    The window scales with ``|Lambda|`` because near-degenerate sides have
    Lambda of order ``-1/(a + b - c)``, where a fixed-width window would
    only probe the flat top of ``k -> S``.
    """
    lam = lambda_critical(sides, config)
    top = min(lam, sides.max_curvature * (1 - 1e-9))
    return float(top - width * max(1.0, abs(top)) * rng.uniform())


# ---------------------------------------------------------------------------
# lemma suite


def check_h_constant() -> CheckResult:
    t_star, h = derive_h_constant()
    ok = abs(t_star - 1.9257) <= 1e-3 and abs(h - 1.3877) <= 5e-4
    return CheckResult("h_constant", ok, f"t*={t_star:.4f} h={h:.4f}")


def check_ratio_grid(n: int = 12) -> CheckResult:
    hyp = np.linspace(0.05, h_k(-1.0), n)
    sph = np.linspace(0.05, math.pi / 2, n)
    worst_h = max(check_ratio_convexity(a, b, "hyperbolic_sinh") for a, b in itertools.product(hyp, hyp) if a <= b)
    worst_s = min(check_ratio_convexity(a, b, "spherical_sin") for a, b in itertools.product(sph, sph) if a <= b)
    ok = worst_h <= 1e-7 and worst_s >= -1e-7
    return CheckResult("ratio_convexity", ok, f"max_sinh={worst_h:.3e} min_sin={worst_s:.3e}")


def _configs(k: float, count: int, seed: int, config: SolverConfig):
    rng = np.random.default_rng(seed)
    return [comparison_config(random_gated_sides(rng, k, config), k, config) for _ in range(count)]


def check_f_sigma(k: float, count: int = 100, seed: int = 0, config: SolverConfig = DEFAULT_CONFIG) -> CheckResult:
    sigmas = np.linspace(0.0, 1.0, 101)
    worst = -math.inf
    for cfg in _configs(k, count, seed, config):
        f1 = f_sigma(cfg, 1.0)
        worst = max(worst, max(f_sigma(cfg, s) for s in sigmas) - f1)
    return CheckResult(f"f_sigma_k={k:g}", worst <= 1e-9, f"max f(sigma)-f(1)={worst:.3e}")


def check_cotangent(count: int = 100, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    while done < count:
        v = rng.uniform(0.1, math.pi / 2, 3)
        if not (v[0] < v[1] + v[2] and v[1] < v[0] + v[2] and v[2] < v[0] + v[1]):
            continue
        worst = max(worst, abs(cotangent_residual(*v)))
        done += 1
    return CheckResult("cotangent_identity", worst <= 1e-9, f"max residual={worst:.3e}")


def check_derivative(k: float, count: int = 30, seed: int = 1, config: SolverConfig = DEFAULT_CONFIG) -> CheckResult:
    h = 1e-6
    worst = 0.0
    for cfg in _configs(k, count, seed, config):
        lo = cfg.sigma_min + 0.05
        for s in np.linspace(lo, 1.0 - 2 * h, 5) if lo < 1.0 - 2 * h else ():
            for v in ("B", "C"):
                fd = (ob_length(cfg, s + h, v) - ob_length(cfg, s - h, v)) / (2 * h)
                worst = max(worst, abs(fd - ob_derivative(cfg, s, v)))
    return CheckResult(f"derivative_k={k:g}", worst <= 1e-6, f"max |analytic-fd|={worst:.3e}")


def check_concavity(k: float, count: int = 50, seed: int = 2, config: SolverConfig = DEFAULT_CONFIG) -> CheckResult:
    step = 1e-3
    sig = np.linspace(step, 1.0 - step, 99)
    worst = -math.inf
    for cfg in _configs(k, count, seed, config):
        for v in ("B", "C"):
            vals = np.array([[ob_length(cfg, s + d, v) for d in (-step, 0.0, step)] for s in sig])
            d2 = (vals[:, 0] - 2 * vals[:, 1] + vals[:, 2]) / step ** 2
            worst = max(worst, float(d2.max()))
    return CheckResult(f"concavity_k={k:g}", worst <= 1e-7, f"max second difference={worst:.3e}")


def lemma_checks(seed: int = 0, config: SolverConfig = DEFAULT_CONFIG) -> List[Callable[[], CheckResult]]:
    checks = [check_h_constant, check_ratio_grid, lambda: check_cotangent(seed=seed)]
    for k in (0.0, 1.0, -1.0):
        checks.append(lambda k=k: check_f_sigma(k, seed=seed, config=config))
        checks.append(lambda k=k: check_derivative(k, seed=seed + 1, config=config))
        checks.append(lambda k=k: check_concavity(k, seed=seed + 2, config=config))
    return checks


# ---------------------------------------------------------------------------
# property suite


def check_round_trip(count: int = 300, seed: int = 0, config: SolverConfig = DEFAULT_CONFIG) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        sides = random_sides(rng)
        k = random_k_below_lambda(rng, sides, config=config)
        got, _ = invert_curvature(sides, s_value(sides, k, config).value, config)
        worst = max(worst, abs(got - k) / max(1.0, abs(k)))
    return CheckResult("round_trip", worst <= 1e-6, f"max scaled error={worst:.3e}")


def check_scaling(count: int = 100, seed: int = 0, config: SolverConfig = DEFAULT_CONFIG) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        sides = random_sides(rng)
        k = random_k_below_lambda(rng, sides, config=config)
        lam = float(rng.uniform(0.2, 5.0))
        base = s_value(sides, k, config).value
        scaled = s_value(sides.scaled(lam), k / lam ** 2, config).value
        worst = max(worst, abs(scaled - lam * base) / (lam * base))
    return CheckResult("scaling", worst <= 1e-8, f"max relative gap={worst:.3e}")


def check_bounds(count: int = 500, seed: int = 0, config: SolverConfig = DEFAULT_CONFIG) -> CheckResult:
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(count):
        sides = random_sides(rng)
        k = random_k_below_lambda(rng, sides, width=20.0, config=config) + float(rng.uniform(0, 1))
        k = min(k, sides.max_curvature * (1 - 1e-9))
        v = s_value(sides, k, config).value
        tol = 1e-12 * v
        bad += not (sides.semiperimeter - tol <= v <= sides.a + sides.b + tol)
    return CheckResult("bounds", bad == 0, f"out of bounds={bad}/{count}")


def check_polynomial(count: int = 200, seed: int = 0, config: SolverConfig = DEFAULT_CONFIG) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for regime, k in (("spherical", 1.0), ("hyperbolic", -1.0)):
        done = 0
        while done < count:
            sides = random_sides(rng, 0.1, 1.5)
            if sides.perimeter >= 2 * math.pi or not k < lambda_critical(sides, config):
                continue
            ev = s_value(sides, k, config)
            worst = max(worst, max(abs(r) for r in polynomial_residuals(sides, ev.legs, regime)))
            done += 1
    return CheckResult("polynomial_system", worst <= 1e-8, f"max residual={worst:.3e}")


def check_subset_monotone(count: int = 100, seed: int = 0, config: SolverConfig = DEFAULT_CONFIG) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(count):
        n = int(rng.integers(4, 10))
        pts = rng.uniform(-1, 1, (n, 2))
        d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
        big = FiniteMetricSpace(d)
        keep = np.sort(rng.choice(n, size=int(rng.integers(3, n + 1)), replace=False))
        small = big.subspace(keep)
        tri_small = small.triple(0, 1, 2)
        tri_big = big.triple(*keep[:3])
        k_small, _ = invert_curvature(tri_small.sides, g_of_triple(small, tri_small), config)
        k_big, _ = invert_curvature(tri_big.sides, g_of_triple(big, tri_big), config)
        worst = max(worst, k_big - k_small)
    return CheckResult("subset_monotone", worst <= 1e-9, f"max k_Y-k_X={worst:.3e}")


def check_lambda_examples(config: SolverConfig = DEFAULT_CONFIG) -> CheckResult:
    l1 = lambda_critical((1, 1, 1), config)
    l2 = lambda_critical((1, 1.2, 1.3), config)
    l3 = lambda_critical((1, 1, math.sqrt(3)), config)
    ok = (abs(l1 - (math.pi - math.acos(1 / 3)) ** 2) <= 1e-9 and abs(l2 - 2.5081) <= 5e-4 and abs(l3) <= 1e-9)
    return CheckResult("lambda_examples", ok, f"L(1,1,1)={l1!r} L(1,1.2,1.3)={l2!r} L(1,1,sqrt3)={l3!r}")


def property_checks(seed: int = 0, config: SolverConfig = DEFAULT_CONFIG) -> List[Callable[[], CheckResult]]:
    return [
        lambda: check_lambda_examples(config),
        lambda: check_round_trip(seed=seed, config=config),
        lambda: check_scaling(seed=seed, config=config),
        lambda: check_bounds(seed=seed, config=config),
        lambda: check_polynomial(seed=seed, config=config),
        lambda: check_subset_monotone(seed=seed, config=config),
    ]


def run_suite(name: str, seed: int = 0, config: SolverConfig = DEFAULT_CONFIG, emit=print) -> bool:
    """Run a named suite, emitting one line per check; True iff all pass."""
    if name == "lemmas":
        checks = lemma_checks(seed, config)
    elif name == "properties":
        checks = property_checks(seed, config)
    else:
        raise InvalidInputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    ok = True
    for check in checks:
        res = check()
        emit(res.line())
        ok &= res.passed
    return ok


# ---------------------------------------------------------------------------
# figure grids


def figure_lambda_grid(n: int = 200, a: float = 1.0, b: float = 1.2, config: SolverConfig = DEFAULT_CONFIG):
    """Rows ``(c, Lambda(a, b, c))`` for ``c`` on an open grid over ``(b - a, a + b)``."""
    lo, hi = b - a, a + b
    cs = lo + (hi - lo) * np.arange(1, n + 1) / (n + 1)
    return [(float(c), lambda_critical((a, b, float(c)), config)) for c in cs]


def figure_sphere_grid(n: int = 60, a: float = 1.0, config: SolverConfig = DEFAULT_CONFIG):
    """Rows ``(t, s, S(sorted(a, (t-s)/2, (t+s)/2), 1))`` on an interior grid.

    ``t`` ranges over ``(a, 2 pi - a)`` and ``s`` over ``(-a, a)``.
    """
    frac = np.arange(1, n + 1) / (n + 1)
    ts = a + (2 * math.pi - 2 * a) * frac
    ss = -a + 2 * a * frac
    rows = []
    for t in ts:
        for s in ss:
            sides = TripleSides(*sorted((a, (t - s) / 2, (t + s) / 2)))
            rows.append((float(t), float(s), s_value(sides, 1.0, config).value))
    return rows


def figure_s_curve(n: int = 200, sides=(1.0, 1.2, 1.3), k_min: float = -10.0,
                   config: SolverConfig = DEFAULT_CONFIG):
    """Rows ``(k, S(sides, k))`` on a closed grid over ``[k_min, Lambda(sides)]``."""
    sides = TripleSides.coerce(sides)
    lam = lambda_critical(sides, config)
    ks = np.linspace(k_min, lam, n)
    ks[-1] = lam
    return [(float(k), s_value(sides, float(k), config, lam=lam).value) for k in ks]


FIGURES = {
    1: (("c", "lambda"), figure_lambda_grid),
    2: (("t", "s", "S"), figure_sphere_grid),
    3: (("k", "S"), figure_s_curve),
}
