"""The fifteen acceptance criteria, each at its stated tolerance.

Every test appends one ``ACCEPTANCE n: PASS|FAIL ...`` line, printed in
order at the end of the run, and then asserts.
"""

import math
import time

import numpy as np
import pytest

from metrictriples.catk_lab import CatExperimentSpec, derive_h_constant, h_k, verify_cat_bound
from metrictriples.metric_data import FiniteMetricSpace, enumerate_triples
from metrictriples.records import CAPPED, NEG_INFINITY
from metrictriples.sides import TripleSides
from metrictriples.steiner import (lambda_critical, polynomial_residuals, s_curve, s_euclidean,
                                   s_value, trig_residuals)
from metrictriples.suites import (FIGURES, check_cotangent, check_f_sigma, check_ratio_grid,
                                  check_round_trip, check_subset_monotone, lemma_checks,
                                  random_k_below_lambda, random_sides)
from metrictriples.triple_curvature import curvature_report

from conftest import ACCEPTANCE_LINES, hyperbolic_closed_form, random_triangle, sphere_closed_form
from oracles import brute_force_fermat

pytestmark = pytest.mark.acceptance


def record(n, ok, detail):
    line = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _best_time(fn, repeat=5):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return value, best


def test_01_lambda_equilateral():
    lam, secs = _best_time(lambda: lambda_critical((1, 1, 1)))
    exact = (math.pi - math.acos(1 / 3)) ** 2
    ok = abs(lam - 3.6505) <= 5e-4 and abs(lam - exact) <= 1e-9 and secs < 1e-3
    record(1, ok, f"Lambda(1,1,1)={lam!r} |err|={abs(lam - exact):.2e} time={secs * 1e3:.3f} ms")


def test_02_lambda_figure_sides():
    lam = lambda_critical((1, 1.2, 1.3))
    record(2, abs(lam - 2.5081) <= 5e-4, f"Lambda(1,1.2,1.3)={lam!r}")


def test_03_lambda_zero_case():
    lam = lambda_critical((1, 1, math.sqrt(3)))
    record(3, abs(lam) <= 1e-9, f"Lambda(1,1,sqrt3)={lam!r}")


def test_04_euclidean_vs_brute_force():
    rng = np.random.default_rng(2024)
    cases = [(1.0, 1.0, 1.0), (3.0, 4.0, 5.0)] + [random_triangle(rng) for _ in range(100)]
    worst = max(abs(s_euclidean(s).value - brute_force_fermat(*s)) / brute_force_fermat(*s) for s in cases)
    record(4, worst <= 1e-6, f"{len(cases)} triples, max relative gap={worst:.2e}")


def test_05_s_curve_monotone_and_bounded():
    t0 = time.perf_counter()
    ks = np.linspace(-10.0, 2.5081, 200)
    # the grid's right end lies a hair above Lambda = 2.50809, where S is already a + b
    vals = s_curve((1, 1.2, 1.3), ks)
    secs = time.perf_counter() - t0
    lam = lambda_critical((1, 1.2, 1.3))
    inner = vals[ks < lam]
    ok = (np.all(np.diff(inner) > 0) and np.all(np.diff(vals) >= 0) and vals.min() >= 1.75
          and vals.max() <= 2.2 and secs < 5)
    record(5, ok, f"S in [{vals.min():.6f}, {vals.max():.6f}], increasing, time={secs:.2f} s")


def test_06_ordering_chain():
    lo = s_value((1, 1, 1), -1.0).value
    hi = s_value((1, 1, 1), 1.0).value
    e_lo = abs(lo - hyperbolic_closed_form(1.0))
    e_hi = abs(hi - sphere_closed_form(1.0))
    ok = lo < math.sqrt(3) < hi and e_lo <= 1e-6 and e_hi <= 1e-6 and abs(lo - 1.7107) <= 5e-4 \
        and abs(hi - 1.7600) <= 5e-4
    record(6, ok, f"S(-1)={lo:.7f} < sqrt3 < S(1)={hi:.7f}, closed-form gaps {e_lo:.1e}, {e_hi:.1e}")


def test_07_scaling_identity():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        sides = random_sides(rng)
        k = random_k_below_lambda(rng, sides)
        lam = float(rng.uniform(0.2, 5.0))
        base = s_value(sides, k).value
        gap = abs(s_value(sides.scaled(lam), k / lam ** 2).value - lam * base)
        worst = max(worst, gap / (lam * base))
    record(7, worst <= 1e-8, f"100 triples, max |S(l.)-lS|/(lS)={worst:.2e}")


def test_08_polynomial_residuals():
    rng = np.random.default_rng(8)
    worst, trig = 0.0, 0.0
    for regime, k in (("spherical", 1.0), ("hyperbolic", -1.0)):
        done = 0
        while done < 200:
            sides = random_sides(rng, 0.1, 1.5)
            if sides.perimeter >= 2 * math.pi or not k < lambda_critical(sides):
                continue
            ev = s_value(sides, k)
            trig = max(trig, max(abs(r) for r in trig_residuals(sides, ev.legs, k)))
            worst = max(worst, max(abs(r) for r in polynomial_residuals(sides, ev.legs, regime)))
            done += 1
    record(8, worst <= 1e-8, f"400 solutions, max polynomial residual={worst:.2e} (trig {trig:.1e})")


def test_09_round_trip():
    res = check_round_trip(count=300, seed=9)
    record(9, res.passed, f"300 triples, {res.detail}")


def test_10_unit_discrete():
    n = 6
    space = FiniteMetricSpace(np.ones((n, n)) - np.eye(n))
    reps = curvature_report(space, enumerate_triples(space))
    lam = lambda_critical((1, 1, 1))
    ok = all(r.g == 2.0 and r.k_value == lam and r.status == CAPPED for r in reps)
    record(10, ok, f"{len(reps)} triples, g=2, k_X={reps[0].k_value!r}, status={reps[0].status}")


@pytest.mark.parametrize("family, k", [("sphere_sample", 1.0), ("hyperbolic_sample", -1.0),
                                       ("euclidean_convex", 0.0)])
def test_11_cat_bound(family, k):
    t0 = time.perf_counter()
    rep = verify_cat_bound(CatExperimentSpec(family, k, n=40, seed=0))
    secs = time.perf_counter() - t0
    # triples with Lambda >= k are realised on M_k with an interior minimiser, so k_X = k
    eq = [r for r in rep.reports if r.lam >= k]
    eq_err = max((abs(r.k_value - k) for r in eq), default=0.0)
    ok = rep.count == 0 and rep.errors == 0 and eq_err <= 1e-4 and secs < 60 and rep.tested > 0
    record(11, ok, f"{family} k={k:g}: tested={rep.tested} violations={rep.count} "
                   f"worst_margin={rep.worst_margin:.1e} equality max|k_X-k|={eq_err:.1e} "
                   f"over {len(eq)} time={secs:.1f} s")


def test_12_metric_trees():
    tested, bad, violations = 0, 0, 0
    for seed in range(10):
        for k in (0.0, -1.0, -4.0):
            rep = verify_cat_bound(CatExperimentSpec("metric_tree", k, n=20, seed=seed))
            tested += rep.tested
            bad += sum(1 for r in rep.reports if not (r.status == NEG_INFINITY and r.k_value == -math.inf))
            violations += rep.count
    record(12, bad == 0 and violations == 0 and tested > 0,
           f"10 seeds x k in (0,-1,-4): {tested} gated triples, non -inf={bad}, violations={violations}")


def test_13_subset_monotone():
    res = check_subset_monotone(count=100, seed=13)
    record(13, res.passed, f"100 pairs, {res.detail}")


def test_14_lemma_suite():
    t0 = time.perf_counter()
    t_star, h = derive_h_constant()
    parts = [check_ratio_grid(), check_f_sigma(1.0, 100), check_f_sigma(0.0, 100), check_f_sigma(-1.0, 100),
             check_cotangent(100)]
    rest = [c() for c in lemma_checks()]
    secs = time.perf_counter() - t0
    ok = (abs(t_star - 1.9257) <= 1e-3 and abs(h - 1.3877) <= 5e-4 and all(p.passed for p in parts + rest)
          and secs < 120)
    failing = [p.name for p in parts + rest if not p.passed]
    record(14, ok, f"t*={t_star:.5f} h={h:.5f}; " + "; ".join(p.line() for p in parts)
                   + f"; failing={failing}; time={secs:.1f} s")


def test_15_figures(tmp_path):
    grids = {w: make() for w, (_, make) in FIGURES.items()}
    lam = [row[1] for row in grids[1]]
    curve = grids[3]
    diverges = lam[0] < -100 and lam[-1] < -100 and max(lam) > 0
    # the extreme grid values fall steeply toward both ends
    ends_steeper = lam[0] < lam[1] < lam[2] and lam[-1] < lam[-2] < lam[-3]
    closer = lambda_critical((1, 1.2, 0.2 + 1e-6)) < lam[0] and lambda_critical((1, 1.2, 2.2 - 1e-6)) < lam[-1]
    right = curve[-1][1]
    ok = all(len(g) for g in grids.values()) and diverges and ends_steeper and closer and right == 2.2
    record(15, ok, f"rows={[len(g) for g in grids.values()]} Lambda ends=({lam[0]:.1f}, {lam[-1]:.1f}) "
                   f"max={max(lam):.4f} S(Lambda)={right!r}")
