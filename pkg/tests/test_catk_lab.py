import io
import math

import numpy as np
import pytest

from metrictriples.catk_lab import (CatExperimentSpec, check_ratio_convexity, comparison_config,
                                    cotangent_residual, derive_h_constant, f_sigma, f_sigma_limit,
                                    fermat_angles, generate_space, h_k, ob_derivative, ob_length,
                                    ob_length_geometric, random_gated_sides, random_tree_metric,
                                    verify_cat_bound, write_violations)
from metrictriples.exceptions import DomainError, InvalidInputError
from metrictriples.metric_data import validate_distance_matrix
from metrictriples.model_surface import surface_distance
from metrictriples.records import CAPPED, NEG_INFINITY
from metrictriples.steiner import lambda_critical, s_value

REGIMES = [1.0, 0.0, -1.0]


class TestGate:
    def test_h_k_values(self):
        assert h_k(1.0) == pytest.approx(math.pi / 2)
        assert h_k(4.0) == pytest.approx(math.pi / 4)
        assert h_k(0.0) == math.inf
        assert h_k(-1.0) == 1.3877 and h_k(-4.0) == pytest.approx(0.69385)

    def test_h_k_rejects_nan(self):
        with pytest.raises(InvalidInputError):
            h_k(math.nan)

    def test_derived_constant(self):
        t, h = derive_h_constant()
        assert 315 - 168 * t + 10 * t * t - 4 * t ** 3 == pytest.approx(0, abs=1e-9)
        assert t == pytest.approx(1.9257, abs=1e-3) and h == pytest.approx(1.3877, abs=5e-4)
        assert h == pytest.approx(math.sqrt(t))
        # numpy's companion-matrix roots as an independent check
        real = [r.real for r in np.roots([-4, 10, -168, 315]) if abs(r.imag) < 1e-12]
        assert t == pytest.approx(real[0], rel=1e-12)

    @pytest.mark.parametrize("a, b", [(0.1, 0.2), (0.5, 1.0), (1.0, 1.3877), (1.3877, 1.3877)])
    def test_sinh_ratio_concave_in_gate(self, a, b):
        assert check_ratio_convexity(a, b, "hyperbolic_sinh") <= 1e-7

    def test_sinh_ratio_convex_far_out(self):
        # far past the gate the ratio is no longer concave on (0, 1]
        assert check_ratio_convexity(0.5, 6.0, "hyperbolic_sinh") > 1e-3

    @pytest.mark.parametrize("a, b", [(0.1, 0.2), (0.5, 1.0), (1.0, 1.5)])
    def test_sin_ratio_convex(self, a, b):
        assert check_ratio_convexity(a, b, "spherical_sin") >= -1e-7

    def test_ratio_argument_checks(self):
        with pytest.raises(InvalidInputError):
            check_ratio_convexity(1.0, 0.5)
        with pytest.raises(InvalidInputError):
            check_ratio_convexity(0.5, 1.0, "cosh")
        with pytest.raises(InvalidInputError):
            check_ratio_convexity(0.5, 3.5, "spherical_sin")


class TestConfiguration:
    @pytest.mark.parametrize("k", REGIMES)
    def test_equilateral_foot_is_midpoint(self, k):
        cfg = comparison_config((1, 1, 1), k)
        assert cfg.t == pytest.approx(0.5, abs=1e-9)
        assert all(a == pytest.approx(2 * math.pi / 3, abs=1e-8) for a in fermat_angles(cfg))

    @pytest.mark.parametrize("k", REGIMES)
    def test_invariants(self, k, rng):
        for _ in range(10):
            sides = random_gated_sides(rng, k)
            cfg = comparison_config(sides, k)
            assert 0 < cfg.s < 1 and 0 < cfg.t < 1
            assert cfg.bd + cfg.cd == pytest.approx(sides.a, rel=1e-9)
            assert surface_distance(cfg.fermat, cfg.realization.A) == pytest.approx(cfg.ao, rel=1e-9)
            assert sum(cfg.legs) == pytest.approx(s_value(sides, k).value, rel=1e-12)
            assert cfg.alpha + cfg.gamma < math.pi + 1e-12 or k > 0

    def test_domain_errors(self):
        with pytest.raises(DomainError, match="vertex"):
            comparison_config((1, 1.2, 1.3), 3.0)
        with pytest.raises(DomainError, match="exceeds"):
            comparison_config((1, 1.2, 1.5), -1.0)

    @pytest.mark.parametrize("k", REGIMES)
    def test_f_endpoints(self, k, rng):
        for _ in range(10):
            sides = random_gated_sides(rng, k)
            cfg = comparison_config(sides, k)
            assert f_sigma(cfg, 1.0) == pytest.approx(s_value(sides, k).value, rel=1e-9)
            assert f_sigma(cfg, 0.0) == pytest.approx(f_sigma_limit(cfg), rel=1e-12)
            assert f_sigma(cfg, 1e-7) == pytest.approx(f_sigma_limit(cfg), rel=1e-6)

    @pytest.mark.parametrize("k", REGIMES)
    def test_f_below_f1(self, k, rng):
        for _ in range(10):
            cfg = comparison_config(random_gated_sides(rng, k), k)
            top = f_sigma(cfg, 1.0)
            assert max(f_sigma(cfg, s) for s in np.linspace(0, 1, 41)) <= top + 1e-9

    @pytest.mark.parametrize("k", REGIMES)
    def test_formula_matches_geometry(self, k, rng):
        for _ in range(8):
            cfg = comparison_config(random_gated_sides(rng, k), k)
            for sigma in np.linspace(max(cfg.sigma_min, 0.05) + 1e-6, 1.0, 5):
                for v in ("B", "C"):
                    assert ob_length(cfg, sigma, v) == pytest.approx(ob_length_geometric(cfg, sigma, v), rel=1e-8)

    @pytest.mark.parametrize("k", REGIMES)
    def test_derivative_matches_finite_difference(self, k, rng):
        for _ in range(6):
            cfg = comparison_config(random_gated_sides(rng, k), k)
            # the angle form needs triangle B'O'D', which exists for sigma >= sigma_min
            for sigma in np.linspace(min(cfg.sigma_min + 0.05, 0.9), 0.99, 3):
                h = 1e-6
                fd = (ob_length(cfg, sigma + h) - ob_length(cfg, sigma - h)) / (2 * h)
                assert ob_derivative(cfg, sigma) == pytest.approx(fd, abs=1e-6)

    def test_sigma_range(self):
        cfg = comparison_config((1, 1, 1), 0.0)
        with pytest.raises(InvalidInputError):
            f_sigma(cfg, 1.5)
        with pytest.raises(InvalidInputError):
            ob_derivative(cfg, 0.0)

    def test_cotangent_identity(self, rng):
        for _ in range(50):
            ob, od, bd = rng.uniform(0.2, 1.2, 3)
            if ob + od <= bd or ob + bd <= od or od + bd <= ob:
                continue
            assert abs(cotangent_residual(ob, od, bd)) <= 1e-9
        assert abs(cotangent_residual(0.9, 0.5, 0.6)) <= 1e-12


class TestExperiments:
    def test_spec_validation(self):
        with pytest.raises(InvalidInputError):
            CatExperimentSpec("sphere_sample", -1.0)
        with pytest.raises(InvalidInputError):
            CatExperimentSpec("metric_tree", 0.5)
        with pytest.raises(InvalidInputError):
            CatExperimentSpec("torus", 0.0)
        with pytest.raises(InvalidInputError):
            CatExperimentSpec("unit_discrete", 0.0)
        with pytest.raises(InvalidInputError):
            CatExperimentSpec("euclidean_convex", 0.0, n=2)

    def test_generated_space_is_seeded(self):
        spec = CatExperimentSpec("sphere_sample", 1.0, n=10, seed=3)
        a, b = generate_space(spec), generate_space(spec)
        assert np.array_equal(a.d, b.d) and a.d.max() <= h_k(1.0)

    def test_tree_metric_is_four_point(self):
        d = random_tree_metric(12, np.random.default_rng(0))
        validate_distance_matrix(d)
        rng = np.random.default_rng(1)
        for _ in range(200):
            i, j, k, l = rng.choice(12, 4, replace=False)
            s = sorted([d[i, j] + d[k, l], d[i, k] + d[j, l], d[i, l] + d[j, k]])
            assert s[2] == pytest.approx(s[1], abs=1e-12)

    @pytest.mark.parametrize("family, k", [("sphere_sample", 1.0), ("hyperbolic_sample", -1.0),
                                           ("euclidean_convex", 0.0), ("sphere_sample", 4.0)])
    def test_no_violations_small(self, family, k):
        rep = verify_cat_bound(CatExperimentSpec(family, k, n=10, seed=1))
        assert rep.tested > 0 and rep.errors == 0 and rep.count == 0
        assert rep.worst_margin <= 1e-4

    def test_tree_all_neg_infinity(self):
        rep = verify_cat_bound(CatExperimentSpec("metric_tree", -1.0, n=12, seed=2))
        assert rep.count == 0 and all(r.status == NEG_INFINITY for r in rep.reports)

    def test_unit_discrete_equality(self):
        rep = verify_cat_bound(CatExperimentSpec("unit_discrete", 3.0, n=5, mode="discrete"))
        assert rep.tested == 10 and all(r.status == CAPPED for r in rep.reports)
        assert rep.worst_margin == pytest.approx(lambda_critical((1, 1, 1)) - 3.0)
        assert rep.count == 10
        buf = io.StringIO()
        write_violations(rep, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "i,j,l,a,b,c,g,kX,k,margin" and len(lines) == 11

    def test_discrete_mode_only_overestimates(self):
        spec = CatExperimentSpec("euclidean_convex", 0.0, n=8, mode="discrete")
        disc = verify_cat_bound(spec)
        cont = verify_cat_bound(CatExperimentSpec("euclidean_convex", 0.0, n=8))
        assert "upper estimate" in disc.summary() and "upper estimate" not in cont.summary()
        for d, c in zip(disc.reports, cont.reports):
            assert d.k_value >= c.k_value - 1e-9
