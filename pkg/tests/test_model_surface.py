import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from metrictriples.exceptions import AmbiguityError, DomainError, InvalidInputError
from metrictriples.model_surface import (AmbientDescriptor, SurfacePoint, diameter, exp_map,
                                         geodesic_point, log_map, minimize_distance_sum, orientation,
                                         realize_triangle, surface_distance, triangle_angles)
from metrictriples.sides import TripleSides

from conftest import random_triangle

SPHERE = AmbientDescriptor.sphere(1.0)
HYP = AmbientDescriptor.hyperbolic(-1.0)
PLANE = AmbientDescriptor.euclidean(2)


def pt(amb, *c):
    return SurfacePoint(amb, np.array(c, dtype=float))


def random_points(rng, amb, n):
    if amb.kind == "euclidean":
        return rng.normal(size=(n, amb.dim))
    if amb.kind == "sphere":
        x = rng.normal(size=(n, 3))
        return amb.radius * x / np.linalg.norm(x, axis=1, keepdims=True)
    v = rng.normal(size=(n, 2))
    x0 = np.sqrt(amb.radius ** 2 + np.sum(v ** 2, axis=1))
    return np.column_stack([x0, v])


class TestAmbient:
    def test_parse_round_trip(self):
        for text in ("euclidean:3", "sphere:2.0", "hyperbolic:-0.5"):
            assert str(AmbientDescriptor.parse(text)) == text

    @pytest.mark.parametrize("text", ["sphere:-1", "hyperbolic:1", "torus:1", "euclidean:0", "sphere"])
    def test_parse_rejects(self, text):
        with pytest.raises(InvalidInputError):
            AmbientDescriptor.parse(text)

    def test_off_manifold_point(self):
        with pytest.raises(InvalidInputError):
            pt(SPHERE, 1, 1, 0)
        with pytest.raises(InvalidInputError):
            pt(HYP, -1, 0, 0)


class TestDistance:
    def test_examples(self):
        assert surface_distance(pt(SPHERE, 1, 0, 0), pt(SPHERE, -1, 0, 0)) == pytest.approx(math.pi)
        assert surface_distance(pt(HYP, 1, 0, 0), pt(HYP, math.cosh(1), math.sinh(1), 0)) == pytest.approx(1.0, rel=1e-14)
        assert surface_distance(pt(PLANE, 0, 0), pt(PLANE, 3, 4)) == 5.0

    def test_scaled_sphere(self):
        amb = AmbientDescriptor.sphere(4.0)
        assert surface_distance(pt(amb, 0.5, 0, 0), pt(amb, 0, 0.5, 0)) == pytest.approx(math.pi / 4)

    def test_ambient_mismatch(self):
        with pytest.raises(InvalidInputError):
            surface_distance(pt(SPHERE, 1, 0, 0), pt(HYP, 1, 0, 0))

    @pytest.mark.parametrize("amb", [SPHERE, HYP, PLANE, AmbientDescriptor.sphere(2.5),
                                     AmbientDescriptor.hyperbolic(-3.0)])
    def test_metric_axioms(self, amb, rng):
        P = [SurfacePoint(amb, x) for x in random_points(rng, amb, 3000)]
        for p, q, r in zip(P[0::3], P[1::3], P[2::3]):
            dpq, dqr, dpr = surface_distance(p, q), surface_distance(q, r), surface_distance(p, r)
            assert dpq == pytest.approx(surface_distance(q, p), abs=1e-12)
            assert dpr <= dpq + dqr + 1e-9
            assert surface_distance(p, p) == pytest.approx(0.0, abs=1e-7)

    def test_diameter(self):
        assert diameter(1) == math.pi and diameter(4) == math.pi / 2
        assert diameter(0) == math.inf and diameter(-1) == math.inf


class TestAngles:
    def test_right_triangle(self):
        assert triangle_angles((3, 4, 5), 0)[2] == pytest.approx(math.pi / 2, rel=1e-15)

    def test_octant(self):
        for ang in triangle_angles((math.pi / 2,) * 3, 1.0):
            assert ang == pytest.approx(math.pi / 2, rel=1e-14)

    def test_vertex_threshold(self):
        assert triangle_angles((1, 1, math.sqrt(3)), 0)[2] == pytest.approx(2 * math.pi / 3, rel=1e-14)

    def test_angle_sums(self):
        assert sum(triangle_angles((1, 1.2, 1.3), 0)) == pytest.approx(math.pi, rel=1e-14)
        assert sum(triangle_angles((1, 1.2, 1.3), 1)) > math.pi
        assert sum(triangle_angles((1, 1.2, 1.3), -1)) < math.pi

    def test_input_order_preserved(self):
        a = triangle_angles((5, 3, 4), 0)
        assert a[0] == pytest.approx(math.pi / 2)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            triangle_angles((3, 3, 3), 1.0)

    def test_continuity_in_k(self):
        base = triangle_angles((1, 1.2, 1.3), 0.0)
        for k in (1e-8, -1e-8):
            assert np.allclose(triangle_angles((1, 1.2, 1.3), k), base, atol=1e-6)


class TestRealization:
    def test_345(self):
        tri = realize_triangle((3, 4, 5), 0)
        assert np.allclose(tri.A.coords, [0, 0])
        assert np.allclose(tri.B.coords, [5, 0])
        assert np.allclose(tri.C.coords, [3.2, 2.4], atol=1e-14)

    def test_degenerate_collinear(self):
        tri = realize_triangle((1, 1, 2), 0)
        assert np.allclose(tri.C.coords, [1, 0], atol=1e-12)

    @pytest.mark.parametrize("k", [-2.0, -1.0, 0.0, 1.0, 2.0])
    def test_reproduces_sides(self, k, rng):
        done = 0
        while done < 40:
            sides = TripleSides(*random_triangle(rng))
            if k > 0 and sides.perimeter >= 2 * math.pi / math.sqrt(k):
                continue
            tri = realize_triangle(sides, k)
            got = sorted([surface_distance(tri.B, tri.C), surface_distance(tri.A, tri.C),
                          surface_distance(tri.A, tri.B)])
            assert np.allclose(got, sides.as_tuple(), rtol=1e-10)
            done += 1


class TestGeodesics:
    def test_endpoints_and_midpoint(self):
        p, q = pt(SPHERE, 1, 0, 0), pt(SPHERE, 0, 1, 0)
        assert np.allclose(geodesic_point(p, q, 0).coords, p.coords)
        assert np.allclose(geodesic_point(p, q, 1).coords, q.coords)
        assert np.allclose(geodesic_point(p, q, 0.5).coords, [1 / math.sqrt(2), 1 / math.sqrt(2), 0])

    def test_antipodal_ambiguous(self):
        with pytest.raises(AmbiguityError):
            geodesic_point(pt(SPHERE, 1, 0, 0), pt(SPHERE, -1, 0, 0), 0.5)

    def test_t_range(self):
        with pytest.raises(InvalidInputError):
            geodesic_point(pt(PLANE, 0, 0), pt(PLANE, 1, 0), 1.5)

    @pytest.mark.parametrize("amb", [SPHERE, HYP, PLANE])
    @given(t=st.floats(0, 1))
    def test_additivity(self, amb, t):
        rng = np.random.default_rng(int(t * 1e6))
        x = random_points(rng, amb, 2)
        p, q = SurfacePoint(amb, x[0]), SurfacePoint(amb, x[1])
        if amb.kind == "sphere" and surface_distance(p, q) > math.pi - 1e-6:
            return
        m = geodesic_point(p, q, t)
        d = surface_distance(p, q)
        assert surface_distance(p, m) + surface_distance(m, q) == pytest.approx(d, abs=1e-9)
        assert surface_distance(p, m) == pytest.approx(t * d, abs=1e-9)

    @pytest.mark.parametrize("amb", [SPHERE, HYP, PLANE])
    def test_exp_log_inverse(self, amb, rng):
        x = random_points(rng, amb, 2)
        p, q = SurfacePoint(amb, x[0]), SurfacePoint(amb, x[1])
        back = exp_map(p, log_map(p, q))
        assert surface_distance(back, q) == pytest.approx(0.0, abs=1e-7)

    def test_orientation_sign(self):
        A, B = pt(PLANE, 0, 0), pt(PLANE, 1, 0)
        assert orientation(A, B, pt(PLANE, 0.5, 1)) > 0 > orientation(A, B, pt(PLANE, 0.5, -1))


class TestDistanceSum:
    def test_equilateral_plane(self):
        anchors = np.array([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
        res = minimize_distance_sum(anchors[None], PLANE)
        assert res.value[0] == pytest.approx(math.sqrt(3), rel=1e-12)
        assert res.vertex[0] == -1

    def test_collinear_median(self):
        anchors = np.array([[0, 0], [1, 0], [2, 0]], dtype=float)
        res = minimize_distance_sum(anchors[None], PLANE)
        assert res.value[0] == pytest.approx(2.0, rel=1e-13)
        assert np.allclose(res.point[0], [1, 0], atol=1e-10)

    def test_obtuse_vertex(self):
        tri = realize_triangle((1, 1, 1.9), 0)
        res = minimize_distance_sum(tri.vertices[None], PLANE)
        assert res.value[0] == pytest.approx(2.0, rel=1e-13)
        assert res.vertex[0] >= 0
