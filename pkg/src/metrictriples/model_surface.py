"""Geometry of the constant-curvature model surfaces M_k.

Coordinate models
-----------------
* ``euclidean``: R^n with the usual norm (triangles are realized in R^2).
* ``sphere``: the sphere of radius ``1/sqrt(k)`` centred at the origin of R^3.
* ``hyperbolic``: the upper sheet of ``x0^2 - x1^2 - x2^2 = 1/(-k)`` in
  Minkowski space R^{1,2}.

The private ``_dist``/``_log``/``_exp`` kernels are vectorised over leading
axes; the public functions wrap them for single :class:`SurfacePoint` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from ._numerics import clamp_unit, half_angle_sq
from .exceptions import AmbiguityError, DomainError, InvalidInputError, SolverError
from .sides import DEGENERATE_RTOL, TripleSides, check_curvature

MANIFOLD_TOL = 1e-9
REALIZE_RTOL = 1e-10

_KINDS = ("euclidean", "sphere", "hyperbolic")


@dataclass(frozen=True)
class AmbientDescriptor:
    """Which model surface a point lives on.

    Use the constructors :meth:`euclidean`, :meth:`sphere`,
    :meth:`hyperbolic` or :meth:`for_curvature` rather than the raw fields.
    """

    kind: str
    dim: int = 2
    k: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInputError(f"unknown ambient kind {self.kind!r}; expected one of {_KINDS}")
        if self.kind == "euclidean":
            if int(self.dim) != self.dim or self.dim < 1:
                raise InvalidInputError(f"euclidean dimension must be a positive integer, got {self.dim!r}")
            if self.k != 0.0:
                raise InvalidInputError("euclidean ambient carries no curvature")
        else:
            k = check_curvature(self.k)
            if self.dim != 2:
                raise InvalidInputError("sphere and hyperbolic ambients are 2-dimensional surfaces")
            if self.kind == "sphere" and not k > 0:
                raise InvalidInputError(f"sphere requires k > 0, got {k!r}")
            if self.kind == "hyperbolic" and not k < 0:
                raise InvalidInputError(f"hyperbolic requires k < 0, got {k!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "k", float(self.k))

    @classmethod
    def euclidean(cls, dim: int = 2) -> "AmbientDescriptor":
        return cls("euclidean", dim, 0.0)

    @classmethod
    def sphere(cls, k: float = 1.0) -> "AmbientDescriptor":
        return cls("sphere", 2, k)

    @classmethod
    def hyperbolic(cls, k: float = -1.0) -> "AmbientDescriptor":
        return cls("hyperbolic", 2, k)

    @classmethod
    def for_curvature(cls, k: float) -> "AmbientDescriptor":
        """The 2-dimensional model surface M_k."""
        k = check_curvature(k)
        if k > 0:
            return cls.sphere(k)
        if k < 0:
            return cls.hyperbolic(k)
        return cls.euclidean(2)

    @classmethod
    def parse(cls, text: str) -> "AmbientDescriptor":
        """Parse ``euclidean:<dim>``, ``sphere:<k>`` or ``hyperbolic:<k>``."""
        kind, sep, arg = text.strip().partition(":")
        kind = kind.strip().lower()
        if not sep:
            raise InvalidInputError(f"ambient must look like 'kind:value', got {text!r}")
        try:
            if kind == "euclidean":
                return cls.euclidean(int(arg))
            if kind in ("sphere", "hyperbolic"):
                return cls(kind, 2, float(arg))
        except ValueError:
            raise InvalidInputError(f"bad ambient parameter in {text!r}") from None
        raise InvalidInputError(f"unknown ambient kind in {text!r}")

    def __str__(self):
        if self.kind == "euclidean":
            return f"euclidean:{self.dim}"
        return f"{self.kind}:{self.k!r}"

    @property
    def radius(self) -> float:
        """Curvature radius ``1/sqrt(|k|)`` (``inf`` for the plane)."""
        return math.inf if self.kind == "euclidean" else 1.0 / math.sqrt(abs(self.k))

    @property
    def coord_dim(self) -> int:
        return self.dim if self.kind == "euclidean" else 3

    @property
    def curvature(self) -> float:
        return self.k


@dataclass(frozen=True, eq=False)
class SurfacePoint:
    """A point of a model surface in its embedding coordinates."""

    ambient: AmbientDescriptor
    coords: np.ndarray

    def __post_init__(self):
        x = np.array(self.coords, dtype=float).reshape(-1)
        x.setflags(write=False)
        object.__setattr__(self, "coords", x)
        check_on_surface(x, self.ambient)

    def __repr__(self):
        return f"SurfacePoint({self.ambient}, {self.coords.tolist()})"


def check_on_surface(x: np.ndarray, ambient: AmbientDescriptor, *, where: str = "point"):
    """Raise :class:`InvalidInputError` unless ``x`` lies on ``ambient``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != ambient.coord_dim:
        raise InvalidInputError(
            f"{where} has {x.shape[-1]} coordinates, {ambient} needs {ambient.coord_dim}"
        )
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{where} has non-finite coordinates")
    if ambient.kind == "sphere":
        err = np.abs(np.linalg.norm(x, axis=-1) - ambient.radius)
        if np.any(err > MANIFOLD_TOL):
            raise InvalidInputError(
                f"{where} is off the sphere {ambient}: |x| differs from {ambient.radius!r} by {float(np.max(err)):.3g}"
            )
    elif ambient.kind == "hyperbolic":
        err = np.abs(minkowski(x, x) - ambient.radius ** 2)
        if np.any(err > MANIFOLD_TOL) or np.any(x[..., 0] <= 0):
            raise InvalidInputError(
                f"{where} is off the hyperboloid {ambient}: Minkowski form error {float(np.max(err)):.3g}"
            )


def minkowski(x, y):
    """Minkowski form ``x0 y0 - x1 y1 - x2 y2`` over the last axis."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x[..., 0] * y[..., 0] - np.sum(x[..., 1:] * y[..., 1:], axis=-1)


# ---------------------------------------------------------------------------
# vectorised kernels


def _dist(p, q, amb: AmbientDescriptor):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if amb.kind == "euclidean":
        return np.linalg.norm(p - q, axis=-1)
    if amb.kind == "sphere":
        cross = np.linalg.norm(np.cross(p, q), axis=-1)
        dot = np.sum(p * q, axis=-1)
        return amb.radius * np.arctan2(cross, dot)
    # chord in Minkowski norm: -<p-q,p-q> = 4 R^2 sinh^2(d / 2R)
    diff = p - q
    chord = np.sqrt(np.maximum(-minkowski(diff, diff), 0.0))
    R = amb.radius
    return 2.0 * R * np.arcsinh(chord / (2.0 * R))


def _metric(v, w, amb: AmbientDescriptor):
    """Riemannian inner product of tangent vectors in embedding coordinates."""
    if amb.kind == "hyperbolic":
        return -minkowski(v, w)
    return np.sum(np.asarray(v) * np.asarray(w), axis=-1)


def _project_tangent(p, w, amb: AmbientDescriptor):
    if amb.kind == "euclidean":
        return w
    R2 = amb.radius ** 2
    if amb.kind == "sphere":
        return w - (np.sum(p * w, axis=-1) / R2)[..., None] * p
    return w - (minkowski(p, w) / R2)[..., None] * p


def _log(p, q, amb: AmbientDescriptor):
    """Tangent vector at ``p`` pointing to ``q`` with length ``d(p, q)``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if amb.kind == "euclidean":
        return q - p
    w = _project_tangent(p, q, amb)
    wn = np.sqrt(np.maximum(_metric(w, w, amb), 0.0))
    d = _dist(p, q, amb)
    scale = np.divide(d, wn, out=np.zeros_like(d), where=wn > 0)
    return scale[..., None] * w


def _normalize(x, amb: AmbientDescriptor):
    if amb.kind == "sphere":
        return x * (amb.radius / np.linalg.norm(x, axis=-1))[..., None]
    if amb.kind == "hyperbolic":
        x = np.where(x[..., :1] < 0, -x, x)
        return x * (amb.radius / np.sqrt(minkowski(x, x)))[..., None]
    return x


def _exp(p, v, amb: AmbientDescriptor):
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if amb.kind == "euclidean":
        return p + v
    t = np.sqrt(np.maximum(_metric(v, v, amb), 0.0))
    R = amb.radius
    if amb.kind == "sphere":
        c, s = np.cos(t / R), np.sin(t / R)
    else:
        c, s = np.cosh(t / R), np.sinh(t / R)
    direction = np.divide(v, t[..., None], out=np.zeros_like(v), where=t[..., None] > 0)
    return _normalize(c[..., None] * p + (R * s)[..., None] * direction, amb)


def _polar(amb: AmbientDescriptor, r: float, theta: float) -> np.ndarray:
    """Point at distance ``r`` from the base point in direction ``theta``."""
    if amb.kind == "euclidean":
        x = np.zeros(amb.dim)
        x[0] = r * math.cos(theta)
        if amb.dim > 1:
            x[1] = r * math.sin(theta)
        return x
    R = amb.radius
    if amb.kind == "sphere":
        rad, ax = math.cos(r / R), math.sin(r / R)
    else:
        rad, ax = math.cosh(r / R), math.sinh(r / R)
    return R * np.array([rad, ax * math.cos(theta), ax * math.sin(theta)])


def base_point(amb: AmbientDescriptor) -> np.ndarray:
    return _polar(amb, 0.0, 0.0)


# ---------------------------------------------------------------------------
# public operations


def _same_ambient(p: SurfacePoint, q: SurfacePoint):
    if p.ambient != q.ambient:
        raise InvalidInputError(f"points live on different ambients: {p.ambient} vs {q.ambient}")


def surface_distance(p: SurfacePoint, q: SurfacePoint) -> float:
    """Geodesic distance between two points of the same model surface."""
    _same_ambient(p, q)
    return float(_dist(p.coords, q.coords, p.ambient))


def diameter(k: float) -> float:
    """Diameter of M_k: ``pi/sqrt(k)`` for ``k > 0``, ``inf`` otherwise."""
    k = check_curvature(k)
    return math.pi / math.sqrt(k) if k > 0 else math.inf


def _check_realizable(sides, k):
    perimeter = sum(sides)
    if k > 0 and perimeter > 2.0 * diameter(k) * (1.0 + DEGENERATE_RTOL):
        raise DomainError(
            f"perimeter {perimeter!r} exceeds 2*diameter = {2.0 * diameter(k)!r} of M_k with k={k!r}"
        )


def _angle(p, q, r, k) -> float:
    """Angle between sides ``p`` and ``q`` opposite side ``r``."""
    h = half_angle_sq(p, q, r, k)
    try:
        h = clamp_unit(h, what="sin^2 of half angle")
    except ValueError as exc:
        raise DomainError(f"sides ({p!r}, {q!r}, {r!r}) do not form a triangle in M_k: {exc}") from None
    if h < 0.0:
        raise DomainError(f"sides ({p!r}, {q!r}, {r!r}) violate the triangle inequality")
    return 2.0 * math.asin(math.sqrt(h))


def triangle_angles(sides, k: float):
    """Angles (radians) opposite each of the three given sides, in input order.

    Degenerate triples (``c == a + b``) give angles ``(0, 0, pi)``.

    >>> [round(t, 12) for t in triangle_angles((3, 4, 5), 0.0)]
    [0.643501108793, 0.927295218002, 1.570796326795]
    """
    k = check_curvature(k)
    if isinstance(sides, TripleSides):
        a, b, c = sides.as_tuple()
    else:
        a, b, c = (float(s) for s in sides)
        TripleSides(a, b, c)  # validation only
    _check_realizable((a, b, c), k)
    return (_angle(b, c, a, k), _angle(a, c, b, k), _angle(a, b, c, k))


@dataclass(frozen=True, eq=False)
class TriangleRealization:
    """Vertices A, B, C with |BC| = a, |AC| = b, |AB| = c."""

    A: SurfacePoint
    B: SurfacePoint
    C: SurfacePoint
    sides: TripleSides

    @property
    def ambient(self) -> AmbientDescriptor:
        return self.A.ambient

    @property
    def vertices(self) -> np.ndarray:
        return np.stack([self.A.coords, self.B.coords, self.C.coords])


def realize_triangle(sides, k: float) -> TriangleRealization:
    """Place a triangle with the given sorted sides in M_k.

    A sits at the base point, B on the reference geodesic (polar angle 0)
    at distance c, and C at distance b from A on the positive side.
    """
    sides = TripleSides.coerce(sides)
    k = check_curvature(k)
    a, b, c = sides.as_tuple()
    angle_a, _, _ = triangle_angles(sides, k)
    amb = AmbientDescriptor.for_curvature(k)
    A = SurfacePoint(amb, _polar(amb, 0.0, 0.0))
    B = SurfacePoint(amb, _polar(amb, c, 0.0))
    C = SurfacePoint(amb, _polar(amb, b, angle_a))
    tri = TriangleRealization(A, B, C, sides)
    for (p, q, want, name) in ((B, C, a, "BC"), (A, C, b, "AC"), (A, B, c, "AB")):
        got = surface_distance(p, q)
        if abs(got - want) > REALIZE_RTOL * max(want, 1.0):
            raise SolverError(
                f"realized |{name}| = {got!r} misses {want!r}",
                {"side": name, "got": got, "want": want, "k": k},
            )
    return tri


def geodesic_point(p: SurfacePoint, q: SurfacePoint, t: float) -> SurfacePoint:
    """Point at fraction ``t`` of the way along the geodesic from ``p`` to ``q``."""
    _same_ambient(p, q)
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise InvalidInputError(f"t must lie in [0, 1], got {t!r}")
    amb = p.ambient
    if amb.kind == "euclidean":
        return SurfacePoint(amb, p.coords + t * (q.coords - p.coords))
    d = surface_distance(p, q)
    if d == 0.0:
        return p
    theta = d / amb.radius
    if amb.kind == "sphere":
        if math.pi - theta <= 1e-12:
            raise AmbiguityError("antipodal points: the geodesic between them is not unique")
        w0, w1 = math.sin((1 - t) * theta), math.sin(t * theta)
        den = math.sin(theta)
    else:
        w0, w1 = math.sinh((1 - t) * theta), math.sinh(t * theta)
        den = math.sinh(theta)
    x = (w0 * p.coords + w1 * q.coords) / den
    return SurfacePoint(amb, _normalize(x, amb))


def exp_map(p: SurfacePoint, v) -> SurfacePoint:
    return SurfacePoint(p.ambient, _exp(p.coords, np.asarray(v, dtype=float), p.ambient))


def log_map(p: SurfacePoint, q: SurfacePoint) -> np.ndarray:
    _same_ambient(p, q)
    return _log(p.coords, q.coords, p.ambient)


def orientation(p: SurfacePoint, q: SurfacePoint, x: SurfacePoint) -> float:
    """Signed side of ``x`` relative to the oriented geodesic ``p -> q``.

    On the sphere and hyperboloid geodesics are cut out by planes through
    the origin, so the sign of ``det[p, q, x]`` decides; in the plane the
    2-D cross product does.
    """
    _same_ambient(p, q)
    _same_ambient(p, x)
    if p.ambient.kind == "euclidean":
        u = q.coords - p.coords
        w = x.coords - p.coords
        return float(u[0] * w[1] - u[1] * w[0])
    return float(np.linalg.det(np.stack([p.coords, q.coords, x.coords])))


# ---------------------------------------------------------------------------
# sum-of-distances minimisation (Fermat / geometric median of three points)


class DistanceSumMinimum(NamedTuple):
    value: np.ndarray  # (m,)
    point: np.ndarray  # (m, dim)
    vertex: np.ndarray  # (m,) index of the minimizing anchor, -1 if interior
    iterations: int


def _vertex_minima(anchors, amb):
    """Detect anchors that minimise the distance sum.

    Anchor ``j`` is optimal iff the unit tangents towards the two other
    anchors sum to a vector of length at most 1 (angle >= 2pi/3).
    """
    m = anchors.shape[0]
    vertex = np.full(m, -1)
    vertex_value = np.full(m, np.inf)
    for j in range(3):
        others = [i for i in range(3) if i != j]
        pj = anchors[:, j]
        total = np.zeros_like(pj)
        s = np.zeros(m)
        for i in others:
            v = _log(pj, anchors[:, i], amb)
            n = np.sqrt(np.maximum(_metric(v, v, amb), 0.0))
            total += np.divide(v, n[:, None], out=np.zeros_like(v), where=n[:, None] > 0)
            s += n
        norm = np.sqrt(np.maximum(_metric(total, total, amb), 0.0))
        hit = (norm <= 1.0) & (s < vertex_value)
        vertex = np.where(hit, j, vertex)
        vertex_value = np.where(hit, s, vertex_value)
    return vertex, vertex_value


def _objective(points, anchors, amb):
    return np.sum(_dist(points[:, None, :], anchors, amb), axis=1)


def _start_point(anchors, amb):
    centroid = anchors.mean(axis=1)
    return _normalize(centroid, amb) if amb.kind != "euclidean" else centroid


def minimize_distance_sum(anchors, ambient: AmbientDescriptor, *, tol: float = 1e-13,
                          coarse_tol: float = 1e-7, max_iter: int = 5000,
                          newton_iter: int = 50) -> DistanceSumMinimum:
    """Minimise ``sum_i d(P, v_i)`` over the model surface, for a batch of triples.

    Vertex optima are detected first from the angle criterion.  Remaining
    triples run a Riemannian Weiszfeld fixed-point iteration
    ``P <- exp_P(sum w_i log_P(v_i) / sum w_i)`` with ``w_i = 1/d(P, v_i)``
    down to a relative step of ``coarse_tol``; when a step fails to
    decrease the objective a bounded golden-section search along it is used
    instead.  Weiszfeld crawls when the optimum sits next to an anchor, so
    the iterate is then polished by damped Newton steps using the exact
    Hessian ``sum ct_k(d_i) (I - u_i u_i^T)`` of the distance functions.

    Parameters
    ----------
    anchors : array of shape (m, 3, coord_dim) or (3, coord_dim)
    tol : relative Newton step (w.r.t. the triple's largest side) at which to stop.
    """
    anchors = np.asarray(anchors, dtype=float)
    single = anchors.ndim == 2
    if single:
        anchors = anchors[None]
    amb = ambient
    vertex, vertex_value = _vertex_minima(anchors, amb)

    scale = np.max(_dist(anchors[:, [0, 0, 1]], anchors[:, [1, 2, 2]], amb), axis=1)
    P = _start_point(anchors, amb)
    value = _objective(P, anchors, amb)
    active = vertex < 0
    it = 0
    while np.any(active) and it < max_iter:
        it += 1
        idx = np.flatnonzero(active)
        Pa, Aa = P[idx], anchors[idx]
        logs = _log(Pa[:, None, :], Aa, amb)
        d = np.maximum(np.sqrt(np.maximum(_metric(logs, logs, amb), 0.0)), 1e-300)
        w = 1.0 / d
        step = np.sum(w[..., None] * logs, axis=1) / np.sum(w, axis=1)[:, None]
        Pn = _exp(Pa, step, amb)
        vn = _objective(Pn, Aa, amb)
        for n in np.flatnonzero(vn > value[idx]):
            Pn[n], vn[n] = _golden_step(Pa[n], step[n], Aa[n], amb, value[idx][n])
        step_len = np.sqrt(np.maximum(_metric(step, step, amb), 0.0))
        P[idx], value[idx] = Pn, vn
        active[idx[step_len <= coarse_tol * scale[idx]]] = False

    interior = np.flatnonzero(vertex < 0)
    converged = np.zeros(len(interior), dtype=bool)
    for _ in range(newton_iter):
        todo = interior[~converged]
        if todo.size == 0:
            break
        Pn, vn, step_len = _newton_step(P[todo], anchors[todo], value[todo], amb)
        P[todo], value[todo] = Pn, vn
        converged[~converged] = step_len <= tol * scale[todo]
    if not np.all(converged):
        bad = interior[~converged]
        raise SolverError(
            f"sum-of-distances minimisation did not converge for {bad.size} triple(s)",
            {"weiszfeld_iterations": it, "unconverged": bad.tolist()},
        )
    at_vertex = vertex >= 0
    if np.any(at_vertex):
        rows = np.flatnonzero(at_vertex)
        P[rows] = anchors[rows, vertex[rows]]
        value[rows] = vertex_value[rows]
    if single:
        return DistanceSumMinimum(value[:1], P[:1], vertex[:1], it)
    return DistanceSumMinimum(value, P, vertex, it)


def _ct(amb, d):
    if amb.kind == "euclidean":
        return 1.0 / d
    R = amb.radius
    if amb.kind == "sphere":
        return 1.0 / (R * np.tan(d / R))
    return 1.0 / (R * np.tanh(d / R))


def _newton_step(P, anchors, value, amb, max_halvings=30):
    logs = _log(P[:, None, :], anchors, amb)
    d = np.maximum(np.sqrt(np.maximum(_metric(logs, logs, amb), 0.0)), 1e-300)
    u = logs / d[..., None]
    grad = -np.sum(u, axis=1)
    # orthonormal tangent frame spanned by the first two unit tangents
    e1 = u[:, 0]
    e2 = u[:, 1] - _metric(u[:, 1], e1, amb)[:, None] * e1
    n2 = np.sqrt(np.maximum(_metric(e2, e2, amb), 0.0))
    e2 = np.divide(e2, n2[:, None], out=np.zeros_like(e2), where=n2[:, None] > 1e-14)
    c1 = _metric(u, e1[:, None, :], amb)
    c2 = _metric(u, e2[:, None, :], amb)
    wt = _ct(amb, d)
    h11 = np.sum(wt * (1.0 - c1 * c1), axis=1)
    h22 = np.sum(wt * (1.0 - c2 * c2), axis=1)
    h12 = -np.sum(wt * c1 * c2, axis=1)
    g1 = _metric(grad, e1, amb)
    g2 = _metric(grad, e2, amb)
    det = h11 * h22 - h12 * h12
    det = np.where(np.abs(det) > 0, det, 1.0)
    x1 = -(h22 * g1 - h12 * g2) / det
    x2 = -(h11 * g2 - h12 * g1) / det
    step = x1[:, None] * e1 + x2[:, None] * e2
    # never jump onto or past an anchor
    limit = 0.5 * np.min(d, axis=1)
    slen = np.sqrt(x1 * x1 + x2 * x2)
    shrink = np.where(slen > limit, limit / np.maximum(slen, 1e-300), 1.0)
    step = step * shrink[:, None]
    lam = np.ones(len(P))
    newP, newv = P.copy(), value.copy()
    pending = np.ones(len(P), dtype=bool)
    for _ in range(max_halvings + 1):
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            break
        cand = _exp(P[idx], lam[idx, None] * step[idx], amb)
        cv = _objective(cand, anchors[idx], amb)
        ok = cv <= value[idx]
        newP[idx[ok]], newv[idx[ok]] = cand[ok], cv[ok]
        pending[idx[ok]] = False
        lam[idx[~ok]] *= 0.5
    taken = np.where(pending, 0.0, lam * slen * shrink)
    return newP, newv, taken


def _golden_step(p, step, anchors, amb, current):
    def f(tau):
        x = _exp(p[None], tau * step[None], amb)
        return float(_objective(x, anchors[None], amb)[0])

    res = minimize_scalar(f, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-14})
    if res.fun <= current:
        return _exp(p[None], res.x * step[None], amb)[0], res.fun
    return p, current
