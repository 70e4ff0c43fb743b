"""Independent reference computations used only by the tests."""

import math

import mpmath
import numpy as np
from scipy.optimize import minimize


def planar_vertices(a, b, c):
    # A at the origin, B on the x-axis, C above it (law of cosines at A)
    cos_a = (b * b + c * c - a * a) / (2 * b * c)
    cos_a = min(1.0, max(-1.0, cos_a))
    return np.array([[0.0, 0.0], [c, 0.0], [b * cos_a, b * math.sqrt(1 - cos_a * cos_a)]])


def brute_force_fermat(a, b, c, n=201):
    """Minimum of the planar distance sum by grid search plus local refinement."""
    V = planar_vertices(a, b, c)

    def f(p):
        return float(np.sum(np.hypot(V[:, 0] - p[0], V[:, 1] - p[1])))

    lo, hi = V.min(axis=0), V.max(axis=0)
    xs = np.linspace(lo[0], hi[0], n)
    ys = np.linspace(lo[1], hi[1], n)
    X, Y = np.meshgrid(xs, ys)
    F = sum(np.hypot(X - vx, Y - vy) for vx, vy in V)
    i = np.unravel_index(np.argmin(F), F.shape)
    best = min(f(v) for v in V)
    start = np.array([X[i], Y[i]])
    res = minimize(f, start, method="Nelder-Mead",
                   options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 20000, "initial_simplex":
                            [start, start + [1e-2 * c, 0], start + [0, 1e-2 * c]]})
    return min(best, float(res.fun), float(F[i]))


def lambda_oracle(a, b, c, dps=40):
    """Lambda by high-precision root finding on the largest angle = 2 pi / 3 condition."""
    mpmath.mp.dps = dps
    a, b, c = (mpmath.mpf(v) for v in (a, b, c))
    q = a * a + b * b + a * b
    if abs(q - c * c) < mpmath.mpf(10) ** (-dps + 5):
        return 0.0

    def cos_angle(k):
        if k > 0:
            s = mpmath.sqrt(k)
            return (mpmath.cos(c * s) - mpmath.cos(a * s) * mpmath.cos(b * s)) / (mpmath.sin(a * s) * mpmath.sin(b * s))
        s = mpmath.sqrt(-k)
        return (mpmath.cosh(a * s) * mpmath.cosh(b * s) - mpmath.cosh(c * s)) / (mpmath.sinh(a * s) * mpmath.sinh(b * s))

    g = lambda k: cos_angle(k) + mpmath.mpf(1) / 2
    if q > c * c:
        hi = (2 * mpmath.pi / (a + b + c)) ** 2 * (1 - mpmath.mpf(10) ** -12)
        # first sign change from just above 0
        ks = [hi * i / 400 for i in range(1, 401)]
        prev = ks[0]
        for k in ks[1:]:
            if g(prev) * g(k) <= 0:
                return float(mpmath.findroot(g, (prev, k), solver="anderson"))
            prev = k
        raise RuntimeError("no root")
    lo = -mpmath.mpf(1)
    while g(lo) < 0:
        lo *= 2
    return float(mpmath.findroot(g, (lo, -mpmath.mpf(10) ** -30), solver="anderson"))
