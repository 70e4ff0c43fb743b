"""Side lengths of a metric triple and the extended-real curvature value."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .exceptions import InvalidInputError

DEGENERATE_RTOL = 1e-12
NEG_INF = -math.inf


@dataclass(frozen=True)
class TripleSides:
    """Three positive lengths sorted so that ``a <= b <= c <= a + b``.

    Inputs may be given in any order; they are sorted on construction.
    A triple with ``c`` exceeding ``a + b`` by at most a relative 1e-12 is
    accepted (round-off) and flagged degenerate, as is ``c == a + b``.

    >>> TripleSides(5, 3, 4)
    TripleSides(a=3.0, b=4.0, c=5.0)
    """

    a: float
    b: float
    c: float
    degenerate: bool = field(init=False, repr=False, compare=False)

    def __init__(self, a, b, c):
        try:
            vals = sorted(float(v) for v in (a, b, c))
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"side lengths must be real numbers: {exc}") from None
        for v in vals:
            if not math.isfinite(v) or v <= 0.0:
                raise InvalidInputError(f"side lengths must be positive and finite, got {v!r}")
        lo, mid, hi = vals
        slack = DEGENERATE_RTOL * (lo + mid)
        if hi > lo + mid + slack:
            raise InvalidInputError(
                f"sides ({lo!r}, {mid!r}, {hi!r}) violate the triangle inequality: "
                f"{hi!r} > {lo!r} + {mid!r}"
            )
        object.__setattr__(self, "a", lo)
        object.__setattr__(self, "b", mid)
        object.__setattr__(self, "c", hi)
        object.__setattr__(self, "degenerate", hi >= lo + mid - slack)

    @classmethod
    def coerce(cls, value) -> "TripleSides":
        if isinstance(value, cls):
            return value
        try:
            a, b, c = value
        except (TypeError, ValueError):
            raise InvalidInputError(f"expected three side lengths, got {value!r}") from None
        return cls(a, b, c)

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def as_tuple(self):
        return (self.a, self.b, self.c)

    @property
    def perimeter(self) -> float:
        return self.a + self.b + self.c

    @property
    def semiperimeter(self) -> float:
        return 0.5 * (self.a + self.b + self.c)

    @property
    def heron_area(self) -> float:
        """Euclidean area by Heron's formula (0 for degenerate triples)."""
        a, b, c = self.a, self.b, self.c
        # Kahan's ordering of Heron's formula, stable for needle triangles.
        prod = (c + (b + a)) * (a - (c - b)) * (a + (c - b)) * (c + (b - a))
        return 0.25 * math.sqrt(max(prod, 0.0))

    @property
    def max_curvature(self) -> float:
        """Largest ``k`` for which a triangle with these sides exists in M_k."""
        return (2.0 * math.pi / self.perimeter) ** 2

    def scaled(self, factor: float) -> "TripleSides":
        return TripleSides(self.a * factor, self.b * factor, self.c * factor)


def check_curvature(k, *, allow_neg_inf=False) -> float:
    """Validate a curvature value; ``-inf`` only where explicitly allowed."""
    try:
        k = float(k)
    except (TypeError, ValueError):
        raise InvalidInputError(f"curvature must be a real number, got {k!r}") from None
    if math.isnan(k) or k == math.inf or (k == NEG_INF and not allow_neg_inf):
        raise InvalidInputError(f"curvature must be finite, got {k!r}")
    return k


def format_curvature(k: float) -> str:
    """Shortest round-trip decimal, with ``-inf`` spelled out."""
    return repr(float(k))
