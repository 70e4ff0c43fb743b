"""Plain records passed between the curvature, data and reporting layers."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sides import TripleSides

FINITE = "finite"
NEG_INFINITY = "neg_infinity"
CAPPED = "capped_at_lambda"
DEGENERATE = "degenerate"
ERROR = "error"
STATUSES = (FINITE, NEG_INFINITY, CAPPED, DEGENERATE, ERROR)


@dataclass(frozen=True)
class MetricTriple:
    """Three distinct point indices of a finite metric space and their sides."""

    i: int
    j: int
    l: int
    sides: TripleSides

    @property
    def indices(self):
        return (self.i, self.j, self.l)


@dataclass(frozen=True)
class CurvatureReport:
    """Per-triple outcome: total distance ``g``, Lambda, curvature and status."""

    triple: MetricTriple
    g: float
    lam: float
    k_value: float
    status: str
    message: str = ""

    @property
    def is_error(self) -> bool:
        return self.status == ERROR

    def same_numbers(self, other: "CurvatureReport") -> bool:
        """Field-wise equality that treats NaN as equal to NaN."""

        def eq(x, y):
            return (math.isnan(x) and math.isnan(y)) or x == y

        return (
            self.triple.indices == other.triple.indices
            and self.triple.sides.as_tuple() == other.triple.sides.as_tuple()
            and eq(self.g, other.g) and eq(self.lam, other.lam)
            and eq(self.k_value, other.k_value) and self.status == other.status
        )
