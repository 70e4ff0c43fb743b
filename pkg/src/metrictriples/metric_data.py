"""Loading, validating and writing metric data.

File formats (all CSV, comma separated):

* distance matrix: optional ``# labels: l0,l1,...`` line, then ``n`` rows of
  ``n`` decimal floats;
* point cloud: ``# ambient: euclidean:<dim>`` / ``sphere:<k>`` /
  ``hyperbolic:<k>`` line, optional labels line, then one coordinate row per
  point;
* curvature report: header ``i,j,l,a,b,c,g,lambda,k,status`` with floats in
  shortest round-trip form and ``-inf`` spelled out.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .exceptions import InvalidInputError
from .model_surface import AmbientDescriptor, _dist, check_on_surface
from .records import CurvatureReport, MetricTriple, STATUSES
from .sides import TripleSides

TRIANGLE_RTOL = 1e-12
POINT_DISTANCE_TOL = 1e-9
REPORT_HEADER = ("i", "j", "l", "a", "b", "c", "g", "lambda", "k", "status")


class ParseError(InvalidInputError):
    """Input text could not be parsed."""


class MetricError(InvalidInputError):
    """A distance matrix fails one of the metric axioms."""


def validate_distance_matrix(d, rtol: float = TRIANGLE_RTOL) -> np.ndarray:
    """Check that ``d`` is a metric on ``n`` points and return it as a float array.

    Raises :class:`MetricError` naming the first offending indices (in
    lexicographic order) for asymmetry, a nonzero diagonal, a non-positive
    off-diagonal entry, or a triangle-inequality violation beyond ``rtol``.
    """
    d = np.array(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise MetricError(f"distance matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        i, j = np.argwhere(~np.isfinite(d))[0]
        raise MetricError(f"distance ({i},{j}) is not finite: {float(d[i, j])!r}")
    diag = np.flatnonzero(np.diag(d) != 0.0)
    if diag.size:
        i = int(diag[0])
        raise MetricError(f"diagonal entry ({i},{i}) is {float(d[i, i])!r}, must be 0")
    asym = np.argwhere(np.abs(d - d.T) > rtol * np.maximum(np.abs(d), np.abs(d.T)))
    if asym.size:
        i, j = (int(v) for v in asym[0])
        raise MetricError(f"matrix is not symmetric: d({i},{j})={float(d[i, j])!r} but d({j},{i})={float(d[j, i])!r}")
    off = ~np.eye(len(d), dtype=bool)
    bad = np.argwhere(off & (d <= 0.0))
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise MetricError(f"distance ({i},{j}) is {float(d[i, j])!r}, distinct points need a positive distance")
    for i in range(len(d)):
        # row i: d(i, j) <= d(i, l) + d(l, j) for every (j, l)
        bound = d[i][None, :] + d.T  # [j, l] = d(i, l) + d(l, j)
        viol = d[i][:, None] > bound * (1.0 + rtol)
        if viol.any():
            j, l = (int(v) for v in np.argwhere(viol)[0])
            raise MetricError(
                f"triangle inequality violated: d({i},{j})={float(d[i, j])!r} > "
                f"d({i},{l})+d({l},{j})={float(d[i, l] + d[l, j])!r} (via {l})"
            )
    return d


@dataclass(eq=False)
class FiniteMetricSpace:
    """A validated finite metric space, optionally sampled from a model surface."""

    d: np.ndarray
    labels: Optional[Sequence[str]] = None
    ambient: Optional[AmbientDescriptor] = None
    points: Optional[np.ndarray] = None

    def __post_init__(self):
        self.d = validate_distance_matrix(self.d)
        self.d.setflags(write=False)
        n = len(self.d)
        if self.labels is None:
            self.labels = tuple(str(i) for i in range(n))
        else:
            self.labels = tuple(str(s) for s in self.labels)
            if len(self.labels) != n:
                raise InvalidInputError(f"{len(self.labels)} labels for {n} points")
        if (self.ambient is None) != (self.points is None):
            raise InvalidInputError("ambient and points must be given together")
        if self.points is not None:
            pts = np.array(self.points, dtype=float)
            if pts.shape != (n, self.ambient.coord_dim):
                raise InvalidInputError(f"points must have shape {(n, self.ambient.coord_dim)}, got {pts.shape}")
            check_on_surface(pts, self.ambient, where="point cloud")
            induced = _pairwise(pts, self.ambient)
            err = np.abs(induced - self.d)
            if np.any(err > POINT_DISTANCE_TOL):
                i, j = (int(v) for v in np.argwhere(err > POINT_DISTANCE_TOL)[0])
                raise InvalidInputError(
                    f"d({i},{j})={self.d[i, j]!r} disagrees with the surface distance {induced[i, j]!r}"
                )
            pts.setflags(write=False)
            self.points = pts

    @property
    def n(self) -> int:
        return len(self.d)

    @classmethod
    def from_points(cls, points, ambient: AmbientDescriptor, labels=None) -> "FiniteMetricSpace":
        pts = np.array(points, dtype=float)
        if pts.ndim != 2:
            raise InvalidInputError(f"points must be a 2-D array, got shape {pts.shape}")
        for r, row in enumerate(pts):
            check_on_surface(row, ambient, where=f"row {r}")
        return cls(_pairwise(pts, ambient), labels, ambient, pts)

    def triple(self, i: int, j: int, l: int) -> MetricTriple:
        idx = (int(i), int(j), int(l))
        if len(set(idx)) != 3:
            raise InvalidInputError(f"triple indices must be distinct, got {idx}")
        for v in idx:
            if not 0 <= v < self.n:
                raise InvalidInputError(f"index {v} out of range for {self.n} points")
        i, j, l = sorted(idx)
        d = self.d
        return MetricTriple(i, j, l, TripleSides(d[i, j], d[j, l], d[i, l]))

    def subspace(self, indices) -> "FiniteMetricSpace":
        idx = np.asarray(list(indices), dtype=int)
        pts = None if self.points is None else self.points[idx]
        return FiniteMetricSpace(self.d[np.ix_(idx, idx)], [self.labels[i] for i in idx], self.ambient, pts)

    def scaled(self, factor: float) -> "FiniteMetricSpace":
        """The same points with every distance multiplied by ``factor`` (drops coordinates)."""
        return FiniteMetricSpace(self.d * float(factor), self.labels)


def _pairwise(pts, ambient):
    d = _dist(pts[:, None, :], pts[None, :, :], ambient)
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return d


# ---------------------------------------------------------------------------
# reading


def _read_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8")
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            return fh.read()
    data = source.read()
    return data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data


def _parse_rows(text: str):
    """Split CSV text into (directives, numeric rows); directives are ``# key: value`` lines."""
    directives, rows = {}, []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if sep:
                directives[key.strip().lower()] = value.strip()
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError:
            raise ParseError(f"line {lineno}: cannot parse numbers from {raw!r}") from None
    return directives, rows


def _labels(directives):
    raw = directives.get("labels")
    return None if raw is None else [s.strip() for s in raw.split(",")]


def load_distance_matrix(source) -> FiniteMetricSpace:
    """Read a distance-matrix CSV (path, bytes, or file object) into a validated space."""
    directives, rows = _parse_rows(_read_text(source))
    n = len(rows)
    if n == 0:
        raise ParseError("no matrix rows found")
    for r, row in enumerate(rows):
        if len(row) != n:
            raise ParseError(f"row {r} has {len(row)} entries, expected {n}")
    return FiniteMetricSpace(np.array(rows), _labels(directives))


def load_point_cloud(source, ambient: Optional[AmbientDescriptor] = None) -> FiniteMetricSpace:
    """Read a point-cloud CSV; the ambient comes from the argument or the header."""
    directives, rows = _parse_rows(_read_text(source))
    header = directives.get("ambient")
    if header is not None:
        parsed = AmbientDescriptor.parse(header)
        if ambient is not None and ambient != parsed:
            raise InvalidInputError(f"ambient argument {ambient} conflicts with file header {parsed}")
        ambient = parsed
    if ambient is None:
        raise InvalidInputError("point cloud needs an ambient (argument or '# ambient:' header)")
    if not rows:
        raise ParseError("no coordinate rows found")
    for r, row in enumerate(rows):
        if len(row) != ambient.coord_dim:
            raise ParseError(f"row {r} has {len(row)} coordinates, {ambient} needs {ambient.coord_dim}")
    return FiniteMetricSpace.from_points(np.array(rows), ambient, _labels(directives))


# ---------------------------------------------------------------------------
# triples


class SplitMix64:
    """The SplitMix64 generator; fixed here so samples match across platforms."""

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = int(seed) & self.MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection (no modulo bias)."""
        limit = ((self.MASK + 1) // n) * n
        while True:
            x = self.next()
            if x < limit:
                return x % n


def enumerate_triples(space: FiniteMetricSpace, strategy: str = "all", count: Optional[int] = None,
                      seed: int = 0):
    """List metric triples of ``space``.

    ``strategy="all"`` gives every triple in lexicographic index order;
    ``strategy="sample"`` draws ``count`` distinct triples with SplitMix64
    seeded by ``seed`` (three indices per draw, rejecting repeats), in draw
    order.
    """
    n = space.n
    if n < 3:
        raise InvalidInputError(f"need at least 3 points for a triple, got {n}")
    if strategy == "all":
        return [space.triple(*t) for t in combinations(range(n), 3)]
    if strategy != "sample":
        raise InvalidInputError(f"unknown triple strategy {strategy!r}")
    total = math.comb(n, 3)
    if count is None or count < 0 or count > total:
        raise InvalidInputError(f"cannot sample {count} distinct triples out of C({n},3) = {total}")
    rng = SplitMix64(seed)
    seen, out = set(), []
    while len(out) < count:
        t = tuple(sorted((rng.below(n), rng.below(n), rng.below(n))))
        if t[0] == t[1] or t[1] == t[2] or t in seen:
            continue
        seen.add(t)
        out.append(space.triple(*t))
    return out


# ---------------------------------------------------------------------------
# reports


def format_float(x: float) -> str:
    """Shortest decimal that round-trips; ``-inf``, ``inf`` and ``nan`` spelled out."""
    return repr(float(x))


def _open_sink(sink):
    if isinstance(sink, (str, os.PathLike)):
        return open(sink, "w", encoding="utf-8", newline=""), True
    if isinstance(sink, (io.RawIOBase, io.BufferedIOBase)) or "b" in getattr(sink, "mode", ""):
        return io.TextIOWrapper(sink, encoding="utf-8", newline="", write_through=True), False
    return sink, False


def write_rows(header, rows, sink):
    """Write a CSV table to a path or a text/binary stream."""
    fh, owned = _open_sink(sink)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
        fh.flush()
    finally:
        if owned:
            fh.close()
        elif isinstance(fh, io.TextIOWrapper) and fh is not sink:
            fh.detach()


def report_row(rep: CurvatureReport):
    t = rep.triple
    return [t.i, t.j, t.l, *(format_float(v) for v in t.sides.as_tuple()),
            format_float(rep.g), format_float(rep.lam), format_float(rep.k_value), rep.status]


def write_report(reports, sink) -> None:
    """Write curvature reports as CSV (header ``i,j,l,a,b,c,g,lambda,k,status``)."""
    write_rows(REPORT_HEADER, (report_row(r) for r in reports), sink)


def read_report(source):
    """Parse a report CSV back into :class:`CurvatureReport` records."""
    text = _read_text(source)
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != REPORT_HEADER:
        raise ParseError(f"report header must be {','.join(REPORT_HEADER)}, got {header!r}")
    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(REPORT_HEADER):
            raise ParseError(f"line {lineno}: expected {len(REPORT_HEADER)} fields, got {len(row)}")
        try:
            i, j, l = (int(v) for v in row[:3])
            a, b, c, g, lam, k = (float(v) for v in row[3:9])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        status = row[9].strip()
        if status not in STATUSES:
            raise ParseError(f"line {lineno}: unknown status {status!r}")
        out.append(CurvatureReport(MetricTriple(i, j, l, TripleSides(a, b, c)), g, lam, k, status))
    return out
