"""Metric spaces over integer point identifiers."""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Literal, Tuple

from errors import DomainError
from numeric import DEFAULT_TOLERANCE, Number, is_exact, leq, normalize, to_number

logger = logging.getLogger(__name__)

MetricKind = Literal["line", "plane", "matrix"]


@dataclass(frozen=True)
class MetricViolation:
    """One failed metric axiom, named by the offending points."""

    axiom: Literal["identity", "nonnegativity", "symmetry", "triangle"]
    points: Tuple[int, ...]
    detail: str


@dataclass(frozen=True)
class MetricSpace:
    """
    Distance oracle over points 0..point_count-1.

    Line coordinates are single numbers, plane coordinates are pairs, matrix
    spaces store the full distance table. Rational inputs stay exact; plane
    distances are Euclidean and therefore floats.
    """

    kind: MetricKind
    coordinates: Tuple = ()
    distances: Tuple[Tuple[Number, ...], ...] = ()
    _point_count: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "line":
            coords = tuple(to_number(c) for c in self.coordinates)
            object.__setattr__(self, "coordinates", coords)
            count = len(coords)
        elif self.kind == "plane":
            coords = []
            for i, c in enumerate(self.coordinates):
                if len(c) != 2:
                    raise DomainError(f"plane point {i} needs 2 coordinates, got {len(c)}")
                coords.append((to_number(c[0]), to_number(c[1])))
            object.__setattr__(self, "coordinates", tuple(coords))
            count = len(coords)
        elif self.kind == "matrix":
            rows = tuple(tuple(to_number(v) for v in row) for row in self.distances)
            for i, row in enumerate(rows):
                if len(row) != len(rows):
                    raise DomainError(f"distance matrix is not square: row {i} has {len(row)} entries, expected {len(rows)}")
            object.__setattr__(self, "distances", rows)
            count = len(rows)
        else:
            raise DomainError(f"unknown metric kind {self.kind!r}")
        object.__setattr__(self, "_point_count", count)

    @property
    def point_count(self) -> int:
        return self._point_count

    @property
    def exact(self) -> bool:
        """True when every distance is a rational computed without rounding."""
        if self.kind == "plane":
            return False
        if self.kind == "line":
            return all(is_exact(c) for c in self.coordinates)
        return all(is_exact(v) for row in self.distances for v in row)

    def check_point(self, a: int) -> None:
        if not isinstance(a, int) or isinstance(a, bool) or not 0 <= a < self._point_count:
            raise DomainError(f"invalid point id {a!r} (space has {self._point_count} points)", context={"point": a})

    def distance(self, a: int, b: int) -> Number:
        self.check_point(a)
        self.check_point(b)
        if self.kind == "line":
            return normalize(abs(self.coordinates[a] - self.coordinates[b]))
        if self.kind == "plane":
            if a == b:
                return 0
            (xa, ya), (xb, yb) = self.coordinates[a], self.coordinates[b]
            return math.hypot(float(xa - xb), float(ya - yb))
        return self.distances[a][b]


def distance(space: MetricSpace, a: int, b: int) -> Number:
    return space.distance(a, b)


def validate_metric(space: MetricSpace, tol: float = DEFAULT_TOLERANCE) -> List[MetricViolation]:
    """
    Check identity, non-negativity, symmetry and the triangle inequality.

    Line and plane spaces are metrics by construction and return no
    violations. Violations are reported once per unordered pair or triple.
    """
    if space.kind != "matrix":
        return []

    d = space.distances
    n = space.point_count
    violations: List[MetricViolation] = []

    for a in range(n):
        if d[a][a] != 0:
            violations.append(MetricViolation("identity", (a,), f"d({a},{a}) = {d[a][a]} != 0"))
        for b in range(n):
            if d[a][b] < 0:
                violations.append(MetricViolation("nonnegativity", (a, b), f"d({a},{b}) = {d[a][b]} < 0"))

    for a in range(n):
        for b in range(a + 1, n):
            if not (leq(d[a][b], d[b][a], tol) and leq(d[b][a], d[a][b], tol)):
                violations.append(MetricViolation("symmetry", (a, b), f"d({a},{b}) = {d[a][b]} != d({b},{a}) = {d[b][a]}"))

    for a in range(n):
        for c in range(a + 1, n):
            for b in range(n):
                if b in (a, c):
                    continue
                via = d[a][b] + d[b][c]
                if not leq(d[a][c], via, tol):
                    violations.append(
                        MetricViolation("triangle", (a, c, b), f"d({a},{c}) = {d[a][c]} > d({a},{b}) + d({b},{c}) = {via}")
                    )

    if violations:
        logger.debug(f"Metric validation found {len(violations)} violations")
    return violations

