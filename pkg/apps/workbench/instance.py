"""Problem instances: model, file format, generators and the unit-capacity split."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import orjson
from pydantic import BaseModel, ValidationError, model_validator

from errors import DomainError, InfeasibleInstanceError, InstanceFormatError
from metric import MetricSpace
from numeric import Number, competitive_bound, exact_sum, format_number, to_number
from store import dump_document

logger = logging.getLogger(__name__)

FORMAT_VERSION = "otp-1"
RANDOM_GRID = 10**6


@dataclass(frozen=True)
class Site:
    id: int
    point: int
    capacity: int


@dataclass(frozen=True)
class Request:
    id: int
    point: int


@dataclass(frozen=True)
class Instance:
    """
    Sites with adversary capacities a_j, augmentation factor k and requests in
    arrival order. The online capacity k * a_j is derived, never stored.
    """

    space: MetricSpace
    sites: Tuple[Site, ...]
    k: int
    requests: Tuple[Request, ...]

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        object.__setattr__(self, "requests", tuple(self.requests))
        if not isinstance(self.k, int) or self.k < 1:
            raise DomainError(f"augmentation factor k must be an integer >= 1 (got {self.k!r})")
        for idx, site in enumerate(self.sites):
            if site.id != idx:
                raise DomainError(f"site ids must be 0..m-1 in order (position {idx} has id {site.id})")
            if not isinstance(site.capacity, int) or site.capacity < 1:
                raise DomainError(f"site {site.id} capacity must be a positive integer (got {site.capacity!r})")
            self.space.check_point(site.point)
        for idx, req in enumerate(self.requests):
            if req.id != idx:
                raise DomainError(f"request ids must be 0..n-1 in arrival order (position {idx} has id {req.id})")
            self.space.check_point(req.point)
        total = sum(site.capacity for site in self.sites)
        if total < len(self.requests):
            raise InfeasibleInstanceError(total, len(self.requests))

    @property
    def site_count(self) -> int:
        return len(self.sites)

    @property
    def request_count(self) -> int:
        return len(self.requests)

    @property
    def exact(self) -> bool:
        return self.space.exact

    def online_capacity(self, site_id: int) -> int:
        return self.k * self.sites[site_id].capacity

    def is_unit(self) -> bool:
        return all(site.capacity == 1 for site in self.sites)

    @cached_property
    def distance_table(self) -> List[Tuple[Number, ...]]:
        """Per request, the distance to every site; rows are shared between requests at the same point."""
        by_point: Dict[int, Tuple[Number, ...]] = {}
        rows = []
        for req in self.requests:
            row = by_point.get(req.point)
            if row is None:
                row = tuple(self.space.distance(site.point, req.point) for site in self.sites)
                by_point[req.point] = row
            rows.append(row)
        return rows

    def distance(self, request_id: int, site_id: int) -> Number:
        if not 0 <= request_id < self.request_count:
            raise DomainError(f"invalid request id {request_id}")
        if not 0 <= site_id < self.site_count:
            raise DomainError(f"invalid site id {site_id}")
        return self.distance_table[request_id][site_id]


@dataclass(frozen=True)
class Assignment:
    """Per-request site choice with the distance paid for it."""

    mapping: Tuple[int, ...]
    per_edge_cost: Tuple[Number, ...]
    total_cost: Number


def make_assignment(inst: Instance, mapping: Sequence[int]) -> Assignment:
    """Price a request -> site mapping against the instance metric."""
    if len(mapping) != inst.request_count:
        raise DomainError(f"assignment covers {len(mapping)} requests, instance has {inst.request_count}")
    table = inst.distance_table
    costs = []
    for rid, sid in enumerate(mapping):
        if not isinstance(sid, int) or not 0 <= sid < inst.site_count:
            raise DomainError(f"request {rid} mapped to invalid site {sid!r}", context={"request": rid})
        costs.append(table[rid][sid])
    return Assignment(tuple(mapping), tuple(costs), exact_sum(costs))


def check_capacities(inst: Instance, assign: Assignment, online: bool) -> None:
    """Raise DomainError when any site receives more than k*a_j (online) or a_j (adversary) requests."""
    if len(assign.mapping) != inst.request_count:
        raise DomainError(f"assignment covers {len(assign.mapping)} requests, instance has {inst.request_count}")
    load = [0] * inst.site_count
    for rid, sid in enumerate(assign.mapping):
        if not isinstance(sid, int) or not 0 <= sid < inst.site_count:
            raise DomainError(f"request {rid} mapped to invalid site {sid!r}", context={"request": rid})
        load[sid] += 1
    for site in inst.sites:
        cap = inst.online_capacity(site.id) if online else site.capacity
        if load[site.id] > cap:
            who = "online" if online else "adversary"
            raise DomainError(
                f"{who} assignment puts {load[site.id]} requests on site {site.id} (capacity {cap})",
                context={"site": site.id, "load": load[site.id], "capacity": cap},
            )


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------

Literalish = Union[str, int, float]


class MetricDocument(BaseModel):
    kind: Literal["line", "plane", "matrix"]
    coordinates: Optional[List[Union[Literalish, List[Literalish]]]] = None
    distances: Optional[List[List[Literalish]]] = None

    @model_validator(mode="after")
    def _payload_matches_kind(self):
        if self.kind == "matrix":
            if self.distances is None:
                raise ValueError("matrix metric needs 'distances'")
        elif self.coordinates is None:
            raise ValueError(f"{self.kind} metric needs 'coordinates'")
        return self


class SiteDocument(BaseModel):
    id: int
    point: int
    capacity: int


class RequestDocument(BaseModel):
    id: int
    point: int


class InstanceDocument(BaseModel):
    version: Literal["otp-1"]
    metric: MetricDocument
    k: int
    sites: List[SiteDocument]
    requests: List[RequestDocument]


def _space_from_document(doc: MetricDocument) -> MetricSpace:
    if doc.kind == "matrix":
        return MetricSpace("matrix", distances=tuple(tuple(row) for row in doc.distances))
    if doc.kind == "plane":
        for i, c in enumerate(doc.coordinates):
            if not isinstance(c, list):
                raise InstanceFormatError("plane coordinates must be pairs", field=f"metric.coordinates.{i}")
        return MetricSpace("plane", coordinates=tuple(tuple(c) for c in doc.coordinates))
    for i, c in enumerate(doc.coordinates):
        if isinstance(c, list):
            raise InstanceFormatError("line coordinates must be scalars", field=f"metric.coordinates.{i}")
    return MetricSpace("line", coordinates=tuple(doc.coordinates))


def parse_instance(text: Union[str, bytes]) -> Instance:
    """
    Decode an instance document.

    Raises:
        InstanceFormatError: malformed JSON (with line/column) or schema mismatch (with field path)
        InfeasibleInstanceError: total adversary capacity below the request count
    """
    try:
        raw = orjson.loads(text)
    except orjson.JSONDecodeError as e:
        raise InstanceFormatError(f"invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from e

    try:
        doc = InstanceDocument.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise InstanceFormatError(f"schema error: {first['msg']}", field=field) from e

    try:
        space = _space_from_document(doc.metric)
    except (ValueError, ZeroDivisionError) as e:
        raise InstanceFormatError(f"bad metric: {e}", field="metric") from e

    try:
        return Instance(
            space=space,
            sites=tuple(Site(s.id, s.point, s.capacity) for s in doc.sites),
            k=doc.k,
            requests=tuple(Request(r.id, r.point) for r in doc.requests),
        )
    except InfeasibleInstanceError:
        raise
    except DomainError as e:
        raise InstanceFormatError(e.message) from e


def instance_document(inst: Instance) -> dict:
    space = inst.space
    if space.kind == "matrix":
        metric = {"kind": "matrix", "distances": [[format_number(v) for v in row] for row in space.distances]}
    elif space.kind == "plane":
        metric = {"kind": "plane", "coordinates": [[format_number(x), format_number(y)] for x, y in space.coordinates]}
    else:
        metric = {"kind": "line", "coordinates": [format_number(x) for x in space.coordinates]}
    return {
        "version": FORMAT_VERSION,
        "metric": metric,
        "k": inst.k,
        "sites": [{"id": s.id, "point": s.point, "capacity": s.capacity} for s in inst.sites],
        "requests": [{"id": r.id, "point": r.point} for r in inst.requests],
    }


def serialize_instance(inst: Instance) -> str:
    """Canonical text form; parse_instance(serialize_instance(x)) == x."""
    return dump_document(instance_document(inst))


# ---------------------------------------------------------------------------
# Lower-bound family
# ---------------------------------------------------------------------------

def _batch_sizes(k: int, m: int) -> List[int]:
    return [k ** (m - i) for i in range(1, m + 1)]


def gen_lower_bound(k: int, m: int, epsilon: Union[Number, str] = 0) -> Instance:
    """
    Line instance on which greedy approaches its guarantee.

    Site s_1 sits at -1 and s_i at 2^(i-1) - 1 with a_i = k^(m-i). Batch 1 is
    k^(m-1) requests at 0; batch i >= 2 is k^(m-i) requests on s_i. A positive
    epsilon shifts every request right so greedy's choice of s_(i+1) over s_1
    becomes strict.
    """
    if not isinstance(k, int) or k < 3:
        raise DomainError(f"lower-bound family needs integer k >= 3 (got {k!r})")
    if not isinstance(m, int) or m < 1:
        raise DomainError(f"lower-bound family needs integer m >= 1 (got {m!r})")
    try:
        eps = to_number(epsilon)
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"epsilon must be a number (got {epsilon!r})") from e
    if eps < 0:
        raise DomainError(f"epsilon must be non-negative (got {epsilon!r})")

    site_coords = [-1] + [2 ** (i - 1) - 1 for i in range(2, m + 1)]
    batch_coords = [0] + [2 ** (i - 1) - 1 for i in range(2, m + 1)]
    coords = site_coords + [c + eps for c in batch_coords]

    sites = [Site(i, i, a) for i, a in enumerate(_batch_sizes(k, m))]
    requests = []
    for batch, size in enumerate(_batch_sizes(k, m)):
        start, point = len(requests), m + batch
        requests.extend(Request(start + j, point) for j in range(size))

    logger.debug(f"Generated lower-bound instance k={k} m={m} eps={format_number(eps)}: {len(requests)} requests")
    return Instance(MetricSpace("line", coordinates=tuple(coords)), tuple(sites), k, tuple(requests))


def lower_bound_adversary(inst: Instance, m: int) -> Assignment:
    """The witness assignment serving batch i from s_i; costs k^(m-1) at epsilon 0."""
    mapping = []
    for batch, size in enumerate(_batch_sizes(inst.k, m)):
        mapping.extend([batch] * size)
    if len(mapping) != inst.request_count:
        raise DomainError(f"instance does not match the lower-bound shape for m={m}")
    return make_assignment(inst, mapping)


def lower_bound_greedy_cost(k: int, m: int) -> int:
    """Greedy's cost on the family, summed batch by batch."""
    return sum(k ** (m - i) * 2 ** (i - 1) for i in range(1, m + 1))


def lower_bound_greedy_closed_form(k: int, m: int) -> Fraction:
    return k ** (m - 1) * competitive_bound(k) * (1 - Fraction(2, k) ** m)


def lower_bound_ratio(k: int, m: int) -> Fraction:
    """Greedy/OPT on the family: (1 + 2/(k-2)) * (1 - (2/k)^m)."""
    return competitive_bound(k) * (1 - Fraction(2, k) ** m)


def batches_for_gap(k: int, gap: Union[Number, str]) -> int:
    """Smallest m with (2/k)^m < ((k-2)/k) * gap, so greedy exceeds (1 + 2/(k-2) - gap) * OPT."""
    try:
        g = to_number(gap)
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"gap must be a number (got {gap!r})") from e
    if k < 3:
        raise DomainError(f"k must be >= 3 (got {k})")
    if g <= 0:
        raise DomainError(f"gap must be positive (got {gap!r})")
    target = Fraction(k - 2, k) * Fraction(g)
    m, power = 1, Fraction(2, k)
    while power >= target:
        m += 1
        power *= Fraction(2, k)
    return m


# ---------------------------------------------------------------------------
# Random family
# ---------------------------------------------------------------------------

def gen_random(
    site_count: int,
    request_count: int,
    k: int,
    space_kind: str,
    capacity_max: int,
    seed: int,
) -> Instance:
    """
    Seeded random instance on [0,1] (line) or [0,1]^2 (plane).

    Coordinates are drawn on a 1e-6 grid so the line family stays exact.
    Capacities are uniform in [1, capacity_max], then raised round-robin until
    they cover the requests.
    """
    if site_count < 1:
        raise DomainError(f"site_count must be >= 1 (got {site_count})")
    if request_count < 0:
        raise DomainError(f"request_count must be >= 0 (got {request_count})")
    if capacity_max < 1:
        raise DomainError(f"capacity_max must be >= 1 (got {capacity_max})")
    if space_kind not in ("line", "plane"):
        raise DomainError(f"random instances support line or plane metrics (got {space_kind!r})")
    if site_count * capacity_max < request_count:
        raise DomainError(
            f"cannot repair feasibility: {site_count} sites x capacity {capacity_max} < {request_count} requests",
            context={"site_count": site_count, "capacity_max": capacity_max, "request_count": request_count},
        )

    rng = np.random.default_rng(seed)
    caps = [int(c) for c in rng.integers(1, capacity_max + 1, size=site_count)]
    deficit = request_count - sum(caps)
    while deficit > 0:
        for j in range(site_count):
            if deficit == 0:
                break
            if caps[j] < capacity_max:
                caps[j] += 1
                deficit -= 1

    total_points = site_count + request_count
    if space_kind == "line":
        raw = rng.integers(0, RANDOM_GRID + 1, size=total_points)
        space = MetricSpace("line", coordinates=tuple(Fraction(int(v), RANDOM_GRID) for v in raw))
    else:
        raw = rng.integers(0, RANDOM_GRID + 1, size=(total_points, 2))
        space = MetricSpace(
            "plane", coordinates=tuple((Fraction(int(x), RANDOM_GRID), Fraction(int(y), RANDOM_GRID)) for x, y in raw)
        )

    sites = tuple(Site(j, j, caps[j]) for j in range(site_count))
    requests = tuple(Request(i, site_count + i) for i in range(request_count))
    return Instance(space, sites, k, requests)


# ---------------------------------------------------------------------------
# Unit-capacity split
# ---------------------------------------------------------------------------

def split_unit(inst: Instance, online: Assignment, adversary: Assignment) -> Tuple[Instance, Assignment, Assignment]:
    """
    Replace every site by a_j co-located copies with adversary capacity 1.

    Copies of site j get consecutive ids. Adversary requests at j go one per
    copy; online requests at j fill copies in index order, k per copy, in
    arrival order. Every per-request distance is unchanged.
    """
    check_capacities(inst, online, online=True)
    check_capacities(inst, adversary, online=False)

    offsets = []
    unit_sites = []
    for site in inst.sites:
        start = len(unit_sites)
        offsets.append(start)
        unit_sites.extend(Site(start + c, site.point, 1) for c in range(site.capacity))

    unit_inst = Instance(inst.space, tuple(unit_sites), inst.k, inst.requests)

    online_fill = [0] * inst.site_count
    adversary_fill = [0] * inst.site_count
    online_map, adversary_map = [], []
    for rid in range(inst.request_count):
        j = online.mapping[rid]
        online_map.append(offsets[j] + online_fill[j] // inst.k)
        online_fill[j] += 1
        j = adversary.mapping[rid]
        adversary_map.append(offsets[j] + adversary_fill[j])
        adversary_fill[j] += 1

    unit_online = make_assignment(unit_inst, online_map)
    unit_adversary = make_assignment(unit_inst, adversary_map)
    logger.debug(f"Split {inst.site_count} sites into {unit_inst.site_count} unit sites")
    return unit_inst, unit_online, unit_adversary
