"""GREEDY_k: assign each arriving request to the nearest unfull site."""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

from errors import DomainError, GreedyInternalError
from instance import Assignment, Instance, check_capacities, make_assignment
from numeric import DEFAULT_TOLERANCE, Number, exact_sum, leq

logger = logging.getLogger(__name__)


class TieBreakPolicy(str, Enum):
    """Total order over sites at equal distance."""

    LOWEST_SITE_INDEX = "lowest_site_index"
    HIGHEST_SITE_INDEX = "highest_site_index"


@dataclass
class OccupancyState:
    """Per-site usage against the augmented capacity k * a_j."""

    used: List[int]
    capacity: List[int]

    @classmethod
    def empty(cls, inst: Instance) -> "OccupancyState":
        return cls([0] * inst.site_count, [inst.online_capacity(j) for j in range(inst.site_count)])

    def is_unfull(self, site_id: int) -> bool:
        return self.used[site_id] < self.capacity[site_id]

    def unfull_mask(self) -> int:
        mask = 0
        for j, (u, c) in enumerate(zip(self.used, self.capacity)):
            if u < c:
                mask |= 1 << j
        return mask

    def take(self, site_id: int) -> None:
        if self.used[site_id] >= self.capacity[site_id]:
            raise DomainError(f"site {site_id} is already full ({self.capacity[site_id]})", context={"site": site_id})
        self.used[site_id] += 1


@dataclass(frozen=True)
class GreedyTrace:
    """
    Per request, the chosen site and the bitmask of sites that were unfull
    when it arrived (bit j set = site j had spare online capacity).
    """

    chosen: Tuple[int, ...]
    unfull_before: Tuple[int, ...]

    def was_unfull(self, site_id: int, request_id: int) -> bool:
        return bool(self.unfull_before[request_id] >> site_id & 1)


def run_greedy(inst: Instance, policy: TieBreakPolicy = TieBreakPolicy.HIGHEST_SITE_INDEX) -> Tuple[Assignment, GreedyTrace]:
    """
    Simulate GREEDY_k over the arrival sequence.

    Linear scan over unfull sites per request; ties go to the lowest or
    highest site index according to policy.
    """
    policy = TieBreakPolicy(policy)
    prefer_high = policy is TieBreakPolicy.HIGHEST_SITE_INDEX
    state = OccupancyState.empty(inst)
    table = inst.distance_table

    unfull = list(range(inst.site_count))
    mask = state.unfull_mask()
    chosen: List[int] = []
    masks: List[int] = []

    for rid in range(inst.request_count):
        row = table[rid]
        best = -1
        best_d: Number = 0
        for j in unfull:
            d = row[j]
            if best < 0 or d < best_d or (prefer_high and d == best_d):
                best, best_d = j, d
        if best < 0:
            raise GreedyInternalError(f"no unfull site for request {rid}", context={"request": rid})

        masks.append(mask)
        chosen.append(best)
        state.take(best)
        if not state.is_unfull(best):
            unfull.remove(best)
            mask &= ~(1 << best)

    assignment = make_assignment(inst, chosen)
    logger.debug(f"Greedy ({policy.value}) served {inst.request_count} requests at cost {assignment.total_cost}")
    return assignment, GreedyTrace(tuple(chosen), tuple(masks))


def assignment_cost(inst: Instance, assign: Assignment) -> Number:
    """Recompute the total distance of an assignment from the metric."""
    if len(assign.mapping) != inst.request_count:
        raise DomainError(f"assignment covers {len(assign.mapping)} requests, instance has {inst.request_count}")
    total = []
    for rid, sid in enumerate(assign.mapping):
        if sid is None:
            raise DomainError(f"request {rid} is unmapped", context={"request": rid})
        total.append(inst.distance(rid, sid))
    return exact_sum(total)


def replay_trace(inst: Instance, online: Assignment) -> GreedyTrace:
    """Rebuild the unfull history of an online assignment, e.g. after a unit split."""
    check_capacities(inst, online, online=True)
    state = OccupancyState.empty(inst)
    mask = state.unfull_mask()
    masks = []
    for sid in online.mapping:
        masks.append(mask)
        state.take(sid)
        if not state.is_unfull(sid):
            mask &= ~(1 << sid)
    return GreedyTrace(tuple(online.mapping), tuple(masks))


def check_greedy_choices(
    inst: Instance, online: Assignment, trace: GreedyTrace, tol: float = DEFAULT_TOLERANCE
) -> List[int]:
    """
    Requests whose chosen site is farther than some site that was unfull at
    their arrival. Empty for any genuine greedy run.
    """
    table = inst.distance_table
    groups: dict = {}
    for site in inst.sites:
        first, mask = groups.get(site.point, (site.id, 0))
        groups[site.point] = (first, mask | 1 << site.id)

    bad = []
    for rid, sid in enumerate(online.mapping):
        row = table[rid]
        unfull = trace.unfull_before[rid]
        if not unfull >> sid & 1:
            bad.append(rid)
            continue
        for first, mask in groups.values():
            if unfull & mask and not leq(row[sid], row[first], tol):
                bad.append(rid)
                break
    return bad
