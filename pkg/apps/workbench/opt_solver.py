"""Exact offline optimum via successive shortest paths, plus a brute-force oracle."""
import heapq
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from errors import DomainError, InfeasibleInstanceError
from instance import Assignment, Instance, make_assignment
from numeric import DEFAULT_TOLERANCE, Number, close, is_exact, leq, normalize

logger = logging.getLogger(__name__)


@dataclass
class Arc:
    tail: int
    head: int
    capacity: int
    cost: Number
    flow: int = 0


@dataclass
class FlowNetwork:
    """
    Source -> request (cap 1) -> site (cap 1, cost = distance) -> sink (cap a_j).

    Node ids: source 0, requests 1..n, sites n+1..n+m, sink n+m+1.
    """

    request_count: int
    site_count: int
    arcs: List[Arc] = field(default_factory=list)
    potentials: List[Number] = field(default_factory=list)

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return self.request_count + self.site_count + 1

    @property
    def node_count(self) -> int:
        return self.request_count + self.site_count + 2

    def request_node(self, rid: int) -> int:
        return 1 + rid

    def site_node(self, sid: int) -> int:
        return 1 + self.request_count + sid

    def reduced_cost(self, arc: Arc) -> Number:
        return arc.cost + self.potentials[arc.tail] - self.potentials[arc.head]


@dataclass(frozen=True)
class OptSolution:
    assignment: Assignment
    network: FlowNetwork


def _check_feasible(inst: Instance) -> None:
    total = sum(site.capacity for site in inst.sites)
    if total < inst.request_count:
        raise InfeasibleInstanceError(total, inst.request_count)


def solve_opt(inst: Instance) -> OptSolution:
    """
    Minimum-cost assignment under adversary capacities a_j.

    Requests enter one at a time; each is routed along a shortest augmenting
    path found by Dijkstra on reduced costs. Request nodes already placed are
    folded into site-to-site arcs a -> b costing min over r at a of
    d(r, b) - d(r, a), kept in lazy heaps, so a search touches only sites and
    the sink. Potentials keep every residual reduced cost non-negative.
    """
    _check_feasible(inst)
    m, n = inst.site_count, inst.request_count
    table = inst.distance_table
    sink = m

    where: List[int] = [-1] * n
    load = [0] * m
    potential: List[Number] = [0] * (m + 1)
    # move_heaps[a][b]: (d(r,b) - d(r,a), r) for requests r currently at a
    move_heaps: List[List[List[Tuple[Number, int]]]] = [[[] for _ in range(m)] for _ in range(m)]

    def place(rid: int, sid: int) -> None:
        where[rid] = sid
        row = table[rid]
        base = row[sid]
        heaps = move_heaps[sid]
        for b in range(m):
            if b != sid:
                heapq.heappush(heaps[b], (row[b] - base, rid))

    def cheapest_move(a: int, b: int) -> Optional[Tuple[Number, int]]:
        heap = move_heaps[a][b]
        while heap and where[heap[0][1]] != a:
            heapq.heappop(heap)
        return heap[0] if heap else None

    for rid in range(n):
        row = table[rid]
        offset = min(row[b] - potential[b] for b in range(m))
        dist: List[Optional[Number]] = [None] * (m + 1)
        pred: List[Optional[Tuple[int, int]]] = [None] * (m + 1)  # (previous site or -1, request moved)
        done = [False] * (m + 1)
        heap: List[Tuple[Number, int]] = []
        for b in range(m):
            dist[b] = row[b] - potential[b] - offset
            pred[b] = (-1, rid)
            heapq.heappush(heap, (dist[b], b))

        while heap:
            d, u = heapq.heappop(heap)
            if done[u] or d != dist[u]:
                continue
            done[u] = True
            if u == sink:
                break
            if load[u] < inst.sites[u].capacity:
                nd = d + potential[u] - potential[sink]
                if dist[sink] is None or nd < dist[sink]:
                    dist[sink], pred[sink] = nd, (u, -1)
                    heapq.heappush(heap, (nd, sink))
            for b in range(m):
                if b == u or done[b]:
                    continue
                move = cheapest_move(u, b)
                if move is None:
                    continue
                nd = d + move[0] + potential[u] - potential[b]
                if dist[b] is None or nd < dist[b]:
                    dist[b], pred[b] = nd, (u, move[1])
                    heapq.heappush(heap, (nd, b))

        if dist[sink] is None:
            raise InfeasibleInstanceError(sum(s.capacity for s in inst.sites), n)

        cap = dist[sink]
        for v in range(m + 1):
            dv = dist[v]
            potential[v] = normalize(potential[v] + (dv if dv is not None and done[v] and dv < cap else cap))

        # walk sink -> ... -> first site, collecting (site, request entering it)
        path = []
        v, _ = pred[sink]
        load[v] += 1
        while v != -1:
            prev, moved = pred[v]
            path.append((v, moved))
            v = prev
        for sid, moved in reversed(path):
            place(moved, sid)

    assignment = make_assignment(inst, where)
    network = _build_network(inst, where, potential)
    logger.debug(f"OPT solved: {n} requests on {m} sites, cost {assignment.total_cost}")
    return OptSolution(assignment, network)


def _build_network(inst: Instance, where: List[int], site_potential: List[Number]) -> FlowNetwork:
    """Materialise the full flow network with node potentials for the certificate."""
    n, m = inst.request_count, inst.site_count
    net = FlowNetwork(n, m)
    table = inst.distance_table
    load = [0] * m
    for sid in where:
        load[sid] += 1

    pot: List[Number] = [0] * net.node_count
    for sid in range(m):
        pot[net.site_node(sid)] = site_potential[sid]
    pot[net.sink] = site_potential[m]
    for rid in range(n):
        sid = where[rid]
        pot[net.request_node(rid)] = normalize(site_potential[sid] - table[rid][sid])
    pot[net.source] = min((pot[net.request_node(r)] for r in range(n)), default=0)
    net.potentials = pot

    for rid in range(n):
        net.arcs.append(Arc(net.source, net.request_node(rid), 1, 0, 1))
    for rid in range(n):
        for sid in range(m):
            net.arcs.append(Arc(net.request_node(rid), net.site_node(sid), 1, table[rid][sid], 1 if where[rid] == sid else 0))
    for sid in range(m):
        net.arcs.append(Arc(net.site_node(sid), net.sink, inst.sites[sid].capacity, 0, load[sid]))
    return net


def verify_certificate(network: FlowNetwork, tol: float = DEFAULT_TOLERANCE) -> List[str]:
    """
    Independent optimality check of a solved network.

    Confirms capacities, conservation, flow value n, non-negative reduced cost
    on every residual arc, and zero reduced cost on request->site arcs carrying
    flow and on arcs strictly between their bounds. Returns the problems found.
    """
    problems: List[str] = []
    balance: Dict[int, int] = {}
    for arc in network.arcs:
        if not 0 <= arc.flow <= arc.capacity:
            problems.append(f"arc {arc.tail}->{arc.head} flow {arc.flow} outside [0, {arc.capacity}]")
        balance[arc.tail] = balance.get(arc.tail, 0) - arc.flow
        balance[arc.head] = balance.get(arc.head, 0) + arc.flow

    n = network.request_count
    for node in range(network.node_count):
        b = balance.get(node, 0)
        expected = -n if node == network.source else n if node == network.sink else 0
        if b != expected:
            problems.append(f"node {node} has net inflow {b}, expected {expected}")

    first_site = network.site_node(0) if network.site_count else network.sink
    for arc in network.arcs:
        rc = network.reduced_cost(arc)
        if arc.flow < arc.capacity and not leq(0, rc, tol):
            problems.append(f"residual arc {arc.tail}->{arc.head} has negative reduced cost {rc}")
        if arc.flow > 0 and not leq(rc, 0, tol):
            problems.append(f"reverse of arc {arc.tail}->{arc.head} has negative reduced cost {-rc}")
        request_to_site = 1 <= arc.tail < first_site and arc.head != network.sink
        if arc.flow > 0 and (arc.flow < arc.capacity or request_to_site) and not close(rc, 0, tol):
            problems.append(f"arc {arc.tail}->{arc.head} carries flow with reduced cost {rc} != 0")
    return problems


def brute_force_opt(inst: Instance, max_requests: int = 8) -> Number:
    """
    Exhaustive minimum over capacity-respecting mappings, with cost pruning.

    Independent of the flow solver; only for tiny instances.
    """
    _check_feasible(inst)
    n, m = inst.request_count, inst.site_count
    if n > max_requests:
        raise DomainError(f"brute force limited to {max_requests} requests (got {n})", context={"requests": n})
    if n == 0:
        return 0

    table = inst.distance_table
    remaining = [site.capacity for site in inst.sites]
    best: List[Optional[Number]] = [None]

    def descend(rid: int, partial: Number) -> None:
        if best[0] is not None and not partial < best[0]:
            return
        if rid == n:
            best[0] = partial
            return
        row = table[rid]
        for sid in range(m):
            if remaining[sid]:
                remaining[sid] -= 1
                descend(rid + 1, partial + row[sid])
                remaining[sid] += 1

    descend(0, 0)
    result = best[0]
    return normalize(result) if is_exact(result) else result
