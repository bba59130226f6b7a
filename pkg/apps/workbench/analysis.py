"""Response graph, response-tree decomposition and the lemma checks of the greedy analysis."""
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from errors import AnalysisError, DomainError
from greedy import GreedyTrace, TieBreakPolicy, check_greedy_choices, replay_trace, run_greedy
from instance import Assignment, Instance, check_capacities, split_unit
from numeric import DEFAULT_TOLERANCE, Number, close, competitive_bound, exact_sum, format_number, is_exact, leq, normalize, ratio
from opt_solver import solve_opt

logger = logging.getLogger(__name__)

LEMMAS = (
    "greedy_step",
    "structure",
    "leaf_witness",
    "edge_bound",
    "ld_bound",
    "closed_form",
    "coefficient_bound",
    "tree_bound",
    "edge_conservation",
    "global_bound",
)


@dataclass(frozen=True)
class ResponseGraph:
    """
    Adversary edges (r_i, s_i) and online edges (s_sigma(i), r_i) over a unit instance.

    Requests served by the same unit site in both assignments form parallel
    pairs; they are excised up front and carried as ratio-1 mass.
    """

    k: int
    request_count: int
    site_count: int
    adversary_site: Tuple[int, ...]
    adversary_weight: Tuple[Number, ...]
    online_site: Tuple[int, ...]
    online_weight: Tuple[Number, ...]
    unfull_before: Tuple[int, ...]
    excised: Tuple[int, ...]

    @property
    def arrival_order(self) -> range:
        return range(self.request_count)

    @property
    def excised_mass(self) -> Number:
        """Both edges of every excised pair."""
        return exact_sum(2 * self.adversary_weight[r] for r in self.excised)

    @property
    def excised_weight(self) -> Number:
        """One edge of every excised pair; added back to each side's total."""
        return exact_sum(self.adversary_weight[r] for r in self.excised)

    def active_requests(self) -> List[int]:
        gone = set(self.excised)
        return [r for r in range(self.request_count) if r not in gone]

    def adversary_edges(self) -> List[Tuple[int, int, Number]]:
        return [(r, self.adversary_site[r], self.adversary_weight[r]) for r in self.active_requests()]

    def online_edges(self) -> List[Tuple[int, int, Number]]:
        return [(self.online_site[r], r, self.online_weight[r]) for r in self.active_requests()]

    @property
    def edge_count(self) -> int:
        return 2 * (self.request_count - len(self.excised))

    def was_unfull(self, site_id: int, request_id: int) -> bool:
        return bool(self.unfull_before[request_id] >> site_id & 1)


def build_response_graph(unit_inst: Instance, online: Assignment, adversary: Assignment, trace: GreedyTrace) -> ResponseGraph:
    """Assemble the response graph of a unit instance, excising parallel pairs."""
    if not unit_inst.is_unit():
        raise DomainError("response graph needs a unit instance (every a_j = 1); run split_unit first")
    check_capacities(unit_inst, online, online=True)
    check_capacities(unit_inst, adversary, online=False)
    if len(trace.unfull_before) != unit_inst.request_count:
        raise DomainError(f"trace covers {len(trace.unfull_before)} requests, instance has {unit_inst.request_count}")

    excised = tuple(r for r in range(unit_inst.request_count) if online.mapping[r] == adversary.mapping[r])
    if excised:
        logger.warning(f"Excised {len(excised)} parallel online/adversary pairs (accounted at ratio 1)")

    return ResponseGraph(
        k=unit_inst.k,
        request_count=unit_inst.request_count,
        site_count=unit_inst.site_count,
        adversary_site=tuple(adversary.mapping),
        adversary_weight=tuple(adversary.per_edge_cost),
        online_site=tuple(online.mapping),
        online_weight=tuple(online.per_edge_cost),
        unfull_before=tuple(trace.unfull_before),
        excised=excised,
    )


@dataclass
class ResponseTree:
    """
    Tree rooted at a request. Each request's only child is its adversary site;
    each internal site's children are its k online requests; leaves are sites
    that were unfull when the root arrived.
    """

    tree_id: int
    root: int
    k: int
    root_online_site: int
    root_online_weight: Number
    requests: List[int] = field(default_factory=list)
    adversary_site: Dict[int, int] = field(default_factory=dict)
    adversary_weight: Dict[int, Number] = field(default_factory=dict)
    online_weight: Dict[int, Number] = field(default_factory=dict)
    parent_site: Dict[int, int] = field(default_factory=dict)
    site_parent: Dict[int, int] = field(default_factory=dict)
    children: Dict[int, List[int]] = field(default_factory=dict)
    leaves: List[int] = field(default_factory=list)
    depth: Dict[int, int] = field(default_factory=dict)

    @property
    def sites(self) -> List[int]:
        return list(self.site_parent)

    @property
    def height(self) -> int:
        return 1 + max(self.depth.values(), default=0)

    def is_leaf(self, site_id: int) -> bool:
        return site_id not in self.children


def decompose(graph: ResponseGraph) -> List[ResponseTree]:
    """
    Split the response graph into response trees.

    Repeatedly take the latest remaining request, drop its online edge and
    grow downward: request -> adversary site; a site unfull at the root's
    arrival becomes a leaf, otherwise it must carry exactly k online edges
    whose requests become its children. Tree edges and requests are then
    removed. Revisiting a node means a cycle and raises AnalysisError.
    """
    k = graph.k
    removed = set(graph.excised)
    site_online: Dict[int, List[int]] = {}
    for r in graph.active_requests():
        site_online.setdefault(graph.online_site[r], []).append(r)

    trees: List[ResponseTree] = []
    for root in reversed(graph.arrival_order):
        if root in removed:
            continue
        root_server = graph.online_site[root]
        site_online[root_server].remove(root)
        tree = ResponseTree(
            tree_id=len(trees),
            root=root,
            k=k,
            root_online_site=root_server,
            root_online_weight=graph.online_weight[root],
        )
        unfull_at_root = graph.unfull_before[root]
        tree.depth[root] = 0
        seen = {root}
        queue = deque([root])

        while queue:
            x = queue.popleft()
            tree.requests.append(x)
            s = graph.adversary_site[x]
            tree.adversary_site[x] = s
            tree.adversary_weight[x] = graph.adversary_weight[x]
            if s in tree.site_parent:
                raise AnalysisError(f"site {s} reached twice (cycle through request {x})", root=root, component={"site": s})
            tree.site_parent[s] = x

            if unfull_at_root >> s & 1:
                tree.leaves.append(s)
                continue

            kids = site_online.get(s, [])
            if len(kids) != k:
                raise AnalysisError(
                    f"internal site {s} has {len(kids)} online children, expected {k}",
                    root=root,
                    component={"site": s, "children": list(kids)},
                )
            tree.children[s] = list(kids)
            site_online[s] = []
            for c in kids:
                if c in seen or c in removed:
                    raise AnalysisError(f"request {c} reached twice (cycle through site {s})", root=root, component={"request": c})
                seen.add(c)
                tree.parent_site[c] = s
                tree.online_weight[c] = graph.online_weight[c]
                tree.depth[c] = tree.depth[x] + 1
                queue.append(c)

        removed.update(tree.requests)
        trees.append(tree)

    logger.debug(f"Decomposed {graph.request_count} requests into {len(trees)} response trees")
    return trees


@dataclass(frozen=True)
class LeafDistances:
    request: Dict[int, Number]
    site: Dict[int, Number]
    root_server: Number


def leaf_distance(tree: ResponseTree) -> LeafDistances:
    """Tree-path distance from each node to the nearest leaf below it, bottom-up."""
    ld_request: Dict[int, Number] = {}
    ld_site: Dict[int, Number] = {}
    for r in reversed(tree.requests):
        s = tree.adversary_site[r]
        if tree.is_leaf(s):
            ld_site[s] = 0
        else:
            ld_site[s] = normalize(min(tree.online_weight[c] + ld_request[c] for c in tree.children[s]))
        ld_request[r] = normalize(tree.adversary_weight[r] + ld_site[s])
    root_server = normalize(tree.root_online_weight + ld_request[tree.root])
    return LeafDistances(ld_request, ld_site, root_server)


def _discount(k: int, weight: Number) -> Number:
    return Fraction(2, k) if is_exact(weight) else 2.0 / k


def weighted_tree_cost(tree: ResponseTree) -> Dict[int, Number]:
    """W(r) = d(r, s_r) + (2/k) * sum of W over the grandchildren below s_r."""
    w: Dict[int, Number] = {}
    for r in reversed(tree.requests):
        s = tree.adversary_site[r]
        own = tree.adversary_weight[r]
        if tree.is_leaf(s):
            w[r] = own
        else:
            below = exact_sum(w[c] for c in tree.children[s])
            w[r] = normalize(own + _discount(tree.k, below) * below)
    return w


def adversary_levels(tree: ResponseTree) -> Dict[int, List[Tuple[int, int, Number]]]:
    """D_l: adversary edges whose root path crosses l adversary edges (l starts at 1)."""
    levels: Dict[int, List[Tuple[int, int, Number]]] = {}
    for r in tree.requests:
        levels.setdefault(tree.depth[r] + 1, []).append((r, tree.adversary_site[r], tree.adversary_weight[r]))
    return levels


def weighted_cost_closed_form(tree: ResponseTree) -> Number:
    """Level-discounted sum over adversary edges; equals W at the root."""
    total: Number = 0
    for level, edges in sorted(adversary_levels(tree).items()):
        level_sum = exact_sum(w for _, _, w in edges)
        total = total + _discount(tree.k, level_sum) ** (level - 1) * level_sum
    return normalize(total) if is_exact(total) else total


def tree_costs(tree: ResponseTree) -> Tuple[Number, Number]:
    """(ON(T), OPT(T)); ON includes the root's deleted online edge."""
    on = exact_sum([tree.root_online_weight, *tree.online_weight.values()])
    opt = exact_sum(tree.adversary_weight.values())
    return on, opt


def coefficient_bounds(tree: ResponseTree) -> Dict[int, Number]:
    """
    Coefficient of each adversary edge (keyed by its request) in the sum of W
    over all requests of the tree, accumulated by walking up the ancestors.
    """
    coefficients: Dict[int, Number] = {}
    for q in tree.requests:
        factor = _discount(tree.k, tree.adversary_weight[q])
        coef: Number = 0
        step: Number = 1
        node: Optional[int] = q
        while node is not None:
            coef = coef + step
            step = step * factor
            site = tree.parent_site.get(node)
            node = tree.site_parent[site] if site is not None else None
        coefficients[q] = normalize(coef) if is_exact(coef) else coef
    return coefficients


@dataclass(frozen=True)
class TreeMetrics:
    ld: LeafDistances
    W: Dict[int, Number]
    D_levels: Dict[int, List[Tuple[int, int, Number]]]
    on_cost: Number
    opt_cost: Number
    height: int


def tree_metrics(tree: ResponseTree) -> TreeMetrics:
    on, opt = tree_costs(tree)
    return TreeMetrics(leaf_distance(tree), weighted_tree_cost(tree), adversary_levels(tree), on, opt, tree.height)


# ---------------------------------------------------------------------------
# Lemma report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TreeRecord:
    tree_id: int
    root: int
    on_cost: Number
    opt_cost: Number
    bound_rhs: Number
    passed: bool


@dataclass(frozen=True)
class LemmaFailure:
    lemma: str
    tree_id: Optional[int]
    node: Optional[str]
    lhs: Optional[Number]
    rhs: Optional[Number]
    detail: str = ""


@dataclass
class LemmaReport:
    k: int
    bound: Number
    greedy_total: Number = 0
    adversary_total: Number = 0
    excised_pairs: int = 0
    excised_mass: Number = 0
    trees: List[TreeRecord] = field(default_factory=list)
    counts: Dict[str, List[int]] = field(default_factory=lambda: {name: [0, 0] for name in LEMMAS})
    failures: List[LemmaFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def ratio(self) -> Optional[Number]:
        if not self.adversary_total:
            return None
        return ratio(self.greedy_total, self.adversary_total)

    def check(
        self,
        lemma: str,
        ok: bool,
        tree_id: Optional[int] = None,
        node: Optional[str] = None,
        lhs: Optional[Number] = None,
        rhs: Optional[Number] = None,
        detail: str = "",
    ) -> bool:
        self.counts[lemma][0] += 1
        if not ok:
            self.counts[lemma][1] += 1
            self.failures.append(LemmaFailure(lemma, tree_id, node, lhs, rhs, detail))
            logger.error(f"Lemma check '{lemma}' failed (tree={tree_id}, node={node}): {lhs} vs {rhs} {detail}")
        return ok

    def to_document(self) -> dict:
        def num(x):
            return None if x is None else format_number(x)

        return {
            "k": self.k,
            "bound": num(self.bound),
            "pass": self.passed,
            "greedy_total": num(self.greedy_total),
            "adversary_total": num(self.adversary_total),
            "ratio": num(self.ratio),
            "excised_pairs": self.excised_pairs,
            "excised_mass": num(self.excised_mass),
            "lemmas": {name: {"checked": c, "failed": f} for name, (c, f) in self.counts.items()},
            "trees": [
                {
                    "tree_id": t.tree_id,
                    "root": t.root,
                    "on_cost": num(t.on_cost),
                    "opt_cost": num(t.opt_cost),
                    "bound_rhs": num(t.bound_rhs),
                    "pass": t.passed,
                }
                for t in self.trees
            ],
            "failures": [
                {
                    "lemma": f.lemma,
                    "tree_id": f.tree_id,
                    "node": f.node,
                    "lhs": num(f.lhs),
                    "rhs": num(f.rhs),
                    "detail": f.detail,
                }
                for f in self.failures
            ],
        }


def _scaled(bound: Fraction, x: Number) -> Number:
    return normalize(bound * x) if is_exact(x) else float(bound) * float(x)


def check_lemmas(
    unit_inst: Instance,
    online: Assignment,
    adversary: Assignment,
    trace: GreedyTrace,
    tol: float = DEFAULT_TOLERANCE,
) -> LemmaReport:
    """
    Build the response graph, decompose it, and check every inequality of the
    analysis on every tree and node. Failures land in the report with their
    witness; a broken decomposition is reported, not raised.
    """
    if unit_inst.k < 3:
        raise DomainError(f"lemma checks need k >= 3 (got k={unit_inst.k}); 1 + 2/(k-2) is undefined")
    bound = competitive_bound(unit_inst.k)
    report = LemmaReport(k=unit_inst.k, bound=bound, greedy_total=online.total_cost, adversary_total=adversary.total_cost)

    bad_steps = check_greedy_choices(unit_inst, online, trace, tol)
    report.check("greedy_step", not bad_steps, lhs=len(bad_steps), rhs=0, detail=f"requests {bad_steps[:10]}" if bad_steps else "")

    graph = build_response_graph(unit_inst, online, adversary, trace)
    report.excised_pairs = len(graph.excised)
    report.excised_mass = graph.excised_mass

    try:
        trees = decompose(graph)
    except AnalysisError as e:
        report.check("structure", False, tree_id=None, node=f"request {e.root}", detail=e.message)
        return report

    on_sum: List[Number] = []
    opt_sum: List[Number] = []
    adversary_seen: Dict[int, int] = {}
    online_seen: Dict[int, int] = {}

    for tree in trees:
        tid = tree.tree_id
        metrics = tree_metrics(tree)
        ld, w = metrics.ld, metrics.W
        before = len(report.failures)

        internal_ok = all(len(kids) == tree.k for kids in tree.children.values())
        report.check("structure", internal_ok, tid, detail="internal site without exactly k children" if not internal_ok else "")
        report.check("structure", all(tree.adversary_site[r] in tree.site_parent for r in tree.requests), tid)

        leaf_mask = 0
        for s in tree.leaves:
            leaf_mask |= 1 << s
        for r in tree.requests:
            report.check("leaf_witness", graph.unfull_before[r] & leaf_mask == leaf_mask, tid, f"request {r}")

        for r in tree.requests:
            paid = tree.root_online_weight if r == tree.root else tree.online_weight[r]
            report.check("edge_bound", leq(paid, ld.request[r], tol), tid, f"request {r}", paid, ld.request[r])
            report.check("ld_bound", leq(ld.request[r], w[r], tol), tid, f"request {r}", ld.request[r], w[r])

        closed = weighted_cost_closed_form(tree)
        report.check("closed_form", close(closed, w[tree.root], tol), tid, f"request {tree.root}", w[tree.root], closed)

        coefficients = coefficient_bounds(tree)
        for q, coef in coefficients.items():
            report.check("coefficient_bound", leq(coef, bound, tol), tid, f"edge of request {q}", coef, bound)
        expanded = exact_sum(coefficients[q] * tree.adversary_weight[q] for q in tree.requests)
        report.check("coefficient_bound", close(exact_sum(w.values()), expanded, tol), tid, "sum of W", exact_sum(w.values()), expanded)

        rhs = _scaled(bound, metrics.opt_cost)
        report.check("tree_bound", leq(metrics.on_cost, rhs, tol), tid, f"request {tree.root}", metrics.on_cost, rhs)

        report.trees.append(TreeRecord(tid, tree.root, metrics.on_cost, metrics.opt_cost, rhs, len(report.failures) == before))
        on_sum.append(metrics.on_cost)
        opt_sum.append(metrics.opt_cost)
        for r in tree.requests:
            adversary_seen[r] = adversary_seen.get(r, 0) + 1
            online_seen[r] = online_seen.get(r, 0) + 1

    active = graph.active_requests()
    partition_ok = all(adversary_seen.get(r) == 1 and online_seen.get(r) == 1 for r in active) and len(adversary_seen) == len(active)
    report.check("edge_conservation", partition_ok, detail="" if partition_ok else "edges not partitioned by the trees")

    on_total = exact_sum([*on_sum, graph.excised_weight])
    opt_total = exact_sum([*opt_sum, graph.excised_weight])
    report.check("edge_conservation", close(on_total, online.total_cost, tol), node="online", lhs=on_total, rhs=online.total_cost)
    report.check("edge_conservation", close(opt_total, adversary.total_cost, tol), node="adversary", lhs=opt_total, rhs=adversary.total_cost)

    global_rhs = _scaled(bound, opt_total)
    report.check("global_bound", leq(on_total, global_rhs, tol), lhs=on_total, rhs=global_rhs)

    logger.debug(f"Checked {sum(c for c, _ in report.counts.values())} inequalities over {len(trees)} trees")
    return report


@dataclass(frozen=True)
class PipelineResult:
    instance: Instance
    online: Assignment
    adversary: Assignment
    report: LemmaReport


def verify_pipeline(
    inst: Instance,
    policy: TieBreakPolicy = TieBreakPolicy.HIGHEST_SITE_INDEX,
    adversary: Optional[Assignment] = None,
    tol: float = DEFAULT_TOLERANCE,
) -> PipelineResult:
    """Greedy, then OPT (unless an adversary is supplied), split to unit sites, replay and check."""
    online, _ = run_greedy(inst, policy)
    if adversary is None:
        adversary = solve_opt(inst).assignment
    unit_inst, unit_online, unit_adversary = split_unit(inst, online, adversary)
    unit_trace = replay_trace(unit_inst, unit_online)
    report = check_lemmas(unit_inst, unit_online, unit_adversary, unit_trace, tol)
    return PipelineResult(inst, online, adversary, report)
