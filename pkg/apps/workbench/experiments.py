"""Experiment sweeps: lower-bound reproduction rows and seeded random campaigns."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np
import pandas as pd

from analysis import LemmaReport, verify_pipeline
from errors import DomainError
from greedy import TieBreakPolicy, run_greedy
from instance import Instance, gen_lower_bound, gen_random, lower_bound_adversary, lower_bound_greedy_cost
from numeric import DEFAULT_TOLERANCE, Number, competitive_bound, format_ratio, leq, normalize, ratio, to_number

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["instance_id", "k", "m_or_seed", "greedy_cost", "opt_cost", "ratio", "bound", "lemma_pass"]


@dataclass(frozen=True)
class ExperimentRow:
    instance_id: int
    k: int
    m_or_seed: int
    greedy_cost: Number
    opt_cost: Number
    lemma_pass: bool

    @property
    def bound(self) -> Number:
        return normalize(competitive_bound(self.k))

    @property
    def ratio(self) -> Optional[Number]:
        """Empty when OPT is 0."""
        if self.opt_cost == 0:
            return None
        return ratio(self.greedy_cost, self.opt_cost)

    def bound_holds(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        return leq(self.greedy_cost, competitive_bound(self.k) * self.opt_cost, tol)

    def to_record(self, exact: bool) -> dict:
        r = self.ratio
        return {
            "instance_id": self.instance_id,
            "k": self.k,
            "m_or_seed": self.m_or_seed,
            "greedy_cost": format_ratio(self.greedy_cost, exact),
            "opt_cost": format_ratio(self.opt_cost, exact),
            "ratio": None if r is None else format_ratio(r, exact),
            "bound": format_ratio(self.bound, exact),
            "lemma_pass": "true" if self.lemma_pass else "false",
        }


@dataclass(frozen=True)
class InstanceOutcome:
    """One evaluated instance; report is None when the lemma checks were skipped."""

    row: ExperimentRow
    report: Optional[LemmaReport] = None
    space: str = "line"


def write_csv(rows: Iterable[ExperimentRow], stream: TextIO, exact: bool = False) -> None:
    """Header always present, columns in ExperimentRow order."""
    frame = pd.DataFrame([row.to_record(exact) for row in rows], columns=CSV_COLUMNS)
    frame.to_csv(stream, index=False, lineterminator="\n")


# ---------------------------------------------------------------------------
# Lower-bound family
# ---------------------------------------------------------------------------

def parse_m_range(text: str) -> Tuple[int, int]:
    """'A..B' (inclusive) or a single integer."""
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise DomainError(f"m-range must look like A..B (got {text!r})")
    if lo < 1 or hi < lo:
        raise DomainError(f"m-range needs 1 <= A <= B (got {text!r})")
    return lo, hi


def lower_bound_outcome(
    instance_id: int,
    k: int,
    m: int,
    epsilon: str = "0",
    policy: TieBreakPolicy = TieBreakPolicy.HIGHEST_SITE_INDEX,
    tol: float = DEFAULT_TOLERANCE,
    full_check_max_requests: int = 12000,
) -> InstanceOutcome:
    """
    Simulate greedy on the lower-bound instance for (k, m).

    Small instances go through the full pipeline (solver OPT plus lemma
    checks); larger ones are priced against the witness adversary. At
    epsilon 0 the simulated greedy cost must equal the batch-sum formula.
    """
    inst = gen_lower_bound(k, m, epsilon)
    if inst.request_count <= full_check_max_requests:
        result = verify_pipeline(inst, policy, tol=tol)
        online, opt_cost, report = result.online, result.adversary.total_cost, result.report
        checks_pass = report.passed
    else:
        logger.info(f"k={k} m={m}: {inst.request_count} requests, pricing against the witness adversary")
        online, _ = run_greedy(inst, policy)
        opt_cost = lower_bound_adversary(inst, m).total_cost
        report = None
        checks_pass = True

    if to_number(epsilon) == 0:
        expected = lower_bound_greedy_cost(k, m)
        if online.total_cost != expected:
            logger.error(f"k={k} m={m}: simulated greedy cost {online.total_cost} != formula {expected}")
            checks_pass = False

    row = ExperimentRow(instance_id, k, m, online.total_cost, opt_cost, checks_pass)
    logger.debug(f"Lower bound k={k} m={m}: greedy={row.greedy_cost} opt={row.opt_cost} ratio={row.ratio}")
    return InstanceOutcome(row, report)


def lower_bound_sweep(
    k: int,
    m_lo: int,
    m_hi: int,
    epsilon: str = "0",
    policy: TieBreakPolicy = TieBreakPolicy.HIGHEST_SITE_INDEX,
    tol: float = DEFAULT_TOLERANCE,
    full_check_max_requests: int = 12000,
) -> List[InstanceOutcome]:
    return [
        lower_bound_outcome(i, k, m, epsilon, policy, tol, full_check_max_requests)
        for i, m in enumerate(range(m_lo, m_hi + 1))
    ]


# ---------------------------------------------------------------------------
# Random campaigns
# ---------------------------------------------------------------------------

def campaign_seed(master_seed: int, index: int) -> int:
    """Per-instance seed derived from the master seed by counter."""
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1)[0])


@dataclass(frozen=True)
class CampaignSpec:
    k: int
    count: int
    spaces: Sequence[str] = ("line", "plane")
    max_sites: int = 50
    max_requests: int = 200
    capacity_max: int = 5
    master_seed: int = 0
    policy: TieBreakPolicy = TieBreakPolicy.HIGHEST_SITE_INDEX
    tol: float = DEFAULT_TOLERANCE

    def validate(self) -> None:
        if self.k < 3:
            raise DomainError(f"campaigns need k >= 3 (got {self.k})")
        if self.count < 0:
            raise DomainError(f"instance count must be non-negative (got {self.count})")
        if not self.spaces or any(s not in ("line", "plane") for s in self.spaces):
            raise DomainError(f"campaign spaces must be line and/or plane (got {list(self.spaces)})")


def campaign_instance(spec: CampaignSpec, index: int) -> Tuple[int, str, Instance]:
    """Sizes come from the instance's own seed, so any index can be regenerated alone."""
    seed = campaign_seed(spec.master_seed, index)
    space = spec.spaces[index % len(spec.spaces)]
    rng = np.random.default_rng(seed)
    site_count = int(rng.integers(1, spec.max_sites + 1))
    request_count = int(rng.integers(0, min(spec.max_requests, site_count * spec.capacity_max) + 1))
    return seed, space, gen_random(site_count, request_count, spec.k, space, spec.capacity_max, seed)


def evaluate_campaign_instance(spec: CampaignSpec, index: int) -> InstanceOutcome:
    seed, space, inst = campaign_instance(spec, index)
    result = verify_pipeline(inst, spec.policy, tol=spec.tol)
    row = ExperimentRow(
        index,
        spec.k,
        seed,
        result.online.total_cost,
        result.adversary.total_cost,
        result.report.passed,
    )
    if not result.report.passed:
        logger.error(f"Instance {index} (seed {seed}, {space}, k={spec.k}) failed {len(result.report.failures)} checks")
    return InstanceOutcome(row, result.report, space)


def run_campaign(spec: CampaignSpec, workers: int = 1) -> List[InstanceOutcome]:
    """Evaluate spec.count seeded instances; results ordered by instance_id."""
    spec.validate()
    logger.info(f"Campaign k={spec.k}: {spec.count} instances over {list(spec.spaces)} with {workers} workers")
    if workers <= 1:
        outcomes = [evaluate_campaign_instance(spec, i) for i in range(spec.count)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda i: evaluate_campaign_instance(spec, i), range(spec.count)))

    failed = sum(1 for o in outcomes if not o.row.lemma_pass)
    if failed:
        logger.error(f"Campaign k={spec.k}: {failed}/{spec.count} instances failed verification")
    else:
        logger.info(f"✓ Campaign k={spec.k}: {spec.count} instances passed")
    return outcomes
