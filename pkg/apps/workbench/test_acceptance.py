"""End-to-end reproduction of the lower-bound family, the upper-bound campaign and the OPT oracle sweep."""
from fractions import Fraction
from itertools import combinations_with_replacement

import pytest

from analysis import verify_pipeline
from experiments import CampaignSpec, run_campaign
from greedy import TieBreakPolicy, run_greedy
from instance import (
    Instance,
    Request,
    Site,
    gen_lower_bound,
    lower_bound_adversary,
    lower_bound_greedy_closed_form,
    lower_bound_ratio,
)
from metric import MetricSpace
from numeric import competitive_bound
from opt_solver import brute_force_opt, solve_opt, verify_certificate


@pytest.mark.parametrize("k, m", [(3, 1), (3, 2), (3, 6), (4, 3), (5, 4)])
def test_lower_bound_reproduction(k, m):
    inst = gen_lower_bound(k, m)
    online, _ = run_greedy(inst, TieBreakPolicy.HIGHEST_SITE_INDEX)
    solution = solve_opt(inst)
    assert online.total_cost == lower_bound_greedy_closed_form(k, m)
    assert solution.assignment.total_cost == k ** (m - 1)
    assert verify_certificate(solution.network) == []

    report = verify_pipeline(inst, adversary=solution.assignment).report
    assert report.passed, report.to_document()["failures"]
    assert report.ratio == lower_bound_ratio(k, m)


def test_lower_bound_spot_values():
    assert run_greedy(gen_lower_bound(3, 2))[0].total_cost == 5
    assert run_greedy(gen_lower_bound(4, 3))[0].total_cost == 28


def test_tightness_at_eight_batches():
    inst = gen_lower_bound(3, 8)
    online, _ = run_greedy(inst)
    opt = solve_opt(inst).assignment.total_cost
    assert opt == 3**7
    assert Fraction(online.total_cost, opt) >= Fraction(288, 100)


@pytest.mark.slow
def test_tightness_at_twelve_batches():
    inst = gen_lower_bound(3, 12)
    online, _ = run_greedy(inst)
    witness = lower_bound_adversary(inst, 12)
    assert witness.total_cost == 3**11
    ratio = Fraction(online.total_cost, witness.total_cost)
    assert ratio == lower_bound_ratio(3, 12)
    assert ratio >= Fraction(295, 100)


@pytest.mark.slow
@pytest.mark.parametrize("k", [3, 4, 5])
def test_upper_bound_campaign(k):
    outcomes = run_campaign(CampaignSpec(k=k, count=500, master_seed=2024), workers=4)
    assert len(outcomes) == 500
    for outcome in outcomes:
        assert outcome.row.bound_holds(), outcome.row
        assert outcome.row.lemma_pass, outcome.report.to_document()["failures"]


def _sweep_instances():
    positions = range(-2, 3)
    site_options = [(x, cap) for x in positions for cap in (1, 2)]
    for site_count in range(1, 4):
        for sites in combinations_with_replacement(site_options, site_count):
            capacity = sum(cap for _, cap in sites)
            for request_count in range(0, min(5, capacity) + 1):
                for requests in combinations_with_replacement(positions, request_count):
                    coords = [x for x, _ in sites] + list(requests)
                    yield Instance(
                        MetricSpace("line", coordinates=tuple(coords)),
                        tuple(Site(j, j, cap) for j, (_, cap) in enumerate(sites)),
                        3,
                        tuple(Request(i, site_count + i) for i in range(request_count)),
                    )


@pytest.mark.slow
def test_opt_oracle_sweep():
    checked = 0
    for inst in _sweep_instances():
        solution = solve_opt(inst)
        assert solution.assignment.total_cost == brute_force_opt(inst), inst
        assert verify_certificate(solution.network) == [], inst
        checked += 1
    assert checked > 10000


def test_bound_constant():
    assert competitive_bound(3) * (1 - Fraction(2, 3) ** 12) > Fraction(295, 100)
