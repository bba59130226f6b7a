import io
from fractions import Fraction

import pytest

from errors import DomainError
from experiments import (
    CSV_COLUMNS,
    CampaignSpec,
    ExperimentRow,
    campaign_instance,
    campaign_seed,
    lower_bound_outcome,
    lower_bound_sweep,
    parse_m_range,
    run_campaign,
    write_csv,
)
from instance import serialize_instance

SMALL = dict(max_sites=6, max_requests=15, capacity_max=3)


def _csv(rows, exact=True) -> list:
    buffer = io.StringIO()
    write_csv(rows, buffer, exact=exact)
    return buffer.getvalue().splitlines()


def test_lower_bound_sweep_k3_ratio_column():
    outcomes = lower_bound_sweep(3, 1, 6)
    rows = [o.row for o in outcomes]
    assert [r.ratio for r in rows] == [1, Fraction(5, 3), Fraction(19, 9), Fraction(65, 27), Fraction(211, 81), Fraction(665, 243)]
    assert all(r.lemma_pass for r in rows)
    assert [r.m_or_seed for r in rows] == [1, 2, 3, 4, 5, 6]

    lines = _csv(rows)
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[2] == "1,3,2,5,3,5/3,3,true"
    assert [line.split(",")[5] for line in lines[1:]] == ["1", "5/3", "19/9", "65/27", "211/81", "665/243"]


def test_ratio_is_nondecreasing_in_m():
    for k in (3, 4, 5):
        ratios = [o.row.ratio for o in lower_bound_sweep(k, 1, 5)]
        assert ratios == sorted(ratios)


def test_lower_bound_k4_m3_row():
    row = lower_bound_outcome(0, 4, 3).row
    assert (row.greedy_cost, row.opt_cost, row.ratio) == (28, 16, Fraction(7, 4))
    assert row.bound == 2
    assert row.bound_holds()


def test_large_rows_use_the_witness_adversary():
    outcome = lower_bound_outcome(0, 3, 5, full_check_max_requests=10)
    assert outcome.report is None
    assert outcome.row.opt_cost == 81
    assert outcome.row.greedy_cost == 211
    assert outcome.row.lemma_pass


def test_decimal_output_without_exact():
    lines = _csv([lower_bound_outcome(0, 3, 2).row], exact=False)
    assert lines[1] == "0,3,2,5,3,1.66666666667,3,true"


def test_empty_ratio_when_opt_is_zero():
    row = ExperimentRow(0, 3, 11, 0, 0, True)
    assert row.ratio is None
    assert _csv([row])[1] == "0,3,11,0,0,,3,true"


def test_header_is_always_written():
    assert _csv([]) == [",".join(CSV_COLUMNS)]


@pytest.mark.parametrize("text, expected", [("1..6", (1, 6)), ("3", (3, 3)), ("2..2", (2, 2))])
def test_parse_m_range(text, expected):
    assert parse_m_range(text) == expected


@pytest.mark.parametrize("text", ["6..1", "0..3", "a..b", ""])
def test_parse_m_range_rejects(text):
    with pytest.raises(DomainError):
        parse_m_range(text)


def test_campaign_seeds_are_stable_and_distinct():
    seeds = [campaign_seed(0, i) for i in range(50)]
    assert seeds == [campaign_seed(0, i) for i in range(50)]
    assert len(set(seeds)) == 50
    assert campaign_seed(1, 0) != campaign_seed(0, 0)


def test_campaign_instances_regenerate_alone():
    spec = CampaignSpec(k=3, count=5, **SMALL)
    seed, space, inst = campaign_instance(spec, 3)
    again = campaign_instance(spec, 3)
    assert (seed, space) == again[:2]
    assert serialize_instance(inst) == serialize_instance(again[2])
    assert space == "plane"


def test_campaign_rows_independent_of_worker_count():
    spec = CampaignSpec(k=4, count=12, master_seed=9, **SMALL)
    serial = [o.row for o in run_campaign(spec, workers=1)]
    threaded = [o.row for o in run_campaign(spec, workers=4)]
    assert serial == threaded
    assert [r.instance_id for r in serial] == list(range(12))


@pytest.mark.parametrize("k", [3, 4, 5])
def test_small_campaign_passes(k):
    outcomes = run_campaign(CampaignSpec(k=k, count=20, master_seed=k, **SMALL), workers=2)
    assert all(o.row.lemma_pass for o in outcomes)
    assert all(o.row.bound_holds() for o in outcomes)


def test_campaign_spec_validation():
    with pytest.raises(DomainError):
        run_campaign(CampaignSpec(k=2, count=1))
    with pytest.raises(DomainError):
        run_campaign(CampaignSpec(k=3, count=1, spaces=("torus",)))
