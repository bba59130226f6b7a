import pytest
from hypothesis import given

from errors import DomainError
from greedy import TieBreakPolicy, assignment_cost, check_greedy_choices, replay_trace, run_greedy
from instance import Assignment, Instance, Request, Site, check_capacities, gen_lower_bound, make_assignment
from metric import MetricSpace
from strategies import line_instances, plane_instances


def test_lower_bound_k3_m2_highest_index(lower_bound_k3_m2):
    online, trace = run_greedy(lower_bound_k3_m2, TieBreakPolicy.HIGHEST_SITE_INDEX)
    assert online.mapping == (1, 1, 1, 0)
    assert online.per_edge_cost == (1, 1, 1, 2)
    assert online.total_cost == 5
    assert trace.unfull_before == (0b11, 0b11, 0b11, 0b01)
    assert not trace.was_unfull(1, 3)


def test_lower_bound_k3_m2_lowest_index(lower_bound_k3_m2):
    online, _ = run_greedy(lower_bound_k3_m2, TieBreakPolicy.LOWEST_SITE_INDEX)
    assert online.mapping == (0, 0, 0, 1)
    assert online.total_cost == 3


@pytest.mark.parametrize("policy", list(TieBreakPolicy))
def test_positive_epsilon_makes_choices_strict(policy):
    reference, _ = run_greedy(gen_lower_bound(3, 2), TieBreakPolicy.HIGHEST_SITE_INDEX)
    shifted, _ = run_greedy(gen_lower_bound(3, 2, "0.000001"), policy)
    assert shifted.mapping == reference.mapping


def test_lower_bound_k4_m3_costs_28():
    online, _ = run_greedy(gen_lower_bound(4, 3))
    assert online.total_cost == 28


def test_policy_accepts_setting_strings(lower_bound_k3_m2):
    online, _ = run_greedy(lower_bound_k3_m2, "lowest_site_index")
    assert online.total_cost == 3


def test_co_located_request_costs_nothing():
    inst = Instance(MetricSpace("line", coordinates=(4,)), (Site(0, 0, 1),), 3, (Request(0, 0),))
    online, _ = run_greedy(inst)
    assert online.total_cost == 0


def test_assignment_cost(lower_bound_k3_m2):
    online, _ = run_greedy(lower_bound_k3_m2)
    assert assignment_cost(lower_bound_k3_m2, online) == 5
    colocated = make_assignment(lower_bound_k3_m2, [1, 1, 1, 1])
    assert assignment_cost(lower_bound_k3_m2, colocated) == 3
    with pytest.raises(DomainError):
        assignment_cost(lower_bound_k3_m2, Assignment((1, 1, None, 0), (1, 1, 0, 2), 4))


def test_check_greedy_choices_flags_non_greedy_steps(samples_dir):
    from instance import parse_instance

    inst = parse_instance((samples_dir / "two_site_line.json").read_text())
    greedy, trace = run_greedy(inst)
    assert check_greedy_choices(inst, greedy, trace) == []

    farther = make_assignment(inst, [1, 1])
    assert check_greedy_choices(inst, farther, replay_trace(inst, farther)) == [0, 1]


@given(line_instances())
def test_greedy_respects_augmented_capacity(inst):
    online, trace = run_greedy(inst)
    check_capacities(inst, online, online=True)
    assert online.total_cost == sum(online.per_edge_cost)
    assert check_greedy_choices(inst, online, trace) == []


@given(plane_instances())
def test_replay_matches_simulation(inst):
    for policy in TieBreakPolicy:
        online, trace = run_greedy(inst, policy)
        assert replay_trace(inst, online) == trace
        assert check_greedy_choices(inst, online, trace) == []


@given(line_instances())
def test_greedy_is_deterministic(inst):
    assert run_greedy(inst) == run_greedy(inst)
