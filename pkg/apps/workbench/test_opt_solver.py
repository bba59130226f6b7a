import math

import pytest
from hypothesis import given

from errors import DomainError, InfeasibleInstanceError
from instance import Instance, Request, Site, gen_lower_bound
from metric import MetricSpace
from opt_solver import brute_force_opt, solve_opt, verify_certificate
from strategies import line_instances, plane_instances


def _two_requests_between_sites() -> Instance:
    space = MetricSpace("line", coordinates=(-1, 2, 0))
    return Instance(space, (Site(0, 0, 1), Site(1, 1, 1)), 3, (Request(0, 2), Request(1, 2)))


def test_lower_bound_k3_m2(lower_bound_k3_m2):
    solution = solve_opt(lower_bound_k3_m2)
    assert solution.assignment.total_cost == 3
    assert solution.assignment.mapping == (0, 0, 0, 1)
    assert verify_certificate(solution.network) == []


def test_co_located_unit_sites_cost_nothing():
    space = MetricSpace("line", coordinates=(0, 1, 2))
    inst = Instance(space, tuple(Site(j, j, 1) for j in range(3)), 3, (Request(0, 2), Request(1, 0), Request(2, 1)))
    solution = solve_opt(inst)
    assert solution.assignment.total_cost == 0
    assert solution.assignment.mapping == (2, 0, 1)


def test_capacity_forces_the_split():
    solution = solve_opt(_two_requests_between_sites())
    assert solution.assignment.total_cost == 3
    assert sorted(solution.assignment.mapping) == [0, 1]
    assert verify_certificate(solution.network) == []


def test_empty_instance():
    inst = Instance(MetricSpace("line", coordinates=(0,)), (Site(0, 0, 1),), 3, ())
    solution = solve_opt(inst)
    assert solution.assignment.total_cost == 0
    assert verify_certificate(solution.network) == []


def test_network_shape(lower_bound_k3_m2):
    net = solve_opt(lower_bound_k3_m2).network
    n, m = 4, 2
    assert net.node_count == n + m + 2
    assert len(net.arcs) == n + n * m + m
    assert sum(a.flow for a in net.arcs if a.tail == net.source) == n


def test_tampered_potentials_fail_the_certificate(lower_bound_k3_m2):
    net = solve_opt(lower_bound_k3_m2).network
    net.potentials[net.site_node(1)] += 5
    assert verify_certificate(net) != []


def test_tampered_flow_fails_conservation():
    net = solve_opt(_two_requests_between_sites()).network
    for arc in net.arcs:
        if arc.tail == net.site_node(0) and arc.head == net.sink:
            arc.flow += 1
    problems = verify_certificate(net)
    assert any("outside" in p for p in problems)
    assert any("net inflow" in p for p in problems)


def test_infeasible_instances_cannot_be_built():
    with pytest.raises(InfeasibleInstanceError):
        Instance(MetricSpace("line", coordinates=(0, 1)), (Site(0, 0, 1),), 3, (Request(0, 1), Request(1, 1)))


def test_brute_force_examples(lower_bound_k3_m2):
    single = Instance(MetricSpace("line", coordinates=(0, 7)), (Site(0, 0, 1),), 3, (Request(0, 1),))
    assert brute_force_opt(single) == 7
    assert brute_force_opt(_two_requests_between_sites()) == 3
    assert brute_force_opt(gen_lower_bound(3, 1)) == 1
    assert brute_force_opt(lower_bound_k3_m2) == 3


def test_brute_force_refuses_large_instances():
    with pytest.raises(DomainError):
        brute_force_opt(gen_lower_bound(3, 3), max_requests=8)


@given(line_instances(max_sites=4, max_requests=6))
def test_solver_matches_brute_force_on_the_line(inst):
    solution = solve_opt(inst)
    assert solution.assignment.total_cost == brute_force_opt(inst)
    assert verify_certificate(solution.network) == []


@given(plane_instances(max_sites=4, max_requests=6))
def test_solver_matches_brute_force_in_the_plane(inst):
    solution = solve_opt(inst)
    assert math.isclose(solution.assignment.total_cost, brute_force_opt(inst), rel_tol=1e-9, abs_tol=1e-9)
    assert verify_certificate(solution.network) == []


def test_lower_bound_opt_is_k_to_the_m_minus_1():
    for k, m in [(3, 3), (4, 3), (5, 2)]:
        solution = solve_opt(gen_lower_bound(k, m))
        assert solution.assignment.total_cost == k ** (m - 1)
        assert verify_certificate(solution.network) == []
