import math

import pytest
from hypothesis import given, strategies as st

from errors import DomainError
from metric import MetricSpace, distance, validate_metric


def test_line_distance_is_absolute_difference():
    space = MetricSpace("line", coordinates=(-1, 1))
    assert distance(space, 0, 1) == 2
    assert distance(space, 1, 0) == 2


@pytest.mark.parametrize(
    "space",
    [
        MetricSpace("line", coordinates=(3, "1/3")),
        MetricSpace("plane", coordinates=((0, 0), (1, 2))),
        MetricSpace("matrix", distances=((0, 3), (3, 0))),
    ],
)
def test_distance_to_self_is_zero(space):
    for a in range(space.point_count):
        assert distance(space, a, a) == 0


def test_matrix_distance_is_a_lookup():
    space = MetricSpace("matrix", distances=((0, 3), (3, 0)))
    assert distance(space, 0, 1) == 3


def test_plane_distance_is_euclidean_float():
    space = MetricSpace("plane", coordinates=((0, 0), (3, 4)))
    d = distance(space, 0, 1)
    assert isinstance(d, float)
    assert math.isclose(d, 5.0)


def test_line_distances_stay_exact():
    space = MetricSpace("line", coordinates=("0.1", "0.3"))
    assert str(distance(space, 0, 1)) == "1/5"


def test_invalid_point_is_a_domain_error():
    space = MetricSpace("line", coordinates=(0, 1))
    with pytest.raises(DomainError):
        distance(space, 0, 2)
    with pytest.raises(DomainError):
        distance(space, -1, 0)


def test_unknown_kind_and_ragged_matrix_are_rejected():
    with pytest.raises(DomainError):
        MetricSpace("torus", coordinates=(0,))
    with pytest.raises(DomainError):
        MetricSpace("matrix", distances=((0, 1), (1,)))
    with pytest.raises(DomainError):
        MetricSpace("plane", coordinates=((0, 0, 0),))


@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=20))
def test_line_spaces_are_always_metrics(coords):
    assert validate_metric(MetricSpace("line", coordinates=tuple(coords))) == []


def test_asymmetric_matrix_reports_the_pair():
    violations = validate_metric(MetricSpace("matrix", distances=((0, 1), (2, 0))))
    assert [(v.axiom, v.points) for v in violations] == [("symmetry", (0, 1))]


def test_triangle_violation_names_the_detour():
    space = MetricSpace("matrix", distances=((0, 1, 5), (1, 0, 1), (5, 1, 0)))
    violations = validate_metric(space)
    assert [(v.axiom, v.points) for v in violations] == [("triangle", (0, 2, 1))]


def test_identity_and_negative_entries_are_reported():
    violations = validate_metric(MetricSpace("matrix", distances=((1, -1), (-1, 0))))
    axioms = {v.axiom for v in violations}
    assert axioms == {"identity", "nonnegativity"}
