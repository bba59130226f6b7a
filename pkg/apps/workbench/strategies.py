"""Hypothesis strategies for small instances, shared by the test modules."""
from fractions import Fraction

from hypothesis import strategies as st

from instance import Instance, Request, Site
from metric import MetricSpace


@st.composite
def line_instances(draw, max_sites=4, max_requests=6, max_capacity=3, span=6, k=None, min_k=1, max_k=5):
    """Half-integer line coordinates in [-span/2, span/2]; always feasible."""
    site_count = draw(st.integers(1, max_sites))
    caps = draw(st.lists(st.integers(1, max_capacity), min_size=site_count, max_size=site_count))
    request_count = draw(st.integers(0, min(max_requests, sum(caps))))
    coords = draw(st.lists(st.integers(-span, span), min_size=site_count + request_count, max_size=site_count + request_count))
    if k is None:
        k = draw(st.integers(min_k, max_k))
    space = MetricSpace("line", coordinates=tuple(Fraction(x, 2) for x in coords))
    sites = tuple(Site(j, j, caps[j]) for j in range(site_count))
    requests = tuple(Request(i, site_count + i) for i in range(request_count))
    return Instance(space, sites, k, requests)


@st.composite
def plane_instances(draw, max_sites=4, max_requests=6, max_capacity=3, span=5, k=None, min_k=1, max_k=5):
    """Integer grid points in the plane; distances are floats."""
    site_count = draw(st.integers(1, max_sites))
    caps = draw(st.lists(st.integers(1, max_capacity), min_size=site_count, max_size=site_count))
    request_count = draw(st.integers(0, min(max_requests, sum(caps))))
    point = st.tuples(st.integers(-span, span), st.integers(-span, span))
    coords = draw(st.lists(point, min_size=site_count + request_count, max_size=site_count + request_count))
    if k is None:
        k = draw(st.integers(min_k, max_k))
    sites = tuple(Site(j, j, caps[j]) for j in range(site_count))
    requests = tuple(Request(i, site_count + i) for i in range(request_count))
    return Instance(MetricSpace("plane", coordinates=tuple(coords)), sites, k, requests)
