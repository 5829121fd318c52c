"""Fixture graphs shared by the unit and acceptance tests.

Every graph is simple (no loops or parallel edges).  Couplings are
placeholders; tests override them with ``with_alpha``.
"""

from robinqg.graph import MetricGraph, VertexCondition, interval, path_graph, star_graph

R = VertexCondition.robin(1.0)
S = VertexCondition.standard()


def interval_fixture():
    """Unit interval, both ends Robin (adjacent Robin vertices)."""
    return interval(1.0, 1.0, 1.0)


def path_fixture():
    """v1 - v2 - v3 with lengths 1 and 1.5; Robin ends."""
    return path_graph([1.0, 1.5], [1.0, None, 1.0])


def star_fixture():
    """Equilateral 3-star of unit legs; Robin center, standard leaves."""
    return star_graph([1.0, 1.0, 1.0], center=1.0)


def cycle_pendant_fixture():
    """Triangle v1 v2 v3 (1, 1.2, 1.4) with a pendant v3 - v4 of length 0.8; Robin {v1, v4}."""
    return MetricGraph(
        [("v1", R), ("v2", S), ("v3", S), ("v4", R)],
        [("v1", "v2", 1.0), ("v2", "v3", 1.2), ("v3", "v1", 1.4), ("v3", "v4", 0.8)],
    )


def k4_fixture():
    """Complete graph on four vertices, distinct lengths; Robin {v1, v2, v3}."""
    return MetricGraph(
        [("v1", R), ("v2", R), ("v3", R), ("v4", S)],
        [("v1", "v2", 1.0), ("v1", "v3", 1.1), ("v1", "v4", 1.2),
         ("v2", "v3", 1.3), ("v2", "v4", 1.4), ("v3", "v4", 1.5)],
    )


FIXTURES = {
    "interval": interval_fixture,
    "path": path_fixture,
    "star3": star_fixture,
    "cycle_pendant": cycle_pendant_fixture,
    "k4": k4_fixture,
}


def fixture(name):
    return FIXTURES[name]()
