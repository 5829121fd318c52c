"""Spectra of Laplacians on metric graphs with complex Robin vertex conditions."""

from .graph import (
    DIRICHLET,
    ROBIN,
    STANDARD,
    Edge,
    GraphError,
    GraphMetrics,
    MetricGraph,
    ValidationReport,
    VertexCondition,
    graph_metrics,
    interval,
    load_graph,
    path_graph,
    star_graph,
    subdivide_special_edges,
    validate,
)

__version__ = "0.1.0"
