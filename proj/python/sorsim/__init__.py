"""Python bindings for the overlay routing simulator."""

from sorsim._sorsim import (
    DocumentError,
    GraphParams,
    OverlayGraph,
    RouteTrace,
    TheoreticalBounds,
    build_graph,
    calibrate_gamma,
    connectivity_check,
    deserialize_graph,
    estimate_inward_links,
    expected_label1_degree,
    greedy_path_exists,
    long_range_probability,
    ring_distance,
    route,
    run_experiment_csv,
    serialize_graph,
    theoretical_bounds,
)

__all__ = [
    "DocumentError",
    "GraphParams",
    "OverlayGraph",
    "RouteTrace",
    "TheoreticalBounds",
    "build_graph",
    "calibrate_gamma",
    "connectivity_check",
    "deserialize_graph",
    "estimate_inward_links",
    "expected_label1_degree",
    "greedy_path_exists",
    "long_range_probability",
    "ring_distance",
    "route",
    "run_experiment_csv",
    "serialize_graph",
    "theoretical_bounds",
]
