"""Distributed resource-allocation dynamics: projected algorithms over
agent networks with local feasibility sets, plus a centralized verification
oracle and scenario tooling."""

from ._core import (  # noqa: F401
    Algorithm,
    AgentSpec,
    ConvexSet,
    Graph,
    MetricsRecord,
    NetworkState,
    Objective,
    OracleSolution,
    ProblemInstance,
    Scenario,
    SimulateConfig,
    builtin_dispatch,
    builtin_example1,
    builtin_scale,
    eigen_extremes,
    initialize,
    is_connected,
    kkt_residual,
    laplacian,
    metrics,
    oracle_solve,
    parse_scenario,
    random_connected_graph,
    random_graph_bridged,
    rate_bound,
    ring_with_chords,
    run_scenario,
    serialize_scenario,
    simulate,
    step,
    total_resource,
    transformed_deviation,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
