"""Hard-instance forge and benchmark harness for HCP and binary TSP."""

from .graphs import (
    CertificateError,
    Graph,
    PlantedInstance,
    Relabelling,
    Tour,
    add_edge,
    cycle_graph,
    complete_graph,
    is_hamiltonian_cycle,
    relabel,
    relabel_tour,
    remove_edge,
)
from .solvers import (
    PruneResult,
    SearchBudgetExceeded,
    SolveBudget,
    SolverOutcome,
    SolverStatus,
    count_hc,
    find_hc_exact,
    find_hc_heuristic,
    prune_non_hc_edges,
)

__all__ = [
    "CertificateError",
    "Graph",
    "PlantedInstance",
    "PruneResult",
    "Relabelling",
    "SearchBudgetExceeded",
    "SolveBudget",
    "SolverOutcome",
    "SolverStatus",
    "Tour",
    "add_edge",
    "complete_graph",
    "count_hc",
    "cycle_graph",
    "find_hc_exact",
    "find_hc_heuristic",
    "is_hamiltonian_cycle",
    "prune_non_hc_edges",
    "relabel",
    "relabel_tour",
    "remove_edge",
]

__version__ = "0.1.0"
