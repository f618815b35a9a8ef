"""Solver-in-the-loop hardening of planted Hamiltonian instances.

Repeatedly solve the current graph.  When the solver returns a cycle other
than the planted one, delete one edge used by that cycle but not by the
planted cycle and reset the counter; when it returns the planted cycle or
nothing, relabel the instance (tracking the planted cycle) and increment
the counter; stop once the counter passes its cap.  The planted cycle is
never touched, so the graph stays Hamiltonian throughout, while easy
alternative cycles are eliminated one edge at a time.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .graphs import (
    Edge,
    Graph,
    PlantedInstance,
    Relabelling,
    Tour,
    is_hamiltonian_cycle,
    relabel,
    relabel_tour,
    remove_edge,
)
from .solvers import SolveBudget, SolverOutcome, SolverStatus, find_hc_exact, find_hc_heuristic

InLoopSolver = Callable[[Graph, int], SolverOutcome]


def exact_in_loop(budget: SolveBudget = SolveBudget(wall_secs=10.0)) -> InLoopSolver:
    def solve(g: Graph, seed: int) -> SolverOutcome:
        return find_hc_exact(g, budget)
    return solve


def heuristic_in_loop(budget: SolveBudget = SolveBudget(max_nodes=50_000)) -> InLoopSolver:
    def solve(g: Graph, seed: int) -> SolverOutcome:
        return find_hc_heuristic(g, budget, seed=seed)
    return solve


class IterationOutcome(Enum):
    FOUND_PLANTED = "found-planted"
    FOUND_OTHER = "found-other"
    FOUND_NONE = "found-none"


@dataclass(frozen=True)
class HardeningConfig:
    solver: InLoopSolver
    max_count: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_count < 1:
            raise ValueError(f"max_count must be at least 1, got {self.max_count}")


@dataclass(frozen=True)
class HardeningReport:
    final_graph: Graph
    planted: Tour
    edges_removed: int
    failures_in_final_window: int
    average_degree: float
    trace: tuple[IterationOutcome, ...]

    @property
    def trivial(self) -> bool:
        """No failures in the final window: the solver always found a cycle."""
        return self.failures_in_final_window == 0


def edge_to_remove(hc_r: Tour, hc_i: Tour) -> Edge:
    """Lexicographically smallest edge traversed by hc_r but not by hc_i."""
    candidates = hc_r.edge_set() - hc_i.edge_set()
    if not candidates:
        raise ValueError("cycles are equivalent; no removable edge exists")
    return min(candidates)


def harden(inst: PlantedInstance, cfg: HardeningConfig) -> HardeningReport:
    """Run the hardening loop until max_count consecutive solves fail to
    produce a cycle different from the planted one."""
    g = inst.graph
    planted = inst.planted
    rng = random.Random(cfg.seed)
    count = 0
    removed = 0
    trace: list[IterationOutcome] = []

    while count <= cfg.max_count:
        try:
            out = cfg.solver(g, rng.randrange(2**63))
        except Exception:  # solver crash counts as a failed attempt
            out = SolverOutcome(SolverStatus.ERROR, detail="in-loop solver crashed")
        tour = out.tour
        if (out.status is SolverStatus.FOUND and tour is not None
                and is_hamiltonian_cycle(g, tour)):
            if tour == planted:
                trace.append(IterationOutcome.FOUND_PLANTED)
            else:
                trace.append(IterationOutcome.FOUND_OTHER)
                g = remove_edge(g, *edge_to_remove(tour, planted))
                removed += 1
                count = 0
                if not is_hamiltonian_cycle(g, planted):
                    raise RuntimeError("internal: planted cycle broken by hardening")
                continue
        else:
            trace.append(IterationOutcome.FOUND_NONE)
        r = Relabelling.random(g.n, rng.randrange(2**63))
        g = relabel(g, r)
        planted = relabel_tour(planted, r)
        count += 1

    failures = sum(1 for entry in trace[-cfg.max_count:]
                   if entry is IterationOutcome.FOUND_NONE)
    return HardeningReport(
        final_graph=g,
        planted=planted,
        edges_removed=removed,
        failures_in_final_window=failures,
        average_degree=2 * g.m / g.n,
        trace=tuple(trace),
    )


SUMMARY_COLUMNS = ("Size", "Sample", "Average degree", "Average Fail",
                   "Highest Fail", "Full success")


@dataclass(frozen=True)
class HardeningSummary:
    """One summary row in the shape of the hardening result tables."""

    size: int
    sample: int
    average_degree: float
    average_fail: float
    highest_fail: int
    full_success: float

    columns = SUMMARY_COLUMNS

    def row(self) -> tuple:
        return (self.size, self.sample, round(self.average_degree, 2),
                round(self.average_fail, 2), self.highest_fail,
                round(self.full_success, 2))

    def markdown(self) -> str:
        header = "| " + " | ".join(SUMMARY_COLUMNS) + " |"
        rule = "|" + "|".join(" --- " for _ in SUMMARY_COLUMNS) + "|"
        values = "| " + " | ".join(str(x) for x in self.row()) + " |"
        return "\n".join((header, rule, values))


def hardening_summary(reports: Sequence[HardeningReport]) -> HardeningSummary:
    """Aggregate failure statistics over hardening runs of one size class."""
    if not reports:
        raise ValueError("no hardening reports to summarise")
    sizes = {r.final_graph.n for r in reports}
    if len(sizes) != 1:
        raise ValueError(f"reports mix size classes {sorted(sizes)}")
    fails = [r.failures_in_final_window for r in reports]
    return HardeningSummary(
        size=sizes.pop(),
        sample=len(reports),
        average_degree=sum(r.average_degree for r in reports) / len(reports),
        average_fail=sum(fails) / len(fails),
        highest_fail=max(fails),
        full_success=100.0 * sum(1 for f in fails if f == 0) / len(fails),
    )
