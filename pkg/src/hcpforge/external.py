"""Run external HCP/TSP solvers as subprocesses with wall-clock and memory
caps, parsing and verifying whatever tour they claim.

A command template names the instance file and optionally a seed, a
timeout and an output file; the child's stdout (or the declared output
file) is parsed as either a TSPLIB tour or an edge list.  A claimed tour
is verified against the instance before FOUND is ever reported.  Timeouts
map to BUDGET_EXCEEDED; memory kills and unparseable or invalid output map
to ERROR with a distinguishing detail.
"""

from __future__ import annotations

import resource
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Union

from .graphs import Graph, Tour, is_hamiltonian_cycle
from .solvers import SolveBudget, SolverOutcome, SolverStatus
from .tsplib import (
    ParseError,
    parse_edge_list_tour,
    parse_tour_text,
    read_hcp,
    read_tsp,
)


class InputFormat(str, Enum):
    HCP = "HCP"
    TSP_FULL_MATRIX = "TSP_FULL_MATRIX"


class OutputParser(str, Enum):
    TSPLIB_TOUR = "TSPLIB_TOUR"
    EDGE_LIST = "EDGE_LIST"


@dataclass(frozen=True)
class ExternalSolverSpec:
    """How to invoke one external solver.

    The command template must contain {instance_path}; {seed}, {timeout}
    and {output_path} are substituted when present.  Without {output_path}
    the tour is parsed from stdout.
    """

    command: str
    input_format: InputFormat = InputFormat.HCP
    output_parser: OutputParser = OutputParser.TSPLIB_TOUR
    mem_cap_mb: Optional[int] = None

    def __post_init__(self) -> None:
        if "{instance_path}" not in self.command:
            raise ValueError("command template must contain {instance_path}")


def _load_instance(spec: ExternalSolverSpec, instance_path: Path) -> Graph:
    if spec.input_format is InputFormat.HCP:
        return read_hcp(instance_path)
    return read_tsp(instance_path).to_graph()


def _memory_limiter(cap_bytes: int):
    def set_limit() -> None:
        resource.setrlimit(resource.RLIMIT_AS, (cap_bytes, cap_bytes))
    return set_limit


def run_external(
    spec: ExternalSolverSpec,
    instance_path: Union[str, Path],
    seed: int = 0,
    budget: SolveBudget = SolveBudget(),
    graph: Optional[Graph] = None,
) -> SolverOutcome:
    """Spawn the solver on an instance file and verify its answer.

    `graph` skips re-reading the instance when the caller already has it.
    """
    instance_path = Path(instance_path)
    if graph is None:
        graph = _load_instance(spec, instance_path)
    mem_bytes = budget.mem_bytes
    if mem_bytes is None and spec.mem_cap_mb is not None:
        mem_bytes = spec.mem_cap_mb * 1024 * 1024
    timeout = budget.wall_secs

    with tempfile.TemporaryDirectory(prefix="hcpforge-ext-") as tmp:
        output_path = Path(tmp) / "solver-output"
        command = spec.command.format(
            instance_path=str(instance_path),
            seed=seed,
            timeout="" if timeout is None else f"{timeout:g}",
            output_path=str(output_path),
        )
        argv = shlex.split(command)
        t0 = time.monotonic()
        try:
            proc = subprocess.run(
                argv,
                capture_output=True,
                text=True,
                timeout=timeout,
                preexec_fn=_memory_limiter(mem_bytes) if mem_bytes else None,
            )
        except subprocess.TimeoutExpired:
            return SolverOutcome(SolverStatus.BUDGET_EXCEEDED,
                                 elapsed=time.monotonic() - t0,
                                 detail=f"wall clock cap {timeout:g}s exceeded")
        except OSError as exc:
            return SolverOutcome(SolverStatus.ERROR, elapsed=time.monotonic() - t0,
                                 detail=f"failed to spawn solver: {exc}")
        elapsed = time.monotonic() - t0
        if proc.returncode != 0:
            if mem_bytes is not None and (proc.returncode < 0 or proc.returncode in (134, 137)):
                detail = f"memory cap {mem_bytes} bytes exceeded (exit {proc.returncode})"
            else:
                detail = (f"solver exited with code {proc.returncode}: "
                          f"{proc.stderr.strip()[:200]}")
            return SolverOutcome(SolverStatus.ERROR, elapsed=elapsed, detail=detail)
        if "{output_path}" in spec.command:
            if not output_path.exists():
                return SolverOutcome(SolverStatus.ERROR, elapsed=elapsed,
                                     detail="solver produced no output file")
            text = output_path.read_text(encoding="ascii", errors="replace")
        else:
            text = proc.stdout

    try:
        if spec.output_parser is OutputParser.TSPLIB_TOUR:
            tour = parse_tour_text(text, graph.n)
        else:
            tour = parse_edge_list_tour(text, graph.n)
    except (ParseError, ValueError) as exc:
        return SolverOutcome(SolverStatus.ERROR, elapsed=elapsed,
                             detail=f"unparseable solver output: {exc}")
    if not is_hamiltonian_cycle(graph, tour):
        return SolverOutcome(SolverStatus.ERROR, elapsed=elapsed,
                             detail="claimed tour failed verification")
    return SolverOutcome(SolverStatus.FOUND, tour=tour, elapsed=elapsed)
