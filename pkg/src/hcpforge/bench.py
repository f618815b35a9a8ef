"""Benchmark sweeps: relabel each instance R times per solver, run every
trial under a budget, verify returned tours against the original labelling,
and aggregate solved counts and mean times into result tables.

Per-trial seeds derive from (master seed, instance, solver, index) via a
stable hash, so sweeps are order-independent, parallelizable and resumable:
trial records append to a JSONL log and a re-run performs only the missing
trials.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

from .external import ExternalSolverSpec, InputFormat
from .graphs import Graph, Relabelling, is_hamiltonian_cycle, relabel, relabel_tour
from .solvers import SolveBudget, SolverOutcome, SolverStatus, find_hc_exact, find_hc_heuristic
from .external import run_external
from .tsplib import graph_to_tsp, read_hcp, write_hcp, write_tsp

BUILTIN_SOLVERS = ("exact", "heuristic")

# failure-mode markers: timeout, memory, solver bug/error
ANNOTATION_TIMEOUT = "*"
ANNOTATION_MEMORY = "**"
ANNOTATION_SOLVER_BUG = "***"


SolverHandle = Union[str, ExternalSolverSpec]


def resolve_solver(text: str) -> SolverHandle:
    """Map a plan entry to a builtin name or an external solver spec.

    Builtins are written 'builtin:exact' / 'builtin:heuristic' (bare names
    accepted); anything else is a command template.
    """
    stripped = text.strip()
    if stripped.startswith("builtin:"):
        name = stripped.split(":", 1)[1]
        if name not in BUILTIN_SOLVERS:
            raise ValueError(f"unknown builtin solver {name!r}")
        return name
    if stripped in BUILTIN_SOLVERS:
        return stripped
    return ExternalSolverSpec(command=stripped)


@dataclass(frozen=True)
class BenchmarkPlan:
    instances: tuple[Path, ...]
    solvers: tuple[tuple[str, SolverHandle], ...]
    relabellings: int = 100
    budget: SolveBudget = SolveBudget(wall_secs=60.0)
    master_seed: int = 0
    out_dir: Path = Path(".")
    workers: int = 1

    def __post_init__(self) -> None:
        if self.relabellings < 1:
            raise ValueError("need at least one relabelling per instance")
        names = [name for name, _ in self.solvers]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate solver names in {names}")
        if not self.solvers:
            raise ValueError("no solvers in plan")
        if not self.instances:
            raise ValueError("no instances in plan")


@dataclass(frozen=True)
class BenchmarkRecord:
    instance: str
    n: int
    solver: str
    index: int
    seed: int
    status: str
    elapsed: float
    detail: str = ""

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.instance, self.solver, self.index)

    def to_json(self) -> str:
        return json.dumps({
            "instance": self.instance, "n": self.n, "solver": self.solver,
            "index": self.index, "seed": self.seed, "status": self.status,
            "elapsed": self.elapsed, "detail": self.detail,
        })

    @classmethod
    def from_json(cls, line: str) -> "BenchmarkRecord":
        data = json.loads(line)
        return cls(**data)


def trial_seed(master_seed: int, instance: str, solver: str, index: int) -> int:
    digest = hashlib.sha256(
        f"{master_seed}:{instance}:{solver}:{index}".encode()).hexdigest()
    return int(digest[:16], 16)


def load_records(path: Union[str, Path]) -> dict[tuple[str, str, int], BenchmarkRecord]:
    records: dict[tuple[str, str, int], BenchmarkRecord] = {}
    path = Path(path)
    if not path.exists():
        return records
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            record = BenchmarkRecord.from_json(line)
        except (json.JSONDecodeError, TypeError):
            continue  # torn write from a crash; the trial will simply re-run
        records[record.key] = record
    return records


def run_trial(
    graph: Graph,
    solver_name: str,
    handle: SolverHandle,
    index: int,
    seed: int,
    budget: SolveBudget,
) -> BenchmarkRecord:
    """Relabel, solve, and verify against the original labelling."""
    r = Relabelling.random(graph.n, seed)
    relabelled = relabel(graph, r)
    if handle == "exact":
        out = find_hc_exact(relabelled, budget)
    elif handle == "heuristic":
        out = find_hc_heuristic(relabelled, budget, seed=seed)
    else:
        with tempfile.TemporaryDirectory(prefix="hcpforge-bench-") as tmp:
            if handle.input_format is InputFormat.HCP:
                instance_path = Path(tmp) / f"{graph.name or 'instance'}.hcp"
                write_hcp(relabelled, instance_path)
            else:
                instance_path = Path(tmp) / f"{graph.name or 'instance'}.tsp"
                write_tsp(graph_to_tsp(relabelled), instance_path)
            out = run_external(handle, instance_path, seed=seed, budget=budget,
                               graph=relabelled)
    status = out.status
    detail = out.detail
    if status is SolverStatus.FOUND:
        original_tour = relabel_tour(out.tour, r.inverse())
        if not is_hamiltonian_cycle(graph, original_tour):
            status = SolverStatus.ERROR
            detail = "tour failed verification against the original labelling"
    return BenchmarkRecord(graph.name or "unnamed", graph.n, solver_name, index,
                           seed, status.value, out.elapsed, detail)


def run_bench(
    plan: BenchmarkPlan,
    progress: Optional[Callable[[BenchmarkRecord], None]] = None,
) -> "ResultTable":
    """Execute all missing trials of a plan and emit the result table.

    Appends one JSON line per trial to records.jsonl in the output
    directory; completed trials found there are not re-run.
    """
    out_dir = Path(plan.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records_path = out_dir / "records.jsonl"
    records = load_records(records_path)

    graphs = [read_hcp(path) for path in plan.instances]
    for graph, path in zip(graphs, plan.instances):
        if not graph.name:
            raise ValueError(f"instance {path} has no NAME field")

    todo = [
        (graph, name, handle, index)
        for graph in graphs
        for name, handle in plan.solvers
        for index in range(plan.relabellings)
        if (graph.name, name, index) not in records
    ]

    lock = threading.Lock()
    log = open(records_path, "a", encoding="ascii")

    def execute(job) -> BenchmarkRecord:
        graph, name, handle, index = job
        seed = trial_seed(plan.master_seed, graph.name, name, index)
        try:
            record = run_trial(graph, name, handle, index, seed, plan.budget)
        except Exception as exc:  # never let one trial abort the sweep
            record = BenchmarkRecord(graph.name, graph.n, name, index, seed,
                                     SolverStatus.ERROR.value, 0.0,
                                     f"trial crashed: {exc}")
        with lock:
            log.write(record.to_json() + "\n")
            log.flush()
            os.fsync(log.fileno())
        if progress is not None:
            progress(record)
        return record

    try:
        if plan.workers > 1:
            with ThreadPoolExecutor(max_workers=plan.workers) as pool:
                for record in pool.map(execute, todo):
                    records[record.key] = record
        else:
            for job in todo:
                record = execute(job)
                records[record.key] = record
    finally:
        log.close()

    table = make_result_table(list(records.values()),
                              instance_order=[g.name for g in graphs],
                              solver_order=[name for name, _ in plan.solvers])
    table.write_csv(out_dir / "results.csv")
    (out_dir / "results.md").write_text(table.to_markdown() + "\n", encoding="ascii")
    return table


@dataclass(frozen=True)
class ResultCell:
    solved: int
    total: int
    mean_time: Optional[float]  # over successful runs only; None when solved == 0
    annotation: str = ""

    @property
    def solved_text(self) -> str:
        return f"{self.solved}{self.annotation}"

    @property
    def time_text(self) -> str:
        return "NA" if self.mean_time is None else f"{self.mean_time:.2f}"


@dataclass(frozen=True)
class ResultTable:
    instances: tuple[tuple[str, int], ...]  # (name, n)
    solvers: tuple[str, ...]
    cells: dict[tuple[str, str], ResultCell] = field(default_factory=dict)

    def cell(self, instance: str, solver: str) -> ResultCell:
        return self.cells[(instance, solver)]

    def to_markdown(self) -> str:
        header = ["Name", "n"]
        for solver in self.solvers:
            header += [f"{solver} Solved", f"{solver} Time"]
        lines = ["| " + " | ".join(header) + " |",
                 "|" + "|".join(" --- " for _ in header) + "|"]
        for name, n in self.instances:
            row = [name, str(n)]
            for solver in self.solvers:
                cell = self.cells[(name, solver)]
                row += [cell.solved_text, cell.time_text]
            lines.append("| " + " | ".join(row) + " |")
        return "\n".join(lines)

    def write_csv(self, path: Union[str, Path]) -> None:
        import csv

        with open(path, "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh)
            header = ["Name", "n"]
            for solver in self.solvers:
                header += [f"{solver} Solved", f"{solver} Time", f"{solver} Note"]
            writer.writerow(header)
            for name, n in self.instances:
                row: list = [name, n]
                for solver in self.solvers:
                    cell = self.cells[(name, solver)]
                    row += [cell.solved, cell.time_text, cell.annotation]
                writer.writerow(row)

    def outcome_fingerprint(self) -> tuple:
        """The deterministic projection of the table (no wall-clock times)."""
        return tuple(
            (name, n, solver, self.cells[(name, solver)].solved,
             self.cells[(name, solver)].annotation,
             self.cells[(name, solver)].mean_time is None)
            for name, n in self.instances
            for solver in self.solvers
        )


def _annotation(records: Sequence[BenchmarkRecord]) -> str:
    """Marker for the dominant failure mode among unsuccessful trials."""
    counts = {ANNOTATION_TIMEOUT: 0, ANNOTATION_MEMORY: 0, ANNOTATION_SOLVER_BUG: 0}
    for record in records:
        if record.status == SolverStatus.BUDGET_EXCEEDED.value:
            counts[ANNOTATION_TIMEOUT] += 1
        elif record.status == SolverStatus.ERROR.value:
            if record.detail.startswith("memory"):
                counts[ANNOTATION_MEMORY] += 1
            else:
                counts[ANNOTATION_SOLVER_BUG] += 1
    best = max(counts, key=lambda k: counts[k])
    return best if counts[best] > 0 else ""


def make_result_table(
    records: Sequence[BenchmarkRecord],
    instance_order: Optional[Sequence[str]] = None,
    solver_order: Optional[Sequence[str]] = None,
) -> ResultTable:
    by_instance: dict[str, int] = {}
    solvers: list[str] = []
    grouped: dict[tuple[str, str], list[BenchmarkRecord]] = {}
    for record in records:
        by_instance.setdefault(record.instance, record.n)
        if record.solver not in solvers:
            solvers.append(record.solver)
        grouped.setdefault((record.instance, record.solver), []).append(record)

    instance_names = list(instance_order) if instance_order else sorted(by_instance)
    solver_names = list(solver_order) if solver_order else solvers
    cells = {}
    for name in instance_names:
        for solver in solver_names:
            group = grouped.get((name, solver), [])
            found = [r for r in group if r.status == SolverStatus.FOUND.value]
            failed = [r for r in group if r.status != SolverStatus.FOUND.value]
            mean = sum(r.elapsed for r in found) / len(found) if found else None
            cells[(name, solver)] = ResultCell(
                solved=len(found), total=len(group), mean_time=mean,
                annotation=_annotation(failed))
    return ResultTable(
        instances=tuple((name, by_instance.get(name, 0)) for name in instance_names),
        solvers=tuple(solver_names),
        cells=cells,
    )
