"""Linear-size reduction from CNF satisfiability to the Hamiltonian cycle
problem, with certificates that decode a found cycle back to a source
solution.

The reduction first builds a directed instance: one diamond per variable
whose horizontal chain is walked left-to-right for true and right-to-left
for false, with a pair of consecutive slot nodes per literal occurrence
detouring through the clause node in the matching direction only.  Slot
pairs are separated by buffer nodes so detours cannot interleave.  The
directed instance is then made undirected by the standard 3-way split of
every node into an in/mid/out path, which preserves linearity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .cnf import CnfFormula, ProblemKind, SourceProblem, SourceSolution, decode_assignment, encode_source, solution_is_valid
from .graphs import Graph, Tour, is_hamiltonian_cycle


@dataclass(frozen=True)
class CnfToHcpMap:
    """Gadget bookkeeping needed to decode a Hamiltonian cycle into an
    assignment: per variable, the diamond entry node and the two chain ends
    (directed-node ids)."""

    num_vars: int
    n_directed: int
    entries: tuple[int, ...]
    left_ends: tuple[int, ...]
    right_ends: tuple[int, ...]

    def collapse(self, t: Tour) -> list[int]:
        """Cyclic order of directed nodes visited by an undirected tour."""
        ids = [(label - 1) // 3 for label in t.order]
        collapsed = [ids[0]]
        for d in ids[1:]:
            if d != collapsed[-1]:
                collapsed.append(d)
        if collapsed[0] == collapsed[-1]:
            collapsed.pop()
        if len(collapsed) != self.n_directed:
            raise ValueError("tour does not traverse node triples contiguously")
        return collapsed

    def decode_assignment(self, t: Tour) -> list[bool]:
        order = self.collapse(t)
        position = {d: i for i, d in enumerate(order)}
        n = len(order)
        values = []
        for i in range(self.num_vars):
            entry = self.entries[i]
            p = position[entry]
            around = {order[(p - 1) % n], order[(p + 1) % n]}
            if self.left_ends[i] == self.right_ends[i]:
                values.append(True)  # variable without occurrences; value free
            elif self.left_ends[i] in around:
                values.append(True)
            elif self.right_ends[i] in around:
                values.append(False)
            else:
                raise ValueError(f"entry node of variable {i + 1} is detached in the tour")
        return values


def reduce_cnf_to_hcp(f: CnfFormula, name: str = "") -> tuple[Graph, CnfToHcpMap]:
    """Build an undirected graph that is Hamiltonian iff f is satisfiable.

    Vertex count is linear in num_vars + total literal occurrences.
    """
    arcs: list[tuple[int, int]] = []
    next_id = 0

    def fresh() -> int:
        nonlocal next_id
        next_id += 1
        return next_id - 1

    occurrences: list[list[tuple[int, bool]]] = [[] for _ in range(f.num_vars)]
    for j, clause in enumerate(f.clauses):
        for lit in clause:
            occurrences[abs(lit) - 1].append((j, lit > 0))

    clause_nodes = [fresh() for _ in f.clauses]
    entries = []
    exits = []
    left_ends = []
    right_ends = []
    for i in range(f.num_vars):
        entry = fresh()
        chain = [fresh()]  # head buffer
        for j, positive in occurrences[i]:
            a, b, sep = fresh(), fresh(), fresh()
            chain += [a, b, sep]
            if positive:
                arcs.append((a, clause_nodes[j]))
                arcs.append((clause_nodes[j], b))
            else:
                arcs.append((b, clause_nodes[j]))
                arcs.append((clause_nodes[j], a))
        exit_ = fresh()
        arcs.append((entry, chain[0]))
        arcs.append((entry, chain[-1]))
        arcs.append((chain[0], exit_))
        arcs.append((chain[-1], exit_))
        for a, b in zip(chain, chain[1:]):
            arcs.append((a, b))
            arcs.append((b, a))
        entries.append(entry)
        exits.append(exit_)
        left_ends.append(chain[0])
        right_ends.append(chain[-1])
    for i in range(f.num_vars):
        arcs.append((exits[i], entries[(i + 1) % f.num_vars]))

    edges = []
    for d in range(next_id):
        base = 3 * d
        edges.append((base + 1, base + 2))
        edges.append((base + 2, base + 3))
    for u, v in set(arcs):
        edges.append((3 * u + 3, 3 * v + 1))
    graph = Graph(3 * next_id, edges, name or f"CNF_{3 * next_id}")
    gadget = CnfToHcpMap(f.num_vars, next_id, tuple(entries),
                         tuple(left_ends), tuple(right_ends))
    return graph, gadget


@dataclass(frozen=True)
class ReductionCertificate:
    """Everything needed to turn a Hamiltonian cycle of the reduced graph
    back into a solution of the source problem."""

    problem: SourceProblem
    gadget: CnfToHcpMap
    graph: Graph

    def to_json(self) -> str:
        payload: object
        kind = self.problem.kind
        if kind is ProblemKind.COL3:
            g: Graph = self.problem.payload
            payload = {"n": g.n, "edges": [list(e) for e in g.edges]}
        elif kind is ProblemKind.QN:
            payload = {"n": self.problem.payload}
        elif kind is ProblemKind.SSP:
            universe, family = self.problem.payload
            payload = {"universe": list(universe), "family": [list(s) for s in family]}
        else:
            payload = {"cubes": [list(c) for c in self.problem.payload]}
        return json.dumps({
            "kind": kind.value,
            "payload": payload,
            "gadget": {
                "num_vars": self.gadget.num_vars,
                "n_directed": self.gadget.n_directed,
                "entries": list(self.gadget.entries),
                "left_ends": list(self.gadget.left_ends),
                "right_ends": list(self.gadget.right_ends),
            },
            "graph": {
                "name": self.graph.name,
                "n": self.graph.n,
                "edges": [list(e) for e in self.graph.edges],
            },
        })

    @classmethod
    def from_json(cls, text: str) -> "ReductionCertificate":
        data = json.loads(text)
        kind = ProblemKind(data["kind"])
        payload = data["payload"]
        if kind is ProblemKind.COL3:
            problem = SourceProblem.col3(
                Graph(payload["n"], [tuple(e) for e in payload["edges"]]))
        elif kind is ProblemKind.QN:
            problem = SourceProblem.queens(payload["n"])
        elif kind is ProblemKind.SSP:
            problem = SourceProblem.set_split(payload["universe"], payload["family"])
        else:
            problem = SourceProblem.insanity(payload["cubes"])
        gd = data["gadget"]
        gadget = CnfToHcpMap(gd["num_vars"], gd["n_directed"], tuple(gd["entries"]),
                             tuple(gd["left_ends"]), tuple(gd["right_ends"]))
        gr = data["graph"]
        graph = Graph(gr["n"], [tuple(e) for e in gr["edges"]], gr["name"])
        return cls(problem, gadget, graph)


def reduce_source(problem: SourceProblem, name: str = "") -> tuple[Graph, ReductionCertificate]:
    """Encode a source problem to CNF and reduce it to an HCP instance."""
    formula = encode_source(problem)
    graph, gadget = reduce_cnf_to_hcp(formula, name="pending")
    graph = graph.with_name(name or f"{problem.kind.value}_{graph.n}")
    return graph, ReductionCertificate(problem, gadget, graph)


def decode_hc(cert: ReductionCertificate, t: Tour) -> SourceSolution:
    """Decode a Hamiltonian cycle of the reduced graph to a source solution.

    Raises if t is not a Hamiltonian cycle; the decoded solution is checked
    for validity before being returned.
    """
    if not is_hamiltonian_cycle(cert.graph, t):
        raise ValueError("tour is not a Hamiltonian cycle of the reduced graph")
    assignment = cert.gadget.decode_assignment(t)
    solution = decode_assignment(cert.problem, assignment)
    if not solution_is_valid(cert.problem, solution):
        raise RuntimeError("internal: decoded solution failed validation")
    return solution


def write_certificate(cert: ReductionCertificate, path: Union[str, Path]) -> None:
    Path(path).write_text(cert.to_json(), encoding="ascii")


def read_certificate(path: Union[str, Path]) -> ReductionCertificate:
    return ReductionCertificate.from_json(Path(path).read_text(encoding="ascii"))
