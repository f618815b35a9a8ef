"""Core graph, tour and relabelling types shared by every other module.

Graphs are simple and undirected with 1-based vertex labels.  Tours are
cyclic vertex orderings kept in a canonical form so that two tours are
equal exactly when they describe the same undirected cycle.  All values
are immutable after construction; mutating operations return new values.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

Edge = tuple[int, int]


class CertificateError(ValueError):
    """A certificate is structurally invalid (as opposed to merely wrong)."""


def _normalize_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph on vertices 1..n with a deterministic edge order."""

    __slots__ = ("n", "edges", "name", "_adj", "_edge_set")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], name: str = ""):
        if n < 1:
            raise ValueError(f"vertex count must be positive, got {n}")
        edge_set: set[Edge] = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge ({u},{v}) out of range 1..{n}")
            edge_set.add(_normalize_edge(u, v))
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(sorted(edge_set))
        self.name = name
        adj: list[list[int]] = [[] for _ in range(n + 1)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = tuple(tuple(sorted(nb)) for nb in adj)
        self._edge_set = frozenset(self.edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(self._adj[v]) for v in range(1, self.n + 1)]

    def has_edge(self, u: int, v: int) -> bool:
        return _normalize_edge(u, v) in self._edge_set

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def with_name(self, name: str) -> "Graph":
        return Graph(self.n, self.edges, name)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n, self.edges, self.name) == (other.n, other.edges, other.name)

    def __hash__(self) -> int:
        return hash((self.n, self.edges, self.name))

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Graph{label} n={self.n} m={self.m}>"


def cycle_graph(n: int, name: str = "") -> Graph:
    """The cycle 1-2-...-n-1."""
    if n < 3:
        raise ValueError(f"a cycle needs at least 3 vertices, got {n}")
    edges = [(i, i + 1) for i in range(1, n)] + [(n, 1)]
    return Graph(n, edges, name)


def complete_graph(n: int, name: str = "") -> Graph:
    edges = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    return Graph(n, edges, name)


def _canonical_order(order: Sequence[int]) -> tuple[int, ...]:
    # Rotate so the tour starts at vertex 1, then pick the direction whose
    # second element is the smaller neighbour of 1.
    n = len(order)
    start = order.index(1)
    rotated = [order[(start + i) % n] for i in range(n)]
    if rotated[-1] < rotated[1]:
        rotated = [rotated[0]] + rotated[:0:-1]
    return tuple(rotated)


class Tour:
    """Cyclic vertex ordering; rotations and reflections compare equal."""

    __slots__ = ("order",)

    def __init__(self, order: Sequence[int]):
        n = len(order)
        if n < 3:
            raise ValueError(f"a tour needs at least 3 vertices, got {n}")
        if sorted(order) != list(range(1, n + 1)):
            raise ValueError("tour is not a permutation of 1..n")
        self.order: tuple[int, ...] = _canonical_order(order)

    @property
    def n(self) -> int:
        return len(self.order)

    def edges(self) -> Iterator[Edge]:
        order = self.order
        for i, u in enumerate(order):
            yield _normalize_edge(u, order[(i + 1) % len(order)])

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tour):
            return NotImplemented
        return self.order == other.order

    def __hash__(self) -> int:
        return hash(self.order)

    def __len__(self) -> int:
        return len(self.order)

    def __repr__(self) -> str:
        return f"Tour({list(self.order)})"


@dataclass(frozen=True)
class Relabelling:
    """A vertex permutation; perm[v-1] is the new label of vertex v."""

    perm: tuple[int, ...]
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
            raise ValueError("relabelling is not a permutation of 1..n")

    @property
    def n(self) -> int:
        return len(self.perm)

    def apply(self, v: int) -> int:
        return self.perm[v - 1]

    def inverse(self) -> "Relabelling":
        inv = [0] * len(self.perm)
        for v, image in enumerate(self.perm, start=1):
            inv[image - 1] = v
        return Relabelling(tuple(inv), seed=None)

    @classmethod
    def identity(cls, n: int) -> "Relabelling":
        return cls(tuple(range(1, n + 1)), seed=None)

    @classmethod
    def random(cls, n: int, seed: int) -> "Relabelling":
        perm = list(range(1, n + 1))
        random.Random(seed).shuffle(perm)
        return cls(tuple(perm), seed=seed)


@dataclass(frozen=True)
class PlantedInstance:
    """A graph together with a Hamiltonian cycle known by construction."""

    graph: Graph
    planted: Tour

    def __post_init__(self) -> None:
        if not is_hamiltonian_cycle(self.graph, self.planted):
            raise ValueError("planted tour is not a Hamiltonian cycle of the graph")


def is_hamiltonian_cycle(g: Graph, t: Tour) -> bool:
    """True iff every wrapping consecutive pair of t is an edge of g.

    Raises CertificateError when the tour length does not match the graph,
    which is distinct from a well-formed but wrong certificate.
    """
    if t.n != g.n:
        raise CertificateError(f"tour has {t.n} vertices, graph has {g.n}")
    return all(e in g._edge_set for e in t.edges())


def relabel(g: Graph, r: Relabelling) -> Graph:
    """Apply a vertex permutation; vertex v becomes r.apply(v)."""
    if r.n != g.n:
        raise ValueError(f"permutation of length {r.n} does not fit graph with n={g.n}")
    perm = r.perm
    edges = [(perm[u - 1], perm[v - 1]) for u, v in g.edges]
    return Graph(g.n, edges, g.name)


def relabel_tour(t: Tour, r: Relabelling) -> Tour:
    if r.n != t.n:
        raise ValueError(f"permutation of length {r.n} does not fit tour with n={t.n}")
    perm = r.perm
    return Tour([perm[v - 1] for v in t.order])


def add_edge(g: Graph, u: int, v: int) -> Graph:
    if u == v:
        raise ValueError(f"cannot add self-loop at vertex {u}")
    if g.has_edge(u, v):
        raise ValueError(f"edge ({u},{v}) already present")
    if not (1 <= u <= g.n and 1 <= v <= g.n):
        raise ValueError(f"edge ({u},{v}) out of range 1..{g.n}")
    return Graph(g.n, g.edges + (_normalize_edge(u, v),), g.name)


def remove_edge(g: Graph, u: int, v: int) -> Graph:
    e = _normalize_edge(u, v)
    if e not in g._edge_set:
        raise ValueError(f"edge ({u},{v}) not present")
    return Graph(g.n, (x for x in g.edges if x != e), g.name)
