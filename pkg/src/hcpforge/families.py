"""Instance family generators: generalized Petersen benchmark classes,
dense uniquely-Hamiltonian graphs, modified flower snarks, random regular
graphs and planted-cycle cubic graphs.

Every generator is a pure function of its parameters and seed; identical
inputs produce identical edge lists.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .graphs import Edge, Graph, PlantedInstance, Tour, add_edge

_MATCHING_RETRY_CAP = 1000


class Family(str, Enum):
    GPN = "GPN"
    GP3 = "GP3"
    GP0 = "GP0"
    SHEEHAN = "SHEEHAN"
    SNARK = "SNARK"
    SNARK_MODIFIED = "SNARK_MODIFIED"
    RANDOM_REGULAR = "RANDOM_REGULAR"
    PLANTED_CUBIC = "PLANTED_CUBIC"


@dataclass(frozen=True)
class ExpectedProperties:
    """What is known in advance about a generated instance; None = unknown."""

    hamiltonian: Optional[bool] = None
    hc_count: Optional[int] = None
    optimal_tsp_length: Optional[int] = None

    def __post_init__(self) -> None:
        if self.hamiltonian is False and self.hc_count not in (0, None):
            raise ValueError("a non-Hamiltonian graph cannot have a positive HC count")
        if self.hc_count == 0 and self.hamiltonian is True:
            raise ValueError("hc_count 0 contradicts hamiltonian=True")


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    params: dict[str, int] = field(default_factory=dict)
    seed: Optional[int] = None

    def __hash__(self) -> int:
        return hash((self.family, tuple(sorted(self.params.items())), self.seed))


@dataclass(frozen=True)
class GeneratedInstance:
    graph: Graph
    expected: ExpectedProperties
    planted: Optional[Tour] = None


def gen_generalized_petersen(p: int, k: int) -> Graph:
    """GP(p,k): outer p-cycle, spokes, and an inner star polygon of step k.

    Outer vertex u_i gets label i+1, inner vertex v_i gets label p+i+1.
    """
    if p < 3:
        raise ValueError(f"p must be at least 3, got {p}")
    if not 1 <= k < p / 2:
        raise ValueError(f"k must satisfy 1 <= k < p/2, got k={k}, p={p}")
    edges = []
    for i in range(p):
        edges.append((i + 1, (i + 1) % p + 1))
        edges.append((i + 1, p + i + 1))
        edges.append((p + i + 1, p + (i + k) % p + 1))
    return Graph(2 * p, edges, f"GP_{p}_{k}")


_GP_RESIDUE = {Family.GPN: 1, Family.GP3: 3, Family.GP0: 5}


def _random_absent_pair(g: Graph, rng: random.Random) -> Edge:
    while True:
        u = rng.randrange(1, g.n + 1)
        v = rng.randrange(1, g.n + 1)
        if u != v and not g.has_edge(u, v):
            return (min(u, v), max(u, v))


def gen_gp_benchmark(
    cls: Family, p: int, seed: Optional[int] = None
) -> tuple[Graph, ExpectedProperties]:
    """One of the three GP(p,2) benchmark classes, keyed by p mod 6.

    GPN (p = 1 mod 6) has exactly p Hamiltonian cycles and GP3 (p = 3 mod 6)
    exactly 3.  GP0 (p = 5 mod 6) is hypohamiltonian, so one added chord
    makes it Hamiltonian with an unknown cycle count; the chord defaults to
    (u_0, u_2) and is drawn at random when a seed is given.
    """
    if cls not in _GP_RESIDUE:
        raise ValueError(f"{cls} is not a generalized Petersen benchmark class")
    if p % 6 != _GP_RESIDUE[cls]:
        raise ValueError(f"{cls.value} requires p = {_GP_RESIDUE[cls]} (mod 6), got p={p}")
    g = gen_generalized_petersen(p, 2)
    name = f"{cls.value}_{2 * p}"
    if cls is Family.GPN:
        return g.with_name(name), ExpectedProperties(True, p, 0)
    if cls is Family.GP3:
        return g.with_name(name), ExpectedProperties(True, 3, 0)
    chord = (1, 3) if seed is None else _random_absent_pair(g, random.Random(seed))
    return add_edge(g, *chord).with_name(name), ExpectedProperties(True, None, 0)


def gen_sheehan(n: int) -> tuple[Graph, ExpectedProperties]:
    """Maximally dense uniquely Hamiltonian graph on n >= 4 vertices.

    The unique cycle is 1-2-...-n-1; every odd vertex i is additionally
    joined to all j with i+2 <= j <= n-1, giving floor(n^2/4)+1 edges.
    The construction unravels under iterated forced-edge pruning: vertices
    2 and n start with degree 2, saturating vertex 1, whose chords then
    drop, exposing vertex 4, and so on around the cycle.
    """
    if n < 4:
        raise ValueError(f"n must be at least 4, got {n}")
    edges = [(i, i + 1) for i in range(1, n)] + [(n, 1)]
    for i in range(1, n - 2, 2):
        for j in range(i + 2, n):
            edges.append((i, j))
    return Graph(n, edges, f"SH_{n}"), ExpectedProperties(True, 1, 0)


def gen_flower_snark(k: int) -> Graph:
    """Isaacs flower snark on 4k vertices for odd k >= 5; non-Hamiltonian.

    Gadget i holds labels 4i+1..4i+4 as (a_i, b_i, c_i, d_i): hub b_i joins
    a_i, c_i, d_i; the a_i form a k-cycle and the c/d rows a single 2k-cycle.
    """
    if k < 5 or k % 2 == 0:
        raise ValueError(f"k must be odd and at least 5, got {k}")
    a = lambda i: 4 * (i % k) + 1
    b = lambda i: 4 * (i % k) + 2
    c = lambda i: 4 * (i % k) + 3
    d = lambda i: 4 * (i % k) + 4
    edges = []
    for i in range(k):
        edges += [(b(i), a(i)), (b(i), c(i)), (b(i), d(i)), (a(i), a(i + 1))]
    for i in range(k - 1):
        edges += [(c(i), c(i + 1)), (d(i), d(i + 1))]
    edges += [(c(k - 1), d(0)), (d(k - 1), c(0))]
    return Graph(4 * k, edges, f"FS_{4 * k}")


def gen_modified_flower_snark(
    k: int, seed: Optional[int] = None
) -> tuple[Graph, ExpectedProperties]:
    """Flower snark plus one edge; Hamiltonian since the snark is hypohamiltonian.

    The default added edge is the outer-cycle chord (a_0, a_2); a seed draws
    a random absent pair instead.
    """
    g = gen_flower_snark(k)
    chord = (1, 9) if seed is None else _random_absent_pair(g, random.Random(seed))
    return add_edge(g, *chord).with_name(f"SN_{4 * k}"), ExpectedProperties(True, None, 0)


def gen_random_regular(n: int, d: int, seed: int) -> Graph:
    """Uniform random d-regular graph via the pairing model.

    Pairs vertex stubs uniformly and restarts on any self-loop or repeated
    edge, so accepted outcomes are uniform over simple d-regular graphs.
    """
    if (n * d) % 2 != 0:
        raise ValueError(f"n*d must be even, got n={n}, d={d}")
    if not 0 <= d < n:
        raise ValueError(f"need 0 <= d < n, got d={d}, n={n}")
    rng = random.Random(seed)
    stubs = [v for v in range(1, n + 1) for _ in range(d)]
    for _ in range(_MATCHING_RETRY_CAP):
        rng.shuffle(stubs)
        edges: set[Edge] = set()
        it = iter(stubs)
        for u, v in zip(it, it):
            if u == v:
                break
            e = (u, v) if u < v else (v, u)
            if e in edges:
                break
            edges.add(e)
        else:
            return Graph(n, edges, f"RR_{n}")
    raise RuntimeError(f"pairing model failed {_MATCHING_RETRY_CAP} times for n={n}, d={d}")


def gen_planted_cubic(n: int, seed: int) -> PlantedInstance:
    """Random cubic Hamiltonian graph: a random n-cycle plus a random
    perfect matching that avoids the cycle edges.  The cycle is the planted
    tour, so the instance is Hamiltonian by construction."""
    if n < 4 or n % 2 != 0:
        raise ValueError(f"n must be even and at least 4, got {n}")
    rng = random.Random(seed)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    cycle_edges = {
        (min(u, v), max(u, v))
        for u, v in zip(order, order[1:] + order[:1])
    }
    pool = list(range(1, n + 1))
    for _ in range(_MATCHING_RETRY_CAP):
        rng.shuffle(pool)
        it = iter(pool)
        matching = [(min(u, v), max(u, v)) for u, v in zip(it, it)]
        if all(e not in cycle_edges for e in matching):
            graph = Graph(n, sorted(cycle_edges) + matching, f"PC_{n}")
            return PlantedInstance(graph, Tour(order))
    raise RuntimeError(f"no cycle-avoiding perfect matching found after {_MATCHING_RETRY_CAP} tries")


def _require(params: dict[str, int], *names: str) -> list[int]:
    missing = [k for k in names if k not in params]
    if missing:
        raise ValueError(f"missing parameter(s) {missing} (have {sorted(params)})")
    return [params[k] for k in names]


def generate(spec: FamilySpec) -> GeneratedInstance:
    """Dispatch a FamilySpec to its generator."""
    fam = spec.family
    if fam in (Family.GPN, Family.GP3, Family.GP0):
        (p,) = _require(spec.params, "p")
        g, props = gen_gp_benchmark(fam, p, spec.seed)
        return GeneratedInstance(g, props)
    if fam is Family.SHEEHAN:
        (n,) = _require(spec.params, "n")
        g, props = gen_sheehan(n)
        return GeneratedInstance(g, props)
    if fam is Family.SNARK:
        (k,) = _require(spec.params, "k")
        return GeneratedInstance(gen_flower_snark(k), ExpectedProperties(False, 0, None))
    if fam is Family.SNARK_MODIFIED:
        (k,) = _require(spec.params, "k")
        g, props = gen_modified_flower_snark(k, spec.seed)
        return GeneratedInstance(g, props)
    if fam is Family.RANDOM_REGULAR:
        n, d = _require(spec.params, "n", "d")
        g = gen_random_regular(n, d, spec.seed if spec.seed is not None else 0)
        return GeneratedInstance(g, ExpectedProperties())
    if fam is Family.PLANTED_CUBIC:
        (n,) = _require(spec.params, "n")
        inst = gen_planted_cubic(n, spec.seed if spec.seed is not None else 0)
        return GeneratedInstance(inst.graph, ExpectedProperties(True, None, 0), inst.planted)
    raise ValueError(f"unknown family {fam!r}")
