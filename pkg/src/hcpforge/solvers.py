"""Built-in Hamiltonian cycle solvers: exact search, counting oracle,
edge pruning and a rotation-based heuristic.

The exact search is a bitmask DFS with two sound prunes (free-degree and
reachability of the unvisited region); the counting variant enumerates
rotation/reflection classes exactly.  The heuristic does randomized
least-degree extension with rotation transformations and seeded restarts
and never claims non-Hamiltonicity.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .graphs import Edge, Graph, Tour, _normalize_edge, is_hamiltonian_cycle


class SearchBudgetExceeded(RuntimeError):
    """The exact search ran out of budget before completing."""


@dataclass(frozen=True)
class SolveBudget:
    """Resource caps for one solve attempt; None means unlimited."""

    wall_secs: Optional[float] = None
    max_nodes: Optional[int] = None
    mem_bytes: Optional[int] = None

    def __post_init__(self) -> None:
        for name in ("wall_secs", "max_nodes", "mem_bytes"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive when set, got {value}")


class SolverStatus(Enum):
    FOUND = "FOUND"
    EXHAUSTED_NO_HC = "EXHAUSTED_NO_HC"
    BUDGET_EXCEEDED = "BUDGET_EXCEEDED"
    ERROR = "ERROR"


@dataclass(frozen=True)
class SolverOutcome:
    status: SolverStatus
    tour: Optional[Tour] = None
    elapsed: float = 0.0
    detail: str = ""

    def __post_init__(self) -> None:
        if self.status is SolverStatus.FOUND and self.tour is None:
            raise ValueError("FOUND outcome requires a tour")


def _adjacency_masks(g: Graph) -> list[int]:
    adj = [0] * g.n
    for u, v in g.edges:
        adj[u - 1] |= 1 << (v - 1)
        adj[v - 1] |= 1 << (u - 1)
    return adj


def _search_start(g: Graph) -> int:
    # Starting from a low-degree vertex narrows the top of the search tree.
    degs = g.degrees()
    return min(range(g.n), key=lambda i: (degs[i], i))


def _hc_search(
    adj: list[int],
    n: int,
    start: int,
    want_count: bool,
    limit: Optional[int] = None,
    max_nodes: Optional[int] = None,
    deadline: Optional[float] = None,
    collect: Optional[list] = None,
):
    """Iterative DFS over simple paths from `start` (0-based vertices).

    Returns (count, tour_vertices, complete, nodes).  In counting mode each
    undirected cycle is counted once via the second-smaller-than-last
    orientation constraint; in find mode the first closing cycle is returned.
    """
    full = (1 << n) - 1
    start_bit = 1 << start
    start_adj = adj[start]
    # Connectivity sweeps are cheap on machine-word masks but costly on very
    # wide ones, so run them less often as n grows.
    reach_period = 1 if n <= 192 else 8
    path = [start]
    cand_stack = [start_adj]
    visited = start_bit
    count = 0
    nodes = 0
    complete = True
    tour: Optional[list[int]] = None

    while cand_stack:
        m = cand_stack[-1]
        if m == 0:
            cand_stack.pop()
            w = path.pop()
            if path:
                visited ^= 1 << w
            continue
        b = m & -m
        cand_stack[-1] = m ^ b
        w = b.bit_length() - 1
        nodes += 1
        if max_nodes is not None and nodes > max_nodes:
            complete = False
            break
        if deadline is not None and nodes & 1023 == 0 and time.monotonic() > deadline:
            complete = False
            break
        new_visited = visited | b
        if new_visited == full:
            if start_adj & b:
                if want_count:
                    if path[1] < w:
                        count += 1
                        if collect is not None:
                            collect.append(path + [w])
                        if limit is not None and count >= limit:
                            complete = False
                            break
                else:
                    tour = path + [w]
                    break
            continue
        unvisited = full & ~new_visited
        if start_adj & unvisited == 0:
            continue
        # Vertices adjacent to the old endpoint may have lost their last
        # spare connection; each unvisited vertex needs two potential cycle
        # edges into unvisited ∪ {new endpoint, start}.
        allowed = unvisited | b | start_bit
        affected = adj[path[-1]] & unvisited
        dead = False
        while affected:
            ab = affected & -affected
            affected ^= ab
            f = adj[ab.bit_length() - 1] & allowed
            if f == 0 or f & (f - 1) == 0:
                dead = True
                break
        if dead:
            continue
        if nodes % reach_period == 0:
            reach = b
            frontier = b
            while frontier:
                spread = 0
                mm = frontier
                while mm:
                    fb = mm & -mm
                    mm ^= fb
                    spread |= adj[fb.bit_length() - 1]
                frontier = spread & unvisited & ~reach
                reach |= frontier
            if unvisited & ~reach:
                continue
        path.append(w)
        visited = new_visited
        cand_stack.append(adj[w] & unvisited)

    return count, tour, complete, nodes


def count_hc(
    g: Graph,
    limit: Optional[int] = None,
    max_nodes: Optional[int] = None,
) -> int:
    """Exact number of distinct Hamiltonian cycles (rotation/reflection classes).

    With `limit` set the search stops as soon as `limit` cycles are seen and
    returns `limit`.  Exceeding `max_nodes` raises SearchBudgetExceeded
    rather than ever returning a wrong count.
    """
    if g.n < 3 or min(g.degrees()) < 2:
        return 0
    count, _, complete, _ = _hc_search(
        _adjacency_masks(g), g.n, _search_start(g),
        want_count=True, limit=limit, max_nodes=max_nodes,
    )
    if not complete:
        if limit is not None and count >= limit:
            return count
        raise SearchBudgetExceeded(f"count_hc exceeded {max_nodes} search nodes")
    return count


_SOLVED, _FAILED, _OK = 1, 2, 0


class _SegmentSearch:
    """Complete edge-branching search with forced-edge propagation.

    Decisions include or exclude edges; propagation forces both edges at
    degree-2 vertices, strips extra edges at saturated vertices, discards
    the chord that would close a forced sub-path, and fails on starved
    vertices, premature cycles or a disconnected remainder.  A forced
    spanning cycle is a Hamiltonian cycle.
    """

    def __init__(self, g: Graph):
        self.n = g.n
        self.adj: list[set[int]] = [set()] + [set(g.neighbors(v)) for v in g.vertices()]
        self.forced_deg = [0] * (g.n + 1)
        self.forced_nbrs: list[list[int]] = [[] for _ in range(g.n + 1)]
        self.forced_pairs: set[Edge] = set()
        self.seg_end = list(range(g.n + 1))
        self.seg_size = [1] * (g.n + 1)
        self.open_ends: set[int] = set()
        self.trail: list[tuple] = []

    def _remove(self, u: int, v: int) -> None:
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        self.trail.append((0, u, v))

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            entry = self.trail.pop()
            if entry[0] == 0:
                _, u, v = entry
                self.adj[u].add(v)
                self.adj[v].add(u)
            else:
                _, u, v, a, ea, sa, b, eb, sb = entry
                self.forced_pairs.discard(_normalize_edge(u, v))
                for x, y in ((u, v), (v, u)):
                    self.forced_deg[x] -= 1
                    self.forced_nbrs[x].remove(y)
                    if self.forced_deg[x] == 1:
                        self.open_ends.add(x)
                    else:
                        self.open_ends.discard(x)
                self.seg_end[a], self.seg_size[a] = ea, sa
                self.seg_end[b], self.seg_size[b] = eb, sb

    def _force(self, u: int, v: int, dirty: list[int], forces: list[Edge]) -> int:
        if _normalize_edge(u, v) in self.forced_pairs:
            return _OK
        if v not in self.adj[u]:
            return _FAILED  # queued force raced with a removal
        if self.forced_deg[u] == 2 or self.forced_deg[v] == 2:
            return _FAILED
        a, b = self.seg_end[u], self.seg_end[v]
        closing = a == v
        if closing and self.seg_size[u] < self.n:
            return _FAILED  # would close a cycle on too few vertices
        self.trail.append((1, u, v, a, self.seg_end[a], self.seg_size[a],
                           b, self.seg_end[b], self.seg_size[b]))
        self.forced_pairs.add(_normalize_edge(u, v))
        for x, y in ((u, v), (v, u)):
            self.forced_deg[x] += 1
            self.forced_nbrs[x].append(y)
            if self.forced_deg[x] == 1:
                self.open_ends.add(x)
            else:
                self.open_ends.discard(x)
        if closing:
            return _SOLVED  # spanning segment plus closing edge
        size = self.seg_size[a] + self.seg_size[b]
        self.seg_end[a], self.seg_end[b] = b, a
        self.seg_size[a] = self.seg_size[b] = size
        for x in (u, v):
            if self.forced_deg[x] == 2:
                for w in list(self.adj[x]):
                    if _normalize_edge(x, w) not in self.forced_pairs:
                        self._remove(x, w)
                        dirty.append(w)
        if size < self.n:
            if b in self.adj[a] and _normalize_edge(a, b) not in self.forced_pairs:
                self._remove(a, b)
                dirty.append(a)
                dirty.append(b)
        else:  # segment spans every vertex; only its closing edge remains usable
            if b not in self.adj[a]:
                return _FAILED
            forces.append((a, b))
        return _OK

    def _propagate(self, dirty: list[int], forces: list[Edge]) -> int:
        while dirty or forces:
            while forces:
                u, v = forces.pop()
                status = self._force(u, v, dirty, forces)
                if status != _OK:
                    return status
            while dirty:
                v = dirty.pop()
                d = len(self.adj[v])
                if d < 2:
                    return _FAILED
                if d == 2:
                    for w in self.adj[v]:
                        if _normalize_edge(v, w) not in self.forced_pairs:
                            forces.append((v, w))
        return _OK

    def _connected(self) -> bool:
        seen = {1}
        frontier = [1]
        adj = self.adj
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        return len(seen) == self.n

    def _alternatives(self) -> list[tuple]:
        if self.open_ends:
            v = min(self.open_ends, key=lambda x: (len(self.adj[x]), x))
            avail = sorted(w for w in self.adj[v]
                           if _normalize_edge(v, w) not in self.forced_pairs)
            return [("end", v, avail, i) for i in range(len(avail))]
        v = min(range(1, self.n + 1), key=lambda x: (len(self.adj[x]), x))
        w = min(self.adj[v])
        return [("inc", v, w), ("exc", v, w)]

    def _apply(self, alt: tuple) -> int:
        dirty: list[int] = []
        forces: list[Edge] = []
        if alt[0] == "end":
            _, v, avail, i = alt
            for w in avail[:i]:
                self._remove(v, w)
                dirty.append(w)
            dirty.append(v)
            forces.append((v, avail[i]))
        elif alt[0] == "inc":
            forces.append((alt[1], alt[2]))
        else:
            self._remove(alt[1], alt[2])
            dirty.extend((alt[1], alt[2]))
        status = self._propagate(dirty, forces)
        if status == _OK and not self._connected():
            return _FAILED
        return status

    def _extract(self) -> Tour:
        order = [1, self.forced_nbrs[1][0]]
        while len(order) < self.n:
            a, b = self.forced_nbrs[order[-1]]
            order.append(a if a != order[-2] else b)
        return Tour(order)

    def run(self, max_nodes: Optional[int], deadline: Optional[float]):
        """Returns (status, tour, complete)."""
        dirty = list(range(1, self.n + 1))
        status = self._propagate(dirty, [])
        if status == _SOLVED:
            return SolverStatus.FOUND, self._extract(), True
        if status == _FAILED or not self._connected():
            return SolverStatus.EXHAUSTED_NO_HC, None, True
        nodes = 0
        stack = [(len(self.trail), self._alternatives(), 0)]
        while stack:
            mark, alts, idx = stack[-1]
            self._undo(mark)
            if idx >= len(alts):
                stack.pop()
                continue
            stack[-1] = (mark, alts, idx + 1)
            nodes += 1
            if max_nodes is not None and nodes > max_nodes:
                return SolverStatus.BUDGET_EXCEEDED, None, False
            if deadline is not None and nodes & 63 == 0 and time.monotonic() > deadline:
                return SolverStatus.BUDGET_EXCEEDED, None, False
            status = self._apply(alts[idx])
            if status == _SOLVED:
                return SolverStatus.FOUND, self._extract(), False
            if status == _OK:
                stack.append((len(self.trail), self._alternatives(), 0))
        return SolverStatus.EXHAUSTED_NO_HC, None, True


def enumerate_hc(
    g: Graph,
    limit: Optional[int] = None,
    max_nodes: Optional[int] = None,
) -> list[Tour]:
    """All distinct Hamiltonian cycles, up to `limit` when given."""
    if g.n < 3 or min(g.degrees()) < 2:
        return []
    collected: list[list[int]] = []
    count, _, complete, _ = _hc_search(
        _adjacency_masks(g), g.n, _search_start(g),
        want_count=True, limit=limit, max_nodes=max_nodes, collect=collected,
    )
    if not complete and (limit is None or count < limit):
        raise SearchBudgetExceeded(f"enumerate_hc exceeded {max_nodes} search nodes")
    return [Tour([v + 1 for v in path]) for path in collected]


def find_hc_exact(g: Graph, budget: SolveBudget = SolveBudget()) -> SolverOutcome:
    """Complete search; proves non-Hamiltonicity when it finishes.

    Branches on edge inclusion/exclusion with forced-edge propagation:
    degree-2 vertices force both incident edges into the cycle and forced
    paths must not close sub-cycles.
    """
    t0 = time.monotonic()
    if g.n < 3 or min(g.degrees()) < 2:
        return SolverOutcome(SolverStatus.EXHAUSTED_NO_HC, elapsed=time.monotonic() - t0,
                             detail="degenerate graph")
    deadline = t0 + budget.wall_secs if budget.wall_secs is not None else None
    status, tour, _ = _SegmentSearch(g).run(budget.max_nodes, deadline)
    elapsed = time.monotonic() - t0
    if status is SolverStatus.FOUND:
        if not is_hamiltonian_cycle(g, tour):  # soundness guard
            return SolverOutcome(SolverStatus.ERROR, elapsed=elapsed,
                                 detail="internal: search produced an invalid cycle")
        return SolverOutcome(SolverStatus.FOUND, tour=tour, elapsed=elapsed)
    return SolverOutcome(status, elapsed=elapsed)


@dataclass(frozen=True)
class PruneResult:
    """Outcome of forced-edge pruning; the graph keeps an identical HC set."""

    graph: Graph
    non_hamiltonian: bool = False
    removed: tuple[Edge, ...] = ()
    forced: frozenset[Edge] = field(default_factory=frozenset)
    detail: str = ""


def prune_non_hc_edges(g: Graph) -> PruneResult:
    """Remove edges provably in no Hamiltonian cycle, iterated to a fixpoint.

    Local rules: a degree-2 vertex forces both incident edges; a vertex with
    two forced edges admits no others; the chord closing a forced sub-path is
    unusable.  A contradiction (forced sub-cycle, starved vertex) proves the
    graph non-Hamiltonian, reported via the result status.
    """
    n = g.n
    if n < 3:
        return PruneResult(g, non_hamiltonian=True, detail="fewer than 3 vertices")
    adj: dict[int, set[int]] = {v: set(g.neighbors(v)) for v in g.vertices()}
    forced: set[Edge] = set()
    forced_deg = [0] * (n + 1)
    # Endpoint bookkeeping for forced paths: other_end/size are valid only
    # at current path endpoints; singletons map to themselves.
    other_end = list(range(n + 1))
    path_size = [1] * (n + 1)
    removed: list[Edge] = []
    to_force: list[Edge] = []
    unique_cycle = False

    def fail(msg: str) -> PruneResult:
        remaining = [(u, v) for u in adj for v in adj[u] if u < v]
        return PruneResult(Graph(n, remaining, g.name), non_hamiltonian=True,
                           removed=tuple(removed), forced=frozenset(forced), detail=msg)

    def queue_degree_rules(v: int) -> Optional[str]:
        d = len(adj[v])
        if d < 2:
            return f"vertex {v} has degree {d}"
        if d == 2:
            for w in adj[v]:
                e = _normalize_edge(v, w)
                if e not in forced:
                    to_force.append(e)
        return None

    for v in g.vertices():
        msg = queue_degree_rules(v)
        if msg:
            return fail(msg)

    def drop_edge(u: int, v: int) -> Optional[str]:
        if v not in adj[u]:
            return None
        adj[u].discard(v)
        adj[v].discard(u)
        removed.append(_normalize_edge(u, v))
        for x in (u, v):
            msg = queue_degree_rules(x)
            if msg:
                return msg
        return None

    while to_force:
        u, v = to_force.pop()
        e = (u, v)
        if e in forced or unique_cycle:
            continue
        if v not in adj[u]:
            return fail(f"forced edge {e} was removed")
        if forced_deg[u] == 2 or forced_deg[v] == 2:
            return fail(f"edge {e} forced at an already saturated vertex")
        a, b = other_end[u], other_end[v]
        if a == v:  # u and v are the two ends of one forced path
            if len(forced) + 1 == n:
                forced.add(e)
                unique_cycle = True
                break
            return fail(f"forced edges close a {path_size[u]}-cycle on fewer than {n} vertices")
        forced.add(e)
        forced_deg[u] += 1
        forced_deg[v] += 1
        size = path_size[a] + path_size[b]
        other_end[a], other_end[b] = b, a
        path_size[a] = path_size[b] = size
        # Saturated vertices keep only their forced edges.
        for x in (u, v):
            if forced_deg[x] == 2:
                for w in list(adj[x]):
                    if _normalize_edge(x, w) not in forced:
                        msg = drop_edge(x, w)
                        if msg:
                            return fail(msg)
        if size < n:
            if b in adj[a] and _normalize_edge(a, b) not in forced:
                msg = drop_edge(a, b)
                if msg:
                    return fail(msg)
        else:  # spanning forced path: the closing edge is forced or missing
            if b in adj[a]:
                to_force.append(_normalize_edge(a, b))
            else:
                return fail(f"spanning forced path cannot close ({a},{b} not an edge)")

    if unique_cycle:
        for u in adj:
            for w in list(adj[u]):
                if u < w and (u, w) not in forced:
                    drop_edge(u, w)
    remaining = sorted((u, v) for u in adj for v in adj[u] if u < v)
    return PruneResult(Graph(n, remaining, g.name), non_hamiltonian=False,
                       removed=tuple(removed), forced=frozenset(forced))


def find_hc_heuristic(
    g: Graph,
    budget: SolveBudget = SolveBudget(max_nodes=200_000),
    seed: int = 0,
) -> SolverOutcome:
    """Randomized rotation heuristic; FOUND or BUDGET_EXCEEDED, never a proof.

    Deterministic for a fixed (graph, seed) when the budget is a node cap
    rather than wall time.
    """
    t0 = time.monotonic()
    n = g.n
    if n < 3 or min(g.degrees()) < 2:
        return SolverOutcome(SolverStatus.BUDGET_EXCEEDED, elapsed=time.monotonic() - t0,
                             detail="no cycle reachable by extension")
    deadline = t0 + budget.wall_secs if budget.wall_secs is not None else None
    max_nodes = budget.max_nodes
    rng = random.Random(seed)
    adj = g._adj
    edge_set = g._edge_set
    restart_cap = max(60 * n, 600)
    nodes = 0

    while True:
        pos: list[Optional[int]] = [None] * (n + 1)
        path = [rng.randrange(1, n + 1)]
        pos[path[0]] = 0
        steps = 0
        while steps < restart_cap:
            nodes += 1
            steps += 1
            if max_nodes is not None and nodes > max_nodes:
                return SolverOutcome(SolverStatus.BUDGET_EXCEEDED,
                                     elapsed=time.monotonic() - t0)
            if deadline is not None and nodes & 255 == 0 and time.monotonic() > deadline:
                return SolverOutcome(SolverStatus.BUDGET_EXCEEDED,
                                     elapsed=time.monotonic() - t0)
            u = path[-1]
            # Extend to the unvisited neighbour with fewest open continuations.
            best = None
            best_key = None
            for w in adj[u]:
                if pos[w] is None:
                    open_deg = sum(1 for x in adj[w] if pos[x] is None)
                    key = (open_deg, rng.random())
                    if best_key is None or key < best_key:
                        best, best_key = w, key
            if best is not None:
                pos[best] = len(path)
                path.append(best)
                if len(path) == n and _normalize_edge(path[-1], path[0]) in edge_set:
                    tour = Tour(path)
                    assert is_hamiltonian_cycle(g, tour)
                    return SolverOutcome(SolverStatus.FOUND, tour=tour,
                                         elapsed=time.monotonic() - t0)
                continue
            length = len(path)
            if length == n:
                # Look for one rotation that makes the endpoint adjacent to the start.
                closer = None
                for w in adj[u]:
                    p = pos[w]
                    if p is not None and p + 1 < n and _normalize_edge(path[p + 1], path[0]) in edge_set:
                        closer = p
                        break
                if closer is not None:
                    path[closer + 1:] = reversed(path[closer + 1:])
                    for i in range(closer + 1, n):
                        pos[path[i]] = i
                    tour = Tour(path)
                    assert is_hamiltonian_cycle(g, tour)
                    return SolverOutcome(SolverStatus.FOUND, tour=tour,
                                         elapsed=time.monotonic() - t0)
            # Rotate, preferring pivots whose new endpoint can extend the path.
            productive = []
            fallback = []
            for w in adj[u]:
                p = pos[w]
                if p is None or p >= length - 2:
                    continue
                new_end = path[p + 1]
                if any(pos[x] is None for x in adj[new_end]):
                    productive.append(p)
                else:
                    fallback.append(p)
            if productive:
                p = productive[rng.randrange(len(productive))]
            elif fallback:
                if rng.random() < 0.25:
                    # Work from the other end of the path for a while.
                    path.reverse()
                    for i, v in enumerate(path):
                        pos[v] = i
                    continue
                p = fallback[rng.randrange(len(fallback))]
            else:
                break  # endpoint only connects backwards; restart
            path[p + 1:] = reversed(path[p + 1:])
            for i in range(p + 1, length):
                pos[path[i]] = i
