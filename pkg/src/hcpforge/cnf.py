"""CNF formulas, the four source-problem encoders, and their input formats.

Variable numbering puts semantic variables first in fixed blocks (colour
indicators, board cells, side indicators, orientation selectors) so that a
satisfying assignment decodes back to a source solution without any side
table; auxiliary variables from the sequential at-most-one encoding come
after the semantic block.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .graphs import Graph

_PAIRWISE_AMO_LIMIT = 6


class ProblemKind(str, Enum):
    COL3 = "COL3"
    QN = "QN"
    SSP = "SSP"
    II = "II"


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.num_vars < 1:
            raise ValueError(f"num_vars must be positive, got {self.num_vars}")
        for clause in self.clauses:
            if not clause:
                raise ValueError("empty clause")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} outside 1..{self.num_vars}")

    @property
    def total_literals(self) -> int:
        return sum(len(c) for c in self.clauses)


class _Builder:
    """Accumulates clauses and allocates auxiliary variables."""

    def __init__(self, num_semantic: int):
        self.next_var = num_semantic + 1
        self.clauses: list[tuple[int, ...]] = []

    def add(self, clause: Sequence[int]) -> None:
        self.clauses.append(tuple(clause))

    def at_most_one(self, lits: Sequence[int]) -> None:
        k = len(lits)
        if k < 2:
            return
        if k < _PAIRWISE_AMO_LIMIT:
            for i in range(k):
                for j in range(i + 1, k):
                    self.add((-lits[i], -lits[j]))
            return
        # sequential (commander-free Sinz) encoding keeps clause count linear
        aux = list(range(self.next_var, self.next_var + k - 1))
        self.next_var += k - 1
        self.add((-lits[0], aux[0]))
        for i in range(1, k - 1):
            self.add((-lits[i], aux[i]))
            self.add((-aux[i - 1], aux[i]))
            self.add((-lits[i], -aux[i - 1]))
        self.add((-lits[k - 1], -aux[k - 2]))

    def exactly_one(self, lits: Sequence[int]) -> None:
        if not lits:
            # no candidate can be true: the instance is infeasible
            self.add((1,))
            self.add((-1,))
            return
        self.add(tuple(lits))
        self.at_most_one(lits)

    def formula(self) -> CnfFormula:
        return CnfFormula(self.next_var - 1, tuple(self.clauses))


def col3_var(v: int, colour: int) -> int:
    return 3 * (v - 1) + colour


def encode_col3(g: Graph) -> CnfFormula:
    """Satisfiable iff g is 3-colourable; 3 indicator variables per vertex."""
    b = _Builder(3 * g.n)
    for v in g.vertices():
        b.exactly_one([col3_var(v, c) for c in (1, 2, 3)])
    for u, v in g.edges:
        for c in (1, 2, 3):
            b.add((-col3_var(u, c), -col3_var(v, c)))
    return b.formula()


def queens_var(n: int, row: int, col: int) -> int:
    return n * (row - 1) + col


def encode_nqueens(n: int) -> CnfFormula:
    """Satisfiable iff n non-attacking queens fit an n x n board."""
    if n < 1:
        raise ValueError(f"board size must be positive, got {n}")
    b = _Builder(n * n)
    for r in range(1, n + 1):
        b.exactly_one([queens_var(n, r, c) for c in range(1, n + 1)])
    for c in range(1, n + 1):
        b.at_most_one([queens_var(n, r, c) for r in range(1, n + 1)])
    # diagonals in both directions, indexed by r+c and r-c
    for s in range(3, 2 * n + 1):
        b.at_most_one([queens_var(n, r, s - r)
                       for r in range(max(1, s - n), min(n, s - 1) + 1)])
    for d in range(-(n - 2), n - 1):
        b.at_most_one([queens_var(n, r, r - d)
                       for r in range(max(1, d + 1), min(n, n + d) + 1)])
    return b.formula()


def encode_setsplit(universe: Iterable[int], family: Iterable[Iterable[int]]) -> CnfFormula:
    """Satisfiable iff the universe splits into two non-empty sides that both
    meet every subset.  One side-indicator variable per element."""
    elements = sorted(set(universe))
    if not elements:
        raise ValueError("universe must be non-empty")
    index = {e: i + 1 for i, e in enumerate(elements)}
    b = _Builder(len(elements))
    for subset in family:
        subset = list(subset)
        stray = [e for e in subset if e not in index]
        if stray:
            raise ValueError(f"subset elements {stray} outside the universe")
        if not subset:
            raise ValueError("empty subset can never meet both sides")
        b.add(tuple(index[e] for e in subset))
        b.add(tuple(-index[e] for e in subset))
    b.add(tuple(index[e] for e in elements))
    b.add(tuple(-index[e] for e in elements))
    return b.formula()


def _rotation_closure() -> tuple[tuple[int, ...], ...]:
    # Faces ordered (up, down, north, south, east, west); close the three
    # quarter-turns to get the 24 cube orientations in a deterministic order.
    def turn_z(f):
        return (f[0], f[1], f[5], f[4], f[2], f[3])

    def turn_x(f):
        return (f[3], f[2], f[0], f[1], f[4], f[5])

    def turn_y(f):
        return (f[5], f[4], f[2], f[3], f[0], f[1])

    seen = {(0, 1, 2, 3, 4, 5)}
    frontier = list(seen)
    while frontier:
        f = frontier.pop()
        for h in (turn_z(f), turn_x(f), turn_y(f)):
            if h not in seen:
                seen.add(h)
                frontier.append(h)
    return tuple(sorted(seen))


CUBE_ORIENTATIONS = _rotation_closure()
_SIDE_FACES = (2, 3, 4, 5)  # the four long faces of the stacked column


def ii_var(cube: int, orientation: int) -> int:
    return 24 * (cube - 1) + orientation


def cube_side_colour(cube: tuple[int, ...], orientation: int, side: int) -> int:
    """Colour shown by a cube on one of the four long faces (side 0..3)."""
    return cube[CUBE_ORIENTATIONS[orientation - 1][_SIDE_FACES[side]]]


def encode_instant_insanity(cubes: Sequence[tuple[int, ...]]) -> CnfFormula:
    """Satisfiable iff the k cubes stack so each long face shows all k colours.

    One variable per (cube, orientation) pair; each of the four column sides
    must show every colour on exactly one cube.
    """
    k = len(cubes)
    if k < 1:
        raise ValueError("need at least one cube")
    for idx, cube in enumerate(cubes, start=1):
        if len(cube) != 6:
            raise ValueError(f"cube {idx} has {len(cube)} faces, expected 6")
        bad = [c for c in cube if not 1 <= c <= k]
        if bad:
            raise ValueError(f"cube {idx} colours {bad} outside 1..{k}")
    b = _Builder(24 * k)
    for i in range(1, k + 1):
        b.exactly_one([ii_var(i, o) for o in range(1, 25)])
    for side in range(4):
        for colour in range(1, k + 1):
            shows = [ii_var(i, o)
                     for i in range(1, k + 1)
                     for o in range(1, 25)
                     if cube_side_colour(cubes[i - 1], o, side) == colour]
            b.exactly_one(shows)
    return b.formula()


@dataclass(frozen=True)
class SourceProblem:
    """One instance of a reducible source problem."""

    kind: ProblemKind
    payload: object

    @classmethod
    def col3(cls, g: Graph) -> "SourceProblem":
        return cls(ProblemKind.COL3, g)

    @classmethod
    def queens(cls, n: int) -> "SourceProblem":
        return cls(ProblemKind.QN, int(n))

    @classmethod
    def set_split(cls, universe: Iterable[int], family: Iterable[Iterable[int]]) -> "SourceProblem":
        return cls(ProblemKind.SSP, (tuple(sorted(set(universe))),
                                     tuple(tuple(sorted(s)) for s in family)))

    @classmethod
    def insanity(cls, cubes: Iterable[Iterable[int]]) -> "SourceProblem":
        return cls(ProblemKind.II, tuple(tuple(c) for c in cubes))


def encode_source(problem: SourceProblem) -> CnfFormula:
    if problem.kind is ProblemKind.COL3:
        return encode_col3(problem.payload)
    if problem.kind is ProblemKind.QN:
        return encode_nqueens(problem.payload)
    if problem.kind is ProblemKind.SSP:
        universe, family = problem.payload
        return encode_setsplit(universe, family)
    if problem.kind is ProblemKind.II:
        return encode_instant_insanity(problem.payload)
    raise ValueError(f"unknown problem kind {problem.kind!r}")


@dataclass(frozen=True)
class SourceSolution:
    """Decoded source-problem solution, ready for printing."""

    kind: ProblemKind
    data: object

    def render(self) -> str:
        if self.kind is ProblemKind.COL3:
            return "\n".join(f"vertex {v}: colour {c}"
                             for v, c in enumerate(self.data, start=1))
        if self.kind is ProblemKind.QN:
            return "\n".join(f"queen at row {r}, column {c}" for r, c in self.data)
        if self.kind is ProblemKind.SSP:
            side_v, side_w = self.data
            return f"V = {sorted(side_v)}\nW = {sorted(side_w)}"
        if self.kind is ProblemKind.II:
            return "\n".join(f"cube {i}: orientation {o}"
                             for i, o in enumerate(self.data, start=1))
        raise ValueError(f"unknown problem kind {self.kind!r}")


def decode_assignment(problem: SourceProblem, assignment: Sequence[bool]) -> SourceSolution:
    """Read a source solution out of the semantic block of an assignment."""
    kind = problem.kind
    if kind is ProblemKind.COL3:
        g: Graph = problem.payload
        colours = []
        for v in g.vertices():
            chosen = [c for c in (1, 2, 3) if assignment[col3_var(v, c) - 1]]
            if len(chosen) != 1:
                raise ValueError(f"vertex {v} has {len(chosen)} colours in the assignment")
            colours.append(chosen[0])
        return SourceSolution(kind, tuple(colours))
    if kind is ProblemKind.QN:
        n: int = problem.payload
        cells = tuple((r, c) for r in range(1, n + 1) for c in range(1, n + 1)
                      if assignment[queens_var(n, r, c) - 1])
        return SourceSolution(kind, cells)
    if kind is ProblemKind.SSP:
        universe, _ = problem.payload
        side_v = frozenset(e for i, e in enumerate(universe) if assignment[i])
        side_w = frozenset(universe) - side_v
        return SourceSolution(kind, (side_v, side_w))
    if kind is ProblemKind.II:
        cubes = problem.payload
        orients = []
        for i in range(1, len(cubes) + 1):
            chosen = [o for o in range(1, 25) if assignment[ii_var(i, o) - 1]]
            if len(chosen) != 1:
                raise ValueError(f"cube {i} has {len(chosen)} orientations in the assignment")
            orients.append(chosen[0])
        return SourceSolution(kind, tuple(orients))
    raise ValueError(f"unknown problem kind {kind!r}")


def solution_is_valid(problem: SourceProblem, solution: SourceSolution) -> bool:
    kind = problem.kind
    if kind is not solution.kind:
        return False
    if kind is ProblemKind.COL3:
        g, colours = problem.payload, solution.data
        return (len(colours) == g.n
                and all(c in (1, 2, 3) for c in colours)
                and all(colours[u - 1] != colours[v - 1] for u, v in g.edges))
    if kind is ProblemKind.QN:
        n, cells = problem.payload, solution.data
        if len(cells) != n or len({r for r, _ in cells}) != n:
            return False
        return all(c1 != c2 and abs(r1 - r2) != abs(c1 - c2)
                   for i, (r1, c1) in enumerate(cells)
                   for (r2, c2) in cells[i + 1:])
    if kind is ProblemKind.SSP:
        (universe, family), (side_v, side_w) = problem.payload, solution.data
        if side_v | side_w != set(universe) or side_v & side_w:
            return False
        if not side_v or not side_w:
            return False
        return all(set(s) & side_v and set(s) & side_w for s in family)
    if kind is ProblemKind.II:
        cubes, orients = problem.payload, solution.data
        k = len(cubes)
        if len(orients) != k:
            return False
        for side in range(4):
            shown = sorted(cube_side_colour(cubes[i], orients[i], side) for i in range(k))
            if shown != list(range(1, k + 1)):
                return False
        return True
    raise ValueError(f"unknown problem kind {kind!r}")


def _data_lines(text: str) -> list[str]:
    lines = []
    for raw in text.splitlines():
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append(stripped)
    return lines


def parse_source_text(kind: ProblemKind, text: str) -> SourceProblem:
    """Parse the plain-text input formats ('#' starts a comment).

    COL3: first line n, then one 'u v' edge per line.
    QN:   a single integer board size.
    SSP:  first line the universe size (elements are 1..size), then one
          subset per line as space-separated elements.
    II:   first line k, then k lines of 6 colour indices
          (faces ordered up, down, north, south, east, west).
    """
    lines = _data_lines(text)
    if not lines:
        raise ValueError("empty input")
    if kind is ProblemKind.COL3:
        n = int(lines[0])
        edges = []
        for line in lines[1:]:
            u, v = map(int, line.split())
            edges.append((u, v))
        return SourceProblem.col3(Graph(n, edges, f"col3_{n}"))
    if kind is ProblemKind.QN:
        if len(lines) != 1:
            raise ValueError("queens input is a single integer")
        return SourceProblem.queens(int(lines[0]))
    if kind is ProblemKind.SSP:
        size = int(lines[0])
        universe = range(1, size + 1)
        family = [tuple(map(int, line.split())) for line in lines[1:]]
        return SourceProblem.set_split(universe, family)
    if kind is ProblemKind.II:
        k = int(lines[0])
        if len(lines) != k + 1:
            raise ValueError(f"expected {k} cube lines, got {len(lines) - 1}")
        cubes = []
        for line in lines[1:]:
            faces = tuple(map(int, line.split()))
            if len(faces) != 6:
                raise ValueError(f"cube line needs 6 colours, got {len(faces)}")
            cubes.append(faces)
        return SourceProblem.insanity(cubes)
    raise ValueError(f"unknown problem kind {kind!r}")
