"""Bit-exact TSPLIB-style readers and writers for HCP instances, binary
TSP matrices and tour files.

Writers emit ASCII with one fixed header order and sorted edge lists, so a
given graph always serializes to identical bytes.  Readers are tolerant of
extra COMMENT lines and flexible colon spacing but reject anything else
with a line-numbered parse error.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from .graphs import Graph, Tour, _normalize_edge

PathLike = Union[str, Path]


class ParseError(ValueError):
    """Malformed instance or tour file; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _split_header(raw: str) -> Optional[tuple[str, str]]:
    if ":" not in raw:
        return None
    key, _, value = raw.partition(":")
    return key.strip(), value.strip()


def hcp_text(g: Graph, comment: str = "generated by hcpforge") -> str:
    lines = [
        f"NAME : {g.name or 'unnamed'}",
        "TYPE : HCP",
        f"COMMENT : {comment}",
        f"DIMENSION : {g.n}",
        "EDGE_DATA_FORMAT : EDGE_LIST",
        "EDGE_DATA_SECTION",
    ]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    lines.append("-1")
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def write_hcp(g: Graph, path: PathLike, comment: str = "generated by hcpforge") -> None:
    Path(path).write_text(hcp_text(g, comment), encoding="ascii", newline="\n")


_HCP_HEADER_KEYS = {"NAME", "TYPE", "COMMENT", "DIMENSION", "EDGE_DATA_FORMAT"}


def parse_hcp_text(text: str) -> Graph:
    name = ""
    dimension: Optional[int] = None
    edges: list[tuple[int, int]] = []
    in_section = False
    terminated = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if terminated:
            if stripped == "EOF":
                continue
            raise ParseError(f"unexpected content after terminator: {stripped!r}", line_no)
        if not in_section:
            if stripped == "EDGE_DATA_SECTION":
                if dimension is None:
                    raise ParseError("EDGE_DATA_SECTION before DIMENSION", line_no)
                in_section = True
                continue
            header = _split_header(stripped)
            if header is None:
                raise ParseError(f"malformed header line: {stripped!r}", line_no)
            key, value = header
            if key not in _HCP_HEADER_KEYS:
                raise ParseError(f"unknown header key {key!r}", line_no)
            if key == "NAME":
                name = value
            elif key == "TYPE" and value != "HCP":
                raise ParseError(f"expected TYPE HCP, got {value!r}", line_no)
            elif key == "DIMENSION":
                try:
                    dimension = int(value)
                except ValueError:
                    raise ParseError(f"DIMENSION is not an integer: {value!r}", line_no) from None
                if dimension < 1:
                    raise ParseError(f"DIMENSION must be positive, got {dimension}", line_no)
            elif key == "EDGE_DATA_FORMAT" and value != "EDGE_LIST":
                raise ParseError(f"unsupported EDGE_DATA_FORMAT {value!r}", line_no)
            continue
        if stripped == "-1":
            terminated = True
            continue
        if stripped == "EOF":
            raise ParseError("missing -1 terminator before EOF", line_no)
        parts = stripped.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'u v' edge line, got {stripped!r}", line_no)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer edge endpoints: {stripped!r}", line_no) from None
        if not (1 <= u <= dimension and 1 <= v <= dimension):
            raise ParseError(f"edge ({u},{v}) outside 1..{dimension}", line_no)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", line_no)
        edges.append((u, v))
    if not in_section:
        raise ParseError("missing EDGE_DATA_SECTION", line_no if text else 1)
    if not terminated:
        raise ParseError("missing -1 terminator", line_no)
    return Graph(dimension, edges, name)


def read_hcp(path: PathLike) -> Graph:
    return parse_hcp_text(Path(path).read_text(encoding="ascii"))


@dataclass(frozen=True)
class BinaryTspMatrix:
    """Symmetric 0/1 distance matrix: 0 exactly on the edges of a graph."""

    n: int
    edges: frozenset[tuple[int, int]]
    name: str = ""

    def entry(self, i: int, j: int) -> int:
        if i == j:
            return 0
        return 0 if _normalize_edge(i, j) in self.edges else 1

    def to_graph(self) -> Graph:
        return Graph(self.n, self.edges, self.name)


def graph_to_tsp(g: Graph) -> BinaryTspMatrix:
    """Binary-TSP view of a graph: tours of length 0 are its Hamiltonian cycles."""
    return BinaryTspMatrix(g.n, frozenset(g.edges), g.name)


def tsp_text(m: BinaryTspMatrix, comment: str = "binary TSP generated by hcpforge") -> str:
    lines = [
        f"NAME : {m.name or 'unnamed'}",
        "TYPE : TSP",
        f"COMMENT : {comment}",
        f"DIMENSION : {m.n}",
        "EDGE_WEIGHT_TYPE : EXPLICIT",
        "EDGE_WEIGHT_FORMAT : FULL_MATRIX",
        "EDGE_WEIGHT_SECTION",
    ]
    for i in range(1, m.n + 1):
        lines.append(" ".join(str(m.entry(i, j)) for j in range(1, m.n + 1)))
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def write_tsp(m: BinaryTspMatrix, path: PathLike,
              comment: str = "binary TSP generated by hcpforge") -> None:
    Path(path).write_text(tsp_text(m, comment), encoding="ascii", newline="\n")


def parse_tsp_text(text: str) -> BinaryTspMatrix:
    name = ""
    dimension: Optional[int] = None
    rows: list[list[int]] = []
    in_section = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped == "EOF":
            continue
        if not in_section:
            if stripped == "EDGE_WEIGHT_SECTION":
                if dimension is None:
                    raise ParseError("EDGE_WEIGHT_SECTION before DIMENSION", line_no)
                in_section = True
                continue
            header = _split_header(stripped)
            if header is None:
                raise ParseError(f"malformed header line: {stripped!r}", line_no)
            key, value = header
            if key == "NAME":
                name = value
            elif key == "DIMENSION":
                dimension = int(value)
            elif key == "EDGE_WEIGHT_TYPE" and value != "EXPLICIT":
                raise ParseError(f"unsupported EDGE_WEIGHT_TYPE {value!r}", line_no)
            elif key == "EDGE_WEIGHT_FORMAT" and value != "FULL_MATRIX":
                raise ParseError(f"unsupported EDGE_WEIGHT_FORMAT {value!r}", line_no)
            continue
        try:
            rows.append([int(tok) for tok in stripped.split()])
        except ValueError:
            raise ParseError(f"non-integer matrix entry in {stripped!r}", line_no) from None
    if not in_section:
        raise ParseError("missing EDGE_WEIGHT_SECTION", 1)
    entries = [x for row in rows for x in row]
    if dimension is None or len(entries) != dimension * dimension:
        raise ParseError(f"expected {dimension}x{dimension} matrix entries", 1)
    edges = set()
    for i in range(dimension):
        for j in range(i + 1, dimension):
            if entries[i * dimension + j] == 0:
                edges.add((i + 1, j + 1))
    return BinaryTspMatrix(dimension, frozenset(edges), name)


def read_tsp(path: PathLike) -> BinaryTspMatrix:
    return parse_tsp_text(Path(path).read_text(encoding="ascii"))


def tour_length(m: BinaryTspMatrix, t: Tour) -> int:
    """Sum of the n wrapping matrix entries along the tour."""
    if t.n != m.n:
        raise ValueError(f"tour has {t.n} vertices, matrix has dimension {m.n}")
    return sum(1 for e in t.edges() if e not in m.edges)


def tour_text(t: Tour, name: str = "tour") -> str:
    lines = [
        f"NAME : {name}",
        "TYPE : TOUR",
        f"DIMENSION : {t.n}",
        "TOUR_SECTION",
    ]
    lines.extend(str(v) for v in t.order)
    lines.append("-1")
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def write_tour(t: Tour, path: PathLike, name: str = "tour") -> None:
    Path(path).write_text(tour_text(t, name), encoding="ascii", newline="\n")


def parse_tour_text(text: str, n: Optional[int] = None) -> Tour:
    """Parse a TOUR_SECTION vertex list; `n` cross-checks the dimension."""
    dimension: Optional[int] = None
    vertices: list[int] = []
    in_section = False
    terminated = False
    line_no = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if terminated:
            if stripped == "EOF":
                continue
            raise ParseError(f"unexpected content after terminator: {stripped!r}", line_no)
        if not in_section:
            if stripped == "TOUR_SECTION":
                in_section = True
                continue
            header = _split_header(stripped)
            if header is None:
                raise ParseError(f"malformed header line: {stripped!r}", line_no)
            key, value = header
            if key == "DIMENSION":
                try:
                    dimension = int(value)
                except ValueError:
                    raise ParseError(f"DIMENSION is not an integer: {value!r}", line_no) from None
            elif key == "TYPE" and value != "TOUR":
                raise ParseError(f"expected TYPE TOUR, got {value!r}", line_no)
            continue
        for token in stripped.split():
            if token == "-1":
                terminated = True
                break
            try:
                v = int(token)
            except ValueError:
                raise ParseError(f"non-integer tour entry {token!r}", line_no) from None
            vertices.append(v)
    if not in_section:
        raise ParseError("missing TOUR_SECTION", max(line_no, 1))
    if not terminated:
        raise ParseError("missing -1 terminator", line_no)
    expected = n if n is not None else dimension
    if expected is None:
        expected = len(vertices)
    if dimension is not None and n is not None and dimension != n:
        raise ParseError(f"file DIMENSION {dimension} does not match expected {n}", 1)
    seen = set()
    for v in vertices:
        if v in seen:
            raise ParseError(f"repeated vertex {v} in tour", line_no)
        seen.add(v)
    if len(vertices) != expected or seen != set(range(1, expected + 1)):
        missing = sorted(set(range(1, expected + 1)) - seen)
        raise ParseError(f"tour is not a permutation of 1..{expected} (missing {missing[:5]})",
                         line_no)
    return Tour(vertices)


def read_tour(path: PathLike, n: Optional[int] = None) -> Tour:
    return parse_tour_text(Path(path).read_text(encoding="ascii"), n)


def parse_edge_list_tour(text: str, n: int) -> Tour:
    """Assemble a tour from 'u v' edge lines (one cycle edge per line).

    Accepts '#' comments and blank lines; the edges must form one closed
    cycle through all n vertices.
    """
    adj: dict[int, list[int]] = {}
    count = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'u v' edge line, got {stripped!r}", line_no)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer edge endpoints: {stripped!r}", line_no) from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(f"edge ({u},{v}) outside 1..{n}", line_no)
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
        count += 1
    if count != n or any(len(nb) != 2 for nb in adj.values()) or len(adj) != n:
        raise ParseError(f"{count} edges over {len(adj)} vertices do not form one n-cycle", 1)
    order = [1, adj[1][0]]
    while len(order) < n:
        prev, cur = order[-2], order[-1]
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        order.append(nxt)
    if sorted(order) != list(range(1, n + 1)):
        raise ParseError("edges form more than one cycle", 1)
    return Tour(order)
