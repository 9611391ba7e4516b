# treecount/treegraph.py
"""
Loopless multigraphs with a marked edge, exact spanning-tree counts via the
matrix-tree theorem, and the path / parallel-edge operations that realise a
prescribed pair (tau(G-e), tau(G/e)).
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Optional, Sequence

import networkx as nx

from treecount.cfrac import AlternatingLike, Mat2, alternating_vector, as_alternating
from treecount.errors import DegenerateTrim, DomainError, LoopPresent, ParseError

logger = logging.getLogger(__name__)

Edge = tuple[int, int]


def _norm(edge: Sequence[int]) -> Edge:
    u, v = int(edge[0]), int(edge[1])
    return (u, v) if u <= v else (v, u)


# ---------- Graph types ----------

@dataclass(frozen=True)
class Multigraph:
    """Vertices 0..n-1, edges kept as a sorted multiset of (u, v) with u <= v."""

    n: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"graph needs at least one vertex, got n={self.n}")
        edges = tuple(sorted(_norm(e) for e in self.edges))
        for u, v in edges:
            if u < 0 or v >= self.n:
                raise DomainError(f"edge ({u}, {v}) out of range for n={self.n}")
        object.__setattr__(self, "edges", edges)

    # ----- queries -----

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_loop(self) -> bool:
        return any(u == v for u, v in self.edges)

    def is_simple(self) -> bool:
        return not self.has_loop() and len(set(self.edges)) == len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Multigraph":
        h = nx.convert_node_labels_to_integers(g, ordering="sorted")
        return cls(h.number_of_nodes(), tuple((u, v) for u, v, *_ in h.edges))

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    def is_planar(self) -> bool:
        # parallel edges never affect planarity
        planar, _ = nx.check_planarity(nx.Graph(self.to_networkx()))
        return planar

    def laplacian(self) -> list[list[int]]:
        lap = [[0] * self.n for _ in range(self.n)]
        for u, v in self.edges:
            if u == v:
                raise LoopPresent(f"loop at vertex {u}")
            lap[u][u] += 1
            lap[v][v] += 1
            lap[u][v] -= 1
            lap[v][u] -= 1
        return lap

    # ----- edits -----

    def delete_edge(self, index: int) -> "Multigraph":
        return Multigraph(self.n, self.edges[:index] + self.edges[index + 1:])

    def contract_edge(self, index: int) -> "Multigraph":
        """Merge the endpoints of edge `index`, drop the resulting loops, keep parallel edges."""
        keep, gone = self.edges[index]
        if keep == gone:
            raise LoopPresent(f"cannot contract loop at vertex {keep}")

        def relabel(x: int) -> int:
            if x == gone:
                x = keep
            return x - 1 if x > gone else x

        edges = []
        for u, v in self.edges:
            a, b = relabel(u), relabel(v)
            if a != b:
                edges.append((a, b))
        return Multigraph(self.n - 1, tuple(edges))

    def remove_vertices(self, doomed: Iterable[int]) -> "Multigraph":
        doomed = set(doomed)
        remaining = [v for v in range(self.n) if v not in doomed]
        index = {v: i for i, v in enumerate(remaining)}
        edges = tuple(
            (index[u], index[v]) for u, v in self.edges if u in index and v in index
        )
        return Multigraph(len(remaining), edges)

    def trim_leaves(self) -> "Multigraph":
        """Repeatedly delete degree-1 vertices; spanning-tree counts are unchanged."""
        g = self
        while g.n > 1:
            leaves = [v for v, d in enumerate(g.degrees()) if d == 1]
            if not leaves:
                break
            # two adjacent leaves form an isolated edge; keep one endpoint
            if len(leaves) == g.n:
                leaves = leaves[1:]
            g = g.remove_vertices(leaves)
        return g

    def wedge(self, other: "Multigraph", at: int = 0) -> "Multigraph":
        """One-point join: vertex 0 of `other` is identified with vertex `at` of self."""
        offset = self.n - 1

        def shift(x: int) -> int:
            return at if x == 0 else x + offset

        edges = self.edges + tuple((shift(u), shift(v)) for u, v in other.edges)
        return Multigraph(self.n + other.n - 1, edges)


@dataclass(frozen=True)
class MarkedGraph(Multigraph):
    """A multigraph with one distinguished edge, referred to by its index in `edges`."""

    marked: int = 0

    def __post_init__(self):
        if not 0 <= self.marked < len(self.edges):
            raise DomainError(f"marked index {self.marked} out of range")
        pair = _norm(self.edges[self.marked])
        super().__post_init__()
        if pair[0] == pair[1]:
            raise LoopPresent("marked edge is a loop")
        object.__setattr__(self, "marked", self.edges.index(pair))

    @classmethod
    def build(cls, n: int, edges: Iterable[Sequence[int]], marked_edge: Sequence[int]) -> "MarkedGraph":
        edges = tuple(_norm(e) for e in edges)
        return cls(n, edges, edges.index(_norm(marked_edge)))

    @property
    def marked_edge(self) -> Edge:
        return self.edges[self.marked]


def p1() -> MarkedGraph:
    """The single marked edge (P1, u)."""
    return MarkedGraph(2, ((0, 1),), 0)


# ---------- Spanning trees ----------

def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Fraction-free (Bareiss) determinant over the integers."""
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot is None:
                return 0
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                # exact division is guaranteed by Sylvester's identity
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def tau(graph: Multigraph) -> int:
    """Number of spanning trees: any principal (n-1)-minor of the Laplacian."""
    if graph.has_loop():
        raise LoopPresent("spanning-tree count is defined for loopless graphs only")
    if graph.n == 1:
        return 1
    lap = graph.laplacian()
    minor = [row[:-1] for row in lap[:-1]]
    return bareiss_det(minor)


@dataclass(frozen=True)
class SpanningTreeVector:
    tau_del: int
    tau_con: int

    @property
    def total(self) -> int:
        return self.tau_del + self.tau_con

    @property
    def gcd(self) -> int:
        return gcd(self.tau_del, self.tau_con)

    def as_tuple(self) -> tuple[int, int]:
        return (self.tau_del, self.tau_con)

    def __matmul__(self, m: Mat2) -> "SpanningTreeVector":
        x, y = self.tau_del, self.tau_con
        return SpanningTreeVector(x * m.a + y * m.c, x * m.b + y * m.d)


def stv(graph: MarkedGraph) -> SpanningTreeVector:
    return SpanningTreeVector(
        tau(graph.delete_edge(graph.marked)),
        tau(graph.contract_edge(graph.marked)),
    )


# ---------- Operations on marked graphs ----------

def subdivide_op(graph: MarkedGraph, k: int) -> MarkedGraph:
    """f^k: the marked edge becomes a path with k+1 edges; the new marked edge
    joins the lower endpoint to its new neighbour."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    x, y = graph.marked_edge
    path = [x] + list(range(graph.n, graph.n + k)) + [y]
    new_edges = tuple(zip(path, path[1:]))
    edges = graph.edges[:graph.marked] + graph.edges[graph.marked + 1:] + new_edges
    return MarkedGraph.build(graph.n + k, edges, (x, graph.n))


def parallel_op(graph: MarkedGraph, k: int) -> MarkedGraph:
    """g^k: the marked edge becomes k+1 parallel edges, one of them marked."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    pair = graph.marked_edge
    return MarkedGraph.build(graph.n, graph.edges + (pair,) * k, pair)


def h_op(graph: MarkedGraph, k: int) -> MarkedGraph:
    """h^k = f^k o g: a new path with k+1 edges between the endpoints of the marked edge."""
    return subdivide_op(parallel_op(graph, 1), k)


@dataclass(frozen=True)
class GraphBuildReport:
    graph: Multigraph
    bs: tuple[int, ...]
    tau: int
    vertex_count: int
    simple: bool
    planar: bool
    oracle: tuple[int, int]
    trimmed: bool = False
    tau_del: Optional[int] = None
    tau_con: Optional[int] = None
    expected_vertices: int = field(default=0)

    @property
    def matches_oracle(self) -> bool:
        t, u = self.oracle
        if self.trimmed:
            ok = self.tau == t
        else:
            ok = (self.tau_del, self.tau_con) == (t, u)
        return ok and self.vertex_count == self.expected_vertices


def build_marked(bs: AlternatingLike) -> MarkedGraph:
    """(G, e) = h^{b1} h^{b2} ... h^{bm} (P1, u); h^{bm} is applied first."""
    acf = as_alternating(bs)
    graph = p1()
    for b in reversed(acf.bs):
        graph = h_op(graph, b)
    return graph


def build_from_alternating(bs: AlternatingLike) -> GraphBuildReport:
    acf = as_alternating(bs)
    graph = build_marked(acf)
    vector = stv(graph)
    report = GraphBuildReport(
        graph=graph,
        bs=acf.bs,
        tau=tau(graph),
        vertex_count=graph.n,
        simple=graph.is_simple(),
        planar=graph.is_planar(),
        oracle=alternating_vector(acf),
        tau_del=vector.tau_del,
        tau_con=vector.tau_con,
        expected_vertices=sum(acf.bs) + 2,
    )
    if not report.matches_oracle:
        logger.warning("construction mismatch for bs=%s: got %s, expected %s", acf.bs, vector, report.oracle)
    return report


def build_trimmed(bs: AlternatingLike) -> GraphBuildReport:
    acf = as_alternating(bs)
    if acf.m == 1:
        raise DegenerateTrim(f"bs={list(acf.bs)}: with a single letter G-e is a path and trims to a point")
    marked = build_marked(acf)
    graph = marked.delete_edge(marked.marked).trim_leaves()
    report = GraphBuildReport(
        graph=graph,
        bs=acf.bs,
        tau=tau(graph),
        vertex_count=graph.n,
        simple=graph.is_simple(),
        planar=graph.is_planar(),
        oracle=alternating_vector(acf),
        trimmed=True,
        expected_vertices=sum(acf.bs[1:]) + 2,
    )
    if not report.matches_oracle:
        logger.warning("trimmed mismatch for bs=%s: tau=%s |V|=%s", acf.bs, report.tau, report.vertex_count)
    return report


# ---------- Serialization ----------

def to_edge_list(graph: Multigraph) -> str:
    marked = graph.marked if isinstance(graph, MarkedGraph) else None
    lines = [str(graph.n)]
    for i, (u, v) in enumerate(graph.edges):
        lines.append(f"{u} {v} *" if i == marked else f"{u} {v}")
    return "\n".join(lines) + "\n"


_UINT = re.compile(r"[0-9]+")


def parse_edge_list(text: str) -> Multigraph:
    """`n` on the first line, then one `u v` pair per line; a trailing `*` marks an edge."""
    lines = text.splitlines()
    offset = 0
    n: Optional[int] = None
    edges: list[Edge] = []
    marked: Optional[int] = None
    for line in lines:
        body = line.split("#", 1)[0].strip()
        if body:
            tokens = body.split()
            if n is None:
                if len(tokens) != 1 or not _UINT.fullmatch(tokens[0]):
                    raise ParseError("expected the vertex count", offset)
                n = int(tokens[0])
            else:
                flagged = tokens[-1] == "*"
                if flagged:
                    tokens = tokens[:-1]
                if len(tokens) != 2 or not all(_UINT.fullmatch(t) for t in tokens):
                    raise ParseError(f"expected 'u v', got {body!r}", offset)
                if flagged:
                    if marked is not None:
                        raise ParseError("more than one marked edge", offset)
                    marked = len(edges)
                edges.append((int(tokens[0]), int(tokens[1])))
        offset += len(line) + 1
    if n is None:
        raise ParseError("empty edge list", 0)
    if marked is None:
        return Multigraph(n, tuple(edges))
    return MarkedGraph.build(n, edges, edges[marked])


def to_dot(graph: Multigraph, name: str = "G") -> str:
    marked = graph.marked if isinstance(graph, MarkedGraph) else None
    lines = [f"graph {name} {{"]
    lines.extend(f"  {v};" for v in range(graph.n))
    for i, (u, v) in enumerate(graph.edges):
        style = " [color=red, penwidth=2]" if i == marked else ""
        lines.append(f"  {u} -- {v}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
