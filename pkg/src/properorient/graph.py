"""Undirected simple graphs, vertex partitions, orientations, and file formats.

Vertices are dense integer ids 0..n-1.  External labels from edge-list files are
mapped to ids in first-seen order and kept for round-tripping.  All structures
here are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError, PreconditionError


class Graph:
    """Simple undirected graph: no self-loops, no parallel edges."""

    __slots__ = ("n", "edges", "adj", "labels", "_edge_set")

    def __init__(self, n: int, edges, labels=None):
        self.n = n
        canon = []
        seen = set()
        for u, v in edges:
            if u == v:
                raise PreconditionError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge ({u},{v}) out of range for n={n}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise PreconditionError(f"parallel edge {e}")
            seen.add(e)
            canon.append(e)
        canon.sort()
        self.edges = tuple(canon)
        self._edge_set = frozenset(canon)
        adj = [[] for _ in range(n)]
        for u, v in canon:
            adj[u].append(v)
            adj[v].append(u)
        self.adj = tuple(tuple(sorted(a)) for a in adj)
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
        if len(self.labels) != n:
            raise PreconditionError("labels length must equal vertex count")

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_set

    @property
    def m(self) -> int:
        return len(self.edges)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class VertexPartition:
    """Proper coloring of a graph into classes 1..r (classes may be empty)."""

    class_of: tuple
    r: int

    def __post_init__(self):
        if any(not (1 <= c <= self.r) for c in self.class_of):
            raise PreconditionError("class index out of range 1..r")

    def classes(self, i: int) -> list:
        return [v for v, c in enumerate(self.class_of) if c == i]

    def validate(self, g: Graph) -> None:
        if len(self.class_of) != g.n:
            raise PreconditionError("partition covers a different vertex set")
        for u, v in g.edges:
            if self.class_of[u] == self.class_of[v]:
                raise PreconditionError(
                    f"edge ({u},{v}) has both ends in class {self.class_of[u]}"
                )


class IntegralOrientation:
    """A direction for every edge of a graph; 0/1 weights only."""

    __slots__ = ("graph", "tail_of", "outdegree")

    def __init__(self, graph: Graph, tail_of: dict):
        if set(tail_of) != set(graph.edges):
            raise PreconditionError("orientation does not cover the edge set exactly")
        self.graph = graph
        self.tail_of = dict(tail_of)
        out = [0] * graph.n
        for (u, v), t in tail_of.items():
            if t not in (u, v):
                raise PreconditionError(f"tail {t} is not an endpoint of ({u},{v})")
            out[t] += 1
        self.outdegree = tuple(out)

    def head_of(self, e) -> int:
        u, v = e
        return v if self.tail_of[e] == u else u

    def arcs(self):
        """Directed pairs (tail, head) in canonical edge order."""
        return [(self.tail_of[e], self.head_of(e)) for e in self.graph.edges]

    @property
    def max_outdegree(self) -> int:
        return max(self.outdegree, default=0)


@dataclass(frozen=True)
class VerificationReport:
    is_proper: bool
    max_outdegree: int
    violations: tuple
    bound_respected: bool


def verify_proper_orientation(g: Graph, o: IntegralOrientation, l: int) -> VerificationReport:
    """Check that adjacent vertices have distinct outdegrees and max outdegree <= l."""
    if o.graph is not g and set(o.tail_of) != set(g.edges):
        raise PreconditionError("orientation refers to a different edge set")
    violations = tuple(
        (u, v) for u, v in g.edges if o.outdegree[u] == o.outdegree[v]
    )
    mx = o.max_outdegree
    return VerificationReport(
        is_proper=not violations,
        max_outdegree=mx,
        violations=violations,
        bound_respected=mx <= l,
    )


# --------------------------------------------------------------------------- file formats


@dataclass
class ParsedGraph:
    graph: Graph
    duplicate_edges: int = 0
    label_ids: dict = field(default_factory=dict)


def _tokens(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        yield line_no, line.split()


def parse_graph(text: str) -> ParsedGraph:
    """Parse the edge-list format: one "u v" per line, '#' comments.

    Labels may be arbitrary identifiers; they are mapped to dense ids in
    first-seen order.  Duplicate edge lines are collapsed and counted,
    self-loops are rejected.
    """
    ids: dict = {}
    labels: list = []
    edges = []
    seen = set()
    dup = 0

    def vid(tok):
        if tok not in ids:
            ids[tok] = len(labels)
            labels.append(tok)
        return ids[tok]

    for line_no, toks in _tokens(text):
        if len(toks) != 2:
            raise ParseError(f"expected 'u v', got {toks!r}", line_no)
        u, v = vid(toks[0]), vid(toks[1])
        if u == v:
            raise ParseError(f"self-loop at '{toks[0]}'", line_no)
        e = (u, v) if u < v else (v, u)
        if e in seen:
            dup += 1
            continue
        seen.add(e)
        edges.append(e)
    g = Graph(len(labels), edges, labels)
    return ParsedGraph(graph=g, duplicate_edges=dup, label_ids=ids)


def serialize_graph(g: Graph) -> str:
    return "".join(f"{g.labels[u]} {g.labels[v]}\n" for u, v in g.edges)


def parse_partition(text: str, g: Graph, label_ids: dict | None = None) -> VertexPartition:
    """Parse "v c" lines into a VertexPartition; r is the largest class seen."""
    lookup = label_ids if label_ids is not None else {lab: i for i, lab in enumerate(g.labels)}
    class_of = [0] * g.n
    for line_no, toks in _tokens(text):
        if len(toks) != 2:
            raise ParseError(f"expected 'v c', got {toks!r}", line_no)
        if toks[0] not in lookup:
            raise ParseError(f"unknown vertex '{toks[0]}'", line_no)
        try:
            c = int(toks[1])
        except ValueError:
            raise ParseError(f"class '{toks[1]}' is not an integer", line_no) from None
        if c < 1:
            raise ParseError(f"class {c} out of range (classes start at 1)", line_no)
        class_of[lookup[toks[0]]] = c
    if 0 in class_of:
        missing = class_of.index(0)
        raise ParseError(f"vertex '{g.labels[missing]}' has no class")
    part = VertexPartition(tuple(class_of), max(class_of))
    part.validate(g)
    return part


def serialize_partition(part: VertexPartition, g: Graph) -> str:
    return "".join(f"{g.labels[v]} {part.class_of[v]}\n" for v in range(g.n))


def parse_orientation(text: str, g: Graph, label_ids: dict | None = None) -> IntegralOrientation:
    """Parse "u v" lines meaning the edge uv is directed u -> v."""
    lookup = label_ids if label_ids is not None else {lab: i for i, lab in enumerate(g.labels)}
    tail_of = {}
    for line_no, toks in _tokens(text):
        if len(toks) != 2:
            raise ParseError(f"expected 'u v', got {toks!r}", line_no)
        for t in toks:
            if t not in lookup:
                raise ParseError(f"unknown vertex '{t}'", line_no)
        u, v = lookup[toks[0]], lookup[toks[1]]
        e = (u, v) if u < v else (v, u)
        if e not in g._edge_set:
            raise ParseError(f"({toks[0]},{toks[1]}) is not an edge of the graph", line_no)
        if e in tail_of:
            raise ParseError(f"edge ({toks[0]},{toks[1]}) directed twice", line_no)
        tail_of[e] = u
    if len(tail_of) != g.m:
        raise ParseError(f"{g.m - len(tail_of)} edge(s) missing a direction")
    return IntegralOrientation(g, tail_of)


def serialize_orientation(o: IntegralOrientation) -> str:
    g = o.graph
    return "".join(f"{g.labels[t]} {g.labels[h]}\n" for t, h in o.arcs())


# --------------------------------------------------------------------------- coloring


def greedy_partition(g: Graph) -> VertexPartition:
    """Proper coloring via smallest-last (degeneracy) order, lowest free color.

    Deterministic: minimum-degree ties break toward the lowest vertex id.
    Uses at most degeneracy(g)+1 classes.
    """
    if g.n == 0:
        return VertexPartition((), 1)
    deg = [g.degree(v) for v in range(g.n)]
    removed = [False] * g.n
    order = []
    for _ in range(g.n):
        v = min((x for x in range(g.n) if not removed[x]), key=lambda x: (deg[x], x))
        removed[v] = True
        order.append(v)
        for u in g.adj[v]:
            if not removed[u]:
                deg[u] -= 1
    class_of = [0] * g.n
    for v in reversed(order):
        used = {class_of[u] for u in g.adj[v]}
        c = 1
        while c in used:
            c += 1
        class_of[v] = c
    return VertexPartition(tuple(class_of), max(class_of))


def bipartition(g: Graph) -> VertexPartition | None:
    """2-coloring found by BFS, or None if some component is odd-cyclic.

    Always reports r=2 so that downstream schedules see a bipartition even
    when the graph is edgeless (class 2 is then empty).
    """
    color = [0] * g.n
    for s in range(g.n):
        if color[s]:
            continue
        color[s] = 1
        queue = [s]
        while queue:
            v = queue.pop(0)
            for u in g.adj[v]:
                if color[u] == 0:
                    color[u] = 3 - color[v]
                    queue.append(u)
                elif color[u] == color[v]:
                    return None
    return VertexPartition(tuple(color), 2)
