"""Bounded-outdegree orientations by path reversal (Hakimi's theorem).

A graph has an orientation with all outdegrees <= k exactly when no subgraph
has average degree above 2k.  The builder either produces such an orientation
or returns a vertex set witnessing the dense subgraph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError
from .graph import Graph, IntegralOrientation


class BaseOrientation:
    """A k-orientation kept around as the alignment reference for the pipeline."""

    __slots__ = ("graph", "k", "tail_of", "out_of", "in_of")

    def __init__(self, graph: Graph, k: int, tail_of: dict):
        self.graph = graph
        self.k = k
        self.tail_of = dict(tail_of)
        out = [[] for _ in range(graph.n)]
        inc = [[] for _ in range(graph.n)]
        for (u, v), t in self.tail_of.items():
            h = v if t == u else u
            out[t].append(h)
            inc[h].append(t)
        self.out_of = tuple(tuple(sorted(a)) for a in out)
        self.in_of = tuple(tuple(sorted(a)) for a in inc)
        if any(len(a) > k for a in self.out_of):
            raise PreconditionError("orientation exceeds outdegree bound k")

    def is_out(self, u: int, v: int) -> bool:
        """True if the edge uv is directed u -> v in the base orientation."""
        e = (u, v) if u < v else (v, u)
        return self.tail_of[e] == u

    def as_integral(self) -> IntegralOrientation:
        return IntegralOrientation(self.graph, self.tail_of)


@dataclass(frozen=True)
class InfeasibilityWitness:
    """Vertex set S with 2|E(G[S])|/|S| > 2k, certifying that no k-orientation exists."""

    vertex_set: tuple
    edge_count: int

    def density(self) -> Fraction:
        return Fraction(2 * self.edge_count, len(self.vertex_set))


def build_k_orientation(g: Graph, k: int):
    """Return a BaseOrientation with outdegrees <= k, or an InfeasibilityWitness.

    Start from the low-to-high orientation; while some vertex v exceeds k,
    BFS forward along current arcs for a vertex with spare capacity and
    reverse the connecting path.  If none is reachable, every vertex reachable
    from v has outdegree >= k (and v more), so the reachable set is denser
    than 2k.  BFS expands lowest ids first for determinism.
    """
    if k < 0:
        raise PreconditionError("k must be nonnegative")
    tail_of = {e: e[0] for e in g.edges}
    out_nbrs = [set() for _ in range(g.n)]
    for u, v in g.edges:
        out_nbrs[u].add(v)

    over = deque(v for v in range(g.n) if len(out_nbrs[v]) > k)
    while over:
        v = over.popleft()
        if len(out_nbrs[v]) <= k:
            continue
        parent = {v: None}
        queue = deque([v])
        target = None
        while queue and target is None:
            x = queue.popleft()
            for y in sorted(out_nbrs[x]):
                if y in parent:
                    continue
                parent[y] = x
                if len(out_nbrs[y]) < k:
                    target = y
                    break
                queue.append(y)
        if target is None:
            reach = sorted(parent)
            inside = sum(1 for u, w in g.edges if u in parent and w in parent)
            return InfeasibilityWitness(tuple(reach), inside)
        # reverse the path v -> ... -> target; only endpoints change outdegree
        y = target
        while parent[y] is not None:
            x = parent[y]
            out_nbrs[x].remove(y)
            out_nbrs[y].add(x)
            tail_of[(x, y) if x < y else (y, x)] = y
            y = x
        if len(out_nbrs[v]) > k:
            over.append(v)
    return BaseOrientation(g, k, tail_of)


def min_orientation_k(g: Graph) -> int:
    """Smallest k for which a k-orientation exists, by doubling then bisection."""
    if isinstance(build_k_orientation(g, 0), BaseOrientation):
        return 0
    hi = 1
    while isinstance(build_k_orientation(g, hi), InfeasibilityWitness):
        hi *= 2
    lo = hi // 2  # infeasible
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if isinstance(build_k_orientation(g, mid), BaseOrientation):
            hi = mid
        else:
            lo = mid
    return hi
