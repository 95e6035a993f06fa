"""Exact ground truth for small instances; used by tests, never by the pipeline.

Three independent engines: the exact minimum over proper orientations of the
maximum outdegree (edge-direction backtracking), the same value for trees
(linear dynamic program over rooted edge states), and the exact maximum
average degree (induced-subgraph enumeration over bitmasks).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded, PreconditionError
from .graph import Graph


@dataclass(frozen=True)
class OracleBudget:
    max_vertices: int = 20
    max_edges: int = 22

    def admit(self, g: Graph, need_vertices=True, need_edges=True):
        if need_vertices and g.n > self.max_vertices:
            raise BudgetExceeded(f"{g.n} vertices exceed the budget {self.max_vertices}")
        if need_edges and g.m > self.max_edges:
            raise BudgetExceeded(f"{g.m} edges exceed the budget {self.max_edges}")


DEFAULT_BUDGET = OracleBudget()


def exact_mad(g: Graph, budget: OracleBudget = DEFAULT_BUDGET) -> Fraction:
    """Maximum of 2|E(H)|/|V(H)| over induced subgraphs, by subset enumeration."""
    budget.admit(g, need_edges=False)
    if g.n == 0:
        return Fraction(0)
    nbr_mask = [0] * g.n
    for u, v in g.edges:
        nbr_mask[u] |= 1 << v
        nbr_mask[v] |= 1 << u
    edge_count = [0] * (1 << g.n)
    best_num, best_den = 0, 1
    for s in range(1, 1 << g.n):
        low = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        e = edge_count[rest] + bin(nbr_mask[low] & rest).count("1")
        edge_count[s] = e
        size = bin(s).count("1")
        if 2 * e * best_den > best_num * size:
            best_num, best_den = 2 * e, size
    return Fraction(best_num, best_den)


def _proper_orientation_exists(g: Graph, l: int) -> bool:
    """Backtracking over edge directions with outdegree and equality pruning."""
    n = g.n
    order = sorted(g.edges, key=lambda e: (-(g.degree(e[0]) + g.degree(e[1])), e))
    out = [0] * n
    undecided = [g.degree(v) for v in range(n)]

    def conflict(w):
        # w just became fully decided; any decided neighbour with equal outdegree?
        for x in g.adj[w]:
            if undecided[x] == 0 and out[x] == out[w]:
                return True
        return False

    def rec(idx):
        if idx == len(order):
            return True
        u, v = order[idx]
        for tail, head in ((u, v), (v, u)):
            out[tail] += 1
            undecided[u] -= 1
            undecided[v] -= 1
            ok = out[tail] <= l
            if ok and undecided[u] == 0 and conflict(u):
                ok = False
            if ok and undecided[v] == 0 and conflict(v):
                ok = False
            if ok and rec(idx + 1):
                return True
            out[tail] -= 1
            undecided[u] += 1
            undecided[v] += 1
        return False

    return rec(0)


def exact_proper_chromatic(g: Graph, budget: OracleBudget = DEFAULT_BUDGET) -> int:
    """Exact minimum over proper orientations of the maximum outdegree."""
    budget.admit(g)
    if g.m == 0:
        return 0
    lo = 1
    if g.n <= 20:
        lo = max(lo, -(-exact_mad(g, OracleBudget(max_vertices=20)).__ceil__() // 2)
                 if False else (exact_mad(g).__ceil__() + 1) // 2)
    for l in range(lo, g.n):
        if _proper_orientation_exists(g, l):
            return l
    raise PreconditionError("no proper orientation found below n; impossible")


def exact_proper_chromatic_tree(g: Graph) -> int:
    """Exact value on trees by a rooted DP over (outdegree, parent-edge) states.

    Linear in n for each candidate bound, so it certifies trees far beyond
    the backtracking budget.
    """
    if g.m != g.n - 1:
        raise PreconditionError("not a tree: edge count differs from n-1")
    # connectivity: BFS from 0
    if g.n == 0:
        raise PreconditionError("empty graph")
    seen = {0}
    stack = [0]
    parent = {0: None}
    topo = []
    while stack:
        v = stack.pop()
        topo.append(v)
        for u in g.adj[v]:
            if u not in seen:
                seen.add(u)
                parent[u] = v
                stack.append(u)
    if len(seen) != g.n:
        raise PreconditionError("not a tree: disconnected")
    children = {v: [u for u in g.adj[v] if parent.get(u) == v] for v in range(g.n)}

    def feasible(l: int) -> bool:
        # states[v] = (set of d with edge v->parent feasible, set with parent->v)
        up_ok: dict = {}
        down_ok: dict = {}
        for v in reversed(topo):
            kids = children[v]

            def kid_sets(d):
                both = only_in = only_out = 0
                for c in kids:
                    cin = len(down_ok[c]) - (d in down_ok[c]) > 0
                    cout = len(up_ok[c]) - (d in up_ok[c]) > 0
                    if cin and cout:
                        both += 1
                    elif cin:
                        only_in += 1
                    elif cout:
                        only_out += 1
                    else:
                        return None
                return only_in, only_out, both

            ups, downs = set(), set()
            for d in range(l + 1):
                split = kid_sets(d)
                if split is None:
                    continue
                only_in, only_out, both = split
                m = len(kids)
                # x children take the edge v->child
                for extra, target in ((1, ups), (0, downs)):
                    x = d - extra
                    if only_in <= x <= m - only_out and x >= 0:
                        target.add(d)
            up_ok[v] = ups
            down_ok[v] = downs
        root = topo[0]
        return bool(down_ok[root] | up_ok[root]) if g.n == 1 else bool(
            {d for d in range(l + 1)
             if (lambda s: s is not None and s[0] <= d <= len(children[root]) - s[1])(
                 _root_split(children[root], d, up_ok, down_ok))}
        )

    def _root_split(kids, d, up_ok, down_ok):
        only_in = only_out = 0
        for c in kids:
            cin = len(down_ok[c]) - (d in down_ok[c]) > 0
            cout = len(up_ok[c]) - (d in up_ok[c]) > 0
            if cin and cout:
                continue
            if cin:
                only_in += 1
            elif cout:
                only_out += 1
            else:
                return None
        return only_in, only_out

    l = 0
    while True:
        if feasible(l):
            return l
        l += 1
        if l > g.n:
            raise PreconditionError("tree DP found no bound; impossible")
