"""Weighted Hall subgraphs on bipartite instances, with failure witnesses.

Given a bipartite graph (U, V) and integer weights W where every edge has a
weight-1 endpoint, find an edge set M using each edge at most once with
d_M(u) = W(u) on U and d_M(v) <= W(v) on V, or return S ⊆ U whose demand
exceeds its neighborhood's capacity: sum_{u∈S} W(u) > sum_{v∈N(S)} W(v).

Solved by splitting every vertex x into W(x) copies and running augmenting-path
bipartite matching; the weight-1 side condition guarantees distinct matching
edges project to distinct edges.  On failure the witness is the projection of
the alternating-reachable left copies: reachability of one copy of u implies
reachability of all of them (copies share neighborhoods), so demand and
capacity project exactly and the inequality stays strict.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import PreconditionError


@dataclass(frozen=True)
class HallInstance:
    left: tuple          # U vertices
    right: tuple         # V vertices
    edges: tuple         # (u, v) pairs with u in left, v in right
    weight: dict         # vertex -> nonnegative int

    def validate(self):
        ls, rs = set(self.left), set(self.right)
        if ls & rs:
            raise PreconditionError("left and right sides overlap")
        for u, v in self.edges:
            if u not in ls or v not in rs:
                raise PreconditionError(f"edge ({u},{v}) does not go left-to-right")
            if self.weight.get(u) != 1 and self.weight.get(v) != 1:
                raise PreconditionError(
                    f"edge ({u},{v}) has no weight-1 endpoint "
                    f"(W={self.weight.get(u)},{self.weight.get(v)})"
                )
        for x in list(self.left) + list(self.right):
            if self.weight.get(x, -1) < 0:
                raise PreconditionError(f"missing or negative weight at {x}")


@dataclass(frozen=True)
class HallOutcome:
    matched: tuple | None    # edge list, each (u, v), or None on failure
    witness: tuple | None    # deficient subset of U, or None on success

    @property
    def ok(self) -> bool:
        return self.matched is not None


def solve_hall(inst: HallInstance) -> HallOutcome:
    inst.validate()
    W = inst.weight
    lefts = sorted(u for u in inst.left if W[u] > 0)
    adj = {u: [] for u in lefts}
    for u, v in inst.edges:
        if W[u] > 0 and W[v] > 0:
            adj[u].append(v)
    for u in adj:
        adj[u] = sorted(set(adj[u]))

    # copies: (x, i) for i < W(x); match_right[(v,i)] -> (u, j) and back
    match_left = {}
    match_right = {}

    def try_augment(copy_u):
        parent = {copy_u: None}
        queue = deque([copy_u])
        end = None
        while queue and end is None:
            cu = queue.popleft()
            for v in adj[cu[0]]:
                for i in range(W[v]):
                    cv = (v, i)
                    if cv in parent:
                        continue
                    parent[cv] = cu
                    if cv not in match_right:
                        end = cv
                        break
                    nxt = match_right[cv]
                    if nxt not in parent:
                        parent[nxt] = cv
                        queue.append(nxt)
                if end is not None:
                    break
        if end is None:
            return False
        cv = end
        while cv is not None:
            cu = parent[cv]
            match_right[cv] = cu
            match_left[cu] = cv
            cv = parent[cu]
        return True

    # One augmentation attempt per copy yields a maximum matching; keep going
    # after a failure so that witness extraction sees no augmenting paths.
    all_served = True
    for u in lefts:
        for i in range(W[u]):
            if not try_augment((u, i)):
                all_served = False

    if all_served:
        edges = sorted((cu[0], cv[0]) for cu, cv in match_left.items())
        if len(set(edges)) != len(edges):
            raise PreconditionError("matching reused an edge; side condition violated")
        return HallOutcome(matched=tuple(edges), witness=None)

    # Alternating reachability from the free left copies gives the witness.
    free = [(u, i) for u in lefts for i in range(W[u]) if (u, i) not in match_left]
    reached_left = set(free)
    reached_right = set()
    queue = deque(free)
    while queue:
        cu = queue.popleft()
        for v in adj[cu[0]]:
            for i in range(W[v]):
                cv = (v, i)
                if cv in reached_right:
                    continue
                reached_right.add(cv)
                nxt = match_right.get(cv)
                if nxt is None:
                    raise PreconditionError("internal: augmenting path missed")
                if nxt not in reached_left:
                    reached_left.add(nxt)
                    queue.append(nxt)
    witness = sorted({cu[0] for cu in reached_left})
    demand = sum(W[u] for u in witness)
    capacity = sum(W[v] for v in {v for u in witness for v in adj[u]})
    if demand <= capacity:
        raise PreconditionError("internal: witness fails the strict inequality")
    return HallOutcome(matched=None, witness=tuple(witness))
