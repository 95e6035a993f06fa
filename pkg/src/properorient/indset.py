"""Certificate-driven independent-set selection for the gap-closing rounds.

A round needs an independent set A inside the eligible vertices U with three
properties the rest of the round consumes:

  (c1) for each protected class s, the bipartite instance (X ∩ V_s, A \\ V_s)
       with the round weights satisfies the weighted Hall condition,
  (c2) every excluded focus-class vertex x has at least W(x)+1 neighbours in
       A restricted to the protected classes,
  (c3) every excluded vertex has a neighbour in A.

A maximum-weight set would have all three, but finding one is NP-hard; an
improving-exchange search reaches a set with the same certificates in
polynomial time: a failed Hall instance hands back a deficient set S whose
swap strictly raises the total weight, a (c2) deficit swaps the vertex in
raising (weight, |A ∩ focus|) lexicographically, and a (c3) deficit simply
grows A.  The certificates are re-verified post hoc, independent of the
search path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvariantViolation, PreconditionError
from .hall import HallInstance, HallOutcome, solve_hall


@dataclass(frozen=True)
class SelectionInstance:
    universe: tuple        # eligible vertices U, sorted
    adjacency: dict        # vertex -> tuple of U-neighbours
    part_of: tuple         # class index per vertex id (1-based classes)
    focus: int
    protected: tuple       # class indices whose gaps must stay closed
    weight: dict           # vertex -> int (focus: ceil gap, protected: 1, else 0)
    seed: tuple = ()       # oriented gap-0 vertices, always joining the result

    def validate(self):
        uset = set(self.universe)
        for v in self.universe:
            if self.weight.get(v, -1) < 0:
                raise PreconditionError(f"missing or negative weight at {v}")
            for u in self.adjacency.get(v, ()):
                if u not in uset:
                    raise PreconditionError(f"adjacency leaves the universe at ({v},{u})")
        if self.focus in self.protected:
            raise PreconditionError("focus class cannot be protected")


@dataclass
class SelectionResult:
    chosen: tuple            # the independent set A ⊆ U
    excluded: tuple          # X = U \\ A
    matchings: dict = field(default_factory=dict)  # class -> ((a, x), ...) Hall subgraphs
    exchanges: int = 0


def _lex_key(A, inst):
    wsum = sum(inst.weight[v] for v in A)
    focus_count = sum(1 for v in A if inst.part_of[v] == inst.focus)
    return (wsum, focus_count, len(A))


def _hall_for_part(inst, A, X, s) -> tuple:
    left = tuple(x for x in X if inst.part_of[x] == s)
    right = tuple(a for a in sorted(A) if inst.part_of[a] != s)
    rset = set(right)
    edges = tuple((x, a) for x in left for a in inst.adjacency[x] if a in rset)
    return HallInstance(left=left, right=right, edges=edges, weight=inst.weight)


def select_independent_set(inst: SelectionInstance) -> SelectionResult:
    inst.validate()
    U = list(inst.universe)
    W = inst.weight
    adj = inst.adjacency

    # greedy start: focus class first, heavier first, lowest id breaking ties
    order = sorted(U, key=lambda v: (inst.part_of[v] != inst.focus, -W[v], v))
    A = set()
    for v in order:
        if not any(u in A for u in adj[v]):
            A.add(v)

    max_w = max(W.values(), default=0)
    cap = len(U) * len(U) * (1 + max_w) + 8
    exchanges = 0
    while True:
        if cap < 0:
            raise InvariantViolation("exchange loop exceeded its iteration cap")
        cap -= 1
        key = _lex_key(A, inst)
        X = sorted(v for v in U if v not in A)
        fired = False

        for s in inst.protected:
            outcome = solve_hall(_hall_for_part(inst, A, X, s))
            if outcome.ok:
                continue
            S = set(outcome.witness)
            removed = {a for a in A if any(x in S for x in adj[a])}
            A = (A - removed) | S
            fired = True
            break

        if not fired:
            for x in X:
                if inst.part_of[x] != inst.focus:
                    continue
                shielded = sum(1 for a in adj[x]
                               if a in A and inst.part_of[a] in inst.protected)
                if shielded < W[x] + 1:
                    A = (A - {a for a in adj[x] if a in A}) | {x}
                    fired = True
                    break

        if not fired:
            for x in X:
                if not any(a in A for a in adj[x]):
                    A.add(x)
                    fired = True
                    break

        if not fired:
            break
        exchanges += 1
        if _lex_key(A, inst) <= key:
            raise InvariantViolation("an exchange failed to raise the lexicographic key")

    result = SelectionResult(chosen=tuple(sorted(A)),
                             excluded=tuple(sorted(set(U) - A)),
                             exchanges=exchanges)
    _verify_certificates(inst, result)
    return result


def _verify_certificates(inst: SelectionInstance, result: SelectionResult) -> None:
    """Re-derive (c1)-(c3) by direct computation; raises on any failure."""
    A = set(result.chosen)
    for v in result.chosen:
        for u in inst.adjacency[v]:
            if u in A:
                raise InvariantViolation(f"selected set not independent: edge ({v},{u})")
    for s in inst.protected:
        outcome = solve_hall(_hall_for_part(inst, A, result.excluded, s))
        if not outcome.ok:
            raise InvariantViolation(
                f"Hall certificate failed for class {s}: witness {outcome.witness}"
            )
        result.matchings[s] = tuple((a, x) for x, a in outcome.matched)
    for x in result.excluded:
        nbrs_in_A = [a for a in inst.adjacency[x] if a in A]
        if not nbrs_in_A:
            raise InvariantViolation(f"excluded vertex {x} has no selected neighbour")
        if inst.part_of[x] == inst.focus:
            shielded = sum(1 for a in nbrs_in_A if inst.part_of[a] in inst.protected)
            if shielded < inst.weight[x] + 1:
                raise InvariantViolation(
                    f"focus vertex {x} has {shielded} protected neighbours, "
                    f"needs {inst.weight[x] + 1}"
                )


def exact_lex_optimum(inst: SelectionInstance, max_vertices: int = 30):
    """Branch-and-bound over all independent sets; the cross-validation oracle.

    Maximizes the same (weight, focus-count, size) key with the same
    ascending-id tie-break.  Exponential; refuses instances above
    `max_vertices`.
    """
    U = sorted(inst.universe)
    if len(U) > max_vertices:
        raise PreconditionError(f"exact search capped at {max_vertices} vertices")
    W = inst.weight
    best_key = (-1, -1, -1)
    best_set: tuple = ()

    def bound(cur_key, rest):
        return (cur_key[0] + sum(W[v] for v in rest),
                cur_key[1] + sum(1 for v in rest if inst.part_of[v] == inst.focus),
                cur_key[2] + len(rest))

    def rec(idx, chosen, cur_key, blocked):
        nonlocal best_key, best_set
        if bound(cur_key, U[idx:]) <= best_key:
            return
        if idx == len(U):
            if cur_key > best_key:
                best_key, best_set = cur_key, tuple(chosen)
            return
        v = U[idx]
        if v not in blocked:
            newly = [u for u in inst.adjacency[v] if u not in blocked]
            for u in newly:
                blocked.add(u)
            chosen.append(v)
            rec(idx + 1,
                chosen,
                (cur_key[0] + W[v],
                 cur_key[1] + (inst.part_of[v] == inst.focus),
                 cur_key[2] + 1),
                blocked)
            chosen.pop()
            for u in newly:
                blocked.discard(u)
        rec(idx + 1, chosen, cur_key, blocked)

    rec(0, [], (0, 0, 0), set())
    return best_key, best_set
