"""Partial fractional orientation state machine.

Every edge uv carries a pair of exact rationals (p(u,v), p(v,u)) in one of
three states:

* unoriented:            p(u,v) = p(v,u) = 1
* oriented u -> v:       p(u,v) = 1, p(v,u) = 0
* fractionally oriented: p(u,v) + p(v,u) = 1 with both strictly inside (0,1)

The potential outdegree of v is sum_u p(v,u): the outdegree v would reach if
all its unoriented edges left v.  A vertex is oriented once it has no
unoriented edge.  The engine maintains level sets A_m of oriented vertices
with potential exactly m; a state at level j is valid ("j-proper") when

  (1) oriented vertices have integral potential,
  (2) each registered A_m (always with m > j) is independent,
  (3) every non-unoriented edge touches some A_m vertex,
  (4) for an A-vertex a and outside neighbour u, an edge that leaves a in the
      base orientation is fully oriented out of a (alignment: this pins every
      outside vertex's committed outdegree below the base bound k).

The strong form additionally requires potentials at or below j to be
integral.  All arithmetic is Fraction-exact: the published gap bounds are
asserted by exact comparison, which floating point could not support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvariantViolation, PreconditionError
from .graph import Graph, IntegralOrientation
from .hakimi import BaseOrientation

ZERO = Fraction(0)
ONE = Fraction(1)

UNORIENTED = "unoriented"
ORIENTED = "oriented"
FRACTIONAL = "fractional"


def _is_int(x: Fraction) -> bool:
    return x.denominator == 1


class PartialFractionalOrientation:
    """Mutable PFO; single-writer, reads between mutations only."""

    __slots__ = ("graph", "base", "j", "p", "potential", "unoriented_deg",
                 "d1", "level_sets", "level_of")

    def __init__(self, graph: Graph, base: BaseOrientation, level: int):
        self.graph = graph
        self.base = base
        self.j = level
        self.p = {}
        for u, v in graph.edges:
            self.p[(u, v)] = ONE
            self.p[(v, u)] = ONE
        self.potential = [Fraction(graph.degree(v)) for v in range(graph.n)]
        self.unoriented_deg = [graph.degree(v) for v in range(graph.n)]
        self.d1 = [len(base.in_of[v]) for v in range(graph.n)]
        self.level_sets = {}
        self.level_of = {}

    # ----------------------------------------------------------------- queries

    def state(self, u: int, v: int) -> str:
        pu, pv = self.p[(u, v)], self.p[(v, u)]
        if pu == ONE and pv == ONE:
            return UNORIENTED
        if 0 < pu < 1:
            return FRACTIONAL
        return ORIENTED

    def is_oriented_vertex(self, v: int) -> bool:
        return self.unoriented_deg[v] == 0

    def in_levels(self, v: int) -> bool:
        return v in self.level_of

    def gap(self, v: int) -> Fraction:
        """Potential above the current level; meaningful for v outside the level sets."""
        return self.potential[v] - self.j

    def unoriented_neighbors(self, v: int) -> list:
        return [u for u in self.graph.adj[v] if self.p[(v, u)] == ONE and self.p[(u, v)] == ONE]

    def fractional_neighbors(self, v: int) -> list:
        return [u for u in self.graph.adj[v] if 0 < self.p[(v, u)] < 1]

    # --------------------------------------------------------------- mutations

    def orient_edge(self, tail: int, head: int) -> None:
        if self.state(tail, head) != UNORIENTED:
            raise InvariantViolation(f"edge ({tail},{head}) is not unoriented")
        self.p[(tail, head)] = ONE
        self.p[(head, tail)] = ZERO
        self.potential[head] -= 1
        self.unoriented_deg[tail] -= 1
        self.unoriented_deg[head] -= 1
        if self.base.is_out(tail, head):
            self.d1[head] -= 1
        else:
            self.d1[tail] -= 1

    def set_fractional(self, v: int, u: int, keep: Fraction) -> None:
        """Resolve the unoriented edge vu, leaving out-weight `keep` at v."""
        if keep == ONE:
            self.orient_edge(v, u)
            return
        if keep == ZERO:
            self.orient_edge(u, v)
            return
        if not 0 < keep < 1:
            raise InvariantViolation(f"fractional weight {keep} outside (0,1)")
        if self.state(v, u) != UNORIENTED:
            raise InvariantViolation(f"edge ({v},{u}) is not unoriented")
        self.p[(v, u)] = keep
        self.p[(u, v)] = ONE - keep
        self.potential[v] -= ONE - keep
        self.potential[u] -= keep
        self.unoriented_deg[v] -= 1
        self.unoriented_deg[u] -= 1
        if self.base.is_out(v, u):
            self.d1[u] -= 1
        else:
            self.d1[v] -= 1

    def shift(self, a: int, b: int, eps: Fraction) -> None:
        """Move eps of out-weight from b to a along a fractional edge."""
        pa, pb = self.p[(a, b)] + eps, self.p[(b, a)] - eps
        if not (0 <= pa <= 1 and 0 <= pb <= 1):
            raise InvariantViolation("shift pushed an edge value outside [0,1]")
        self.p[(a, b)] = pa
        self.p[(b, a)] = pb
        self.potential[a] += eps
        self.potential[b] -= eps

    def commit_level(self, vertices) -> None:
        """Register A_j = `vertices` at the current level and step down to j-1."""
        members = sorted(vertices)
        for v in members:
            if v in self.level_of:
                raise InvariantViolation(f"vertex {v} already in a level set")
            if not self.is_oriented_vertex(v):
                raise InvariantViolation(f"vertex {v} is not oriented")
            if self.potential[v] != self.j:
                raise InvariantViolation(
                    f"vertex {v} has potential {self.potential[v]}, expected {self.j}"
                )
        mset = set(members)
        for v in members:
            for u in self.graph.adj[v]:
                if u in mset:
                    raise InvariantViolation(f"level set not independent: edge ({v},{u})")
        if members:
            self.level_sets[self.j] = tuple(members)
            for v in members:
                self.level_of[v] = self.j
        self.j -= 1

    # ------------------------------------------------------------------- debug

    def debug_dump(self) -> str:
        """Per-edge "u v num/den num/den" lines plus the level-set listing."""
        lines = []
        for u, v in self.graph.edges:
            pu, pv = self.p[(u, v)], self.p[(v, u)]
            lines.append(f"{u} {v} {pu.numerator}/{pu.denominator} {pv.numerator}/{pv.denominator}")
        for m in sorted(self.level_sets, reverse=True):
            lines.append(f"A_{m}: {' '.join(map(str, self.level_sets[m]))}")
        lines.append(f"j: {self.j}")
        return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ observers


def potential_outdegree(pfo: PartialFractionalOrientation, v: int) -> Fraction:
    return pfo.potential[v]


def oriented_outdegree(pfo: PartialFractionalOrientation, v: int) -> Fraction:
    """Out-weight over resolved edges only: sum of 1 - p(u,v)."""
    return sum((ONE - pfo.p[(u, v)] for u in pfo.graph.adj[v]), ZERO)


def residual_in_count(pfo: PartialFractionalOrientation, v: int) -> int:
    """Unoriented edges at v that point into v in the base orientation."""
    return pfo.d1[v]


@dataclass(frozen=True)
class GapLedger:
    j: int
    gap: dict        # vertex -> Fraction, vertices outside the level sets
    part_gap: dict   # class index -> max gap or None when the class is exhausted


def compute_gaps(pfo: PartialFractionalOrientation, part) -> GapLedger:
    gap = {v: pfo.gap(v) for v in range(pfo.graph.n) if not pfo.in_levels(v)}
    part_gap = {}
    for i in range(1, part.r + 1):
        vals = [gap[v] for v in range(pfo.graph.n)
                if part.class_of[v] == i and v in gap]
        part_gap[i] = max(vals) if vals else None
    return GapLedger(j=pfo.j, gap=gap, part_gap=part_gap)


# ----------------------------------------------------------------- validation


@dataclass(frozen=True)
class JProperReport:
    ok: bool
    violation: str | None = None


def check_j_proper(pfo: PartialFractionalOrientation, base: BaseOrientation | None = None,
                   j: int | None = None, strong: bool = False) -> JProperReport:
    """Validate the full state against the defining properties; first failure wins."""
    base = base or pfo.base
    j = pfo.j if j is None else j
    g = pfo.graph
    k = base.k

    def fail(msg):
        return JProperReport(ok=False, violation=msg)

    pot = [ZERO] * g.n
    undeg = [0] * g.n
    d1 = [0] * g.n
    for u, v in g.edges:
        pu, pv = pfo.p[(u, v)], pfo.p[(v, u)]
        if not (0 <= pu <= 1 and 0 <= pv <= 1):
            return fail(f"edge ({u},{v}) has weight outside [0,1]")
        if not ((pu == ONE and pv == ONE) or pu + pv == ONE):
            return fail(f"edge ({u},{v}) is in no legal state: {pu}, {pv}")
        pot[u] += pu
        pot[v] += pv
        if pu == ONE and pv == ONE:
            undeg[u] += 1
            undeg[v] += 1
            if base.is_out(u, v):
                d1[v] += 1
            else:
                d1[u] += 1
    if pot != pfo.potential or undeg != list(pfo.unoriented_deg) or d1 != list(pfo.d1):
        return fail("cached potentials/degrees diverge from recomputation")

    for m, members in pfo.level_sets.items():
        if m <= j:
            return fail(f"level set A_{m} at or below the current level {j}")
        expected = sorted(v for v in range(g.n)
                          if pfo.is_oriented_vertex(v) and pot[v] == m)
        if sorted(members) != expected:
            return fail(f"A_{m} does not match the oriented vertices of potential {m}")
        mset = set(members)
        for v in members:
            for u in g.adj[v]:
                if u in mset:
                    return fail(f"A_{m} not independent: edge ({v},{u})")

    for v in range(g.n):
        if pfo.is_oriented_vertex(v):
            if not _is_int(pot[v]):
                return fail(f"oriented vertex {v} has non-integral potential {pot[v]}")
            if not pfo.in_levels(v) and pot[v] > j:
                return fail(f"oriented vertex {v} sits above level {j} outside the level sets")

    for u, v in g.edges:
        if pfo.state(u, v) != UNORIENTED:
            if not (pfo.in_levels(u) or pfo.in_levels(v)):
                return fail(f"resolved edge ({u},{v}) touches no level-set vertex")

    for a in pfo.level_of:
        for u in g.adj[a]:
            if pfo.in_levels(u):
                continue
            if base.is_out(a, u) and pfo.p[(a, u)] != ONE:
                return fail(f"alignment broken: base out-edge ({a},{u}) not oriented out")

    for v in range(g.n):
        if pfo.in_levels(v):
            continue
        if oriented_outdegree(pfo, v) > k:
            return fail(f"outside vertex {v} has committed outdegree above k={k}")
        need = math.ceil(pot[v] - j) + j - k
        if d1[v] < need:
            return fail(f"vertex {v} has {d1[v]} unoriented base in-edges, needs {need}")

    if strong:
        for v in range(g.n):
            if pot[v] <= j and not _is_int(pot[v]):
                return fail(f"potential {pot[v]} of {v} below level {j} is fractional")
    return JProperReport(ok=True)


def assert_j_proper(pfo, strong=False, context=""):
    rep = check_j_proper(pfo, strong=strong)
    if not rep.ok:
        raise InvariantViolation(f"{context}: {rep.violation}" if context else rep.violation)


# ----------------------------------------------------------------- saturation


def _walk_and_adjust(pfo: PartialFractionalOrientation, start: int,
                     rise_limit: Fraction | None = None) -> None:
    """One saturation step from `start`.

    Walk along fractional edges, lowest neighbour first, never reusing an
    edge.  Interior vertices have integral potential, hence at least two
    fractional edges, so the walk never stalls.  Hitting a repeated vertex
    yields a cycle: rotate it until an edge saturates (no potential moves).
    Hitting another fractional-potential vertex yields a path: shift weight so
    `start` rises toward its ceiling and the far end falls toward its floor,
    stopping at whatever clamps first.
    """
    path = [start]
    pos = {start: 0}
    used = set()
    current = start
    endpoint = None
    cycle = None
    while True:
        nxt = None
        for u in pfo.fractional_neighbors(current):
            e = (current, u) if current < u else (u, current)
            if e not in used:
                nxt = u
                break
        if nxt is None:
            raise InvariantViolation(f"saturation walk stalled at {current}")
        if nxt in pos:
            cycle = path[pos[nxt]:]
            break
        used.add((current, nxt) if current < nxt else (nxt, current))
        path.append(nxt)
        pos[nxt] = len(path) - 1
        if not _is_int(pfo.potential[nxt]):
            endpoint = nxt
            break
        current = nxt

    if cycle is not None:
        steps = list(zip(cycle, cycle[1:] + cycle[:1]))
        eps = min(pfo.p[(b, a)] for a, b in steps)
        for a, b in steps:
            pfo.shift(a, b, eps)
        return

    steps = list(zip(path, path[1:]))
    rise = math.ceil(pfo.potential[start]) - pfo.potential[start]
    if rise_limit is not None:
        rise = min(rise, rise_limit - pfo.potential[start])
    fall = pfo.potential[endpoint] - math.floor(pfo.potential[endpoint])
    eps = min([rise, fall] + [pfo.p[(b, a)] for a, b in steps])
    if eps <= 0:
        raise InvariantViolation("saturation step made no progress")
    for a, b in steps:
        pfo.shift(a, b, eps)


def saturate_vertex(pfo: PartialFractionalOrientation, v: int,
                    rise_limit: Fraction | None = None) -> None:
    """Drive potential(v) to an integer by path shifts and cycle rotations."""
    guard = 4 * (pfo.graph.m + pfo.graph.n) + 4
    while not _is_int(pfo.potential[v]):
        guard -= 1
        if guard < 0:
            raise InvariantViolation(f"saturation of {v} failed to terminate")
        _walk_and_adjust(pfo, v, rise_limit)


def strongify(pfo: PartialFractionalOrientation) -> PartialFractionalOrientation:
    """Make the state strongly proper at its current level.

    Fixes every vertex with fractional potential below the level (and,
    defensively, any oriented vertex with fractional potential).  Each fix
    lets the vertex rise to its ceiling while a far fractional-potential
    vertex falls toward its floor, so potentials that are already integral
    never move, potentials above the level never increase, and fixed vertices
    land on their floor or ceiling.  Unoriented edges are untouched.
    """
    while True:
        targets = [v for v in range(pfo.graph.n)
                   if not _is_int(pfo.potential[v])
                   and (pfo.potential[v] < pfo.j or pfo.is_oriented_vertex(v))]
        if not targets:
            return pfo
        saturate_vertex(pfo, targets[0])


# ------------------------------------------------------------------- rounding


def finalize(pfo: PartialFractionalOrientation) -> IntegralOrientation:
    """Round a gap-closed state into a proper integral orientation.

    Descends level by level: the vertices sitting exactly at the level when it
    opens are oriented fully outward (a vertex whose potential drops meanwhile
    is skipped and caught at its final level), then leftover fractional edges
    are cancelled around cycles, which moves no potential.  Outdegrees never
    exceed the ceiling of the entry potential.  A vertex left unoriented at
    the end had a gap the sweep could not absorb, which is the positive-gap
    precondition failure.
    """
    g = pfo.graph
    entry = list(pfo.potential)
    strongify(pfo)

    for m in range(pfo.j, -1, -1):
        if pfo.j != m:
            raise InvariantViolation("finalize level counter out of step")
        candidates = [v for v in range(g.n)
                      if not pfo.in_levels(v) and pfo.potential[v] == m]
        added = []
        for v in candidates:
            if pfo.potential[v] != m:
                continue  # an in-edge arrived first; handled at a lower level
            for u in pfo.unoriented_neighbors(v):
                pfo.orient_edge(v, u)
            added.append(v)
        pfo.commit_level(added)

    stuck = [v for v in range(g.n) if not pfo.in_levels(v)]
    if stuck:
        raise PreconditionError(
            f"positive gap could not be closed at vertices {stuck[:8]}"
        )

    # cancel remaining fractional edges around cycles; potentials are frozen
    guard = 2 * g.m + 2
    while True:
        frac_vertices = [v for v in range(g.n) if pfo.fractional_neighbors(v)]
        if not frac_vertices:
            break
        guard -= 1
        if guard < 0:
            raise InvariantViolation("fractional cleanup failed to terminate")
        before = list(pfo.potential)
        _walk_and_adjust(pfo, frac_vertices[0])
        if before != pfo.potential:
            raise InvariantViolation("cycle cancellation moved a potential")

    tail_of = {}
    for u, v in g.edges:
        if pfo.p[(u, v)] == ONE and pfo.p[(v, u)] == ZERO:
            tail_of[(u, v)] = u
        elif pfo.p[(v, u)] == ONE and pfo.p[(u, v)] == ZERO:
            tail_of[(u, v)] = v
        else:
            raise InvariantViolation(f"edge ({u},{v}) left unresolved")
    out = IntegralOrientation(g, tail_of)
    for v in range(g.n):
        if out.outdegree[v] != pfo.potential[v]:
            raise InvariantViolation(f"outdegree of {v} differs from its potential")
        if out.outdegree[v] > math.ceil(entry[v]):
            raise InvariantViolation(f"outdegree of {v} exceeds its entry ceiling")
    return out
