"""The two phase engines: initial leveling and the gap-closing round.

Initial leveling takes a fresh all-unoriented state at level l and, for each
class i = 1..r, pulls every unoriented vertex of potential >= l-i+1 into an
independent level set A_{l-i+1} (all of class i's candidates, plus greedily
compatible others), orienting each member fully: base out-edges first, then
enough base in-edges outward to land the potential exactly on the level, the
rest inward.  The result is a partial orientation at level l-r whose class
gaps are at most r-i.

A gap-closing round turns a strongly j-proper state into a (j-1)-proper one:
it selects an independent set A of eligible vertices (gap >= 0, unoriented),
feeds each protected class a Hall subgraph directed into its excluded
vertices, orients protected members of A fully outward, and resolves the
remaining members' base in-edges at the uniform fractional weight
1 - gap/d1', which parks every member exactly on level j.  Every gap bound
the round reports is an exact rational, asserted against recomputation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvariantViolation, PreconditionError
from .graph import Graph, VertexPartition
from .hakimi import BaseOrientation
from .indset import SelectionInstance, select_independent_set
from .pfo import (
    ONE,
    ZERO,
    PartialFractionalOrientation,
    assert_j_proper,
    compute_gaps,
    saturate_vertex,
    strongify,
    _is_int,
)


@dataclass(frozen=True)
class RoundSpec:
    j: int
    focus: int
    protected: tuple = ()
    mode: str = "corollary"      # "lemma" (d1-based) or "corollary" (level-based)

    def __post_init__(self):
        if self.focus in self.protected:
            raise PreconditionError("focus class cannot be protected")
        if self.mode not in ("lemma", "corollary"):
            raise PreconditionError(f"unknown round mode {self.mode!r}")


@dataclass
class RoundReport:
    j: int
    focus: int
    protected: tuple
    mode: str
    delta_bound: Fraction
    old_part_gaps: dict
    new_part_gaps: dict
    checks: list = field(default_factory=list)   # (subject, inequality, ok)
    selected: int = 0
    seeded: int = 0

    def to_record(self) -> dict:
        return {
            "round": self.j,
            "j": self.j,
            "focus": self.focus,
            "protected": list(self.protected),
            "mode": self.mode,
            "delta_bound": _frac_str(self.delta_bound),
            "part_gaps": {str(i): _frac_str(v) for i, v in sorted(self.new_part_gaps.items())},
            "checks": [[str(s), ineq, ok] for s, ineq, ok in self.checks],
            "selected": self.selected,
            "seeded": self.seeded,
        }


def _frac_str(x):
    if x is None:
        return None
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# --------------------------------------------------------------- initial levels


def initial_levels(g: Graph, part: VertexPartition, base: BaseOrientation,
                   l: int) -> PartialFractionalOrientation:
    """Build the starting partial orientation at level l-r with Gap(i) <= r-i."""
    part.validate(g)
    if l < part.r + base.k:
        raise PreconditionError(f"need l >= r+k, got l={l}, r={part.r}, k={base.k}")
    pfo = PartialFractionalOrientation(g, base, l)
    for i in range(1, part.r + 1):
        m = l - i + 1
        if pfo.j != m:
            raise InvariantViolation("level counter out of step")
        candidates = [v for v in range(g.n)
                      if not pfo.is_oriented_vertex(v) and pfo.potential[v] >= m]
        chosen = [v for v in candidates if part.class_of[v] == i]
        chosen_set = set(chosen)
        for v in candidates:
            if part.class_of[v] == i:
                continue
            if not any(u in chosen_set for u in g.adj[v]):
                chosen.append(v)
                chosen_set.add(v)
        for v in sorted(chosen):
            for u in pfo.unoriented_neighbors(v):
                if base.is_out(v, u):
                    pfo.orient_edge(v, u)
            committed = int(pfo.potential[v]) - pfo.unoriented_deg[v]
            need = m - committed
            rem = pfo.unoriented_neighbors(v)
            if not 0 <= need <= len(rem):
                raise InvariantViolation(f"vertex {v} cannot land on level {m}")
            for u in rem[:need]:
                pfo.orient_edge(v, u)
            for u in rem[need:]:
                pfo.orient_edge(u, v)
            if pfo.potential[v] != m or not pfo.is_oriented_vertex(v):
                raise InvariantViolation(f"vertex {v} missed level {m}")
        pfo.commit_level(chosen)
    assert_j_proper(pfo, strong=True, context="after initial leveling")
    gaps = compute_gaps(pfo, part)
    for i in range(1, part.r + 1):
        cap = part.r - i
        if gaps.part_gap[i] is not None and gaps.part_gap[i] > cap:
            raise InvariantViolation(
                f"class {i} gap {gaps.part_gap[i]} exceeds its leveling bound {cap}"
            )
    return pfo


# --------------------------------------------------------------- closing rounds


def close_round(pfo: PartialFractionalOrientation, part: VertexPartition,
                spec: RoundSpec) -> RoundReport:
    """Advance pfo from level j to j-1 per `spec`; returns the audited report."""
    g, base = pfo.graph, pfo.base
    j, k, i = spec.j, base.k, len(spec.protected)
    if pfo.j != j:
        raise PreconditionError(f"state is at level {pfo.j}, round expects {j}")
    if not (1 <= spec.focus <= part.r) or any(not 1 <= s <= part.r for s in spec.protected):
        raise PreconditionError("round classes outside 1..r")

    strongify(pfo)
    checks = []

    def require(subject, inequality, ok, hard=False):
        checks.append((subject, inequality, bool(ok)))
        if not ok:
            exc = InvariantViolation if hard else PreconditionError
            raise exc(f"{inequality} failed at {subject}")

    require("round", f"j={j} >= k={k}", j >= k)
    gaps = compute_gaps(pfo, part)
    old_part_gaps = dict(gaps.part_gap)
    for s in spec.protected:
        require(f"class {s}", "Gap <= 0",
                old_part_gaps[s] is None or old_part_gaps[s] <= 0)

    eligible = sorted(v for v, gp in gaps.gap.items()
                      if gp >= 0 and not pfo.is_oriented_vertex(v))
    gap_of = {v: gaps.gap[v] for v in eligible}
    cgap = {v: math.ceil(gap_of[v]) for v in eligible}
    d1_pre = {v: pfo.d1[v] for v in eligible}
    for v in eligible:
        if spec.mode == "corollary":
            require(v, f"j >= {i}*ceil(gap)+k", j >= i * cgap[v] + k)
        if part.class_of[v] == spec.focus:
            # the corollary derives this from the level condition; assert either way
            require(v, f"d1 >= {i + 1}*ceil(gap)",
                    d1_pre[v] >= (i + 1) * cgap[v],
                    hard=(spec.mode == "corollary"))

    seeds = sorted(v for v, gp in gaps.gap.items()
                   if gp == 0 and pfo.is_oriented_vertex(v))
    for a in seeds:
        if not all(pfo.in_levels(u) for u in g.adj[a]):
            raise InvariantViolation(f"seed {a} has a neighbour outside the level sets")

    eset = set(eligible)
    adjacency = {v: tuple(u for u in g.adj[v] if u in eset) for v in eligible}
    for v in eligible:
        for u in adjacency[v]:
            if pfo.p[(v, u)] != ONE or pfo.p[(u, v)] != ONE:
                raise InvariantViolation(f"eligible edge ({v},{u}) is already resolved")
    weight = {}
    for v in eligible:
        if part.class_of[v] == spec.focus:
            weight[v] = cgap[v]
        elif part.class_of[v] in spec.protected:
            weight[v] = 1
        else:
            weight[v] = 0
    sel = select_independent_set(SelectionInstance(
        universe=tuple(eligible), adjacency=adjacency, part_of=part.class_of,
        focus=spec.focus, protected=spec.protected, weight=weight,
        seed=tuple(seeds)))
    chosen = set(sel.chosen)

    unprotected = [s for s in range(1, part.r + 1)
                   if s != spec.focus and s not in spec.protected]
    delta_bound = _delta_bound(spec, part, chosen, gap_of, cgap, d1_pre, j, k, i)

    # 1. Hall subgraphs flow into the protected classes' excluded vertices.
    for s in spec.protected:
        for a, x in sorted(sel.matchings[s]):
            pfo.orient_edge(a, x)
    # 2. Protected members of A sit at gap 0: everything else leaves them.
    for a in sorted(chosen):
        if part.class_of[a] not in spec.protected:
            continue
        for u in pfo.unoriented_neighbors(a):
            pfo.orient_edge(a, u)
        _landed(pfo, a, j)
    # 3. Focus and unprotected members shed exactly their gap into base in-edges.
    max_ratio = ZERO
    for a in sorted(chosen):
        cls = part.class_of[a]
        if cls in spec.protected:
            continue
        for u in pfo.unoriented_neighbors(a):
            if base.is_out(a, u):
                pfo.orient_edge(a, u)
        rem = pfo.unoriented_neighbors(a)
        if len(rem) != pfo.d1[a]:
            raise InvariantViolation(f"residual edges at {a} are not base in-edges")
        g_a = gap_of[a]
        if pfo.potential[a] != j + g_a:
            raise InvariantViolation(f"potential of {a} moved before its turn")
        if g_a == 0:
            for u in rem:
                pfo.orient_edge(a, u)
        else:
            d1p = pfo.d1[a]
            if d1p < cgap[a]:
                raise InvariantViolation(f"vertex {a} has too few base in-edges left")
            if cls == spec.focus:
                if d1p < d1_pre[a] - i * cgap[a]:
                    raise InvariantViolation(f"Hall subgraphs over-consumed d1 at {a}")
            elif d1p != d1_pre[a]:
                raise InvariantViolation(f"d1 of unprotected member {a} changed")
            ratio = g_a / d1p
            max_ratio = max(max_ratio, ratio)
            for u in rem:
                pfo.set_fractional(a, u, ONE - ratio)
        _landed(pfo, a, j)
    if max_ratio > delta_bound:
        raise InvariantViolation(
            f"realized weight ratio {max_ratio} above the proven bound {delta_bound}"
        )

    # 4. Vertices that happened to become fully oriented must not crowd the
    #    level sets; fractional leftovers strictly below j-1 are rounded here.
    committed = chosen | set(seeds)
    for v in range(g.n):
        if pfo.in_levels(v) or v in committed or not pfo.is_oriented_vertex(v):
            continue
        pot = pfo.potential[v]
        if pot >= j or (not _is_int(pot) and pot > j - 1):
            raise InvariantViolation(
                f"vertex {v} was fully resolved at potential {pot}, "
                f"inside the protected zone of level {j}"
            )
    pfo.commit_level(sorted(committed))
    for v in range(g.n):
        if pfo.is_oriented_vertex(v) and not pfo.in_levels(v) \
                and not _is_int(pfo.potential[v]):
            saturate_vertex(pfo, v)

    new_gaps = compute_gaps(pfo, part)
    new_part_gaps = dict(new_gaps.part_gap)

    def new_ok(s, cap):
        val = new_part_gaps[s]
        return val is None or val <= cap

    if not new_ok(spec.focus, ZERO):
        raise InvariantViolation(f"focus class {spec.focus} gap not closed")
    for s in spec.protected:
        if not new_ok(s, ZERO):
            raise InvariantViolation(f"protected class {s} gap became positive")
    for s in unprotected:
        old = old_part_gaps[s]
        if old is None:
            cap = ZERO  # nothing outside the level sets can appear later
        elif old < 0:
            cap = ZERO
        else:
            cap = old + delta_bound
        if not new_ok(s, cap):
            raise InvariantViolation(
                f"class {s} gap {new_part_gaps[s]} above its bound {cap}"
            )
    assert_j_proper(pfo, context=f"after round at level {j}")

    return RoundReport(
        j=j, focus=spec.focus, protected=spec.protected, mode=spec.mode,
        delta_bound=delta_bound, old_part_gaps=old_part_gaps,
        new_part_gaps=new_part_gaps, checks=checks,
        selected=len(chosen), seeded=len(seeds),
    )


def _landed(pfo, a, j):
    if pfo.potential[a] != j or not pfo.is_oriented_vertex(a):
        raise InvariantViolation(f"vertex {a} did not land on level {j}")


def _delta_bound(spec, part, chosen, gap_of, cgap, d1_pre, j, k, i) -> Fraction:
    """Worst-case gap growth for unprotected classes, from pre-round values."""
    bound = ZERO
    for v in chosen:
        g_v = gap_of[v]
        if g_v <= 0:
            continue
        cls = part.class_of[v]
        if spec.mode == "corollary":
            den = j - k - (i - 1) * cgap[v]
        elif cls == spec.focus:
            den = d1_pre[v] - i * cgap[v]
        elif cls in spec.protected:
            continue  # protected members carry gap 0
        else:
            den = d1_pre[v]
        if den <= 0:
            raise InvariantViolation(f"degenerate growth denominator at {v}")
        bound = max(bound, Fraction(g_v, 1) / den)
    return bound
