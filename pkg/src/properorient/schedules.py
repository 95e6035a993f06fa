"""Published round schedules and the end-to-end pipeline.

Each schedule fixes the target bound l and the ordered list of gap-closing
rounds for one graph family:

* bipartite:   l = k+3, one round closing class 1 while protecting class 2.
* rpartite:    l = k+3r(t+1) with t the smallest integer having t^(t+1) >= r-1;
               rt unprotected rounds sweep the classes cyclically, then r
               rounds close them for good, protecting everything already done.
* planar4:     l = 14 for a 4-colored graph with k=3; four rounds whose gap
               growth is certified at exactly 3/7, 17/21, 1 (then none).
* colorable3:  l = k+8 for a 3-colored graph with k in {2,3}; two rounds,
               the first certified at growth 2/5.

A schedule may pin exact rational caps per round; the pipeline asserts every
cap against the round reports, so a run that finishes green has replayed the
corresponding proof chain on the concrete input.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvariantViolation, PreconditionError
from .graph import (
    Graph,
    IntegralOrientation,
    VertexPartition,
    VerificationReport,
    verify_proper_orientation,
)
from .hakimi import BaseOrientation, InfeasibilityWitness, build_k_orientation
from .pfo import ZERO, compute_gaps, finalize
from .rounds import RoundReport, RoundSpec, close_round, initial_levels, _frac_str

FAMILIES = ("bipartite", "rpartite", "planar4", "colorable3", "outerplanar")


@dataclass(frozen=True)
class RoundCaps:
    """Exact bounds a round must certify; None leaves the quantity unchecked."""

    delta: Fraction | None = None
    part_gaps: tuple = ()    # ((class, cap), ...)


@dataclass(frozen=True)
class ScheduleParams:
    family: str
    r: int
    k: int
    l: int
    rounds: tuple
    caps: tuple
    t: int | None = None

    def __post_init__(self):
        if self.l < self.r + self.k:
            raise PreconditionError("schedules require l >= r+k")
        if len(self.rounds) != len(self.caps):
            raise PreconditionError("every round needs a caps entry")


def smallest_power_t(r: int) -> int:
    """Smallest t >= 1 with t^(t+1) >= r-1."""
    t = 1
    while t ** (t + 1) < r - 1:
        t += 1
    return t


def schedule_bipartite(k: int) -> ScheduleParams:
    if k < 1:
        raise PreconditionError("bipartite schedule needs k >= 1")
    l = k + 3
    rounds = (RoundSpec(j=k + 1, focus=1, protected=(2,), mode="corollary"),)
    caps = (RoundCaps(delta=Fraction(1)),)
    return ScheduleParams(family="bipartite", r=2, k=k, l=l, rounds=rounds, caps=caps)


def schedule_rpartite(r: int, k: int) -> ScheduleParams:
    if r < 2:
        raise PreconditionError("rpartite schedule needs r >= 2")
    t = smallest_power_t(r)
    l = k + 3 * r * (t + 1)
    rounds = []
    caps = []
    for m in range(r * t):
        rounds.append(RoundSpec(j=l - r - m, focus=(m % r) + 1, protected=(),
                                mode="corollary"))
        caps.append(RoundCaps(delta=Fraction(1, t ** math.ceil((m + 1) / r))))
    for m in range(r):
        rounds.append(RoundSpec(j=l - r * (t + 1) - m, focus=m + 1,
                                protected=tuple(range(1, m + 1)), mode="corollary"))
        caps.append(RoundCaps(delta=Fraction(1, t ** (t + 1))))
    levels_used = r * (t + 2)
    if levels_used > l - k:
        raise InvariantViolation("schedule would descend below level k")
    return ScheduleParams(family="rpartite", r=r, k=k, l=l,
                          rounds=tuple(rounds), caps=tuple(caps), t=t)


def schedule_planar4(k: int = 3) -> ScheduleParams:
    if k != 3:
        raise PreconditionError("the 4-class planar schedule is proved for k=3")
    l = 14
    rounds = (
        RoundSpec(j=l - 4, focus=1, protected=(4,), mode="lemma"),
        RoundSpec(j=l - 5, focus=2, protected=(1, 4), mode="lemma"),
        RoundSpec(j=l - 6, focus=3, protected=(1, 2), mode="lemma"),
        RoundSpec(j=l - 7, focus=4, protected=(1, 2, 3), mode="lemma"),
    )
    caps = (
        RoundCaps(delta=Fraction(3, 7),
                  part_gaps=((2, Fraction(17, 7)), (3, Fraction(10, 7)))),
        RoundCaps(delta=Fraction(17, 21),
                  part_gaps=((3, Fraction(47, 21)),)),
        RoundCaps(delta=Fraction(1),
                  part_gaps=((4, Fraction(1)),)),
        RoundCaps(),
    )
    return ScheduleParams(family="planar4", r=4, k=3, l=l, rounds=rounds, caps=caps)


def schedule_3colorable(k: int) -> ScheduleParams:
    if k not in (2, 3):
        raise PreconditionError("the 3-class schedule is proved for k in {2, 3}")
    l = k + 8
    rounds = (
        RoundSpec(j=l - 3, focus=1, protected=(3,), mode="lemma"),
        RoundSpec(j=l - 4, focus=2, protected=(1, 3), mode="lemma"),
    )
    caps = (
        RoundCaps(delta=Fraction(2, 5), part_gaps=((2, Fraction(7, 5)),)),
        RoundCaps(),
    )
    family = "outerplanar" if k == 2 else "colorable3"
    return ScheduleParams(family=family, r=3, k=k, l=l, rounds=rounds, caps=caps)


# ----------------------------------------------------------------------- runs


class PipelineError(PreconditionError):
    """A pipeline precondition failed; `detail` carries the witness if any."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


@dataclass
class PipelineResult:
    orientation: IntegralOrientation
    achieved_max: int
    guaranteed_bound: int
    round_log: list
    verification: VerificationReport
    reports: list = field(default_factory=list)

    def log_records(self) -> list:
        return list(self.round_log)

    def ndjson(self) -> str:
        return "\n".join(json.dumps(rec, sort_keys=True) for rec in self.round_log) + "\n"


def run_pipeline(g: Graph, part: VertexPartition, sched: ScheduleParams) -> PipelineResult:
    """Drive leveling, every scheduled round, and the final rounding.

    Raises PipelineError when the base orientation is infeasible or the
    partition does not match the schedule; every internal invariant and every
    cap the schedule pins is asserted along the way.
    """
    try:
        part.validate(g)
    except PreconditionError as exc:
        raise PipelineError(f"partition invalid: {exc}") from exc
    if part.r != sched.r:
        raise PipelineError(
            f"schedule expects {sched.r} classes, partition has {part.r}"
        )
    built = build_k_orientation(g, sched.k)
    if isinstance(built, InfeasibilityWitness):
        raise PipelineError(
            f"no {sched.k}-orientation exists: {len(built.vertex_set)} vertices "
            f"carry average degree {built.density()}",
            detail=built,
        )
    base: BaseOrientation = built

    pfo = initial_levels(g, part, base, sched.l)
    log = [{
        "round": 0,
        "stage": "levels",
        "j": pfo.j,
        "part_gaps": {str(i): _frac_str(v)
                      for i, v in sorted(compute_gaps(pfo, part).part_gap.items())},
    }]
    reports = []
    for spec, caps in zip(sched.rounds, sched.caps):
        report = close_round(pfo, part, spec)
        _assert_caps(report, caps)
        reports.append(report)
        log.append(report.to_record())

    final_gaps = compute_gaps(pfo, part)
    positive = {v: gp for v, gp in final_gaps.gap.items() if gp > 0}
    if positive:
        raise InvariantViolation(f"gaps left open after the schedule: {positive}")

    orientation = finalize(pfo)
    verification = verify_proper_orientation(g, orientation, sched.l)
    if not verification.is_proper:
        raise InvariantViolation(f"output not proper: {verification.violations[:4]}")
    if not verification.bound_respected:
        raise InvariantViolation(
            f"max outdegree {verification.max_outdegree} above the bound {sched.l}"
        )
    log.append({
        "round": "final",
        "stage": "finalize",
        "max_outdegree": verification.max_outdegree,
        "bound": sched.l,
    })
    return PipelineResult(
        orientation=orientation,
        achieved_max=verification.max_outdegree,
        guaranteed_bound=sched.l,
        round_log=log,
        verification=verification,
        reports=reports,
    )


def _assert_caps(report: RoundReport, caps: RoundCaps) -> None:
    if caps.delta is not None and report.delta_bound > caps.delta:
        raise InvariantViolation(
            f"round {report.j}: growth bound {report.delta_bound} exceeds "
            f"the certified cap {caps.delta}"
        )
    for cls, cap in caps.part_gaps:
        val = report.new_part_gaps.get(cls)
        if val is not None and val > cap:
            raise InvariantViolation(
                f"round {report.j}: class {cls} gap {val} exceeds its cap {cap}"
            )
