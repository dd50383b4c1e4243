"""Fitness evaluation: a deterministic serial list scheduler.

A decoded genome fixes, for every job, the processing option (machine and
mode) and a dispatch priority. Jobs are placed one at a time: the ready job
with the highest priority goes next, at the earliest start allowed by its
order's arrival, its predecessors, its machine (plus any cleaning gap) and
the mutex groups the machine belongs to. Machine and group cursors only move
forward, so a job is never slotted into an earlier idle gap.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from functools import lru_cache

from valuesched.model import Scenario
from valuesched.valuecurve import curve_factor

# objectives are snapped to this many decimals so that equal schedules reached
# through different summation orders compare equal
OBJECTIVE_DECIMALS = 6


@dataclass(frozen=True)
class DecodedGenome:
    allocation: dict[str, int]
    priority: dict[str, float]
    included: dict[str, bool]


@dataclass(frozen=True)
class Placement:
    job_id: str
    machine_id: str
    mode_id: str
    start_s: float
    end_s: float


@dataclass(frozen=True)
class Schedule:
    placements: dict[str, Placement]
    order_completion: dict[str, float]
    makespan_s: float
    total_profit: float
    elements_produced: int

    def to_dict(self) -> dict:
        return {
            "placements": [
                {
                    "job_id": p.job_id,
                    "machine_id": p.machine_id,
                    "mode_id": p.mode_id,
                    "start_s": p.start_s,
                    "end_s": p.end_s,
                }
                for p in sorted(self.placements.values(), key=lambda p: (p.start_s, p.job_id))
            ],
            "order_completion": dict(sorted(self.order_completion.items())),
            "makespan_s": self.makespan_s,
            "total_profit": self.total_profit,
            "elements_produced": self.elements_produced,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


@dataclass(frozen=True, order=True)
class ObjectiveVector:
    makespan_s: float
    total_profit: float

    def minimization(self) -> tuple[float, float]:
        return (self.makespan_s, -self.total_profit)

    def dominates(self, other: ObjectiveVector) -> bool:
        return (
            self.makespan_s <= other.makespan_s
            and self.total_profit >= other.total_profit
            and (self.makespan_s < other.makespan_s or self.total_profit > other.total_profit)
        )


class CompiledScenario:
    """Index-based view of a Scenario used on the hot path.

    Jobs are numbered by global index (order id, then job id); machines and
    orders by their position in the sorted id lists.
    """

    def __init__(self, s: Scenario):
        self.scenario = s
        orders = s.sorted_orders()
        self.order_ids = [o.id for o in orders]
        self.machine_ids = [m.id for m in s.machines]
        mindex = {m: i for i, m in enumerate(self.machine_ids)}

        pairs = s.global_jobs()
        self.job_ids = [j.id for _, j in pairs]
        jindex = {jid: i for i, jid in enumerate(self.job_ids)}
        oindex = {oid: i for i, oid in enumerate(self.order_ids)}
        self.n_jobs = len(pairs)
        self.n_orders = len(orders)

        self.job_order = [oindex[o.id] for o, _ in pairs]
        self.job_class = [j.job_class for _, j in pairs]
        # per job: list of (machine index, duration, max_profit, machine id, mode id)
        self.options = [
            [(mindex[op.machine_id], op.duration_s, op.max_profit, op.machine_id, op.mode_id) for op in j.options]
            for _, j in pairs
        ]
        self.domains = tuple(len(j.options) for _, j in pairs)
        self.release = [o.arrival_time_s for o, _ in pairs]
        self.curves = [o.curve for o in orders]
        self.order_jobs = [[] for _ in orders]
        for g, oi in enumerate(self.job_order):
            self.order_jobs[oi].append(g)

        self.succ: list[list[int]] = [[] for _ in pairs]
        self.n_preds = [0] * self.n_jobs
        for o in orders:
            for a, b in o.precedence:
                self.succ[jindex[a]].append(jindex[b])
                self.n_preds[jindex[b]] += 1

        self.groups_of: list[list[int]] = [[] for _ in self.machine_ids]
        for gi, g in enumerate(s.mutex_groups):
            for mid in set(g.machine_ids):
                self.groups_of[mindex[mid]].append(gi)
        self.n_groups = len(s.mutex_groups)

        self.gaps: dict[tuple[int, str, str], float] = {}
        for r in s.gap_rules:
            key = (mindex[r.machine_id], r.from_class, r.to_class)
            self.gaps[key] = max(self.gaps.get(key, 0.0), r.gap_s)

    def dispatch(self, alloc, prio, incl):
        """Run the list scheduler on positional genes.

        ``alloc`` and ``prio`` are indexed by global job index, ``incl`` by
        order index. Returns ``(start, end)`` lists (None for unscheduled jobs).
        """
        n = self.n_jobs
        job_order = self.job_order
        options = self.options
        release = self.release
        groups_of = self.groups_of
        gaps = self.gaps
        job_class = self.job_class
        succ = self.succ

        est = list(release)
        indeg = list(self.n_preds)
        heap = [(-prio[j], j) for j in range(n) if incl[job_order[j]] and indeg[j] == 0]
        heapq.heapify(heap)
        mcur = [0.0] * len(self.machine_ids)
        mlast: list[str | None] = [None] * len(self.machine_ids)
        gcur = [0.0] * self.n_groups
        start: list[float | None] = [None] * n
        end: list[float | None] = [None] * n

        while heap:
            _, j = heapq.heappop(heap)
            m, dur, _, _, _ = options[j][alloc[j]]
            t = est[j]
            c = mcur[m]
            last = mlast[m]
            if last is not None and gaps:
                c += gaps.get((m, last, job_class[j]), 0.0)
            if c > t:
                t = c
            for g in groups_of[m]:
                if gcur[g] > t:
                    t = gcur[g]
            e = t + dur
            start[j] = t
            end[j] = e
            mcur[m] = e
            mlast[m] = job_class[j]
            for g in groups_of[m]:
                gcur[g] = e
            for s in succ[j]:
                if e > est[s]:
                    est[s] = e
                indeg[s] -= 1
                if indeg[s] == 0:
                    heapq.heappush(heap, (-prio[s], s))
        return start, end

    def objectives(self, alloc, prio, incl) -> tuple[float, float, int]:
        """(makespan, total profit, elements produced) for positional genes."""
        _, end = self.dispatch(alloc, prio, incl)
        options = self.options
        makespan = 0.0
        profit = 0.0
        produced = 0
        for oi, jobs in enumerate(self.order_jobs):
            if not incl[oi]:
                continue
            produced += 1
            et = 0.0
            vmax = 0.0
            for j in jobs:
                if end[j] > et:
                    et = end[j]
                vmax += options[j][alloc[j]][2]
            if et > makespan:
                makespan = et
            profit += vmax * curve_factor(et, self.curves[oi])
        return round(makespan, OBJECTIVE_DECIMALS), round(profit, OBJECTIVE_DECIMALS), produced


@lru_cache(maxsize=32)
def compile_scenario(s: Scenario) -> CompiledScenario:
    return CompiledScenario(s)


def _positional(cs: CompiledScenario, g: DecodedGenome):
    alloc = [g.allocation.get(jid, 0) for jid in cs.job_ids]
    prio = [g.priority.get(jid, 0.0) for jid in cs.job_ids]
    incl = [g.included.get(oid, True) for oid in cs.order_ids]
    return alloc, prio, incl


def build_schedule(s: Scenario, g: DecodedGenome) -> Schedule:
    cs = compile_scenario(s)
    alloc, prio, incl = _positional(cs, g)
    start, end = cs.dispatch(alloc, prio, incl)
    placements = {}
    for j, jid in enumerate(cs.job_ids):
        if start[j] is None:
            continue
        _, _, _, mid, mode = cs.options[j][alloc[j]]
        placements[jid] = Placement(jid, mid, mode, start[j], end[j])
    completion = {}
    profit = 0.0
    for oi, jobs in enumerate(cs.order_jobs):
        if not incl[oi]:
            continue
        et = max(end[j] for j in jobs)
        completion[cs.order_ids[oi]] = et
        vmax = sum(cs.options[j][alloc[j]][2] for j in jobs)
        profit += vmax * curve_factor(et, cs.curves[oi])
    makespan = max((p.end_s for p in placements.values()), default=0.0)
    return Schedule(placements, completion, makespan, profit, len(completion))


def evaluate(s: Scenario, g: DecodedGenome) -> tuple[Schedule, ObjectiveVector]:
    sched = build_schedule(s, g)
    obj = ObjectiveVector(
        round(sched.makespan_s, OBJECTIVE_DECIMALS),
        round(sched.total_profit, OBJECTIVE_DECIMALS),
    )
    return sched, obj
