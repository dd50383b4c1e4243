"""Plant and order-book types, validation and the JSON scenario format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

from valuesched.valuecurve import ValueCurve, curve_violations

__all__ = [
    "Machine",
    "MutexGroup",
    "GapRule",
    "ProcessingOption",
    "Job",
    "Order",
    "Scenario",
    "Violation",
    "ScenarioFormatError",
    "validate_scenario",
    "load_scenario",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
]


@dataclass(frozen=True)
class Machine:
    id: str
    label: str = ""


@dataclass(frozen=True)
class MutexGroup:
    machine_ids: tuple[str, ...]


@dataclass(frozen=True)
class GapRule:
    machine_id: str
    from_class: str
    to_class: str
    gap_s: float


@dataclass(frozen=True)
class ProcessingOption:
    machine_id: str
    mode_id: str
    duration_s: float
    max_profit: float


@dataclass(frozen=True)
class Job:
    id: str
    options: tuple[ProcessingOption, ...]
    gap_class: str | None = None

    @property
    def job_class(self) -> str:
        return self.id if self.gap_class is None else self.gap_class


@dataclass(frozen=True)
class Order:
    id: str
    curve: ValueCurve
    jobs: tuple[Job, ...]
    arrival_time_s: float = 0.0
    precedence: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Scenario:
    machines: tuple[Machine, ...]
    orders: tuple[Order, ...]
    mutex_groups: tuple[MutexGroup, ...] = ()
    gap_rules: tuple[GapRule, ...] = ()

    def sorted_orders(self) -> list[Order]:
        """Orders by ascending id; the canonical gene order."""
        return sorted(self.orders, key=lambda o: o.id)

    def global_jobs(self) -> list[tuple[Order, Job]]:
        """Jobs in global index order: order id ascending, then job id ascending."""
        return [
            (order, job)
            for order in self.sorted_orders()
            for job in sorted(order.jobs, key=lambda j: j.id)
        ]

    @property
    def n_jobs(self) -> int:
        return sum(len(o.jobs) for o in self.orders)

    @property
    def n_orders(self) -> int:
        return len(self.orders)


@dataclass(frozen=True)
class Violation:
    where: str
    message: str

    def __str__(self) -> str:
        return f"{self.where}: {self.message}"


def _finite(x: float) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


def _has_cycle(nodes: list[str], edges: list[tuple[str, str]]) -> bool:
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    indeg = {n: 0 for n in nodes}
    for a, b in edges:
        succ[a].append(b)
        indeg[b] += 1
    stack = [n for n in nodes if indeg[n] == 0]
    seen = 0
    while stack:
        n = stack.pop()
        seen += 1
        for s in succ[n]:
            indeg[s] -= 1
            if indeg[s] == 0:
                stack.append(s)
    return seen != len(nodes)


def validate_scenario(s: Scenario) -> list[Violation]:
    """Return every invariant violation in ``s``; an empty list means valid."""
    out: list[Violation] = []

    def bad(where: str, message: str) -> None:
        out.append(Violation(where, message))

    machine_ids = set()
    for i, m in enumerate(s.machines):
        if m.id in machine_ids:
            bad(f"machines[{i}]", f"duplicate machine id {m.id!r}")
        machine_ids.add(m.id)

    for i, g in enumerate(s.mutex_groups):
        if len(set(g.machine_ids)) < 2:
            bad(f"mutex_groups[{i}]", "needs at least 2 distinct machines")
        for mid in g.machine_ids:
            if mid not in machine_ids:
                bad(f"mutex_groups[{i}]", f"unknown machine {mid!r}")

    for i, r in enumerate(s.gap_rules):
        if r.machine_id not in machine_ids:
            bad(f"gap_rules[{i}]", f"unknown machine {r.machine_id!r}")
        if not (_finite(r.gap_s) and r.gap_s >= 0):
            bad(f"gap_rules[{i}]", f"gap_s must be a non-negative number, got {r.gap_s!r}")

    order_ids: set[str] = set()
    job_ids: set[str] = set()
    for oi, order in enumerate(s.orders):
        where = f"orders[{oi}] ({order.id})"
        if order.id in order_ids:
            bad(where, f"duplicate order id {order.id!r}")
        order_ids.add(order.id)
        if not (_finite(order.arrival_time_s) and order.arrival_time_s >= 0):
            bad(where, f"arrival_time_s must be >= 0, got {order.arrival_time_s!r}")
        c = order.curve
        if not all(_finite(x) for x in (c.d_s, c.z_s, c.penalty_rate)):
            bad(f"{where}.curve", "curve values must be finite numbers")
        else:
            for msg in curve_violations(c, order.arrival_time_s):
                bad(f"{where}.curve", msg)
        if not order.jobs:
            bad(where, "order has no jobs")

        local = []
        for ji, job in enumerate(order.jobs):
            jwhere = f"{where}.jobs[{ji}] ({job.id})"
            if job.id in job_ids:
                bad(jwhere, f"duplicate job id {job.id!r}")
            job_ids.add(job.id)
            local.append(job.id)
            if not job.options:
                bad(jwhere, "job has no processing options")
            pairs = set()
            for k, opt in enumerate(job.options):
                owhere = f"{jwhere}.options[{k}]"
                if opt.machine_id not in machine_ids:
                    bad(owhere, f"option references unknown machine {opt.machine_id!r}")
                if (opt.machine_id, opt.mode_id) in pairs:
                    bad(owhere, f"duplicate option ({opt.machine_id!r}, {opt.mode_id!r})")
                pairs.add((opt.machine_id, opt.mode_id))
                if not (_finite(opt.duration_s) and opt.duration_s > 0):
                    bad(owhere, f"duration_s must be positive, got {opt.duration_s!r}")
                if not _finite(opt.max_profit):
                    bad(owhere, f"max_profit must be a finite number, got {opt.max_profit!r}")

        local_set = set(local)
        edges_ok = True
        for k, (a, b) in enumerate(order.precedence):
            if a not in local_set or b not in local_set:
                bad(f"{where}.precedence[{k}]", f"edge ({a!r}, {b!r}) references a job outside this order")
                edges_ok = False
            elif a == b:
                bad(f"{where}.precedence[{k}]", f"self-loop on {a!r}")
                edges_ok = False
        if edges_ok and len(local_set) == len(local) and _has_cycle(local, list(order.precedence)):
            bad(f"{where}.precedence", "cycle")

    return out


class ScenarioFormatError(ValueError):
    """Malformed scenario document; the message carries a line or field locus."""


def _get(d: Any, key: str, where: str, kind: type | tuple[type, ...], default: Any = ...):
    if not isinstance(d, dict):
        raise ScenarioFormatError(f"{where}: expected an object")
    if key not in d:
        if default is ...:
            raise ScenarioFormatError(f"{where}: missing field {key!r}")
        return default
    value = d[key]
    if kind in (int, float, (int, float)):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioFormatError(f"{where}.{key}: expected a number, got {value!r}")
        return float(value)
    if not isinstance(value, kind):
        raise ScenarioFormatError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}, got {value!r}")
    return value


def scenario_from_dict(doc: Any) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioFormatError("document: expected a JSON object")
    machines = []
    for i, m in enumerate(_get(doc, "machines", "document", list)):
        where = f"machines[{i}]"
        machines.append(Machine(_get(m, "id", where, str), _get(m, "label", where, str, "")))
    groups = []
    for i, g in enumerate(_get(doc, "mutex_groups", "document", list, [])):
        if not isinstance(g, list) or not all(isinstance(x, str) for x in g):
            raise ScenarioFormatError(f"mutex_groups[{i}]: expected an array of machine ids")
        groups.append(MutexGroup(tuple(g)))
    rules = []
    for i, r in enumerate(_get(doc, "gap_rules", "document", list, [])):
        where = f"gap_rules[{i}]"
        rules.append(
            GapRule(
                _get(r, "machine_id", where, str),
                _get(r, "from_class", where, str),
                _get(r, "to_class", where, str),
                _get(r, "gap_s", where, float),
            )
        )
    orders = []
    for i, o in enumerate(_get(doc, "orders", "document", list)):
        where = f"orders[{i}]"
        cdoc = _get(o, "curve", where, dict)
        curve = ValueCurve(
            _get(cdoc, "d_s", f"{where}.curve", float),
            _get(cdoc, "z_s", f"{where}.curve", float),
            _get(cdoc, "penalty_rate", f"{where}.curve", float, 0.0),
        )
        jobs = []
        for j, jd in enumerate(_get(o, "jobs", where, list)):
            jwhere = f"{where}.jobs[{j}]"
            opts = []
            for k, od in enumerate(_get(jd, "options", jwhere, list)):
                owhere = f"{jwhere}.options[{k}]"
                opts.append(
                    ProcessingOption(
                        _get(od, "machine_id", owhere, str),
                        _get(od, "mode_id", owhere, str),
                        _get(od, "duration_s", owhere, float),
                        _get(od, "max_profit", owhere, float),
                    )
                )
            jobs.append(Job(_get(jd, "id", jwhere, str), tuple(opts), _get(jd, "gap_class", jwhere, str, None)))
        prec = []
        for k, e in enumerate(_get(o, "precedence", where, list, [])):
            if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e)):
                raise ScenarioFormatError(f"{where}.precedence[{k}]: expected [pred, succ]")
            prec.append((e[0], e[1]))
        orders.append(
            Order(
                id=_get(o, "id", where, str),
                curve=curve,
                jobs=tuple(jobs),
                arrival_time_s=_get(o, "arrival_time_s", where, float, 0.0),
                precedence=tuple(prec),
            )
        )
    return Scenario(tuple(machines), tuple(orders), tuple(groups), tuple(rules))


def load_scenario(data: bytes | str) -> Scenario:
    """Parse a scenario document; raises ScenarioFormatError on malformed input."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ScenarioFormatError(f"byte {e.start}: not valid UTF-8") from None
    if not data.strip():
        raise ScenarioFormatError("line 1 column 1: empty document")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ScenarioFormatError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    return scenario_from_dict(doc)


def scenario_to_dict(s: Scenario) -> dict:
    def job_doc(j: Job) -> dict:
        d: dict[str, Any] = {"id": j.id}
        if j.gap_class is not None:
            d["gap_class"] = j.gap_class
        d["options"] = [
            {"machine_id": o.machine_id, "mode_id": o.mode_id, "duration_s": o.duration_s, "max_profit": o.max_profit}
            for o in j.options
        ]
        return d

    return {
        "machines": [{"id": m.id, "label": m.label} for m in s.machines],
        "mutex_groups": [list(g.machine_ids) for g in s.mutex_groups],
        "gap_rules": [
            {"machine_id": r.machine_id, "from_class": r.from_class, "to_class": r.to_class, "gap_s": r.gap_s}
            for r in s.gap_rules
        ],
        "orders": [
            {
                "id": o.id,
                "arrival_time_s": o.arrival_time_s,
                "curve": {"d_s": o.curve.d_s, "z_s": o.curve.z_s, "penalty_rate": o.curve.penalty_rate},
                "jobs": [job_doc(j) for j in o.jobs],
                "precedence": [list(e) for e in o.precedence],
            }
            for o in s.orders
        ],
    }


def save_scenario(s: Scenario) -> bytes:
    return (json.dumps(scenario_to_dict(s), indent=2) + "\n").encode("utf-8")
