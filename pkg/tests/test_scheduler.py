import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from valuesched.encoding import Variant, decode, random_chromosome
from valuesched.model import GapRule, Job, MutexGroup, Order, ProcessingOption, Scenario
from valuesched.scheduler import DecodedGenome, ObjectiveVector, build_schedule, evaluate
from valuesched.valuecurve import ValueCurve

from conftest import machines, one_job_order, random_scenario
from feasibility import violations

BIG = ValueCurve(1e9, 2e9)


def genome(alloc, prio, included=None, orders=()):
    return DecodedGenome(alloc, prio, included or {o: True for o in orders})


def span(sched, jid):
    p = sched.placements[jid]
    return (p.start_s, p.end_s)


def test_single_job():
    s = Scenario(machines("M1"), (one_job_order("O1", "J1", [("M1", "a", 100.0, 1.0)]),))
    sched = build_schedule(s, genome({"J1": 0}, {"J1": 0.5}, orders=["O1"]))
    assert span(sched, "J1") == (0.0, 100.0)
    assert sched.makespan_s == 100.0


def test_priority_dispatch_order():
    s = Scenario(
        machines("M1"),
        (
            one_job_order("O1", "J1", [("M1", "a", 100.0, 1.0)]),
            one_job_order("O2", "J2", [("M1", "a", 50.0, 1.0)]),
        ),
    )
    sched = build_schedule(s, genome({"J1": 0, "J2": 0}, {"J1": 0.2, "J2": 0.9}, orders=["O1", "O2"]))
    assert span(sched, "J2") == (0.0, 50.0)
    assert span(sched, "J1") == (50.0, 150.0)
    assert sched.makespan_s == 150.0


def test_equal_priority_breaks_ties_by_global_index():
    s = Scenario(
        machines("M1"),
        (
            one_job_order("O2", "J2", [("M1", "a", 50.0, 1.0)]),
            one_job_order("O1", "J1", [("M1", "a", 100.0, 1.0)]),
        ),
    )
    sched = build_schedule(s, genome({"J1": 0, "J2": 0}, {"J1": 0.5, "J2": 0.5}, orders=["O1", "O2"]))
    assert span(sched, "J1") == (0.0, 100.0)
    assert span(sched, "J2") == (100.0, 150.0)


def test_precedence_chain():
    jobs = (
        Job("J1", (ProcessingOption("M1", "a", 100.0, 1.0),)),
        Job("J2", (ProcessingOption("M2", "a", 100.0, 1.0),)),
    )
    s = Scenario(machines("M1", "M2"), (Order("O1", BIG, jobs, 0.0, (("J1", "J2"),)),))
    # J2 has the higher priority but is not ready until J1 ends
    sched = build_schedule(s, genome({"J1": 0, "J2": 0}, {"J1": 0.1, "J2": 0.9}, orders=["O1"]))
    assert span(sched, "J1") == (0.0, 100.0)
    assert span(sched, "J2") == (100.0, 200.0)


def test_gap_rule():
    s = Scenario(
        machines("M1"),
        (
            one_job_order("O1", "JA", [("M1", "a", 100.0, 1.0)], gap_class="classA"),
            one_job_order("O2", "JB", [("M1", "a", 100.0, 1.0)], gap_class="classB"),
        ),
        gap_rules=(GapRule("M1", "classA", "classB", 30.0),),
    )
    sched = build_schedule(s, genome({"JA": 0, "JB": 0}, {"JA": 0.9, "JB": 0.1}, orders=["O1", "O2"]))
    assert span(sched, "JA") == (0.0, 100.0)
    assert span(sched, "JB") == (130.0, 230.0)
    # the rule is directional: B then A needs no gap
    sched = build_schedule(s, genome({"JA": 0, "JB": 0}, {"JA": 0.1, "JB": 0.9}, orders=["O1", "O2"]))
    assert span(sched, "JA") == (100.0, 200.0)


def test_mutex_group_serializes():
    s = Scenario(
        machines("M1", "M2"),
        (
            one_job_order("O1", "J1", [("M1", "a", 100.0, 1.0)]),
            one_job_order("O2", "J2", [("M2", "a", 100.0, 1.0)]),
        ),
        mutex_groups=(MutexGroup(("M1", "M2")),),
    )
    sched = build_schedule(s, genome({"J1": 0, "J2": 0}, {"J1": 0.9, "J2": 0.1}, orders=["O1", "O2"]))
    assert span(sched, "J1") == (0.0, 100.0)
    assert span(sched, "J2") == (100.0, 200.0)
    # without the group both run at once
    free = Scenario(s.machines, s.orders)
    sched = build_schedule(free, genome({"J1": 0, "J2": 0}, {"J1": 0.9, "J2": 0.1}, orders=["O1", "O2"]))
    assert span(sched, "J2") == (0.0, 100.0)


def test_release_time():
    s = Scenario(machines("M1"), (one_job_order("O1", "J1", [("M1", "a", 10.0, 1.0)], d=100, z=200, at=40.0),))
    assert span(build_schedule(s, genome({"J1": 0}, {"J1": 0.5}, orders=["O1"])), "J1") == (40.0, 50.0)


def test_table_element_on_plateau():
    s = Scenario(
        machines("M3"),
        (one_job_order("E1", "J1", [("M3", "Mode 1", 1256.2, 481.6)], d=30000, z=40000),),
    )
    sched, obj = evaluate(s, genome({"J1": 0}, {"J1": 0.3}, orders=["E1"]))
    assert obj == ObjectiveVector(1256.2, 481.6)
    assert sched.order_completion == {"E1": 1256.2}


def test_excluded_only_order_gives_empty_schedule():
    s = Scenario(machines("M1"), (one_job_order("O1", "J1", [("M1", "a", 10.0, 5.0)], d=100, z=200),))
    sched, obj = evaluate(s, genome({"J1": 0}, {"J1": 0.5}, {"O1": False}))
    assert obj == ObjectiveVector(0.0, 0.0)
    assert sched.elements_produced == 0 and sched.placements == {}


def test_two_orders_share_machine_with_decay():
    s = Scenario(
        machines("M1"),
        tuple(one_job_order(o, j, [("M1", "a", 100.0, 100.0)], d=150, z=250) for o, j in (("O1", "J1"), ("O2", "J2"))),
    )
    for p1, p2 in ((0.9, 0.1), (0.1, 0.9)):
        sched, obj = evaluate(s, genome({"J1": 0, "J2": 0}, {"J1": p1, "J2": p2}, orders=["O1", "O2"]))
        assert sorted(sched.order_completion.values()) == [100.0, 200.0]
        assert obj == ObjectiveVector(200.0, 150.0)


def test_multi_job_order_completes_at_last_job():
    jobs = (
        Job("J1", (ProcessingOption("M1", "a", 100.0, 60.0),)),
        Job("J2", (ProcessingOption("M2", "a", 50.0, 40.0),)),
    )
    s = Scenario(machines("M1", "M2"), (Order("O1", ValueCurve(75, 125), jobs),))
    sched, obj = evaluate(s, genome({"J1": 0, "J2": 0}, {"J1": 0.5, "J2": 0.4}, orders=["O1"]))
    assert sched.order_completion == {"O1": 100.0}
    # (60 + 40) * (125 - 100) / (125 - 75)
    assert obj.total_profit == pytest.approx(50.0)


def test_schedule_export_fields():
    s = Scenario(machines("M1"), (one_job_order("O1", "J1", [("M1", "a", 10.0, 5.0)], d=100, z=200),))
    doc = build_schedule(s, genome({"J1": 0}, {"J1": 0.5}, orders=["O1"])).to_dict()
    assert set(doc) == {"placements", "order_completion", "makespan_s", "total_profit", "elements_produced"}
    assert doc["placements"] == [{"job_id": "J1", "machine_id": "M1", "mode_id": "a", "start_s": 0.0, "end_s": 10.0}]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans(), st.booleans(), st.sampled_from(list(Variant)))
def test_random_schedules_are_feasible(seed, mutex, gap, variant):
    rng = np.random.default_rng(seed)
    s = random_scenario(rng, max_jobs=6, max_options=3, max_machines=3, mutex=mutex, gap=gap)
    g = decode(random_chromosome(s, variant, rng), s)
    sched, obj = evaluate(s, g)
    assert violations(s, g, sched) == []
    assert evaluate(s, g) == (sched, obj)
