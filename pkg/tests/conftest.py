import numpy as np
import pytest

from valuesched.model import GapRule, Job, Machine, MutexGroup, Order, ProcessingOption, Scenario
from valuesched.valuecurve import ValueCurve


def one_job_order(oid, jid, options, d=1e9, z=2e9, at=0.0, gap_class=None):
    opts = tuple(ProcessingOption(*o) for o in options)
    return Order(oid, ValueCurve(d, z), (Job(jid, opts, gap_class),), arrival_time_s=at)


def machines(*ids):
    return tuple(Machine(i, i) for i in ids)


def random_scenario(rng, max_jobs=3, max_options=3, max_machines=2, mutex=False, gap=False, chains=True):
    """Small random scenario; integer-ish durations so ties happen."""
    n_m = int(rng.integers(1, max_machines + 1)) if not mutex else max(2, max_machines)
    mids = [f"M{i + 1}" for i in range(n_m)]
    n_jobs = int(rng.integers(1, max_jobs + 1))
    # split jobs into orders; multi-job orders get a random chain
    orders = []
    j = 0
    o = 0
    while j < n_jobs:
        size = int(rng.integers(1, n_jobs - j + 1)) if chains else 1
        jobs = []
        for _ in range(size):
            n_opt = int(rng.integers(1, max_options + 1))
            opts = []
            used = set()
            for k in range(n_opt):
                m = mids[int(rng.integers(0, n_m))]
                mode = f"m{k}"
                used.add((m, mode))
                opts.append(ProcessingOption(m, mode, float(rng.integers(5, 60)), float(rng.integers(1, 50))))
            jobs.append(Job(f"J{j}", tuple(opts), ("A", "B")[int(rng.integers(0, 2))]))
            j += 1
        prec = tuple((jobs[i].id, jobs[i + 1].id) for i in range(len(jobs) - 1) if rng.random() < 0.7)
        at = float(rng.integers(0, 20))
        d = at + float(rng.integers(10, 80))
        z = d + float(rng.integers(10, 80))
        orders.append(Order(f"O{o}", ValueCurve(d, z), tuple(jobs), at, prec))
        o += 1
    groups = (MutexGroup(tuple(mids[:2])),) if mutex and n_m >= 2 else ()
    rules = ()
    if gap:
        rules = (GapRule(mids[0], "A", "B", float(rng.integers(1, 30))), GapRule(mids[-1], "B", "A", float(rng.integers(1, 30))))
    return Scenario(machines(*mids), tuple(orders), groups, rules)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
