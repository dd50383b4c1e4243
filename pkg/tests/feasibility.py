"""Independent checks of the scheduler's feasibility invariants."""

from valuesched.scheduler import Schedule


def _overlap(a, b):
    return a.start_s < b.end_s and b.start_s < a.end_s


def violations(s, g, sched: Schedule, tol=1e-9):
    out = []
    jobs = {j.id: (o, j) for o in s.orders for j in o.jobs}
    placed = sched.placements
    for jid, p in placed.items():
        o, j = jobs[jid]
        opt = j.options[g.allocation[jid]]
        if (p.machine_id, p.mode_id) != (opt.machine_id, opt.mode_id):
            out.append(f"{jid}: wrong option")
        if abs(p.end_s - (p.start_s + opt.duration_s)) > tol:
            out.append(f"{jid}: end != start + duration")
        if p.start_s < o.arrival_time_s - tol:
            out.append(f"{jid}: starts before release")
    for o in s.orders:
        inc = g.included[o.id]
        for j in o.jobs:
            if inc != (j.id in placed):
                out.append(f"{j.id}: inclusion mismatch")
        if inc:
            for a, b in o.precedence:
                if placed[b].start_s < placed[a].end_s - tol:
                    out.append(f"precedence {a}->{b} violated")
    ps = list(placed.values())
    for i, a in enumerate(ps):
        for b in ps[i + 1 :]:
            if a.machine_id == b.machine_id and _overlap(a, b):
                out.append(f"{a.job_id}/{b.job_id}: machine overlap")
            for grp in s.mutex_groups:
                if a.machine_id in grp.machine_ids and b.machine_id in grp.machine_ids and _overlap(a, b):
                    out.append(f"{a.job_id}/{b.job_id}: mutex overlap")
    classes = {j.id: j.job_class for o in s.orders for j in o.jobs}
    for m in s.machines:
        seq = sorted((p for p in ps if p.machine_id == m.id), key=lambda p: p.start_s)
        for a, b in zip(seq, seq[1:]):
            for r in s.gap_rules:
                if r.machine_id == m.id and r.from_class == classes[a.job_id] and r.to_class == classes[b.job_id]:
                    if b.start_s - a.end_s < r.gap_s - tol:
                        out.append(f"{a.job_id}->{b.job_id}: gap {r.gap_s} not respected")
    expected_mk = max((p.end_s for p in ps), default=0.0)
    if sched.makespan_s != expected_mk:
        out.append("makespan mismatch")
    return out
