"""Exhaustive Pareto front for tiny instances.

Enumerates every option assignment, every dispatch permutation and (for the
selection variant) every inclusion subset, evaluates each through the list
scheduler and keeps the non-dominated objective vectors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from valuesched.encoding import Variant
from valuesched.model import Scenario
from valuesched.scheduler import ObjectiveVector, compile_scenario


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleLimits:
    max_jobs: int = 4
    max_options: int = 3
    cap: int = 10**6


def enumeration_size(s: Scenario, variant: Variant) -> int:
    cs = compile_scenario(s)
    size = math.prod(cs.domains) * math.factorial(cs.n_jobs)
    if Variant(variant) is Variant.SELECTION:
        size *= 2**cs.n_orders
    return size


def pareto_filter(points) -> list[tuple[float, float]]:
    """Non-dominated (makespan, profit) pairs, makespan ascending, duplicates collapsed."""
    best: dict[float, float] = {}
    for mk, pr in points:
        if mk not in best or pr > best[mk]:
            best[mk] = pr
    front = []
    top = -math.inf
    for mk in sorted(best):
        if best[mk] > top:
            front.append((mk, best[mk]))
            top = best[mk]
    return front


def enumerate_front(s: Scenario, variant: Variant | str, limits: OracleLimits = OracleLimits()) -> list[ObjectiveVector]:
    variant = Variant(variant)
    cs = compile_scenario(s)
    n, m = cs.n_jobs, cs.n_orders
    size = enumeration_size(s, variant)
    if n > limits.max_jobs or max(cs.domains, default=0) > limits.max_options or size > limits.cap:
        raise InstanceTooLarge(
            f"{n} jobs, up to {max(cs.domains, default=0)} options, {size} combinations exceed {limits}"
        )

    subsets = (
        list(itertools.product((True, False), repeat=m)) if variant is Variant.SELECTION else [(True,) * m]
    )
    points = set()
    for alloc in itertools.product(*(range(d) for d in cs.domains)):
        for perm in itertools.permutations(range(n)):
            # the job dispatched k-th (when ready) gets the k-th highest priority
            prio = [0.0] * n
            for rank, j in enumerate(perm):
                prio[j] = 1.0 - (rank + 1) / (n + 1)
            for incl in subsets:
                mk, pr, _ = cs.objectives(alloc, prio, incl)
                points.add((mk, pr))
    return [ObjectiveVector(mk, pr) for mk, pr in pareto_filter(points)]
