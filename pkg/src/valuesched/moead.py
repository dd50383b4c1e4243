"""MOEA/D over (makespan, -profit) with a non-dominated external archive.

Each subproblem owns an evenly spaced weight vector and an incumbent. Every
generation visits the subproblems in index order: two parents come from the
subproblem's neighbourhood, the child is evaluated by the list scheduler, the
ideal/nadir estimates are updated and the child replaces up to
``replacement_limit`` neighbours it beats on their own Tchebycheff score.

Randomness: generation ``g`` (0 = initialisation) owns one PCG64 stream
seeded by ``SeedSequence(seed, spawn_key=(g,))``. A fixed-width block of
uniforms is drawn per generation and row ``i`` belongs to subproblem ``i``,
so results do not depend on how offspring are evaluated.
"""

from __future__ import annotations

import bisect
import csv
import io
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from valuesched.encoding import (
    Chromosome,
    Variant,
    chromosome_from_uniforms,
    crossover_from_uniforms,
    mutate_from_uniforms,
)
from valuesched.model import Scenario
from valuesched.scheduler import ObjectiveVector, compile_scenario


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class MoeadConfig:
    population: int = 300
    generations: int = 500
    neighborhood_t: int = 20
    replacement_limit: int = 2
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # None -> 1 / chromosome length
    seed: int = 0

    def check(self) -> None:
        if self.population < 2:
            raise ConfigError(f"population must be >= 2, got {self.population}")
        if not 2 <= self.neighborhood_t <= self.population:
            raise ConfigError(
                f"neighborhood_t must be in [2, population={self.population}], got {self.neighborhood_t}"
            )
        if self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")
        if self.replacement_limit < 1:
            raise ConfigError(f"replacement_limit must be >= 1, got {self.replacement_limit}")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ConfigError(f"crossover_rate must be in [0, 1], got {self.crossover_rate}")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigError(f"mutation_rate must be in [0, 1], got {self.mutation_rate}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


def init_weights(population: int) -> list[tuple[float, float]]:
    if population < 2:
        raise ConfigError(f"population must be >= 2, got {population}")
    n = population - 1
    return [(i / n, 1.0 - i / n) for i in range(population)]


def neighborhoods(weights: list[tuple[float, float]], t: int) -> list[list[int]]:
    w = np.asarray(weights)
    dist = np.linalg.norm(w[:, None, :] - w[None, :, :], axis=2)
    return [np.argsort(row, kind="stable")[:t].tolist() for row in dist]


def tchebycheff(f, w, z) -> float:
    return max(wj * abs(fj - zj) for fj, wj, zj in zip(f, w, z))


@dataclass(frozen=True)
class ArchiveEntry:
    chromosome: Chromosome
    objectives: ObjectiveVector
    elements_produced: int


class ParetoArchive:
    """Mutually non-dominated (makespan min, profit max) points.

    Kept sorted by makespan; in two objectives that forces profit to be
    strictly increasing along the list, so insertion is a bisect plus the
    removal of one contiguous dominated run.
    """

    def __init__(self, entries: Iterable[ArchiveEntry] = ()):
        self._ms: list[float] = []
        self._entries: list[ArchiveEntry] = []
        for e in entries:
            self.add(e)

    def add(self, entry: ArchiveEntry) -> bool:
        m = entry.objectives.makespan_s
        p = entry.objectives.total_profit
        ms = self._ms
        lo = bisect.bisect_left(ms, m)
        if lo > 0 and self._entries[lo - 1].objectives.total_profit >= p:
            return False
        if lo < len(ms) and ms[lo] == m and self._entries[lo].objectives.total_profit >= p:
            return False
        hi = lo
        while hi < len(ms) and self._entries[hi].objectives.total_profit <= p:
            hi += 1
        self._ms[lo:hi] = [m]
        self._entries[lo:hi] = [entry]
        return True

    def __iter__(self) -> Iterator[ArchiveEntry]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> list[ArchiveEntry]:
        return list(self._entries)

    def points(self) -> list[tuple[float, float]]:
        return [(e.objectives.makespan_s, e.objectives.total_profit) for e in self._entries]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["makespan_s", "profit", "elements_produced", "genome"])
        for e in self._entries:
            w.writerow(
                [
                    repr(e.objectives.makespan_s),
                    repr(e.objectives.total_profit),
                    e.elements_produced,
                    e.chromosome.to_string(),
                ]
            )
        return buf.getvalue()


@dataclass
class RunState:
    """What an observer sees after each generation."""

    generation: int
    ideal: tuple[float, float]
    nadir: tuple[float, float]
    archive: ParetoArchive


def generation_rng(seed: int, generation: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(generation,))))


def run(
    s: Scenario,
    cfg: MoeadConfig,
    variant: Variant | str,
    observer: Callable[[RunState], None] | None = None,
) -> ParetoArchive:
    cfg.check()
    variant = Variant(variant)
    cs = compile_scenario(s)
    n, m = cs.n_jobs, cs.n_orders
    L = 2 * n + (m if variant is Variant.SELECTION else 0)
    N, T = cfg.population, cfg.neighborhood_t
    rate = cfg.mutation_rate if cfg.mutation_rate is not None else 1.0 / max(L, 1)
    selection = variant is Variant.SELECTION
    all_in = [True] * m

    weights = init_weights(N)
    nbrs = neighborhoods(weights, T)
    archive = ParetoArchive()

    def evaluate(c: Chromosome) -> tuple[float, float, int]:
        mk, pr, produced = cs.objectives(c.alloc, c.prio, c.incl if selection else all_in)
        archive.add(ArchiveEntry(c, ObjectiveVector(mk, pr), produced))
        return mk, -pr, produced

    block = generation_rng(cfg.seed, 0).random((N, 2 * n + m)).tolist()
    pop = [chromosome_from_uniforms(cs.domains, m, variant, row) for row in block]
    fit = [evaluate(c)[:2] for c in pop]
    ideal = [min(f[0] for f in fit), min(f[1] for f in fit)]
    nadir = [max(f[0] for f in fit), max(f[1] for f in fit)]
    if observer is not None:
        observer(RunState(0, tuple(ideal), tuple(nadir), archive))

    # per-row layout: parent draws (2), crossover coin (1), crossover mask (L),
    # mutation coins (L), mutation values (L), replacement order keys (T)
    width = 3 + 3 * L + T
    o_mask, o_coin, o_val, o_rep = 3, 3 + L, 3 + 2 * L, 3 + 3 * L

    for gen in range(1, cfg.generations + 1):
        block = generation_rng(cfg.seed, gen).random((N, width)).tolist()
        for i in range(N):
            u = block[i]
            nb = nbrs[i]
            a = int(u[0] * T)
            b = int(u[1] * (T - 1))
            if b >= a:
                b += 1
            pa, pb = pop[nb[a]], pop[nb[b]]
            if u[2] < cfg.crossover_rate:
                child = crossover_from_uniforms(pa, pb, u[o_mask:o_coin])
            else:
                child = pa
            child = mutate_from_uniforms(child, rate, u[o_coin:o_val], u[o_val:o_rep])
            f = evaluate(child)[:2]

            for j in (0, 1):
                if f[j] < ideal[j]:
                    ideal[j] = f[j]
                if f[j] > nadir[j]:
                    nadir[j] = f[j]
            s0 = nadir[0] - ideal[0] or 1.0
            s1 = nadir[1] - ideal[1] or 1.0
            c0 = (f[0] - ideal[0]) / s0
            c1 = (f[1] - ideal[1]) / s1

            order = sorted(range(T), key=u[o_rep:].__getitem__)
            replaced = 0
            for k in order:
                idx = nb[k]
                w0, w1 = weights[idx]
                a0, a1 = w0 * c0, w1 * c1
                g_child = a0 if a0 > a1 else a1
                inc = fit[idx]
                b0, b1 = w0 * (inc[0] - ideal[0]) / s0, w1 * (inc[1] - ideal[1]) / s1
                g_inc = b0 if b0 > b1 else b1
                if g_child < g_inc:
                    pop[idx] = child
                    fit[idx] = f
                    replaced += 1
                    if replaced >= cfg.replacement_limit:
                        break
        if observer is not None:
            observer(RunState(gen, tuple(ideal), tuple(nadir), archive))

    return archive
