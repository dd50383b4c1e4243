"""Value-encoded chromosomes and their variation operators.

A chromosome carries one allocation gene (index into the job's processing
options, i.e. machine and mode together) and one priority gene per job, in
global job order. The selection variant appends one inclusion gene per order.

The ``*_from_uniforms`` functions are the actual operators; they consume
pre-drawn U[0,1) numbers so the engine can hand each offspring a fixed slice
of a per-generation random block.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from valuesched.model import Scenario
from valuesched.scheduler import DecodedGenome, compile_scenario


class Variant(str, enum.Enum):
    STANDARD = "standard"
    SELECTION = "selection"


class GenomeFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Chromosome:
    variant: Variant
    alloc: tuple[int, ...]
    prio: tuple[float, ...]
    incl: tuple[bool, ...] | None
    domains: tuple[int, ...]

    def __len__(self) -> int:
        return 2 * len(self.alloc) + (len(self.incl) if self.incl is not None else 0)

    def is_valid(self) -> bool:
        if len(self.alloc) != len(self.prio) or len(self.alloc) != len(self.domains):
            return False
        if (self.variant is Variant.SELECTION) != (self.incl is not None):
            return False
        if not all(isinstance(a, int) and 0 <= a < d for a, d in zip(self.alloc, self.domains)):
            return False
        return all(0.0 <= p < 1.0 for p in self.prio)

    def to_string(self) -> str:
        genes = [str(a) for a in self.alloc] + [repr(float(p)) for p in self.prio]
        if self.incl is not None:
            genes += ["1" if x else "0" for x in self.incl]
        return ",".join([self.variant.value, *genes])


def _incl_bits(c: Chromosome, m: int) -> tuple[bool, ...]:
    return c.incl if c.incl is not None else (True,) * m


def random_chromosome(s: Scenario, variant: Variant, rng: np.random.Generator) -> Chromosome:
    cs = compile_scenario(s)
    n, m = cs.n_jobs, cs.n_orders
    variant = Variant(variant)
    u = rng.random(2 * n + m).tolist()
    return chromosome_from_uniforms(cs.domains, m, variant, u)


def chromosome_from_uniforms(domains, m: int, variant: Variant, u) -> Chromosome:
    n = len(domains)
    alloc = tuple(min(int(u[i] * d), d - 1) for i, d in enumerate(domains))
    prio = tuple(u[n : 2 * n])
    incl = tuple(x < 0.5 for x in u[2 * n : 2 * n + m]) if variant is Variant.SELECTION else None
    return Chromosome(variant, alloc, prio, incl, tuple(domains))


def crossover(a: Chromosome, b: Chromosome, rng: np.random.Generator) -> Chromosome:
    """Uniform crossover; each gene comes from ``a`` or ``b`` with probability 1/2."""
    return crossover_from_uniforms(a, b, rng.random(len(a)).tolist())


def crossover_from_uniforms(a: Chromosome, b: Chromosome, mask) -> Chromosome:
    if a.variant is not b.variant or a.domains != b.domains:
        raise ValueError("parents have different shapes")
    n = len(a.alloc)
    alloc = tuple(x if u < 0.5 else y for x, y, u in zip(a.alloc, b.alloc, mask))
    prio = tuple(x if u < 0.5 else y for x, y, u in zip(a.prio, b.prio, mask[n:]))
    incl = None
    if a.incl is not None:
        incl = tuple(x if u < 0.5 else y for x, y, u in zip(a.incl, b.incl, mask[2 * n :]))
    return Chromosome(a.variant, alloc, prio, incl, a.domains)


def mutate(c: Chromosome, rate: float, rng: np.random.Generator) -> Chromosome:
    """Resample each gene from its full domain with probability ``rate``."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"mutation rate must be in [0, 1], got {rate}")
    L = len(c)
    return mutate_from_uniforms(c, rate, rng.random(L).tolist(), rng.random(L).tolist())


def mutate_from_uniforms(c: Chromosome, rate: float, coins, values) -> Chromosome:
    hits = [k for k, u in enumerate(coins) if u < rate]
    if not hits:
        return c
    n = len(c.alloc)
    alloc, prio = list(c.alloc), list(c.prio)
    incl = list(c.incl) if c.incl is not None else None
    for k in hits:
        if k < n:
            d = c.domains[k]
            alloc[k] = min(int(values[k] * d), d - 1)
        elif k < 2 * n:
            prio[k - n] = values[k]
        else:
            incl[k - 2 * n] = not incl[k - 2 * n]
    return Chromosome(c.variant, tuple(alloc), tuple(prio), tuple(incl) if incl is not None else None, c.domains)


def decode(c: Chromosome, s: Scenario) -> DecodedGenome:
    cs = compile_scenario(s)
    if len(c.alloc) != cs.n_jobs or (c.incl is not None and len(c.incl) != cs.n_orders):
        raise ValueError("chromosome shape does not match scenario")
    return DecodedGenome(
        allocation=dict(zip(cs.job_ids, c.alloc)),
        priority=dict(zip(cs.job_ids, c.prio)),
        included=dict(zip(cs.order_ids, _incl_bits(c, cs.n_orders))),
    )


def parse_genome(text: str, s: Scenario) -> Chromosome:
    """Inverse of Chromosome.to_string for scenario ``s``."""
    cs = compile_scenario(s)
    n, m = cs.n_jobs, cs.n_orders
    parts = [p.strip() for p in text.strip().split(",")]
    try:
        variant = Variant(parts[0])
    except ValueError:
        raise GenomeFormatError(f"unknown variant tag {parts[0]!r}") from None
    genes = parts[1:]
    want = 2 * n + (m if variant is Variant.SELECTION else 0)
    if len(genes) != want:
        raise GenomeFormatError(f"expected {want} genes for {variant.value}, got {len(genes)}")
    try:
        alloc = tuple(int(x) for x in genes[:n])
        prio = tuple(float(x) for x in genes[n : 2 * n])
    except ValueError as e:
        raise GenomeFormatError(str(e)) from None
    incl = None
    if variant is Variant.SELECTION:
        if any(x not in ("0", "1") for x in genes[2 * n :]):
            raise GenomeFormatError("inclusion genes must be 0 or 1")
        incl = tuple(x == "1" for x in genes[2 * n :])
    c = Chromosome(variant, alloc, prio, incl, cs.domains)
    if not c.is_valid() or any(math.isnan(p) for p in prio):
        raise GenomeFormatError("gene out of range")
    return c
