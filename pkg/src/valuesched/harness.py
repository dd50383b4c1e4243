"""Experiment harness: scenario generation, D/Z sweeps and order-size trends."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np
from scipy.stats import spearmanr

from valuesched.encoding import Variant
from valuesched.model import (
    GapRule,
    Job,
    Machine,
    MutexGroup,
    Order,
    ProcessingOption,
    Scenario,
    load_scenario,
)
from valuesched.moead import ArchiveEntry, MoeadConfig, ParetoArchive, run
from valuesched.valuecurve import ValueCurve

# (D, Z) value-curve pairs swept in the published comparison table
TABLE2_DZ: tuple[tuple[float, float], ...] = (
    (5000, 10000),
    (5000, 15000),
    (10000, 15000),
    (10000, 20000),
    (15000, 20000),
    (15000, 25000),
    (20000, 25000),
    (20000, 30000),
    (25000, 30000),
    (25000, 35000),
    (30000, 35000),
    (30000, 40000),
    (35000, 40000),
    (35000, 45000),
)

# Machine/mode table of the published example element:
# machine -> [(mode, execution time s, max profit)]
TABLE1_ELEMENT: dict[str, list[tuple[str, float, float]]] = {
    "M1": [("Mode 1", 2833.5, 167.0), ("Mode 2", 2956.2, 168.4), ("Mode 3", 3042.1, 175.9), ("Mode 4", 3174.1, 192.1)],
    "M2": [("Mode 1", 2033.5, 230.0), ("Mode 2", 2156.2, 237.1), ("Mode 3", 2242.1, 238.6), ("Mode 4", 2674.1, 273.1)],
    "M3": [("Mode 1", 1256.2, 481.6), ("Mode 2", 1633.5, 462.1), ("Mode 3", 1842.1, 519.3), ("Mode 4", 1974.1, 596.9)],
}

VARIANTS = (Variant.STANDARD, Variant.SELECTION)


def derive_seed(master: int, *keys: int) -> int:
    """64-bit seed for a sub-task; depends only on (master, keys)."""
    ss = np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def _fmt(x: float) -> str:
    return repr(float(x))


# --------------------------------------------------------------------------
# scenario generation


@dataclass(frozen=True)
class GeneratorSpec:
    element_counts: tuple[int, ...] = tuple(range(7, 17))
    scenarios_per_count: int = 10
    machines: int = 3
    modes_per_machine: int = 4
    duration_range_s: tuple[float, float] = (1200.0, 3200.0)
    # profit multiplier per machine tier, lowest tier (slowest machine) first
    tier_profit: tuple[float, ...] = (1.0, 1.4, 2.8)
    # relative profit gain from the fastest to the slowest mode of a machine
    mode_profit_slope: float = 0.25
    base_profit_range: tuple[float, float] = (140.0, 200.0)
    d_s: float = 30000.0
    z_s: float = 40000.0
    mutex_all: bool = False
    gap_s: float = 0.0
    seed: int = 0

    def check(self) -> None:
        lo, hi = self.duration_range_s
        blo, bhi = self.base_profit_range
        if not self.element_counts or min(self.element_counts) < 1:
            raise ValueError("element_counts must be non-empty and positive")
        if self.scenarios_per_count < 1 or self.machines < 1 or self.modes_per_machine < 1:
            raise ValueError("counts must be positive")
        if not 0 < lo < hi or not 0 < blo <= bhi:
            raise ValueError("ranges must be positive and ordered")
        if not self.d_s < self.z_s:
            raise ValueError("d_s must be below z_s")
        if self.gap_s < 0 or self.mode_profit_slope < 0:
            raise ValueError("gap_s and mode_profit_slope must be non-negative")

    def tier_multipliers(self) -> list[float]:
        k = self.machines
        if len(self.tier_profit) == k:
            return list(self.tier_profit)
        if k == 1:
            return [self.tier_profit[-1]]
        first, last = self.tier_profit[0], self.tier_profit[-1]
        return [first * (last / first) ** (t / (k - 1)) for t in range(k)]


def generate_scenario(spec: GeneratorSpec, size: int, rng: np.random.Generator) -> Scenario:
    """One-job orders on a tiered plant.

    Machine ``M<k>`` has tier ``k-1``; higher tiers run in a lower duration band
    and pay more. Within a machine, longer modes pay more.
    """
    spec.check()
    if size < 1:
        raise ValueError("size must be >= 1")
    k = spec.machines
    lo, hi = spec.duration_range_s
    band = (hi - lo) / k
    mult = spec.tier_multipliers()
    machines = tuple(Machine(f"M{t + 1}", f"tier {t + 1}") for t in range(k))
    width = max(2, len(str(size)))
    curve = ValueCurve(spec.d_s, spec.z_s)

    orders = []
    for e in range(size):
        base = rng.uniform(*spec.base_profit_range)
        options = []
        for t in range(k):
            b_lo = lo + (k - 1 - t) * band
            durations = np.sort(rng.uniform(b_lo, b_lo + band, spec.modes_per_machine))
            for mode, d in enumerate(durations):
                gain = 1.0 + spec.mode_profit_slope * (d - b_lo) / band
                options.append(
                    ProcessingOption(
                        machine_id=f"M{t + 1}",
                        mode_id=f"Mode {mode + 1}",
                        duration_s=round(float(d), 1),
                        max_profit=round(float(base * mult[t] * gain), 1),
                    )
                )
        tag = f"{e + 1:0{width}d}"
        gap_class = ("A", "B")[e % 2] if spec.gap_s > 0 else None
        orders.append(Order(f"E{tag}", curve, (Job(f"J{tag}", tuple(options), gap_class),)))

    groups = (MutexGroup(tuple(m.id for m in machines)),) if spec.mutex_all and k >= 2 else ()
    rules = ()
    if spec.gap_s > 0:
        rules = tuple(
            GapRule(m.id, a, b, spec.gap_s) for m in machines for a, b in (("A", "B"), ("B", "A"))
        )
    return Scenario(machines, tuple(orders), groups, rules)


def scenario_rng(seed: int, size: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(size, index)))


def reference_scenario() -> Scenario:
    """The bundled 14-element reference order book.

    Element E01 is the published example element verbatim. The other 13 are
    scaled copies (size factors 2.0 to 8.0 with +-5% per-option jitter and a
    per-element profit density in [0.85, 1.15]). M1 and M2 form a mutex group,
    so the plant has two parallel lanes: M3 and one of {M1, M2}.
    """
    rng = np.random.default_rng(2019)
    scales = np.linspace(2.0, 8.0, 13)
    machines = (Machine("M1", "machine 1"), Machine("M2", "machine 2"), Machine("M3", "machine 3"))
    curve = ValueCurve(30000.0, 40000.0)

    def element(tag: str, scale: float, density: float, jitter: bool) -> Order:
        options = []
        for mid, modes in TABLE1_ELEMENT.items():
            if jitter:
                durs = sorted(round(d * scale * rng.uniform(0.95, 1.05), 1) for _, d, _ in modes)
                profs = sorted(round(p * scale * density * rng.uniform(0.95, 1.05), 1) for _, _, p in modes)
            else:
                durs = [d for _, d, _ in modes]
                profs = [p for _, _, p in modes]
            for (mode, _, _), d, p in zip(modes, durs, profs):
                options.append(ProcessingOption(mid, mode, float(d), float(p)))
        return Order(f"E{tag}", curve, (Job(f"J{tag}", tuple(options)),))

    orders = [element("01", 1.0, 1.0, jitter=False)]
    for i, scale in enumerate(scales):
        density = rng.uniform(0.85, 1.15)
        orders.append(element(f"{i + 2:02d}", float(scale), float(density), jitter=True))
    return Scenario(machines, tuple(orders), (MutexGroup(("M1", "M2")),))


def load_reference_scenario() -> Scenario:
    data = resources.files("valuesched").joinpath("data/reference_14.json").read_bytes()
    return load_scenario(data)


def with_curve(s: Scenario, d_s: float, z_s: float) -> Scenario:
    """Copy of ``s`` with every order's curve replaced by (d_s, z_s)."""
    orders = tuple(replace(o, curve=ValueCurve(float(d_s), float(z_s), o.curve.penalty_rate)) for o in s.orders)
    return replace(s, orders=orders)


# --------------------------------------------------------------------------
# reporting


def representative_point(archive) -> ArchiveEntry:
    """Max-profit archive entry; ties go to lower makespan, then fewer elements."""
    entries = list(archive)
    if not entries:
        raise ValueError("empty archive has no representative point")
    return min(
        entries,
        key=lambda e: (-e.objectives.total_profit, e.objectives.makespan_s, e.elements_produced),
    )


def _merged_run(s: Scenario, cfg: MoeadConfig, variant: Variant, seeds: list[int]) -> ArchiveEntry:
    merged = ParetoArchive()
    for seed in seeds:
        for e in run(s, replace(cfg, seed=seed), variant):
            merged.add(e)
    return representative_point(merged)


def _map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


@dataclass(frozen=True)
class SweepSpec:
    dz_pairs: tuple[tuple[float, float], ...] = TABLE2_DZ
    variants: tuple[Variant, ...] = VARIANTS
    config: MoeadConfig = field(default_factory=MoeadConfig)
    seeds_per_cell: int = 1

    def check(self) -> None:
        for d, z in self.dz_pairs:
            if not d < z:
                raise ValueError(f"sweep pair D={d}, Z={z} needs D < Z")
        if self.seeds_per_cell < 1:
            raise ValueError("seeds_per_cell must be >= 1")
        self.config.check()


@dataclass(frozen=True)
class SweepRow:
    d_s: float
    z_s: float
    variant: Variant
    profit: float
    makespan_s: float
    elements_produced: int


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["d_s", "z_s", "variant", "profit", "makespan_s", "elements_produced"])
        for r in self.rows:
            w.writerow([_fmt(r.d_s), _fmt(r.z_s), r.variant.value, _fmt(r.profit), _fmt(r.makespan_s), r.elements_produced])
        return buf.getvalue()

    def row(self, d_s: float, z_s: float, variant: Variant) -> SweepRow:
        return next(r for r in self.rows if r.d_s == d_s and r.z_s == z_s and r.variant is Variant(variant))


def _sweep_cell(task) -> SweepRow:
    s, d, z, variant, cfg, seeds = task
    rep = _merged_run(with_curve(s, d, z), cfg, variant, seeds)
    return SweepRow(float(d), float(z), variant, rep.objectives.total_profit, rep.objectives.makespan_s, rep.elements_produced)


def run_sweep(spec: SweepSpec, base: Scenario, workers: int = 1) -> SweepReport:
    spec.check()
    tasks = []
    for r, (d, z) in enumerate(spec.dz_pairs):
        for v, variant in enumerate(spec.variants):
            cell = r * len(spec.variants) + v
            seeds = [derive_seed(spec.config.seed, cell, k) for k in range(spec.seeds_per_cell)]
            tasks.append((base, d, z, Variant(variant), spec.config, seeds))
    return SweepReport(tuple(_map(_sweep_cell, tasks, workers)))


@dataclass(frozen=True)
class TrendPoint:
    size: int
    index: int
    variant: Variant
    profit: float
    makespan_s: float
    elements_produced: int


@dataclass(frozen=True)
class TrendRow:
    size: int
    variant: Variant
    mean_makespan_s: float
    mean_profit: float
    spearman_makespan: float


@dataclass(frozen=True)
class TrendReport:
    rows: tuple[TrendRow, ...]
    points: tuple[TrendPoint, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["size", "variant", "mean_makespan_s", "mean_profit", "spearman_makespan"])
        for r in self.rows:
            w.writerow([r.size, r.variant.value, _fmt(r.mean_makespan_s), _fmt(r.mean_profit), _fmt(r.spearman_makespan)])
        return buf.getvalue()

    def series(self, variant: Variant) -> list[TrendRow]:
        return [r for r in self.rows if r.variant is Variant(variant)]

    def spearman(self, variant: Variant) -> float:
        return self.series(variant)[0].spearman_makespan


def _trend_cell(task) -> list[TrendPoint]:
    spec, size, k, cfg, variants = task
    s = generate_scenario(spec, size, scenario_rng(spec.seed, size, k))
    out = []
    for v, variant in enumerate(variants):
        rep = _merged_run(s, cfg, variant, [derive_seed(cfg.seed, size, k, v)])
        out.append(
            TrendPoint(size, k, variant, rep.objectives.total_profit, rep.objectives.makespan_s, rep.elements_produced)
        )
    return out


def trend_study(
    spec: GeneratorSpec, cfg: MoeadConfig, variants=VARIANTS, workers: int = 1
) -> TrendReport:
    spec.check()
    cfg.check()
    variants = tuple(Variant(v) for v in variants)
    tasks = [(spec, size, k, cfg, variants) for size in spec.element_counts for k in range(spec.scenarios_per_count)]
    points = [p for chunk in _map(_trend_cell, tasks, workers) for p in chunk]

    rows = []
    sizes = sorted(set(spec.element_counts))
    for variant in variants:
        means = []
        for size in sizes:
            pts = [p for p in points if p.size == size and p.variant is variant]
            means.append((size, float(np.mean([p.makespan_s for p in pts])), float(np.mean([p.profit for p in pts]))))
        if len(sizes) >= 2:
            rho = float(spearmanr([m[0] for m in means], [m[1] for m in means]).statistic)
        else:
            rho = float("nan")
        rows.extend(TrendRow(size, variant, mk, pr, rho) for size, mk, pr in means)
    return TrendReport(tuple(rows), tuple(points))
