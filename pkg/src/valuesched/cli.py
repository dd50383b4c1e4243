"""Command-line entry point: ``valuesched <subcommand> ...``.

Exit codes: 0 success, 1 I/O failure, 2 validation or usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from valuesched import harness
from valuesched.encoding import GenomeFormatError, Variant, decode, parse_genome
from valuesched.model import Scenario, ScenarioFormatError, load_scenario, save_scenario, validate_scenario
from valuesched.moead import ConfigError, MoeadConfig, run
from valuesched.scheduler import evaluate

EXIT_IO = 1
EXIT_INVALID = 2


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_scenario(path: str | None) -> Scenario:
    if path is None:
        return harness.load_reference_scenario()
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read scenario {path}: {e.strerror or e}") from None
    try:
        s = load_scenario(data)
    except ScenarioFormatError as e:
        raise CliError(EXIT_INVALID, f"{path}: {e}") from None
    problems = validate_scenario(s)
    if problems:
        raise CliError(EXIT_INVALID, "invalid scenario:\n" + "\n".join(f"  {p}" for p in problems))
    return s


def _write(path: Path, data: str | bytes) -> None:
    """Write via a sibling temp file so a failure leaves no partial output."""
    tmp = path.with_name(path.name + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(data, str):
            data = data.encode("utf-8")
        tmp.write_bytes(data)
        os.replace(tmp, path)
    except OSError as e:
        try:
            tmp.unlink(missing_ok=True)
        except OSError:
            pass
        raise CliError(EXIT_IO, f"cannot write {path}: {e.strerror or e}") from None


def _parse_sizes(text: str) -> tuple[int, ...]:
    sizes: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-", 1)
            sizes.extend(range(int(a), int(b) + 1))
        elif part:
            sizes.append(int(part))
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}")
    return tuple(sizes)


def _read_dz_list(path: str) -> tuple[tuple[float, float], ...]:
    if path == "default":
        return harness.TABLE2_DZ
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read {path}: {e.strerror or e}") from None
    pairs = []
    for n, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#") or line.lower().startswith("d"):
            continue
        try:
            d, z = (float(x) for x in line.replace(";", ",").split(","))
        except ValueError:
            raise CliError(EXIT_INVALID, f"{path}:{n}: expected 'D,Z'") from None
        if not d < z:
            raise CliError(EXIT_INVALID, f"{path}:{n}: D={d} must be below Z={z}")
        pairs.append((d, z))
    if not pairs:
        raise CliError(EXIT_INVALID, f"{path}: no D,Z pairs")
    return tuple(pairs)


def _config(args) -> MoeadConfig:
    cfg = MoeadConfig(
        population=args.pop,
        generations=args.gens,
        neighborhood_t=min(args.neighborhood, args.pop),
        seed=args.seed,
    )
    try:
        cfg.check()
    except ConfigError as e:
        raise CliError(EXIT_INVALID, str(e)) from None
    return cfg


def cmd_optimize(args) -> int:
    s = _read_scenario(args.scenario)
    cfg = _config(args)
    archive = run(s, cfg, args.variant)
    rep = harness.representative_point(archive)
    sched, obj = evaluate(s, decode(rep.chromosome, s))
    out = Path(args.out)
    schedule_out = Path(args.schedule_out) if args.schedule_out else out.with_suffix(".schedule.json")
    doc = sched.to_dict()
    doc["objectives"] = {"makespan_s": obj.makespan_s, "profit": obj.total_profit}
    doc["genome"] = rep.chromosome.to_string()
    _write(out, archive.to_csv())
    _write(schedule_out, json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_generate(args) -> int:
    spec = harness.GeneratorSpec(
        element_counts=args.sizes,
        scenarios_per_count=args.per_size,
        d_s=args.d,
        z_s=args.z,
        mutex_all=args.mutex_all,
        gap_s=args.gap,
        seed=args.seed,
    )
    try:
        spec.check()
    except ValueError as e:
        raise CliError(EXIT_INVALID, str(e)) from None
    out = Path(args.out)
    for size in spec.element_counts:
        for k in range(spec.scenarios_per_count):
            s = harness.generate_scenario(spec, size, harness.scenario_rng(spec.seed, size, k))
            _write(out / f"scenario_{size}_{k}.json", save_scenario(s))
    return 0


def cmd_sweep(args) -> int:
    s = _read_scenario(args.scenario)
    spec = harness.SweepSpec(
        dz_pairs=_read_dz_list(args.dz_list),
        config=_config(args),
        seeds_per_cell=args.seeds_per_cell,
    )
    for d, _ in spec.dz_pairs:
        if any(o.arrival_time_s > d for o in s.orders):
            raise CliError(EXIT_INVALID, f"D={d} is before an order's arrival time")
    report = harness.run_sweep(spec, s, workers=args.threads)
    _write(Path(args.out), report.to_csv())
    return 0


def cmd_trend(args) -> int:
    spec = harness.GeneratorSpec(element_counts=args.sizes, scenarios_per_count=args.per_size, seed=args.seed)
    report = harness.trend_study(spec, _config(args), workers=args.threads)
    _write(Path(args.out), report.to_csv())
    return 0


def cmd_evaluate(args) -> int:
    s = _read_scenario(args.scenario)
    try:
        c = parse_genome(args.genome, s)
    except GenomeFormatError as e:
        raise CliError(EXIT_INVALID, f"bad genome: {e}") from None
    if args.variant is not None and Variant(args.variant) is not c.variant:
        raise CliError(EXIT_INVALID, f"genome is tagged {c.variant.value}, not {args.variant}")
    sched, obj = evaluate(s, decode(c, s))
    doc = sched.to_dict()
    doc["objectives"] = {"makespan_s": obj.makespan_s, "profit": obj.total_profit}
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="valuesched", description="Value-driven manufacturing planning with MOEA/D")
    sub = p.add_subparsers(dest="command", required=True)

    def engine_flags(sp, pop=300, gens=500):
        sp.add_argument("--pop", type=int, default=pop, help="population size (default %(default)s)")
        sp.add_argument("--gens", type=int, default=gens, help="generations (default %(default)s)")
        sp.add_argument("--neighborhood", type=int, default=20, help="neighbourhood size T (default %(default)s)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker processes; never changes results (default: all cores)")

    sp = sub.add_parser("optimize", help="run the optimizer on one scenario")
    sp.add_argument("--scenario", help="scenario JSON (default: bundled 14-element reference)")
    sp.add_argument("--variant", choices=[v.value for v in Variant], default="standard")
    engine_flags(sp)
    sp.add_argument("--out", required=True, help="archive CSV path")
    sp.add_argument("--schedule-out", help="representative schedule JSON (default: <out>.schedule.json)")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("generate", help="write synthetic scenario files")
    sp.add_argument("--sizes", type=_parse_sizes, default=tuple(range(7, 17)), help="e.g. 7-16 or 7,10,14")
    sp.add_argument("--per-size", type=int, default=10)
    sp.add_argument("--d", type=float, default=30000.0, help="plateau end D in seconds")
    sp.add_argument("--z", type=float, default=40000.0, help="zero point Z in seconds")
    sp.add_argument("--mutex-all", action="store_true", help="put all machines in one mutex group")
    sp.add_argument("--gap", type=float, default=0.0, help="cleaning gap between alternating job classes")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("sweep", help="D/Z sweep over both variants")
    sp.add_argument("--scenario", help="scenario JSON (default: bundled 14-element reference)")
    sp.add_argument("--dz-list", default="default", help="file of 'D,Z' lines, or 'default'")
    sp.add_argument("--seeds-per-cell", type=int, default=1)
    engine_flags(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("trend", help="order-size trend study over generated scenarios")
    sp.add_argument("--sizes", type=_parse_sizes, default=tuple(range(7, 17)))
    sp.add_argument("--per-size", type=int, default=10)
    engine_flags(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_trend)

    sp = sub.add_parser("evaluate", help="schedule one genome and print it as JSON")
    sp.add_argument("--scenario", help="scenario JSON (default: bundled 14-element reference)")
    sp.add_argument("--genome", required=True, help="e.g. standard,0,2,0.5,0.25")
    sp.add_argument("--variant", choices=[v.value for v in Variant])
    sp.set_defaults(func=cmd_evaluate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"valuesched: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
