"""Command-line driver: solve, bench, validate and oracle subcommands.

Settings come from built-in defaults, then an optional JSON config file whose
keys mirror the long flags (``time_limit_s`` for ``--time-limit-s``, plus the
``route_min``, ``memetic`` and ``cooperation`` parameter groups), then any
flags given explicitly. Statistics are written as one JSON object per line.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import statistics
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

from . import seeding
from .io import InstanceParseError, SolutionError, load_instance, parse_solution, validate_solution_file, write_solution
from .memetic import MAParams, PhaseTwoError, Population, build_initial_population
from .model import Instance, Solution, k_min
from .oracle import OracleRefusal, oracle_solve
from .parallel import CooperationConfig, default_cooperation, run_pha, run_pma
from .routemin import RemoveRouteParams

PHASES = ("routes", "distance", "both")
POPULATION_SHARE = 0.25  # part of the phase-2 budget spent collecting the initial population


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    instance: str | None = None
    phase: str = "both"
    threads: int = 1
    seed: int = 0
    time_limit_s: float = 60.0
    route_time_limit_s: float = 50.0
    ma_time_limit_s: float = 300.0
    out: str | None = None
    stats: str | None = None
    route_min: dict = field(default_factory=dict)
    memetic: dict = field(default_factory=dict)
    cooperation: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.phase not in PHASES:
            raise ConfigError(f"phase must be one of {PHASES}, got {self.phase!r}")
        if not isinstance(self.threads, int) or self.threads < 1:
            raise ConfigError("threads must be a positive integer")
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")
        for name in ("time_limit_s", "route_time_limit_s", "ma_time_limit_s"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or value <= 0:
                raise ConfigError(f"{name} must be a positive number")
        self.route_params()
        self.ma_params()
        if self.cooperation:
            self.cooperation_config(1)

    def route_params(self) -> RemoveRouteParams:
        return _build(RemoveRouteParams, {"time_limit": self.route_time_limit_s, **self.route_min}, "route_min")

    def ma_params(self) -> MAParams:
        return _build(MAParams, {"time_limit": self.ma_time_limit_s, **self.memetic}, "memetic")

    def cooperation_config(self, n: int) -> CooperationConfig:
        base = dataclasses.asdict(default_cooperation(n))
        return _build(CooperationConfig, {**base, **self.cooperation}, "cooperation")


def _build(cls, values: dict, group: str):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown {group} setting(s): {', '.join(unknown)}")
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{group}: {exc}") from exc


def load_config(path: str | Path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return merge_config(RunConfig(), data)


def merge_config(config: RunConfig, values: dict) -> RunConfig:
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown setting(s): {', '.join(unknown)}")
    for group in ("route_min", "memetic", "cooperation"):
        if group in values and not isinstance(values[group], dict):
            raise ConfigError(f"{group} must be an object")
    return dataclasses.replace(config, **values)


class StatsWriter:
    """Append-only JSON-lines records; timestamps strictly increase per component."""

    def __init__(self, path: str | Path | None = None, stream: TextIO | None = None):
        self._fh = open(path, "a") if path is not None else None
        self._stream = stream
        self._last: dict = {}
        self.records: list[dict] = []

    def write(self, record: dict) -> None:
        record = dict(record)
        comp = record.setdefault("component", -1)
        now = record.get("time", time.time())
        last = self._last.get(comp)
        if last is not None and now <= last:
            now = last + 1e-6
        record["time"] = now
        self._last[comp] = now
        self.records.append(record)
        line = json.dumps(record, sort_keys=True)
        for out in (self._fh, self._stream):
            if out is not None:
                out.write(line + "\n")
                out.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def _generation_logger(stats: StatsWriter):
    def log(population: Population) -> None:
        best = population.best()
        stats.write({"event": "generation", "component": 0, "generation": population.generation,
                     "stagnation": population.stagnation, "K": best.k, "T": best.distance,
                     "population": len(population)})
    return log


def phase_two(instance: Instance, start: Solution, config: RunConfig, stats: StatsWriter) -> Solution:
    params = config.ma_params()
    began = time.perf_counter()
    build_budget = POPULATION_SHARE * params.time_limit
    population = build_initial_population(instance, start.k, params.population_size, build_budget, params,
                                          seeding.derive_rng(config.seed, seeding.POPULATION), seeds=[start],
                                          route_params=config.route_params())
    remaining = max(1e-3, params.time_limit - (time.perf_counter() - began))
    params = dataclasses.replace(params, time_limit=remaining)
    return run_pma(population, config.threads, params, config.seed, _generation_logger(stats))


def solve(config: RunConfig, stats: StatsWriter) -> Solution:
    """Run the configured phases and return the final solution (not yet written)."""
    instance = load_instance(config.instance)
    began = time.perf_counter()
    best = run_pha(instance, config.threads, config.cooperation_config(instance.n), config.route_params(),
                   config.time_limit_s, config.seed, on_phase=stats.write)
    if config.phase in ("distance", "both"):
        best = phase_two(instance, best, config, stats)
    stats.write({"event": "summary", "component": -1, "K": best.k, "T": best.distance,
                 "K_min": k_min(instance), "wall_time": time.perf_counter() - began, "threads": config.threads,
                 "phase": config.phase})
    return best


def solve_command(config: RunConfig, stdout: TextIO = sys.stdout, stderr: TextIO = sys.stderr) -> int:
    """Exit 0 iff a complete solution was produced, written and re-validated."""
    try:
        config.validate()
        if not config.instance:
            raise ConfigError("no instance given")
    except ConfigError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    stats = StatsWriter(config.stats)
    try:
        try:
            best = solve(config, stats)
        except (OSError, InstanceParseError) as exc:
            print(f"error: cannot load instance: {exc}", file=stderr)
            return 2
        except PhaseTwoError as exc:
            print(f"error: {exc}", file=stderr)
            return 1
        try:
            text = write_solution(best)
        except SolutionError as exc:
            print(f"error: {exc}", file=stderr)
            return 1
        report = validate_solution_file(best.instance, text)
        if not report.feasible:
            print("error: self-check failed: " + "; ".join(report.violations), file=stderr)
            return 1
        if config.out:
            Path(config.out).write_text(text)
        else:
            stdout.write(text)
        return 0
    finally:
        stats.close()


def bench_command(config: RunConfig, p_list: Sequence[int], repeats: int, stdout: TextIO = sys.stdout) -> list[dict]:
    """Time the memetic phase for each worker count on one shared starting population.

    Returns one summary row per worker count with the median wall time, the
    speedup against one worker and the median distance. Each run is also
    written to the stats file.
    """
    config.validate()
    instance = load_instance(config.instance)
    params = config.ma_params()
    stats = StatsWriter(config.stats)
    try:
        start = run_pha(instance, 1, config.cooperation_config(instance.n), config.route_params(),
                        config.time_limit_s, config.seed)
        base = build_initial_population(instance, start.k, params.population_size, POPULATION_SHARE * params.time_limit,
                                        params, seeding.derive_rng(config.seed, seeding.POPULATION), seeds=[start],
                                        route_params=config.route_params())
        times: dict[int, list[float]] = {p: [] for p in p_list}
        quality: dict[int, list[float]] = {p: [] for p in p_list}
        for rep in range(repeats):
            seed = seeding.derive_seed(config.seed, seeding.BENCH, rep)
            for p in p_list:
                population = Population([m.copy() for m in base.members])
                t0 = time.perf_counter()
                best = run_pma(population, p, params, seed)
                wall = time.perf_counter() - t0
                times[p].append(wall)
                quality[p].append(best.distance)
                stats.write({"event": "bench_run", "component": p, "repeat": rep, "threads": p, "wall_time": wall,
                             "K": best.k, "T": best.distance, "generations": population.generation})
        reference = statistics.median(times[1]) if 1 in times else None
        rows = []
        for p in p_list:
            median = statistics.median(times[p])
            speedup = reference / median if reference is not None and median > 0 else None
            rows.append({"threads": p, "median_time": median, "speedup": speedup,
                         "median_T": statistics.median(quality[p]), "K": base.k})
        for row in rows:
            stats.write({"event": "bench_summary", "component": -1, **row})
        print(f"{'p':>3} {'median s':>10} {'S(p)':>7} {'median T':>12}", file=stdout)
        for row in rows:
            s = "-" if row["speedup"] is None else f"{row['speedup']:.2f}"
            print(f"{row['threads']:>3} {row['median_time']:>10.3f} {s:>7} {row['median_T']:>12.2f}", file=stdout)
        return rows
    finally:
        stats.close()


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance")
    common.add_argument("--phase", choices=PHASES)
    common.add_argument("--threads", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--time-limit-s", type=float, help="phase-1 budget")
    common.add_argument("--route-time-limit-s", type=float, help="budget of one route removal attempt")
    common.add_argument("--ma-time-limit-s", type=float, help="phase-2 budget")
    common.add_argument("--config", help="JSON file with the same settings")
    common.add_argument("--out", help="solution file (default: stdout)")
    common.add_argument("--stats", help="JSON-lines statistics file")
    parser = argparse.ArgumentParser(prog="vrptw-pma", description="Two-phase parallel VRPTW solver.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="minimize fleet size, then distance")
    bench = sub.add_parser("bench", parents=[common], help="phase-2 speedup table")
    bench.add_argument("--p-list", default="1,2,4", help="comma-separated worker counts")
    bench.add_argument("--repeats", type=int, default=5)
    validate = sub.add_parser("validate", help="check a solution file")
    validate.add_argument("--instance", required=True)
    validate.add_argument("--solution", required=True)
    oracle = sub.add_parser("oracle", help="exact (K, T) for a tiny instance")
    oracle.add_argument("--instance", required=True)
    oracle.add_argument("--max-n", type=int, default=9)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    flags = {}
    for name in ("instance", "phase", "threads", "seed", "time_limit_s", "route_time_limit_s", "ma_time_limit_s",
                 "out", "stats"):
        value = getattr(args, name, None)
        if value is not None:
            flags[name] = value
    return merge_config(config, flags)


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "validate":
        try:
            instance = load_instance(args.instance)
            report = validate_solution_file(instance, parse_solution(Path(args.solution).read_text()))
        except (OSError, InstanceParseError, SolutionError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        for problem in report.violations:
            print(problem)
        print(f"{'feasible' if report.feasible else 'infeasible'} K={report.vehicles} T={report.distance:.2f}")
        return 0 if report.feasible else 1
    if args.command == "oracle":
        try:
            k, t = oracle_solve(load_instance(args.instance), args.max_n)
        except (OSError, InstanceParseError, OracleRefusal) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(f"K={k} T={t:.4f}")
        return 0
    try:
        config = config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.command == "solve":
        return solve_command(config)
    try:
        p_list = [int(tok) for tok in args.p_list.split(",") if tok.strip()]
        if not p_list or min(p_list) < 1 or args.repeats < 1:
            raise ValueError
    except ValueError:
        print("error: --p-list needs positive integers and --repeats must be positive", file=sys.stderr)
        return 2
    try:
        bench_command(config, p_list, args.repeats)
    except (ConfigError, OSError, InstanceParseError, PhaseTwoError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
