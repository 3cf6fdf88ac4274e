"""Cooperating parallel components for both phases.

Phase 1 runs ``p`` route minimizers from the singleton solution. Each one
calls RemoveRoute ``delta`` times, then all meet at a barrier where solutions
flow along a chain (optionally closed into a ring). Phase 2 spreads the
per-pair child computations of each memetic generation over ``p`` worker
processes.

Workers are separate processes that receive the instance once through the
pool initializer; solutions cross the boundary as plain route lists.
"""

from __future__ import annotations

import math
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

from . import seeding
from .memetic import MAParams, Population, child_task, run_memetic
from .model import Instance, Solution, compare_cost, k_min
from .routemin import RemoveRouteParams, RouteMinimizer

CHAIN = "chain"
CYCLIC = "cyclic"
CONSTANT = "constant"
RARE = "rare"
FREQUENT = "frequent"
ADAPTIVE = "adaptive"
MODES = (CONSTANT, RARE, FREQUENT, ADAPTIVE)


@dataclass
class CooperationConfig:
    scheme: str = CHAIN
    q: float = 0.9
    mode: str = FREQUENT
    cf: float = 10.0
    uf: float = 2.0
    ufr: int = 4
    mfr: int = 1
    delta: int | None = None
    rare_cf: float | None = None  # checked against cf when mode is frequent
    t_prev: float = 0.0
    t_last: float = 0.0
    phases: int = 0

    def __post_init__(self):
        if self.scheme not in (CHAIN, CYCLIC):
            raise ValueError(f"unknown cooperation scheme {self.scheme!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown cooperation mode {self.mode!r}")
        if not 0 < self.q < 1:
            raise ValueError("acceptance probability q must lie strictly between 0 and 1")
        if self.cf <= 0 or self.ufr < 1 or self.mfr < 1:
            raise ValueError("cf must be positive, ufr and mfr at least 1")
        if self.mode in (RARE, FREQUENT) and self.uf <= 1:
            raise ValueError("update factor must exceed 1")
        if self.delta is not None and self.delta < self.mfr:
            raise ValueError("delta cannot be below the minimal frequency")
        if self.mode == FREQUENT and self.rare_cf is not None and not self.cf > self.rare_cf:
            raise ValueError("frequent cooperation factor must exceed the rare one")

    def record_time(self, average: float) -> None:
        """Shift in the average RemoveRoute time of the phase just finished."""
        self.t_prev, self.t_last = self.t_last, average


# size -> (mode, CF, UF, Ufr, Mfr)
TABLE_DEFAULTS = {
    200: (FREQUENT, 10, 2, 4, 1),
    400: (FREQUENT, 10, 2, 4, 1),
    600: (ADAPTIVE, 10, 2, 1, 1),
    800: (RARE, 5, 2, 3, 1),
    1000: (RARE, 5, 2, 3, 1),
}


def default_cooperation(n: int, scheme: str = CHAIN, q: float = 0.9) -> CooperationConfig:
    """Settings of the nearest tabulated size; ties go to the smaller size."""
    size = min(TABLE_DEFAULTS, key=lambda s: (abs(s - n), s))
    mode, cf, uf, ufr, mfr = TABLE_DEFAULTS[size]
    return CooperationConfig(scheme=scheme, q=q, mode=mode, cf=cf, uf=uf, ufr=ufr, mfr=mfr)


def next_delta(config: CooperationConfig, n: int) -> int:
    """Delta for the next batch of RemoveRoute calls.

    The first call sets the initial value. Every later call marks one finished
    cooperation phase and updates delta per the configured mode.
    """
    if config.delta is None:
        config.delta = max(math.ceil(n / config.cf), config.mfr)
        config.phases = 0
        return config.delta
    config.phases += 1
    if config.mode == CONSTANT or config.phases % config.ufr:
        return config.delta
    if config.mode in (RARE, FREQUENT):
        divisor = config.uf
    elif config.t_prev > 0 and config.t_last > 0:
        divisor = config.t_last / config.t_prev
    else:
        divisor = config.cf
    config.delta = max(math.ceil(config.delta / divisor), config.mfr)
    return config.delta


@dataclass
class Slot:
    solution: Solution
    seed: int
    rng_state: tuple | None = None
    failed_calls: int = 0
    pool_size: int = 0


@dataclass
class Team:
    slots: list[Slot]

    def __post_init__(self):
        seeds = [s.seed for s in self.slots]
        if len(set(seeds)) != len(seeds):
            raise ValueError("component seeds must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.slots)

    @property
    def solutions(self) -> list[Solution]:
        return [s.solution for s in self.slots]

    def best(self) -> Solution:
        best = self.slots[0].solution
        for slot in self.slots[1:]:
            if compare_cost(slot.solution.cost, best.cost) < 0:
                best = slot.solution
        return best


def cooperate_chain(team: Team) -> Team:
    """Pass solutions from slot 0 towards slot p-1, each keeping the better one."""
    for i in range(1, len(team)):
        prev, cur = team.slots[i - 1], team.slots[i]
        if compare_cost(prev.solution.cost, cur.solution.cost) < 0:
            cur.solution = prev.solution.copy()
    return team


def cooperate_cyclic(team: Team, rng: random.Random, q: float = 0.9) -> Team:
    """Chain pass with acceptance probability ``q``, then the ring link back to slot 0.

    Slot 0 takes the last slot's solution only if it has more routes.
    """
    if not 0 < q < 1:
        raise ValueError("acceptance probability q must lie strictly between 0 and 1")
    for i in range(1, len(team)):
        prev, cur = team.slots[i - 1], team.slots[i]
        if compare_cost(prev.solution.cost, cur.solution.cost) < 0 and rng.random() < q:
            cur.solution = prev.solution.copy()
    if len(team) > 1 and team.slots[0].solution.k > team.slots[-1].solution.k:
        team.slots[0].solution = team.slots[-1].solution.copy()
    return team


# -- phase 1 --------------------------------------------------------------

_WORKER: dict = {}


def _init_worker(instance: Instance, route_params: RemoveRouteParams | None, ma_params: MAParams | None) -> None:
    _WORKER["instance"] = instance
    _WORKER["route_params"] = route_params
    _WORKER["ma_params"] = ma_params


def _remove_batch(instance: Instance, params: RemoveRouteParams, routes: list[list[int]], seed: int,
                  rng_state: tuple | None, failed_calls: int, delta: int, budget: float, target: int):
    rng = random.Random(seed)
    if rng_state is not None:
        rng.setstate(rng_state)
    engine = RouteMinimizer(instance, params, rng)
    engine.failed_calls = failed_calls
    solution = Solution(instance, routes)
    deadline = time.perf_counter() + budget
    times = []
    for _ in range(delta):
        if solution.k <= target or time.perf_counter() >= deadline:
            break
        t0 = time.perf_counter()
        solution, _ = engine.remove_route(solution, deadline)
        times.append(time.perf_counter() - t0)
    return solution.as_lists(), rng.getstate(), engine.failed_calls, times, engine.last_trace.get("pool", 0)


def _remove_batch_worker(args):
    return _remove_batch(_WORKER["instance"], _WORKER["route_params"], *args)


def run_pha(instance: Instance, p: int = 1, config: CooperationConfig | None = None,
            params: RemoveRouteParams | None = None, time_limit: float = 60.0, master_seed: int = 0,
            target_k: int | None = None, initial: Solution | None = None,
            on_phase: Callable[[dict], None] | None = None) -> Solution:
    """Parallel route minimization; returns the team best under (K, T).

    Stops when some component reaches ``target_k`` (default K_min) or the time
    limit expires. With ``p == 1`` everything runs in this process.
    """
    if p < 1:
        raise ValueError("need at least one component")
    config = config or default_cooperation(instance.n)
    params = params or RemoveRouteParams()
    target = k_min(instance) if target_k is None else target_k
    start = initial.copy() if initial is not None else Solution.singletons(instance)
    team = Team([Slot(start.copy(), seeding.derive_seed(master_seed, seeding.PHA, i)) for i in range(p)])
    coop_rng = seeding.derive_rng(master_seed, seeding.PHA, p, 10 ** 6)
    began = time.perf_counter()
    deadline = began + time_limit
    pool = ProcessPoolExecutor(p, initializer=_init_worker, initargs=(instance, params, None)) if p > 1 else None
    try:
        while team.best().k > target and time.perf_counter() < deadline:
            delta = next_delta(config, instance.n)
            budget = deadline - time.perf_counter()
            jobs = [(s.solution.as_lists(), s.seed, s.rng_state, s.failed_calls, delta, budget, target)
                    for s in team.slots]
            if pool is None:
                results = [_remove_batch(instance, params, *job) for job in jobs]
            else:
                results = list(pool.map(_remove_batch_worker, jobs))
            all_times = []
            for slot, (routes, state, failed, times, pool_size) in zip(team.slots, results):
                slot.solution = Solution(instance, routes)
                slot.rng_state, slot.failed_calls, slot.pool_size = state, failed, pool_size
                all_times.extend(times)
            if all_times:
                config.record_time(statistics.fmean(all_times))
            if config.scheme == CYCLIC:
                cooperate_cyclic(team, coop_rng, config.q)
            else:
                cooperate_chain(team)
            if on_phase is not None:
                now = time.time()
                for i, slot in enumerate(team.slots):
                    k, t = slot.solution.cost
                    on_phase({"event": "cooperation", "time": now, "elapsed": time.perf_counter() - began,
                              "component": i, "K": k, "T": t, "delta": delta, "ep_size": slot.pool_size,
                              "phase": config.phases})
    finally:
        if pool is not None:
            pool.shutdown()
    return team.best()


# -- phase 2 --------------------------------------------------------------

def _child_worker(args):
    return child_task(_WORKER["instance"], _WORKER["ma_params"], *args)


def run_pma(population: Population, p: int = 1, params: MAParams | None = None, master_seed: int = 0,
            on_generation: Callable[[Population], None] | None = None) -> Solution:
    """Memetic loop with each generation's pair work spread over ``p`` processes.

    Results do not depend on ``p``: every pair uses a seed derived from the
    master seed, the generation and its slot.
    """
    if p < 1:
        raise ValueError("need at least one component")
    params = params or MAParams()
    if p == 1:
        return run_memetic(population, params, master_seed, None, on_generation)
    instance = population.members[0].instance
    with ProcessPoolExecutor(p, initializer=_init_worker, initargs=(instance, None, params)) as pool:
        def map_fn(tasks):
            chunk = max(1, len(tasks) // (4 * p))
            return list(pool.map(_child_worker, tasks, chunksize=chunk))
        return run_memetic(population, params, master_seed, map_fn, on_generation)
