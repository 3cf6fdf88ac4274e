"""Fleet-size minimization: the RemoveRoute ejection-pool heuristic.

One call tries to delete a single route. Its customers go to an ejection
pool and are reinserted one at a time (LIFO) by a random feasible insertion,
by Squeeze (insert at least penalty, then repair), or by ejecting up to
``k_max`` other customers with the smallest summed penalty counters.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
import time
from collections import deque
from dataclasses import dataclass, field

from .model import EPS, Instance, Route, Solution, check_insertion, k_min
from .moves import _join_penalty, penalty_descent, perturb


@dataclass
class RemoveRouteParams:
    mu: float = 0.6
    k_max: int = 3
    l_max: int = 5
    xi: int = 7
    i_max: int = 1000
    psi: int | None = None  # defaults to i_max // 5
    perturb_min: int = 80
    perturb_max: int = 400
    perturb_factor: int = 2
    perturb_every: int = 50
    time_limit: float = 50.0
    success_threshold: float = 0.80
    success_window: int = 100
    gating_trials: int = 3
    far_margin: int = 2
    squeeze_moves: int = 1000
    linear_cap: int = 100

    def __post_init__(self):
        if self.psi is None:
            self.psi = max(1, self.i_max // 5)
        for name in ("k_max", "l_max", "i_max", "psi", "perturb_min", "perturb_max", "perturb_factor",
                     "perturb_every", "success_window", "squeeze_moves", "linear_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.xi < 0 or self.time_limit <= 0 or not 0 < self.mu <= 1:
            raise ValueError("xi must be non-negative, time_limit positive and mu in (0, 1]")
        if self.psi > self.i_max:
            raise ValueError("psi cannot exceed i_max")
        if self.perturb_min > self.perturb_max:
            raise ValueError("perturb_min cannot exceed perturb_max")


class EjectionPool:
    """LIFO stack of unserved customers with per-customer penalty counters."""

    def __init__(self, n: int):
        self.stack: list[int] = []
        self.p = [1] * (n + 1)
        self.inserted_at = [-(10 ** 9)] * (n + 1)

    def push(self, c: int) -> None:
        self.stack.append(c)

    def pop(self) -> int:
        return self.stack.pop()

    def __len__(self) -> int:
        return len(self.stack)

    def __contains__(self, c: int) -> bool:
        return c in self.stack


@dataclass
class RemoveRouteState:
    iteration: int = 0
    steady: int = 0
    last_size: int = -1
    outcomes: deque = field(default_factory=deque)
    budget: int = 0
    started: float = field(default_factory=time.perf_counter)

    def record(self, inserted_directly: bool, window: int) -> None:
        self.outcomes.append(inserted_directly)
        if len(self.outcomes) > window:
            self.outcomes.popleft()


class Decision(enum.Enum):
    CONTINUE = "continue"
    SUCCESS = "stop_success"
    FAILURE = "stop_failure"


@dataclass
class Ejection:
    route: int
    position: int  # gap in the route after the ejected customers are removed
    ejected: tuple[int, ...]
    p_sum: int


def select_route_for_removal(solution: Solution, rng: random.Random, far_from_optimum: bool) -> int:
    """Pick a route: a short one while far from the bound, else a long one."""
    sizes = [len(r) for r in solution.routes]
    avg = sum(sizes) / len(sizes)
    if far_from_optimum:
        pool = [r for r, s in enumerate(sizes) if s < avg]
    else:
        pool = [r for r, s in enumerate(sizes) if s >= avg]
    if not pool:
        pool = list(range(len(sizes)))
    return rng.choice(pool)


def check_stop(state: RemoveRouteState, pool: EjectionPool, params: RemoveRouteParams, n: int) -> Decision:
    size = len(pool)
    if size == 0:
        return Decision.SUCCESS
    if time.perf_counter() - state.started > params.time_limit:
        return Decision.FAILURE
    if size > max(params.xi, math.ceil(0.1 * n)):
        return Decision.FAILURE
    if state.iteration > params.i_max and size > params.xi:
        return Decision.FAILURE
    if state.steady >= params.psi:
        return Decision.FAILURE
    return Decision.CONTINUE


def update_perturb_budget(state: RemoveRouteState, params: RemoveRouteParams) -> int:
    """Budget starts at ``perturb_min`` and grows geometrically every ``perturb_every`` iterations."""
    steps = state.iteration // params.perturb_every
    budget = params.perturb_min
    for _ in range(steps):
        budget *= params.perturb_factor
        if budget >= params.perturb_max:
            budget = params.perturb_max
            break
    state.budget = budget
    return budget


def perturbation_skipped(state: RemoveRouteState, params: RemoveRouteParams) -> bool:
    """True while the recent share of direct reinsertions reaches the threshold."""
    if len(state.outcomes) < params.success_window:
        return False
    return sum(state.outcomes) / len(state.outcomes) >= params.success_threshold


def feasible_insertions(solution: Solution, v: int) -> list[tuple[int, int]]:
    out = []
    inst = solution.instance
    for r, route in enumerate(solution.routes):
        if route.load + inst.demand[v] > inst.capacity + EPS:
            continue
        for q in range(len(route.customers) + 1):
            if check_insertion(route, q, v, inst)[0]:
                out.append((r, q))
    return out


def squeeze(solution: Solution, v: int, params: RemoveRouteParams, rng: random.Random) -> bool:
    """Insert ``v`` where F_p is smallest, then repair. Restores the input on failure."""
    inst = solution.instance
    best = None
    best_key = None
    for r, route in enumerate(solution.routes):
        base = route.penalty
        for q in range(len(route.customers) + 1):
            pen = _join_penalty(inst, route, q, (v,), route, q + 1, inst.demand[v]) - base
            key = (pen, inst.dist[route.nodes[q]][v] + inst.dist[v][route.nodes[q + 1]] - inst.dist[route.nodes[q]][route.nodes[q + 1]])
            if best_key is None or key < best_key:
                best, best_key = (r, q), key
    if best is None:
        return False
    backup = solution.copy()
    solution.insert(v, *best)
    if penalty_descent(solution, inst.neighbors(params.mu), params.squeeze_moves, params.linear_cap, rng):
        return True
    _restore(solution, backup)
    return False


def _restore(solution: Solution, backup: Solution) -> None:
    solution.routes = backup.routes
    solution.route_of = backup.route_of
    solution.pos_of = backup.pos_of
    solution.version += 1


def find_best_ejection(solution: Solution, v: int, pool: EjectionPool, params: RemoveRouteParams,
                       rng: random.Random, iteration: int = 0) -> Ejection | None:
    """Smallest-P_sum ejection of up to ``k_max`` customers making ``v`` insertable.

    Customers inserted within the last ``l_max`` iterations are protected.
    Sizes are tried in increasing order and the first size with any feasible
    ejection wins; ties on P_sum are broken uniformly.
    """
    inst = solution.instance
    p = pool.p
    dv = inst.demand[v]
    for k in range(1, params.k_max + 1):
        best_sum = None
        found: list[Ejection] = []
        for r, route in enumerate(solution.routes):
            custs = route.customers
            if len(custs) < k:
                continue
            allowed = [idx for idx, c in enumerate(custs) if iteration - pool.inserted_at[c] >= params.l_max]
            if len(allowed) < k:
                continue
            combos = []
            for combo in itertools.combinations(allowed, k):
                s = sum(p[custs[i]] for i in combo)
                if best_sum is not None and s > best_sum:
                    continue
                combos.append((s, combo))
            combos.sort(key=lambda item: item[0])
            for s, combo in combos:
                if best_sum is not None and s > best_sum:
                    break
                removed = [custs[i] for i in combo]
                if route.load - sum(inst.demand[c] for c in removed) + dv > inst.capacity + EPS:
                    continue
                rest = [c for i, c in enumerate(custs) if i not in combo]
                tmp = Route(inst, rest)
                if not tmp.time_feasible:
                    continue
                for q in range(len(rest) + 1):
                    if check_insertion(tmp, q, v, inst)[0]:
                        if best_sum is None or s < best_sum:
                            best_sum = s
                            found = []
                        found.append(Ejection(r, q, tuple(removed), s))
        if found:
            return rng.choice(found)
    return None


def apply_ejection(solution: Solution, v: int, ejection: Ejection) -> None:
    route = solution.routes[ejection.route]
    rest = [c for c in route.customers if c not in ejection.ejected]
    rest.insert(ejection.position, v)
    for c in ejection.ejected:
        solution.route_of[c] = -1
        solution.pos_of[c] = -1
    solution.set_route(ejection.route, rest)


class RouteMinimizer:
    """Sequential route-removal engine; one per parallel component."""

    def __init__(self, instance: Instance, params: RemoveRouteParams | None = None, rng: random.Random | None = None):
        self.instance = instance
        self.params = params or RemoveRouteParams()
        self.rng = rng or random.Random()
        self.failed_calls = 0
        self.kmin = k_min(instance)
        self.last_trace: dict = {}

    def remove_route(self, solution: Solution, deadline: float | None = None) -> tuple[Solution, bool]:
        """Try to delete one route. On failure the input is returned untouched."""
        params = self.params
        rng = self.rng
        inst = self.instance
        if solution.k <= 1:
            return solution, False
        sigma = solution.copy()
        far = sigma.k > self.kmin + params.far_margin
        r = select_route_for_removal(sigma, rng, far)
        removed = sigma.remove_route(r)
        rng.shuffle(removed)
        pool = EjectionPool(inst.n)
        for c in removed:
            pool.push(c)
        state = RemoveRouteState()
        state.budget = params.perturb_min
        state.last_size = len(pool)
        gating = self.failed_calls < params.gating_trials
        while True:
            state.iteration += 1
            i = state.iteration
            v = pool.pop()
            spots = feasible_insertions(sigma, v)
            if spots:
                sigma.insert(v, *rng.choice(spots))
                inserted = True
            else:
                inserted = squeeze(sigma, v, params, rng)
            if inserted:
                pool.inserted_at[v] = i
                state.record(True, params.success_window)
            else:
                state.record(False, params.success_window)
                pool.p[v] += 1
                ej = find_best_ejection(sigma, v, pool, params, rng, i)
                if ej is None:
                    pool.push(v)
                else:
                    apply_ejection(sigma, v, ej)
                    pool.inserted_at[v] = i
                    for c in ej.ejected:
                        pool.push(c)
                if not (gating and perturbation_skipped(state, params)):
                    perturb(sigma, update_perturb_budget(state, params), rng, params.mu)
            size = len(pool)
            state.steady = state.steady + 1 if size == state.last_size else 0
            state.last_size = size
            decision = check_stop(state, pool, params, inst.n)
            if decision is Decision.CONTINUE and deadline is not None and time.perf_counter() > deadline:
                decision = Decision.FAILURE
            if decision is not Decision.CONTINUE:
                break
        self.last_trace = {"iterations": state.iteration, "pool": len(pool), "decision": decision.value}
        if decision is Decision.SUCCESS:
            self.failed_calls = 0
            return sigma, True
        self.failed_calls += 1
        return solution, False

    def minimize(self, solution: Solution, time_limit: float, target: int | None = None) -> Solution:
        """Call ``remove_route`` until the target (default K_min) or the time limit."""
        target = self.kmin if target is None else target
        deadline = time.perf_counter() + time_limit
        while solution.k > max(target, 1) and time.perf_counter() < deadline:
            solution, _ = self.remove_route(solution, deadline)
        return solution
