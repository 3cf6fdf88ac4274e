"""Distance minimization at a fixed fleet size: the memetic generation loop.

Every generation pairs each member once as first parent and once as second
parent, breeds ``n_ch`` children per pair (EAX, repair, scoped local search),
keeps the best child per pair and lets it replace its first parent when it is
shorter. The per-pair work is a pure function of the parents and a seed
derived from (master seed, generation, slot), so it can be farmed out to any
number of workers without changing the result.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import seeding
from .eax import eax_crossover, repair
from .model import EPS, Instance, Solution
from .moves import NeighborhoodScope, local_search, perturb
from .routemin import RemoveRouteParams, RouteMinimizer


class PhaseTwoError(RuntimeError):
    """Raised when no solution with the requested fleet size is available."""


@dataclass
class MAParams:
    n_ch: int = 20
    i_c: int = 100
    i_p: int = 50
    g: int = 50
    time_limit: float = 300.0
    population_size: int = 100
    max_generations: int | None = None  # defaults to 10 * g
    mu: float = 0.6
    repair_moves: int = 1000
    linear_cap: int = 100

    def __post_init__(self):
        if self.max_generations is None:
            self.max_generations = 10 * self.g
        for name in ("n_ch", "i_c", "i_p", "g", "population_size", "max_generations", "repair_moves", "linear_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.time_limit <= 0 or not 0 < self.mu <= 1:
            raise ValueError("time_limit must be positive and mu in (0, 1]")


def fitness(solution: Solution) -> float:
    """Higher is better; only meaningful between feasible solutions with equal K."""
    return -solution.distance


@dataclass
class Population:
    members: list[Solution]
    best_children: list[Solution | None] = field(default_factory=list)
    generation: int = 0
    stagnation: int = 0
    started: float = field(default_factory=time.perf_counter)

    def __post_init__(self):
        if not self.members:
            raise ValueError("population cannot be empty")
        ks = {m.k for m in self.members}
        if len(ks) != 1:
            raise ValueError(f"members must share one fleet size, got {sorted(ks)}")
        if not self.best_children:
            self.best_children = [None] * len(self.members)

    @property
    def k(self) -> int:
        return self.members[0].k

    def __len__(self) -> int:
        return len(self.members)

    def best(self) -> Solution:
        return min(self.members, key=lambda m: m.distance)

    def best_distance(self) -> float:
        return min(m.distance for m in self.members)


def build_initial_population(instance: Instance, k: int, n: int, time_budget: float, params: MAParams | None = None,
                             rng: random.Random | None = None, seeds: Iterable[Solution] = (),
                             route_params: RemoveRouteParams | None = None, max_attempts: int | None = None) -> Population:
    """Collect up to ``n`` distinct feasible K-route solutions, then fill by copy and perturb.

    Fresh solutions come from repeated route minimization from the singleton
    solution. When the budget or the attempt cap runs out, missing slots are
    copies of collected solutions, each perturbed by ``i_p`` moves.
    """
    params = params or MAParams()
    rng = rng or random.Random()
    deadline = time.perf_counter() + max(0.0, time_budget)
    members: list[Solution] = []
    seen = set()
    for s in seeds:
        if s.k == k and s.feasible and s.complete and s.signature() not in seen:
            seen.add(s.signature())
            members.append(s.copy())
    attempts = 0
    cap = max_attempts if max_attempts is not None else 2 * n
    route_params = route_params or RemoveRouteParams()
    while len(members) < n and attempts < cap and time.perf_counter() < deadline:
        attempts += 1
        engine = RouteMinimizer(instance, route_params, random.Random(rng.getrandbits(64)))
        sol = engine.minimize(Solution.singletons(instance), deadline - time.perf_counter(), target=k)
        if sol.k == k and sol.feasible and sol.signature() not in seen:
            seen.add(sol.signature())
            members.append(sol)
    if not members:
        raise PhaseTwoError(f"no feasible solution with {k} routes was found within the budget")
    base = len(members)
    while len(members) < n:
        clone = members[len(members) % base].copy()
        perturb(clone, params.i_p, rng, params.mu)
        members.append(clone)
    return Population(members)


def pair_parents(population: Population | Sequence, rng: random.Random) -> list[tuple[int, int]]:
    """Slot pairs (r(i), r(i+1 mod N)) for a uniform random permutation r."""
    n = len(population)
    if n < 2:
        raise ValueError("reproduction needs at least two members")
    order = list(range(n))
    rng.shuffle(order)
    return [(order[i], order[(i + 1) % n]) for i in range(n)]


def _modified_customers(child: Solution, parent: Solution) -> list[int]:
    old = parent.signature()
    out = []
    for route in child.routes:
        if tuple(route.customers) not in old:
            out.extend(route.customers)
    return out


def best_child(p_a: Solution, p_b: Solution, params: MAParams, rng: random.Random) -> Solution | None:
    """Best feasible child (highest fitness) over ``n_ch`` crossovers, or None."""
    best = None
    neighbors = p_a.instance.neighbors(params.mu)
    for _ in range(params.n_ch):
        result = eax_crossover(p_a, p_b, rng)
        if result.noop:
            continue
        child, ok = repair(result.child, rng, params.mu, params.repair_moves, params.linear_cap)
        if not ok or child.k != p_a.k:
            continue
        touched = _modified_customers(child, p_a)
        if touched:
            local_search(child, NeighborhoodScope(neighbors, touched), params.i_c, rng)
        if best is None or fitness(child) > fitness(best):
            best = child
    return best


def child_task(instance: Instance, params: MAParams, routes_a: list[list[int]], routes_b: list[list[int]],
               seed: int) -> list[list[int]] | None:
    """Work unit for one pair: all children of (p_A, p_B) under one seed."""
    child = best_child(Solution(instance, routes_a), Solution(instance, routes_b), params, random.Random(seed))
    return None if child is None else child.as_lists()


def form_next_population(population: Population) -> Population:
    """Replace each first-parent slot by its child when the child is shorter."""
    before = population.best_distance()
    for i, child in enumerate(population.best_children):
        if child is not None and child.distance < population.members[i].distance - EPS:
            population.members[i] = child
    population.best_children = [None] * len(population.members)
    population.generation += 1
    if population.best_distance() < before - EPS:
        population.stagnation = 0
    else:
        population.stagnation += 1
    return population


def check_termination(population: Population, params: MAParams, clock: Callable[[], float] = time.perf_counter) -> bool:
    return (population.stagnation >= params.g
            or population.generation >= params.max_generations
            or clock() - population.started >= params.time_limit)


MapFn = Callable[..., Iterable]


def run_memetic(population: Population, params: MAParams, master_seed: int, map_fn: MapFn | None = None,
                on_generation: Callable[[Population], None] | None = None,
                clock: Callable[[], float] = time.perf_counter) -> Solution:
    """Run generations until termination and return the shortest member.

    ``map_fn(pairs)`` must return, in order, the best child (as route lists or
    None) for each ``(routes_a, routes_b, seed)`` triple. The default evaluates
    them in this process.
    """
    instance = population.members[0].instance
    if map_fn is None:
        def map_fn(tasks):
            return [child_task(instance, params, a, b, s) for a, b, s in tasks]
    population.started = clock()
    if len(population) < 2:
        return population.best()
    while not check_termination(population, params, clock):
        gen = population.generation
        pairs = pair_parents(population, seeding.derive_rng(master_seed, seeding.PAIRING, gen))
        tasks = [(population.members[a].as_lists(), population.members[b].as_lists(),
                  seeding.derive_seed(master_seed, seeding.CHILDREN, gen, a)) for a, b in pairs]
        for (a, _), routes in zip(pairs, map_fn(tasks)):
            population.best_children[a] = None if routes is None else Solution(instance, routes)
        form_next_population(population)
        if on_generation is not None:
            on_generation(population)
    return population.best()
