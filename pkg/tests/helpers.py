"""Random solution builders shared by the test modules."""

import random

from vrptw_pma.model import Solution
from vrptw_pma.moves import perturb
from vrptw_pma.routemin import RemoveRouteParams, RouteMinimizer


def random_partition(n, rng, max_routes=None):
    order = list(range(1, n + 1))
    rng.shuffle(order)
    k = rng.randint(1, max_routes or n)
    cuts = sorted(rng.sample(range(1, n), min(k - 1, n - 1))) if n > 1 else []
    routes, prev = [], 0
    for c in cuts + [n]:
        routes.append(order[prev:c])
        prev = c
    return [r for r in routes if r]


def feasible_solution(inst, seed, seconds=2.0, shake=0):
    """A feasible solution reached by a short route-minimization run."""
    rng = random.Random(seed)
    engine = RouteMinimizer(inst, RemoveRouteParams(time_limit=seconds), rng)
    sol = engine.minimize(Solution.singletons(inst), seconds)
    if shake:
        perturb(sol, shake, rng)
    return sol
