"""Edge-assembly crossover for route sets, and feasibility repair of children.

Parents are read as directed edge multisets (depot edges repeated once per
route). The symmetric difference splits into AB-cycles that alternate a
parent-A edge traversed forwards with a parent-B edge traversed backwards.
Swapping the A-edges of a chosen cycle set (the E-set) for its B-edges keeps
every customer at in/out degree one; customers cut off from the depot form
subtours that are spliced into routes at the cheapest 2-opt* position.
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .model import Solution
from .moves import penalty_descent

SINGLE = "single"
BLOCK = "block"

Edge = tuple[int, int]


@dataclass
class CrossoverResult:
    child: Solution
    noop: bool = False
    strategy: str = SINGLE
    cycles: list[list[tuple[str, Edge]]] = field(default_factory=list)
    eset: list[int] = field(default_factory=list)
    reconnection_edges: list[Edge] = field(default_factory=list)


def route_edges(solution: Solution) -> list[Edge]:
    edges = []
    for route in solution.routes:
        nodes = route.nodes
        edges.extend(zip(nodes, nodes[1:]))
    return edges


def ab_cycles(edges_a: list[Edge], edges_b: list[Edge], rng: random.Random) -> list[list[tuple[str, Edge]]]:
    """Partition the directed symmetric difference into alternating cycles.

    Each cycle is a list of ``("A", edge)`` / ``("B", edge)`` entries in
    tracing order: an A-edge ``u->v`` is followed by a B-edge ``w->v``, which
    is followed by the A-edge leaving ``w``.
    """
    ca, cb = Counter(edges_a), Counter(edges_b)
    only_a = ca - cb
    only_b = cb - ca
    a_out: dict[int, list[Edge]] = defaultdict(list)
    b_in: dict[int, list[Edge]] = defaultdict(list)
    for (u, v), mult in only_a.items():
        a_out[u].extend([(u, v)] * mult)
    for (u, v), mult in only_b.items():
        b_in[v].extend([(u, v)] * mult)
    remaining = sum(only_a.values())
    cycles = []
    starts = sorted(a_out)
    while remaining:
        tails = [u for u in starts if a_out[u]]
        u0 = rng.choice(tails)
        cycle: list[tuple[str, Edge]] = []
        u = u0
        while True:
            options = a_out[u]
            ea = options.pop(rng.randrange(len(options)))
            remaining -= 1
            cycle.append(("A", ea))
            heads = b_in[ea[1]]
            eb = heads.pop(rng.randrange(len(heads)))
            cycle.append(("B", eb))
            u = eb[0]
            if u == u0:
                break
        cycles.append(cycle)
    return cycles


def _cycle_vertices(cycle) -> set[int]:
    return {x for _, e in cycle for x in e}


def eax_crossover(parent_a: Solution, parent_b: Solution, rng: random.Random, strategy: str | None = None) -> CrossoverResult:
    """One EAX child of ``parent_a`` and ``parent_b``.

    The strategy (single cycle or block of cycles sharing a vertex with a
    random cycle) is drawn uniformly unless given. The child serves every
    customer exactly once but may violate capacity or time windows.
    """
    if strategy is None:
        strategy = rng.choice((SINGLE, BLOCK))
    ea, eb = route_edges(parent_a), route_edges(parent_b)
    cycles = ab_cycles(ea, eb, rng)
    if not cycles:
        return CrossoverResult(parent_a.copy(), noop=True, strategy=strategy)
    first = rng.randrange(len(cycles))
    eset = [first]
    if strategy == BLOCK:
        core = _cycle_vertices(cycles[first]) - {0}
        eset += [c for c in range(len(cycles)) if c != first and core & (_cycle_vertices(cycles[c]) - {0})]
    edges = Counter(ea)
    for c in eset:
        for tag, e in cycles[c]:
            if tag == "A":
                edges[e] -= 1
            else:
                edges[e] += 1
    succ: dict[int, list[int]] = defaultdict(list)
    for (u, v), mult in sorted(edges.items()):
        succ[u].extend([v] * mult)
    routes = []
    for first_stop in succ.pop(0, []):
        route = []
        v = first_stop
        while v != 0:
            route.append(v)
            v = succ[v][0]
        routes.append(route)
    seen = {c for r in routes for c in r}
    subtours = []
    for c in parent_a.instance.customers:
        if c in seen:
            continue
        tour = []
        v = c
        while v not in seen:
            seen.add(v)
            tour.append(v)
            v = succ[v][0]
        subtours.append(tour)
    reconnect: list[Edge] = []
    dist = parent_a.instance.dist
    for tour in subtours:
        _splice(routes, tour, dist, reconnect)
    child = Solution(parent_a.instance, routes)
    return CrossoverResult(child, False, strategy, cycles, eset, reconnect)


def _splice(routes: list[list[int]], tour: list[int], dist, reconnect: list[Edge]) -> None:
    """Open the subtour at its cheapest edge and insert it into the cheapest route edge."""
    best = None
    m = len(tour)
    for r, route in enumerate(routes):
        nodes = [0, *route, 0]
        for k in range(len(nodes) - 1):
            a, b = nodes[k], nodes[k + 1]
            for s in range(m):
                c, d = tour[s], tour[(s + 1) % m]
                # route a->b and tour c->d become a->d ... c->b
                delta = dist[a][d] + dist[c][b] - dist[a][b] - dist[c][d]
                if best is None or delta < best[0]:
                    best = (delta, r, k, s)
    _, r, k, s = best
    opened = tour[s + 1:] + tour[:s + 1]  # starts at d, ends at c
    route = routes[r]
    nodes = [0, *route, 0]
    reconnect.append((nodes[k], opened[0]))
    reconnect.append((opened[-1], nodes[k + 1]))
    routes[r] = route[:k] + opened + route[k:]


def repair(child: Solution, rng: random.Random | None = None, mu: float = 0.6, max_moves: int = 1000,
           linear_cap: int = 100) -> tuple[Solution, bool]:
    """Restore feasibility in place with the squeeze-style penalty descent."""
    child.drop_empty_routes()
    if child.penalty <= 1e-9:
        return child, True
    ok = penalty_descent(child, child.instance.neighbors(mu), max_moves, linear_cap, rng)
    return child, ok
