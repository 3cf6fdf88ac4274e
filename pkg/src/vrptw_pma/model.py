"""Problem and solution representation shared by both optimization phases.

Routes keep forward (earliest service start) and backward (latest permissible
service start) time data so single-customer insertions can be checked in
constant time. Travel time equals Euclidean distance; a vehicle arriving
early waits until the window opens. Infeasible routes are scored with the
time-warp penalty, so that F_p of joined route pieces is also O(1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

EPS = 1e-9


@dataclass(frozen=True, eq=False)
class Instance:
    """Immutable VRPTW data. Index 0 is the depot, 1..n are customers."""

    name: str
    x: tuple[float, ...]
    y: tuple[float, ...]
    demand: tuple[float, ...]
    ready: tuple[float, ...]
    due: tuple[float, ...]
    service: tuple[float, ...]
    capacity: float
    vehicles: int = 0
    dist: list[list[float]] = field(init=False, repr=False)
    _neighbors: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        size = len(self.x)
        for name in ("y", "demand", "ready", "due", "service"):
            if len(getattr(self, name)) != size:
                raise ValueError(f"field {name!r} has {len(getattr(self, name))} entries, expected {size}")
        if size < 1:
            raise ValueError("instance needs at least a depot")
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        for i in range(size):
            if self.ready[i] > self.due[i]:
                raise ValueError(f"vertex {i}: ready time {self.ready[i]} exceeds due date {self.due[i]}")
            if self.demand[i] < 0:
                raise ValueError(f"vertex {i}: negative demand")
            if self.demand[i] > self.capacity:
                raise ValueError(f"customer {i}: demand exceeds vehicle capacity")
        xs, ys = self.x, self.y
        dist = [[math.hypot(xs[i] - xs[j], ys[i] - ys[j]) for j in range(size)] for i in range(size)]
        object.__setattr__(self, "dist", dist)

    @classmethod
    def from_rows(cls, name: str, rows: Sequence[Sequence[float]], capacity: float, vehicles: int = 0) -> "Instance":
        """Build from ``(x, y, demand, ready, due, service)`` rows, depot first."""
        cols = list(zip(*rows)) if rows else [()] * 6
        return cls(
            name=name,
            x=tuple(float(v) for v in cols[0]),
            y=tuple(float(v) for v in cols[1]),
            demand=tuple(float(v) for v in cols[2]),
            ready=tuple(float(v) for v in cols[3]),
            due=tuple(float(v) for v in cols[4]),
            service=tuple(float(v) for v in cols[5]),
            capacity=float(capacity),
            vehicles=vehicles,
        )

    @property
    def n(self) -> int:
        return len(self.x) - 1

    @property
    def customers(self) -> range:
        return range(1, len(self.x))

    def neighbors(self, mu: float) -> list[list[int]]:
        """Nearest-customer lists truncated to ``round(mu * n)`` entries.

        Entry ``c`` lists the other customers sorted by distance from ``c``.
        """
        key = round(mu * self.n)
        cached = self._neighbors.get(key)
        if cached is None:
            size = min(key, self.n - 1)
            cached = [[]]
            for c in self.customers:
                row = self.dist[c]
                others = sorted((j for j in self.customers if j != c), key=lambda j: (row[j], j))
                cached.append(others[:size] if size > 0 else [])
            self._neighbors[key] = cached
        return cached

    # pickled by value for worker processes; the neighbor cache is rebuilt lazily
    def __getstate__(self):
        state = dict(self.__dict__)
        state["_neighbors"] = {}
        return state

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)


def k_min(instance: Instance) -> int:
    """Fleet-size lower bound: ceil(total demand / capacity)."""
    total = sum(instance.demand[1:])
    return max(0, math.ceil(total / instance.capacity - EPS))


class Cost(NamedTuple):
    routes: int
    distance: float


def compare_cost(a: Cost, b: Cost, tol: float = EPS) -> int:
    """-1 if ``a`` is better, 1 if ``b`` is better, 0 when equal.

    Fewer routes always wins; distance breaks ties.
    """
    if a[0] != b[0]:
        return -1 if a[0] < b[0] else 1
    if abs(a[1] - b[1]) <= tol:
        return 0
    return -1 if a[1] < b[1] else 1


class Route:
    """A depot-to-depot trip with cached schedule data.

    ``nodes`` is the customer sequence with the depot at both ends. Late
    arrivals are handled by time warp: service starts at the due date and the
    excess is charged as penalty. For each position ``k`` of ``nodes``:

    * ``start[k]``: service start after waiting and warping,
    * ``cum_warp[k]``: time warp accumulated up to and including ``k``,
    * ``latest[k]``: latest start at ``k`` that adds no warp downstream
      (clamped to the ready time),
    * ``back_warp[k]``: warp of the suffix from ``k`` when started at its
      ready time,
    * ``cum_load[k]`` / ``cum_dist[k]``: prefix demand and distance.

    Joining a prefix ending at ``i`` to a suffix starting at ``j`` costs
    ``cum_warp[i] + back_warp[j] + max(0, start[i] + s_i + c_ij - latest[j])``
    time warp, which makes single insertions and inter-route moves O(1).
    """

    __slots__ = ("instance", "customers", "nodes", "start", "latest", "cum_load", "cum_dist",
                 "cum_warp", "back_warp", "load", "distance", "warp", "penalty", "time_feasible")

    def __init__(self, instance: Instance, customers: Iterable[int] = ()):
        self.instance = instance
        self.customers = list(customers)
        self.refresh()

    def refresh(self) -> None:
        inst = self.instance
        dist, ready, due, service, demand = inst.dist, inst.ready, inst.due, inst.service, inst.demand
        nodes = [0, *self.customers, 0]
        m = len(nodes)
        start = [0.0] * m
        cum_load = [0.0] * m
        cum_dist = [0.0] * m
        cum_warp = [0.0] * m
        t = ready[0]
        start[0] = t
        load = 0.0
        d = 0.0
        warp = 0.0
        prev = 0
        for k in range(1, m):
            v = nodes[k]
            c = dist[prev][v]
            d += c
            t += service[prev] + c
            if t < ready[v]:
                t = ready[v]
            elif t > due[v]:
                warp += t - due[v]
                t = due[v]
            start[k] = t
            cum_warp[k] = warp
            load += demand[v]
            cum_load[k] = load
            cum_dist[k] = d
            prev = v
        latest = [0.0] * m
        back_warp = [0.0] * m
        z = due[0]
        bw = 0.0
        latest[m - 1] = z
        for k in range(m - 2, -1, -1):
            v = nodes[k]
            cand = z - service[v] - dist[v][nodes[k + 1]]
            if cand > due[v]:
                cand = due[v]
            if cand < ready[v]:
                bw += ready[v] - cand
                cand = ready[v]
            z = cand
            latest[k] = z
            back_warp[k] = bw
        self.nodes = nodes
        self.start = start
        self.latest = latest
        self.cum_load = cum_load
        self.cum_dist = cum_dist
        self.cum_warp = cum_warp
        self.back_warp = back_warp
        self.load = load
        self.distance = d
        self.warp = warp
        over = load - inst.capacity
        self.penalty = warp + (over if over > EPS else 0.0)
        self.time_feasible = warp <= EPS

    def __len__(self) -> int:
        return len(self.customers)

    def __repr__(self) -> str:
        return f"Route({self.customers})"

    @property
    def excess(self) -> float:
        over = self.load - self.instance.capacity
        return over if over > EPS else 0.0

    @property
    def feasible(self) -> bool:
        return self.penalty <= EPS


def route_schedule(instance: Instance, customers: Sequence[int]) -> tuple[float, float, float]:
    """Return ``(distance, capacity_excess, time_warp)`` by a plain sweep."""
    dist, ready, due, service, demand = instance.dist, instance.ready, instance.due, instance.service, instance.demand
    t = ready[0]
    d = 0.0
    warp = 0.0
    load = 0.0
    prev = 0
    for v in customers:
        t += service[prev] + dist[prev][v]
        d += dist[prev][v]
        if t < ready[v]:
            t = ready[v]
        elif t > due[v]:
            warp += t - due[v]
            t = due[v]
        load += demand[v]
        prev = v
    t += service[prev] + dist[prev][0]
    d += dist[prev][0]
    if t > due[0]:
        warp += t - due[0]
    excess = load - instance.capacity
    return d, (excess if excess > EPS else 0.0), warp


class Solution:
    """A set of routes, possibly partial (some customers unserved)."""

    def __init__(self, instance: Instance, routes: Iterable[Iterable[int]] = ()):
        self.instance = instance
        self.routes: list[Route] = [Route(instance, r) for r in routes]
        self.route_of = [-1] * (instance.n + 1)
        self.pos_of = [-1] * (instance.n + 1)
        self.version = 0
        self._reindex()

    @classmethod
    def singletons(cls, instance: Instance) -> "Solution":
        return cls(instance, ([c] for c in instance.customers))

    def _reindex(self) -> None:
        route_of = self.route_of
        pos_of = self.pos_of
        for c in range(len(route_of)):
            route_of[c] = -1
            pos_of[c] = -1
        for r, route in enumerate(self.routes):
            for k, c in enumerate(route.customers):
                if route_of[c] != -1:
                    raise ValueError(f"customer {c} appears in more than one route")
                route_of[c] = r
                pos_of[c] = k

    def _index_route(self, r: int) -> None:
        route_of, pos_of = self.route_of, self.pos_of
        for k, c in enumerate(self.routes[r].customers):
            route_of[c] = r
            pos_of[c] = k

    def copy(self) -> "Solution":
        other = Solution.__new__(Solution)
        other.instance = self.instance
        other.routes = []
        for route in self.routes:
            clone = Route.__new__(Route)
            clone.instance = route.instance
            clone.customers = list(route.customers)
            clone.nodes = route.nodes
            clone.start = route.start
            clone.latest = route.latest
            clone.cum_load = route.cum_load
            clone.cum_dist = route.cum_dist
            clone.cum_warp = route.cum_warp
            clone.back_warp = route.back_warp
            clone.load = route.load
            clone.distance = route.distance
            clone.warp = route.warp
            clone.penalty = route.penalty
            clone.time_feasible = route.time_feasible
            other.routes.append(clone)
        other.route_of = list(self.route_of)
        other.pos_of = list(self.pos_of)
        other.version = 0
        return other

    # -- mutation -------------------------------------------------------
    # Cached arrays of a route are replaced, never edited in place, so copies
    # may share them safely.

    def set_route(self, r: int, customers: Sequence[int]) -> None:
        route = self.routes[r]
        for c in route.customers:
            if self.route_of[c] == r:
                self.route_of[c] = -1
                self.pos_of[c] = -1
        route.customers = list(customers)
        route.refresh()
        self._index_route(r)
        self.version += 1

    def insert(self, customer: int, r: int, position: int) -> None:
        if self.route_of[customer] != -1:
            raise ValueError(f"customer {customer} is already served")
        route = self.routes[r]
        route.customers.insert(position, customer)
        route.refresh()
        self._index_route(r)
        self.version += 1

    def remove_customer(self, customer: int) -> int:
        """Unserve ``customer``; returns the index of the route it left."""
        r = self.route_of[customer]
        if r == -1:
            raise ValueError(f"customer {customer} is not served")
        route = self.routes[r]
        del route.customers[self.pos_of[customer]]
        route.refresh()
        self.route_of[customer] = -1
        self.pos_of[customer] = -1
        self._index_route(r)
        self.version += 1
        return r

    def add_route(self, customers: Sequence[int]) -> int:
        self.routes.append(Route(self.instance, customers))
        r = len(self.routes) - 1
        for c in customers:
            if self.route_of[c] != -1:
                raise ValueError(f"customer {c} is already served")
        self._index_route(r)
        self.version += 1
        return r

    def remove_route(self, r: int) -> list[int]:
        route = self.routes.pop(r)
        self._reindex()
        self.version += 1
        return route.customers

    def drop_empty_routes(self) -> int:
        before = len(self.routes)
        if any(not route.customers for route in self.routes):
            self.routes = [route for route in self.routes if route.customers]
            self._reindex()
            self.version += 1
        return before - len(self.routes)

    # -- queries --------------------------------------------------------

    @property
    def k(self) -> int:
        return len(self.routes)

    @property
    def distance(self) -> float:
        return math.fsum(route.distance for route in self.routes)

    @property
    def cost(self) -> Cost:
        return Cost(len(self.routes), self.distance)

    @property
    def penalty(self) -> float:
        return sum(route.penalty for route in self.routes)

    @property
    def feasible(self) -> bool:
        return all(route.feasible for route in self.routes)

    def unserved(self) -> list[int]:
        return [c for c in self.instance.customers if self.route_of[c] == -1]

    @property
    def complete(self) -> bool:
        return all(self.route_of[c] != -1 for c in self.instance.customers)

    def as_lists(self) -> list[list[int]]:
        return [list(route.customers) for route in self.routes]

    def signature(self) -> frozenset:
        """Order-free identity of the route set, used to spot duplicates."""
        return frozenset(tuple(route.customers) for route in self.routes)

    def __repr__(self) -> str:
        k, t = self.cost
        return f"<Solution K={k} T={t:.2f} F_p={self.penalty:.3f}>"


def penalty(solution: Solution, instance: Instance | None = None) -> float:
    """F_p: capacity excess plus time warp, recomputed from scratch.

    Zero exactly when every route respects capacity and all time windows.
    """
    inst = instance or solution.instance
    total = 0.0
    for route in solution.routes:
        _, excess, warp = route_schedule(inst, route.customers)
        total += excess + warp
    return total


def check_insertion(route: Route, position: int, customer: int, instance: Instance | None = None) -> tuple[bool, float]:
    """Constant-time test of inserting ``customer`` before ``route.customers[position]``.

    Returns ``(feasible, delta_distance)``. The route must be feasible and its
    cached data current; an infeasible route never admits an insertion.
    """
    inst = instance or route.instance
    dist = inst.dist
    nodes = route.nodes
    prev = nodes[position]
    nxt = nodes[position + 1]
    delta = dist[prev][customer] + dist[customer][nxt] - dist[prev][nxt]
    if not route.time_feasible or route.load + inst.demand[customer] > inst.capacity + EPS:
        return False, delta
    t = route.start[position] + inst.service[prev] + dist[prev][customer]
    if t > inst.due[customer] + EPS:
        return False, delta
    if t < inst.ready[customer]:
        t = inst.ready[customer]
    t += inst.service[customer] + dist[customer][nxt]
    return t <= route.latest[position + 1] + EPS, delta


@dataclass
class Violation:
    condition: str  # "capacity", "time_window", "coverage", "depot", "structure"
    message: str
    route: int | None = None
    customer: int | None = None


@dataclass
class FeasibilityReport:
    feasible: bool
    violations: list[Violation]

    def __bool__(self) -> bool:
        return self.feasible


def is_feasible(solution: Solution | Sequence[Sequence[int]], instance: Instance) -> FeasibilityReport:
    """Naive validator over plain route lists; ignores every cached value.

    Reports all violations of capacity, customer windows, single coverage
    and depot return.
    """
    routes = solution.as_lists() if isinstance(solution, Solution) else [list(r) for r in solution]
    violations: list[Violation] = []
    seen: dict[int, int] = {}
    for r, custs in enumerate(routes):
        for c in custs:
            if not isinstance(c, int) or c < 1 or c > instance.n:
                violations.append(Violation("structure", f"route {r + 1}: unknown customer {c!r}", r, None))
                continue
            if c in seen:
                violations.append(Violation("coverage", f"customer {c} served by routes {seen[c] + 1} and {r + 1}", r, c))
            else:
                seen[c] = r
    if any(v.condition == "structure" for v in violations):
        return FeasibilityReport(False, violations)
    for c in range(1, instance.n + 1):
        if c not in seen:
            violations.append(Violation("coverage", f"customer {c} is not served", None, c))
    for r, custs in enumerate(routes):
        load = 0.0
        t = instance.ready[0]
        prev = 0
        for c in custs:
            load += instance.demand[c]
            arrive = t + instance.service[prev] + math.hypot(instance.x[prev] - instance.x[c], instance.y[prev] - instance.y[c])
            t = max(arrive, instance.ready[c])
            if t > instance.due[c] + EPS:
                violations.append(Violation("time_window", f"route {r + 1}: customer {c} starts at {t:.4f} after due {instance.due[c]}", r, c))
            prev = c
        back = t + instance.service[prev] + math.hypot(instance.x[prev] - instance.x[0], instance.y[prev] - instance.y[0])
        if back > instance.due[0] + EPS:
            violations.append(Violation("depot", f"route {r + 1}: returns at {back:.4f} after depot closes {instance.due[0]}", r, None))
        if load > instance.capacity + EPS:
            violations.append(Violation("capacity", f"route {r + 1}: load {load} exceeds capacity {instance.capacity}", r, None))
    return FeasibilityReport(not violations, violations)
