"""Exact (K, T) for tiny instances by exhaustive search.

Every feasible route (ordered customer sequence) is enumerated depth-first,
abandoning a prefix as soon as it breaks capacity or a time window. The
shortest route per customer subset then feeds a set-partition dynamic program
minimizing (K, T) lexicographically.
"""

from __future__ import annotations

import math

from .model import Instance


class OracleRefusal(ValueError):
    pass


def best_routes_by_subset(instance: Instance) -> dict[int, float]:
    """Shortest feasible route distance for each customer bitmask (bit c-1 for customer c)."""
    n = instance.n
    xs, ys = instance.x, instance.y

    def d(a, b):
        return math.hypot(xs[a] - xs[b], ys[a] - ys[b])

    best: dict[int, float] = {}
    horizon = instance.due[0]
    capacity = instance.capacity

    def extend(last: int, mask: int, time_ready: float, load: float, dist: float) -> None:
        for c in range(1, n + 1):
            bit = 1 << (c - 1)
            if mask & bit:
                continue
            if load + instance.demand[c] > capacity + 1e-9:
                continue
            arrive = time_ready + d(last, c)
            if arrive > instance.due[c] + 1e-9:
                continue
            begin = max(arrive, instance.ready[c])
            leave = begin + instance.service[c]
            travelled = dist + d(last, c)
            if leave + d(c, 0) <= horizon + 1e-9:
                total = travelled + d(c, 0)
                new_mask = mask | bit
                if total < best.get(new_mask, math.inf):
                    best[new_mask] = total
            extend(c, mask | bit, leave, load + instance.demand[c], travelled)

    extend(0, 0, instance.ready[0], 0.0, 0.0)
    return best


def oracle_solve(instance: Instance, max_n: int = 9) -> tuple[int, float]:
    """Optimal (K*, T*). Raises OracleRefusal above ``max_n`` customers or if no solution exists."""
    n = instance.n
    if n > max_n:
        raise OracleRefusal(f"{n} customers exceeds the oracle limit of {max_n}")
    if n == 0:
        return 0, 0.0
    routes = best_routes_by_subset(instance)
    full = (1 << n) - 1
    inf = (math.inf, math.inf)
    dp: list[tuple[float, float]] = [inf] * (full + 1)
    dp[0] = (0, 0.0)
    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        best = inf
        sub = rest
        while True:
            group = sub | low
            dist = routes.get(group)
            if dist is not None:
                prev = dp[mask ^ group]
                if prev[0] != math.inf:
                    cand = (prev[0] + 1, prev[1] + dist)
                    if cand < best:
                        best = cand
            if sub == 0:
                break
            sub = (sub - 1) & rest
        dp[mask] = best
    k, t = dp[full]
    if k == math.inf:
        raise OracleRefusal("instance has no feasible solution")
    return int(k), t
