"""Random instance generators for tests, oracles and benchmarks."""

from __future__ import annotations

import random

from .model import Instance


def random_instance(n: int, seed: int, *, tight: bool = False, capacity: float = 60.0, horizon: float = 400.0,
                    service: float = 5.0, clustered: bool = False, name: str | None = None) -> Instance:
    """Customers on a 100x100 square around a central depot.

    Every customer can be served alone by a dedicated vehicle. Tight
    instances get windows 15-40 units wide; loose ones get 150+ units.
    """
    rng = random.Random(seed)
    depot = (50.0, 50.0)
    rows = [(depot[0], depot[1], 0.0, 0.0, horizon, 0.0)]
    centers = [(rng.uniform(10, 90), rng.uniform(10, 90)) for _ in range(max(1, n // 8))]
    for _ in range(n):
        if clustered:
            cx, cy = rng.choice(centers)
            x = min(100.0, max(0.0, rng.gauss(cx, 6.0)))
            y = min(100.0, max(0.0, rng.gauss(cy, 6.0)))
        else:
            x, y = rng.uniform(0, 100), rng.uniform(0, 100)
        x, y = round(x, 1), round(y, 1)
        d0 = ((x - depot[0]) ** 2 + (y - depot[1]) ** 2) ** 0.5
        demand = float(rng.randint(1, max(1, int(capacity * 0.4))))
        latest_start = horizon - service - d0 - 1.0
        width = rng.uniform(15, 40) if tight else rng.uniform(150, 300)
        ready = rng.uniform(0, max(0.0, latest_start - width / 2))
        due = min(latest_start, ready + width)
        ready = max(0.0, min(ready, due))
        if due < d0:
            due = min(latest_start, d0 + width)
            ready = max(0.0, min(ready, due))
        rows.append((x, y, demand, round(ready, 1), round(due, 1), service))
    return Instance.from_rows(name or f"rand{n}_{seed}{'t' if tight else ''}", rows, capacity, n)


def gh_like_instance(n: int, seed: int, kind: str = "R1", name: str | None = None) -> Instance:
    """A Gehring-Homberger-style instance (integer data, capacity 200).

    ``kind`` selects the layout: ``R1`` (random, short horizon), ``RC1``
    (half clustered) or ``C1`` (clustered).
    """
    rng = random.Random(seed)
    size = 50 * max(1, n // 100)
    depot = (size // 2, size // 2)
    horizon = {"R1": 230 * size // 50, "RC1": 240 * size // 50, "C1": 1236 * size // 50}[kind]
    service = 90 if kind == "C1" else 10
    n_centers = max(2, n // 20)
    centers = [(rng.randint(5, size - 5), rng.randint(5, size - 5)) for _ in range(n_centers)]
    rows = [(float(depot[0]), float(depot[1]), 0.0, 0.0, float(horizon), 0.0)]
    for c in range(n):
        clustered = kind == "C1" or (kind == "RC1" and c % 2 == 0)
        if clustered:
            cx, cy = rng.choice(centers)
            x = min(size, max(0, int(round(rng.gauss(cx, 3)))))
            y = min(size, max(0, int(round(rng.gauss(cy, 3)))))
        else:
            x, y = rng.randint(0, size), rng.randint(0, size)
        d0 = ((x - depot[0]) ** 2 + (y - depot[1]) ** 2) ** 0.5
        demand = rng.randint(1, 40)
        width = rng.randint(10, 60) if kind != "C1" else rng.randint(40, 120)
        earliest = int(d0) + 1
        latest = int(horizon - service - d0) - 1
        mid = rng.randint(earliest, max(earliest, latest))
        ready = max(0, mid - width // 2)
        due = min(latest, mid + width // 2)
        if due < earliest:
            due = earliest
        ready = min(ready, due)
        rows.append((float(x), float(y), float(demand), float(ready), float(due), float(service)))
    return Instance.from_rows(name or f"{kind}_{n}_{seed}", rows, 200.0, max(25, n // 4))
