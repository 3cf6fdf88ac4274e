"""Benchmark instance parsing and solution files.

Instances use the Solomon / Gehring-Homberger text layout. Solutions are
written as ``Route <n> : <ids>`` lines followed by a cost summary, and can be
re-checked against the instance with plain arithmetic.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .model import EPS, Instance, Solution, is_feasible

_ROUTE_RE = re.compile(r"^\s*Route\s+(\d+)\s*:\s*(.*?)\s*$", re.IGNORECASE)


class InstanceParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SolutionError(ValueError):
    pass


def _numbers(text: str, lineno: int, count: int) -> list[float]:
    parts = text.split()
    if len(parts) < count:
        raise InstanceParseError(f"expected {count} columns, found {len(parts)}", lineno)
    try:
        return [float(p) for p in parts[:count]]
    except ValueError as exc:
        raise InstanceParseError(f"non-numeric field in {text.strip()!r}", lineno) from exc


def parse_instance(text: str, name: str | None = None) -> Instance:
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise InstanceParseError("empty instance file")
    header_name = lines[0][1].strip()
    idx = {ln.strip().upper().split()[0]: pos for pos, (_, ln) in enumerate(lines) if ln.strip().upper().split()[0] in ("VEHICLE", "CUSTOMER")}
    if "VEHICLE" not in idx:
        raise InstanceParseError("missing VEHICLE section")
    if "CUSTOMER" not in idx:
        raise InstanceParseError("missing CUSTOMER section")

    pos = idx["VEHICLE"] + 1
    if pos < len(lines) and "CAPACITY" not in lines[pos][1].upper():
        raise InstanceParseError("expected 'NUMBER CAPACITY' header", lines[pos][0])
    pos += 1
    if pos >= len(lines):
        raise InstanceParseError("missing vehicle number/capacity values")
    lineno, ln = lines[pos]
    vehicles, capacity = _numbers(ln, lineno, 2)
    if capacity <= 0:
        raise InstanceParseError("capacity must be positive", lineno)

    pos = idx["CUSTOMER"] + 1
    if pos < len(lines) and not re.match(r"^\s*[-+\d.]", lines[pos][1]):
        pos += 1  # column header
    rows: dict[int, list[float]] = {}
    for lineno, ln in lines[pos:]:
        vals = _numbers(ln, lineno, 7)
        if len(ln.split()) > 7:
            raise InstanceParseError(f"unexpected extra columns in {ln.strip()!r}", lineno)
        cid = vals[0]
        if cid != int(cid) or cid < 0:
            raise InstanceParseError(f"invalid customer id {cid}", lineno)
        cid = int(cid)
        if cid in rows:
            raise InstanceParseError(f"duplicate customer id {cid}", lineno)
        if vals[5] < vals[4]:
            raise InstanceParseError(f"customer {cid}: due date {vals[5]} before ready time {vals[4]}", lineno)
        if vals[3] < 0:
            raise InstanceParseError(f"customer {cid}: negative demand", lineno)
        if vals[3] > capacity:
            raise InstanceParseError(f"customer {cid}: demand {vals[3]} exceeds capacity {capacity}", lineno)
        rows[cid] = vals[1:] + [lineno]
    if sorted(rows) != list(range(len(rows))):
        raise InstanceParseError("customer ids must be dense and start with the depot at 0")
    ordered = [rows[i][:6] for i in range(len(rows))]
    return Instance.from_rows(name or header_name, ordered, capacity, int(vehicles))


def load_instance(path: str | Path) -> Instance:
    path = Path(path)
    return parse_instance(path.read_text(), name=None)


def _exact(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def write_instance(instance: Instance) -> str:
    """Render an instance in the Solomon layout."""
    out = [instance.name, "", "VEHICLE", "NUMBER     CAPACITY", f"  {instance.vehicles:<10d} {_exact(instance.capacity)}", "",
           "CUSTOMER",
           "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE TIME", ""]
    for i in range(instance.n + 1):
        vals = (instance.x[i], instance.y[i], instance.demand[i], instance.ready[i], instance.due[i], instance.service[i])
        out.append(f"{i:5d} " + " ".join(f"{_exact(v):>10}" for v in vals))
    return "\n".join(out) + "\n"


@dataclass
class SolutionDocument:
    name: str
    routes: list[list[int]]
    vehicles: int | None = None
    distance: float | None = None


def write_solution(solution: Solution, instance: Instance | None = None) -> str:
    """Render a complete, feasible solution. Refuses anything else."""
    instance = instance or solution.instance
    routes = [r for r in solution.as_lists()]
    if not routes:
        raise SolutionError("solution has no routes")
    report = is_feasible(routes, instance)
    if not report.feasible:
        detail = "; ".join(v.message for v in report.violations[:5])
        raise SolutionError(f"refusing to write infeasible solution: {detail}")
    lines = [f"Instance: {instance.name}"]
    lines += [f"Route {i} : {' '.join(map(str, r))}" for i, r in enumerate(routes, 1)]
    lines.append(f"Vehicles: {len(routes)}")
    lines.append(f"Distance: {solution.distance:.2f}")
    return "\n".join(lines) + "\n"


def parse_solution(text: str) -> SolutionDocument:
    name = ""
    routes: list[list[int]] = []
    vehicles = distance = None
    for lineno, ln in enumerate(text.splitlines(), 1):
        s = ln.strip()
        if not s:
            continue
        m = _ROUTE_RE.match(s)
        if m:
            try:
                routes.append([int(tok) for tok in m.group(2).split()])
            except ValueError as exc:
                raise SolutionError(f"line {lineno}: bad customer id in {s!r}") from exc
            continue
        key, _, value = s.partition(":")
        key = key.strip().lower()
        value = value.strip()
        try:
            if key == "instance":
                name = value
            elif key == "vehicles":
                vehicles = int(value)
            elif key in ("distance", "cost"):
                distance = float(value)
            else:
                raise SolutionError(f"line {lineno}: unrecognized line {s!r}")
        except ValueError as exc:
            raise SolutionError(f"line {lineno}: bad value in {s!r}") from exc
    return SolutionDocument(name, routes, vehicles, distance)


@dataclass
class SolutionReport:
    feasible: bool
    violations: list[str] = field(default_factory=list)
    vehicles: int = 0
    distance: float = 0.0


def validate_solution_file(instance: Instance, doc: str | SolutionDocument) -> SolutionReport:
    """Re-check a written solution against the instance from first principles."""
    if isinstance(doc, str):
        doc = parse_solution(doc)
    problems: list[str] = []
    n = instance.n
    seen: set[int] = set()
    total = 0.0
    for r, route in enumerate(doc.routes, 1):
        if not route:
            problems.append(f"route {r}: empty")
        bad = [c for c in route if c < 1 or c > n]
        if bad:
            problems.append(f"route {r}: unknown customer id(s) {bad}")
            continue
        load = 0.0
        clock = instance.ready[0]
        here = 0
        for c in route:
            if c in seen:
                problems.append(f"(iii) customer {c} served more than once")
            seen.add(c)
            leg = math.sqrt((instance.x[here] - instance.x[c]) ** 2 + (instance.y[here] - instance.y[c]) ** 2)
            total += leg
            clock = max(clock + instance.service[here] + leg, instance.ready[c])
            if clock > instance.due[c] + EPS:
                problems.append(f"(ii) route {r}: customer {c} served at {clock:.3f} after due date {instance.due[c]:g}")
            load += instance.demand[c]
            here = c
        leg = math.sqrt((instance.x[here] - instance.x[0]) ** 2 + (instance.y[here] - instance.y[0]) ** 2)
        total += leg
        if clock + instance.service[here] + leg > instance.due[0] + EPS:
            problems.append(f"(iv) route {r}: returns to depot after {instance.due[0]:g}")
        if load > instance.capacity + EPS:
            problems.append(f"(i) route {r}: load {load:g} exceeds capacity {instance.capacity:g}")
    missing = [c for c in range(1, n + 1) if c not in seen]
    if missing:
        problems.append(f"(iii) customers not served: {missing}")
    if not doc.routes:
        problems.append("no routes")
    if doc.vehicles is not None and doc.vehicles != len(doc.routes):
        problems.append(f"reported {doc.vehicles} vehicles but listed {len(doc.routes)} routes")
    if doc.distance is not None and abs(doc.distance - total) > 0.005 + 1e-6:
        problems.append(f"reported distance {doc.distance} differs from recomputed {total:.4f}")
    return SolutionReport(not problems, problems, len(doc.routes), total)
