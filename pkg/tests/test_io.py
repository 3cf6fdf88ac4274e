import random

import pytest
from hypothesis import given, strategies as st

from vrptw_pma.io import (InstanceParseError, SolutionError, load_instance, parse_instance, parse_solution,
                          validate_solution_file, write_instance, write_solution)
from vrptw_pma.model import Instance, Solution, is_feasible
from vrptw_pma.synthetic import random_instance

from helpers import feasible_solution, random_partition
from oracles import total_distance

SMALL = """tiny

VEHICLE
NUMBER     CAPACITY
  2         50

CUSTOMER
CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE TIME
    0      0   0   0    0   100   0
    1      3   4   10   0   50    5
    2      6   8   20   10  60    5
"""


def test_parse_small_file():
    inst = parse_instance(SMALL)
    assert inst.name == "tiny"
    assert inst.n == 2
    assert inst.capacity == 50
    assert inst.vehicles == 2
    assert inst.demand[2] == 20
    assert inst.dist[0][2] == 10.0


def test_parse_tolerates_tabs_and_trailing_blank_lines():
    text = SMALL.replace("    1      3", "\t1\t\t3") + "\n\n   \n"
    inst = parse_instance(text)
    assert inst.n == 2 and inst.x[1] == 3


@pytest.mark.parametrize("old, new, line, fragment", [
    ("10  60    5", "70  60    5", 11, "due date"),
    ("3   4   10", "3   x   10", 10, "non-numeric"),
    ("    2      6", "    1      6", 11, "duplicate"),
    ("    2      6   8   20   10  60    5", "    2      6   8   20   10  60", 11, "columns"),
])
def test_parse_errors_carry_line_numbers(old, new, line, fragment):
    with pytest.raises(InstanceParseError, match=fragment) as info:
        parse_instance(SMALL.replace(old, new))
    assert info.value.line == line


def test_parse_rejects_missing_sections():
    with pytest.raises(InstanceParseError):
        parse_instance("name\n\nCUSTOMER\n0 0 0 0 0 1 0\n")
    with pytest.raises(InstanceParseError):
        parse_instance("")


def test_gh_fixtures_parse(fixtures_dir):
    for path in sorted((fixtures_dir / "gh200").glob("*.txt")):
        inst = load_instance(path)
        assert inst.n == 200
        header = path.read_text().splitlines()[4].split()
        assert inst.capacity == float(header[1])
        # second, throwaway reading of the customer table
        rows = [ln.split() for ln in path.read_text().splitlines()[9:] if ln.strip()]
        assert len(rows) == 201
        assert [float(r[3]) for r in rows] == list(inst.demand)


def test_parse_write_parse_idempotent(fixtures_dir):
    for path in sorted(fixtures_dir.rglob("*.txt")):
        first = load_instance(path)
        text = write_instance(first)
        second = parse_instance(text)
        assert write_instance(second) == text
        for field in ("x", "y", "demand", "ready", "due", "service"):
            assert getattr(first, field) == getattr(second, field)


def test_write_single_route():
    inst = parse_instance(SMALL)
    text = write_solution(Solution(inst, [[1, 2]]), inst)
    assert [ln for ln in text.splitlines() if ln.startswith("Route")] == ["Route 1 : 1 2"]
    assert "Vehicles: 1" in text


def test_write_refuses_empty_or_infeasible():
    inst = parse_instance(SMALL)
    with pytest.raises(SolutionError):
        write_solution(Solution(inst, []))
    tight = Instance.from_rows("t", [(0, 0, 0, 0, 100, 0), (3, 4, 30, 0, 50, 0), (6, 8, 30, 0, 60, 0)], 50, 2)
    with pytest.raises(SolutionError, match="infeasible"):
        write_solution(Solution(tight, [[1, 2]]))


@pytest.mark.parametrize("seed", range(3))
def test_solution_round_trip(seed):
    inst = random_instance(20, seed, tight=True)
    sol = feasible_solution(inst, seed, seconds=1.0)
    doc = parse_solution(write_solution(sol))
    assert doc.routes == sol.as_lists()
    assert doc.vehicles == sol.k
    report = validate_solution_file(inst, write_solution(sol))
    assert report.feasible
    assert report.vehicles == sol.k
    assert report.distance == pytest.approx(sol.distance, abs=1e-6)


def test_duplicate_customer_is_condition_iii():
    inst = parse_instance(SMALL)
    report = validate_solution_file(inst, "Route 1 : 1 2\nRoute 2 : 1\n")
    assert not report.feasible
    assert any(v.startswith("(iii)") and "customer 1" in v for v in report.violations)


def test_tardy_visit_names_the_customer():
    # serving 2 first reaches 1 at 10 + 5 + 5 = 20: fine while 1 closes at 50, tardy once it closes at 15
    relaxed = parse_instance(SMALL)
    assert validate_solution_file(relaxed, "Route 1 : 2 1\n").feasible
    strict = parse_instance(SMALL.replace("3   4   10   0   50    5", "3   4   10   0   15    5"))
    report = validate_solution_file(strict, "Route 1 : 2 1\n")
    assert any(v.startswith("(ii)") and "customer 1" in v for v in report.violations)
    assert validate_solution_file(strict, "Route 1 : 1 2\n").feasible


def test_unknown_id_and_bad_totals():
    inst = parse_instance(SMALL)
    assert any("unknown" in v for v in validate_solution_file(inst, "Route 1 : 1 2 7\n").violations)
    text = "Route 1 : 1 2\nVehicles: 2\nDistance: 1.00\n"
    problems = validate_solution_file(inst, text).violations
    assert any("vehicles" in v for v in problems)
    assert any("distance" in v for v in problems)


@given(st.integers(0, 10 ** 6))
def test_file_validator_agrees_with_model_validator(seed):
    rng = random.Random(seed)
    inst = random_instance(rng.randint(1, 12), seed, tight=rng.random() < 0.5, capacity=40.0)
    routes = random_partition(inst.n, rng)
    text = "".join(f"Route {i} : {' '.join(map(str, r))}\n" for i, r in enumerate(routes, 1))
    report = validate_solution_file(inst, text)
    assert report.feasible == is_feasible(routes, inst).feasible
    assert report.distance == pytest.approx(total_distance(inst, routes), abs=1e-9)
