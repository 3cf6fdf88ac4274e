"""Two-phase parallel solver for the vehicle routing problem with time windows.

Phase 1 minimizes the fleet size with cooperating route-removal components;
phase 2 minimizes total distance at that fleet size with a memetic algorithm
built on edge-assembly crossover.
"""

from .io import load_instance, parse_instance, parse_solution, validate_solution_file, write_solution
from .memetic import MAParams, Population, build_initial_population, run_memetic
from .model import Cost, Instance, Route, Solution, check_insertion, compare_cost, is_feasible, k_min, penalty
from .oracle import oracle_solve
from .parallel import CooperationConfig, default_cooperation, next_delta, run_pha, run_pma
from .routemin import RemoveRouteParams, RouteMinimizer

__all__ = [
    "CooperationConfig", "Cost", "Instance", "MAParams", "Population", "RemoveRouteParams", "Route",
    "RouteMinimizer", "Solution", "build_initial_population", "check_insertion", "compare_cost",
    "default_cooperation", "is_feasible", "k_min", "load_instance", "next_delta", "oracle_solve",
    "parse_instance", "parse_solution", "penalty", "run_memetic", "run_pha", "run_pma",
    "validate_solution_file", "write_solution",
]
