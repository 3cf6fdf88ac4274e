import itertools
import random
from collections import Counter

import pytest

from vrptw_pma import memetic
from vrptw_pma.io import load_instance
from vrptw_pma.memetic import (MAParams, PhaseTwoError, Population, best_child, build_initial_population,
                               check_termination, fitness, form_next_population, pair_parents, run_memetic)
from vrptw_pma.model import Solution, is_feasible
from vrptw_pma.moves import NeighborhoodScope, local_search, perturb
from vrptw_pma.routemin import RemoveRouteParams
from vrptw_pma.synthetic import random_instance

from conftest import FIXTURES
from helpers import feasible_solution


class FakeClock:
    def __init__(self):
        self.now = 0.0

    def __call__(self):
        return self.now


def shaken_population(inst, size, seed, moves=20):
    base = feasible_solution(inst, seed, seconds=1.0)
    rng = random.Random(seed)
    members = [base]
    while len(members) < size:
        clone = base.copy()
        perturb(clone, moves, rng)
        members.append(clone)
    return Population(members)


# -- pairing -------------------------------------------------------------

def test_two_members_pair_both_ways():
    pop = list(range(2))
    for seed in range(10):
        assert sorted(pair_parents(pop, random.Random(seed))) == [(0, 1), (1, 0)]


def test_each_member_once_per_role():
    rng = random.Random(1)
    for n in range(2, 30):
        pairs = pair_parents(list(range(n)), rng)
        assert len(pairs) == n
        assert Counter(a for a, _ in pairs) == Counter(range(n))
        assert Counter(b for _, b in pairs) == Counter(range(n))
        assert all(a != b for a, b in pairs)


def test_pairing_permutation_is_uniform():
    rng = random.Random(2)
    draws = 10_000
    counts = Counter(tuple(a for a, _ in pair_parents(list(range(4)), rng)) for _ in range(draws))
    assert set(counts) == set(itertools.permutations(range(4)))
    expected = draws / 24
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 49.73  # 23 degrees of freedom, p = 0.001


def test_pairing_needs_two_members():
    with pytest.raises(ValueError):
        pair_parents([0], random.Random(0))


# -- fitness and children ------------------------------------------------------

def test_fitness_orders_by_distance():
    inst = random_instance(12, 3)
    sols = [feasible_solution(inst, s, seconds=0.3, shake=10) for s in range(6)]
    assert max(sols, key=fitness).distance == min(s.distance for s in sols)


def test_identical_parents_give_no_child():
    inst = random_instance(10, 4)
    p = feasible_solution(inst, 0, seconds=0.5)
    assert best_child(p, p.copy(), MAParams(n_ch=5), random.Random(0)) is None


def test_best_child_is_shortest_survivor(monkeypatch):
    inst = load_instance(FIXTURES / "small25_1.txt")
    pop = shaken_population(inst, 2, 5, moves=40)
    survivors = []
    original = memetic.repair

    def spy(child, *args):
        out, ok = original(child, *args)
        if ok and out.k == pop.k:
            survivors.append(out)
        return out, ok

    monkeypatch.setattr(memetic, "repair", spy)
    child = best_child(pop.members[0], pop.members[1], MAParams(n_ch=6, i_c=30), random.Random(3))
    assert survivors
    assert child is not None and child.distance == min(s.distance for s in survivors)
    assert child.k == pop.k and is_feasible(child, inst)


def test_best_child_deterministic_under_seed():
    inst = random_instance(10, 9, tight=True)
    pop = shaken_population(inst, 2, 1, moves=30)
    params = MAParams(n_ch=5, i_c=20)
    runs = [best_child(pop.members[0], pop.members[1], params, random.Random(17)) for _ in range(2)]
    if runs[0] is None:
        assert runs[1] is None
    else:
        assert runs[0].as_lists() == runs[1].as_lists() and runs[0].distance == runs[1].distance


# -- replacement and termination ----------------------------------------

def test_no_children_leaves_population_unchanged():
    inst = random_instance(12, 5)
    pop = shaken_population(inst, 4, 2)
    before = [m.as_lists() for m in pop.members]
    form_next_population(pop)
    assert [m.as_lists() for m in pop.members] == before
    assert pop.stagnation == 1 and pop.generation == 1


def test_better_child_replaces_only_its_slot():
    inst = random_instance(12, 5)
    pop = shaken_population(inst, 4, 2, moves=30)
    worst = max(range(4), key=lambda i: pop.members[i].distance)
    best = min(range(4), key=lambda i: pop.members[i].distance)
    if pop.members[worst].distance == pop.members[best].distance:
        pytest.skip("population has no distance spread")
    child = pop.members[best].copy()
    pop.best_children[worst] = child
    pop.best_children[best] = pop.members[worst].copy()  # worse than its slot, rejected
    others = {i: pop.members[i] for i in range(4) if i != worst}
    form_next_population(pop)
    assert pop.members[worst] is child
    assert all(pop.members[i] is m for i, m in others.items())
    assert pop.best_children == [None] * 4
    assert pop.stagnation == 1  # best distance did not improve


def test_stagnation_resets_on_improvement():
    inst = random_instance(12, 6)
    pop = shaken_population(inst, 3, 1, moves=30)
    pop.stagnation = 7
    target = min(range(3), key=lambda i: pop.members[i].distance)
    better = pop.members[target].copy()
    local_search(better, NeighborhoodScope.build(inst), 1000, random.Random(0))
    if better.distance >= pop.members[target].distance - 1e-9:
        pytest.skip("member already locally optimal")
    pop.best_children[target] = better
    form_next_population(pop)
    assert pop.stagnation == 0


def test_elitism_over_random_generations():
    inst = random_instance(15, 8, tight=True)
    pop = shaken_population(inst, 6, 3)
    rng = random.Random(0)
    history = [pop.best_distance()]
    for _ in range(100):
        for i in range(len(pop)):
            if rng.random() < 0.5:
                child = pop.members[rng.randrange(len(pop))].copy()
                perturb(child, 5, rng)
                pop.best_children[i] = child
        form_next_population(pop)
        assert {m.k for m in pop.members} == {pop.k}
        history.append(pop.best_distance())
    assert all(b <= a for a, b in zip(history, history[1:]))


def test_termination_rules():
    inst = random_instance(5, 1)
    pop = Population([Solution.singletons(inst)])
    clock = FakeClock()
    params = MAParams(time_limit=10)
    pop.started = clock()
    assert not check_termination(pop, params, clock)
    pop.stagnation = 50
    assert check_termination(pop, params, clock)
    pop.stagnation = 49
    assert not check_termination(pop, params, clock)
    pop.generation = params.max_generations
    assert params.max_generations == 500 and check_termination(pop, params, clock)
    pop.generation = 0
    clock.now = 10.5
    assert check_termination(pop, params, clock)


def test_params_validation():
    with pytest.raises(ValueError):
        MAParams(n_ch=0)
    with pytest.raises(ValueError):
        MAParams(time_limit=-1)
    assert MAParams(g=7).max_generations == 70


def test_population_rejects_mixed_fleet_sizes():
    inst = random_instance(6, 2)
    with pytest.raises(ValueError):
        Population([Solution.singletons(inst), Solution(inst, [list(inst.customers)])])
    with pytest.raises(ValueError):
        Population([])


# -- full runs -------------------------------------------------------------

def test_run_memetic_is_seeded_and_keeps_fleet_size():
    inst = load_instance(FIXTURES / "small25_0.txt")
    base = shaken_population(inst, 6, 4, moves=30)
    params = MAParams(n_ch=2, i_c=20, max_generations=4, time_limit=60)
    outs = []
    for _ in range(2):
        pop = Population([m.copy() for m in base.members])
        ks = []
        best = run_memetic(pop, params, 99, on_generation=lambda p: ks.append({m.k for m in p.members}))
        assert all(k == {base.k} for k in ks) and len(ks) == 4
        assert is_feasible(best, inst) and best.distance <= base.best_distance() + 1e-9
        outs.append((best.k, best.distance, sorted(m.signature() for m in pop.members)))
    assert outs[0][:2] == outs[1][:2]
    assert [sorted(map(sorted, s)) for s in outs[0][2]] == [sorted(map(sorted, s)) for s in outs[1][2]]


def test_single_member_population_returns_it():
    inst = random_instance(8, 1)
    sol = feasible_solution(inst, 0, seconds=0.3)
    assert run_memetic(Population([sol]), MAParams(), 0) is sol


# -- initial population -----------------------------------------------------

def test_generous_budget_gives_distinct_members():
    inst = random_instance(12, 21)
    seed = feasible_solution(inst, 0, seconds=1.0)
    pop = build_initial_population(inst, seed.k, 5, 20.0, MAParams(), random.Random(0), seeds=[seed],
                                   route_params=RemoveRouteParams(time_limit=1))
    assert len(pop) == 5 and pop.k == seed.k
    assert all(is_feasible(m, inst) and m.k == seed.k for m in pop.members)


def test_zero_budget_fills_with_perturbed_copies(monkeypatch):
    inst = load_instance(FIXTURES / "small25_1.txt")
    seed = feasible_solution(inst, 0, seconds=1.0)
    calls = []
    original = memetic.perturb
    monkeypatch.setattr(memetic, "perturb", lambda sol, n, rng, mu: calls.append(n) or original(sol, n, rng, mu))
    pop = build_initial_population(inst, seed.k, 8, 0.0, MAParams(), random.Random(1), seeds=[seed])
    assert len(pop) == 8 and calls == [50] * 7
    assert pop.members[0].as_lists() == seed.as_lists()
    assert all(is_feasible(m, inst) and m.k == seed.k for m in pop.members)


def test_population_of_one():
    inst = random_instance(8, 2)
    seed = feasible_solution(inst, 0, seconds=0.3)
    pop = build_initial_population(inst, seed.k, 1, 0.0, seeds=[seed])
    assert len(pop) == 1 and pop.members[0].as_lists() == seed.as_lists()


def test_nothing_found_is_refused():
    inst = random_instance(8, 2)
    with pytest.raises(PhaseTwoError):
        build_initial_population(inst, 1, 4, 0.0)
