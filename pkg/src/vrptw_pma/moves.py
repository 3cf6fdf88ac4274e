"""Neighborhood moves shared by Squeeze, Perturb, Repair and LocalSearch.

Four move kinds are available:

* ``relocate``: one customer moved to another position,
* ``or_opt``: a segment of consecutive customers moved (length 2-3, or any
  length for the linear-time escalation),
* ``exchange``: two customers swap places,
* ``two_opt_star``: the tails of two routes are swapped.

Inter-route moves are evaluated by joining a cached prefix of one route, at
most a few explicit customers, and a cached suffix of another route, which
costs O(1) for both the feasibility test and the F_p delta. Intra-route moves
are evaluated by a sweep over the affected route.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .model import EPS, Instance, Route, Solution, route_schedule

RELOCATE = "relocate"
OR_OPT = "or_opt"
EXCHANGE = "exchange"
TWO_OPT_STAR = "two_opt_star"
KINDS = (RELOCATE, EXCHANGE, TWO_OPT_STAR, OR_OPT)


class StaleMoveError(RuntimeError):
    """A move was applied to a solution that changed after it was generated."""


@dataclass(slots=True)
class Move:
    """A candidate change.

    For ``relocate``/``or_opt`` the segment ``routes[r1][i:i+length]`` is put
    into gap ``j`` of route ``r2`` (gap ``j`` lies before the customer at
    index ``j`` of the unmodified route). ``exchange`` swaps positions ``i``
    and ``j``. ``two_opt_star`` keeps ``r1[:i+1]`` and ``r2[:j+1]`` and swaps
    the remainders; ``-1`` stands for the depot.
    """

    kind: str
    r1: int
    i: int
    r2: int
    j: int
    length: int = 1
    delta_distance: float = 0.0
    delta_penalty: float = 0.0
    version: int = -1
    undo: list | None = field(default=None, repr=False)


@dataclass
class NeighborhoodScope:
    """Focus customers plus the truncated nearest-neighbor lists."""

    neighbors: list[list[int]]
    customers: Sequence[int] | None = None

    @classmethod
    def build(cls, instance: Instance, mu: float = 0.6, customers: Sequence[int] | None = None) -> "NeighborhoodScope":
        return cls(instance.neighbors(mu), customers)

    def focus(self, solution: Solution) -> list[int]:
        if self.customers is None:
            return [c for c in solution.instance.customers if solution.route_of[c] != -1]
        return [c for c in self.customers if solution.route_of[c] != -1]


# -- sequence construction ------------------------------------------------

def new_sequences(solution: Solution, move: Move) -> list[tuple[int, list[int]]]:
    """Customer lists of every route the move rewrites."""
    a = solution.routes[move.r1].customers
    b = solution.routes[move.r2].customers
    i, j = move.i, move.j
    if move.kind in (RELOCATE, OR_OPT):
        seg = a[i:i + move.length]
        if move.r1 == move.r2:
            rest = a[:i] + a[i + move.length:]
            gap = j if j < i else j - move.length
            return [(move.r1, rest[:gap] + seg + rest[gap:])]
        return [(move.r1, a[:i] + a[i + move.length:]), (move.r2, b[:j] + seg + b[j:])]
    if move.kind == EXCHANGE:
        if move.r1 == move.r2:
            out = list(a)
            out[i], out[j] = out[j], out[i]
            return [(move.r1, out)]
        na = list(a)
        nb = list(b)
        na[i], nb[j] = b[j], a[i]
        return [(move.r1, na), (move.r2, nb)]
    if move.kind == TWO_OPT_STAR:
        return [(move.r1, a[:i + 1] + b[j + 1:]), (move.r2, b[:j + 1] + a[i + 1:])]
    raise ValueError(f"unknown move kind {move.kind!r}")


# -- evaluation -------------------------------------------------------------

def _join_warp(inst: Instance, p: Route, p_end: int, mid: Sequence[int], s: Route, s_start: int) -> float:
    """Time warp of ``p.nodes[:p_end+1] + mid + s.nodes[s_start:]``."""
    dist, ready, due, service = inst.dist, inst.ready, inst.due, inst.service
    warp = p.cum_warp[p_end]
    prev = p.nodes[p_end]
    t = p.start[p_end]
    for m in mid:
        t += service[prev] + dist[prev][m]
        if t < ready[m]:
            t = ready[m]
        elif t > due[m]:
            warp += t - due[m]
            t = due[m]
        prev = m
    t += service[prev] + dist[prev][s.nodes[s_start]] - s.latest[s_start]
    return warp + s.back_warp[s_start] + (t if t > 0.0 else 0.0)


def _join_feasible(inst: Instance, p: Route, p_end: int, mid: Sequence[int], s: Route, s_start: int, mid_load: float) -> bool:
    """Is ``p.nodes[:p_end+1] + mid + s.nodes[s_start:]`` feasible?"""
    if p.cum_load[p_end] + mid_load + s.load - s.cum_load[s_start - 1] > inst.capacity + EPS:
        return False
    return _join_warp(inst, p, p_end, mid, s, s_start) <= EPS


def _join_penalty(inst: Instance, p: Route, p_end: int, mid: Sequence[int], s: Route, s_start: int, mid_load: float) -> float:
    """F_p of ``p.nodes[:p_end+1] + mid + s.nodes[s_start:]``."""
    excess = p.cum_load[p_end] + mid_load + s.load - s.cum_load[s_start - 1] - inst.capacity
    dist, ready, due, service = inst.dist, inst.ready, inst.due, inst.service
    warp = p.cum_warp[p_end] + s.back_warp[s_start] + (excess if excess > EPS else 0.0)
    prev = p.nodes[p_end]
    t = p.start[p_end]
    for m in mid:
        t += service[prev] + dist[prev][m]
        if t < ready[m]:
            t = ready[m]
        elif t > due[m]:
            warp += t - due[m]
            t = due[m]
        prev = m
    t += service[prev] + dist[prev][s.nodes[s_start]] - s.latest[s_start]
    return warp + t if t > 0.0 else warp


def _seq_penalty(inst: Instance, customers: Sequence[int]) -> tuple[float, float]:
    d, excess, late = route_schedule(inst, customers)
    return d, excess + late


def evaluate(solution: Solution, move: Move, allow_infeasible: bool, bound: float | None = None) -> bool:
    """Fill in the move's deltas. Returns feasibility of the result.

    In feasible mode the penalty delta is left at zero and an infeasible
    move returns False early. With ``bound`` set (feasible mode only), a move
    whose distance delta is not below it is reported infeasible unchecked.
    """
    inst = solution.instance
    routes = solution.routes
    dist = inst.dist
    demand = inst.demand
    kind = move.kind
    i, j = move.i, move.j
    A = routes[move.r1]
    if move.r1 == move.r2:
        seqs = new_sequences(solution, move)
        d, pen = _seq_penalty(inst, seqs[0][1])
        move.delta_distance = d - A.distance
        move.delta_penalty = pen - A.penalty
        if allow_infeasible:
            return pen <= EPS
        move.delta_penalty = 0.0
        return pen <= EPS
    B = routes[move.r2]
    an, bn = A.nodes, B.nodes
    if kind in (RELOCATE, OR_OPT):
        L = move.length
        seg = A.customers[i:i + L]
        f, l = seg[0], seg[-1]
        a_prev, a_next = an[i], an[i + L + 1]
        x, y = bn[j], bn[j + 1]
        move.delta_distance = (dist[a_prev][a_next] - dist[a_prev][f] - dist[l][a_next]
                               + dist[x][f] + dist[l][y] - dist[x][y])
        if bound is not None and move.delta_distance >= bound:
            return False
        seg_load = A.cum_load[i + L] - A.cum_load[i]
        mid = seg
        if allow_infeasible:
            pa = _join_penalty(inst, A, i, (), A, i + L + 1, 0.0)
            pb = _join_penalty(inst, B, j, mid, B, j + 1, seg_load)
            move.delta_penalty = pa + pb - A.penalty - B.penalty
            return pa + pb <= EPS
        return (_join_feasible(inst, B, j, mid, B, j + 1, seg_load)
                and _join_feasible(inst, A, i, (), A, i + L + 1, 0.0))
    if kind == EXCHANGE:
        u = A.customers[i]
        v = B.customers[j]
        ap, anx = an[i], an[i + 2]
        bp, bnx = bn[j], bn[j + 2]
        move.delta_distance = (dist[ap][v] + dist[v][anx] - dist[ap][u] - dist[u][anx]
                               + dist[bp][u] + dist[u][bnx] - dist[bp][v] - dist[v][bnx])
        if bound is not None and move.delta_distance >= bound:
            return False
        if allow_infeasible:
            pa = _join_penalty(inst, A, i, (v,), A, i + 2, demand[v])
            pb = _join_penalty(inst, B, j, (u,), B, j + 2, demand[u])
            move.delta_penalty = pa + pb - A.penalty - B.penalty
            return pa + pb <= EPS
        return (_join_feasible(inst, A, i, (v,), A, i + 2, demand[v])
                and _join_feasible(inst, B, j, (u,), B, j + 2, demand[u]))
    if kind == TWO_OPT_STAR:
        a1, a2 = an[i + 1], an[i + 2]
        b1, b2 = bn[j + 1], bn[j + 2]
        move.delta_distance = dist[a1][b2] + dist[b1][a2] - dist[a1][a2] - dist[b1][b2]
        if bound is not None and move.delta_distance >= bound:
            return False
        if allow_infeasible:
            pa = _join_penalty(inst, A, i + 1, (), B, j + 2, 0.0)
            pb = _join_penalty(inst, B, j + 1, (), A, i + 2, 0.0)
            move.delta_penalty = pa + pb - A.penalty - B.penalty
            return pa + pb <= EPS
        return (_join_feasible(inst, A, i + 1, (), B, j + 2, 0.0)
                and _join_feasible(inst, B, j + 1, (), A, i + 2, 0.0))
    raise ValueError(f"unknown move kind {kind!r}")


# -- generation -------------------------------------------------------------

def _candidates(solution: Solution, u: int, v: int, max_segment: int = 3) -> Iterator[Move]:
    """Structurally valid moves pairing focus ``u`` with neighbor ``v``."""
    ru, pu = solution.route_of[u], solution.pos_of[u]
    rv, pv = solution.route_of[v], solution.pos_of[v]
    if ru == -1 or rv == -1:
        return
    nu = len(solution.routes[ru].customers)
    nv = len(solution.routes[rv].customers)
    same = ru == rv
    for L in range(1, max_segment + 1):
        if pu + L > nu:
            break
        if not same and L == nu:
            break  # would empty the source route
        if same and pv >= pu and pv < pu + L:
            break  # neighbor inside the segment
        kind = RELOCATE if L == 1 else OR_OPT
        for gap in (pv, pv + 1):
            if same and pu <= gap <= pu + L:
                continue
            yield Move(kind, ru, pu, rv, gap, L)
    if not same or pu != pv:
        yield Move(EXCHANGE, ru, pu, rv, pv)
    if not same:
        for i, j in ((pu, pv - 1), (pu - 1, pv)):  # u->v, then v->u become edges
            if _two_opt_valid(i, j, nu, nv):
                yield Move(TWO_OPT_STAR, ru, i, rv, j)


def _two_opt_valid(i: int, j: int, nu: int, nv: int) -> bool:
    if i + 1 + nv - j - 1 == 0 or j + 1 + nu - i - 1 == 0:
        return False  # a route would become empty
    return not ((i == nu - 1 and j == nv - 1) or (i == -1 and j == -1))


def moves_for(solution: Solution, u: int, neighbors: list[list[int]], allow_infeasible: bool = False,
              max_segment: int = 3, bound: float | None = None) -> Iterator[Move]:
    version = solution.version
    for v in neighbors[u]:
        for mv in _candidates(solution, u, v, max_segment):
            ok = evaluate(solution, mv, allow_infeasible, bound)
            if ok or allow_infeasible:
                mv.version = version
                yield mv


def enumerate_moves(solution: Solution, scope: NeighborhoodScope, allow_infeasible: bool = False) -> Iterator[Move]:
    """All moves touching the scope customers.

    Without ``allow_infeasible`` only feasible moves are produced; with it
    every structurally valid move is produced with its F_p delta.
    """
    for u in scope.focus(solution):
        yield from moves_for(solution, u, scope.neighbors, allow_infeasible)


def linear_moves(solution: Solution, routes: Sequence[int], neighbors: list[list[int]], cap: int) -> Iterator[Move]:
    """Long or-opt segments out of the given routes, at most ``cap`` of them."""
    found = 0
    version = solution.version
    for r in routes:
        custs = solution.routes[r].customers
        n = len(custs)
        for i in range(n):
            u = custs[i]
            for L in range(4, n - i + 1):
                for v in neighbors[u]:
                    rv = solution.route_of[v]
                    if rv == -1 or rv == r:
                        continue
                    if L == n:
                        continue
                    for gap in (solution.pos_of[v], solution.pos_of[v] + 1):
                        mv = Move(OR_OPT, r, i, rv, gap, L)
                        evaluate(solution, mv, True)
                        mv.version = version
                        yield mv
                        found += 1
                        if found >= cap:
                            return


# -- application ------------------------------------------------------------

def apply_move(solution: Solution, move: Move) -> Solution:
    """Apply in place. The undo record is stored on the move."""
    if move.version != solution.version:
        raise StaleMoveError(f"move generated for version {move.version}, solution is at {solution.version}")
    seqs = new_sequences(solution, move)
    move.undo = [(r, list(solution.routes[r].customers)) for r, _ in seqs]
    for r, seq in seqs:
        solution.set_route(r, seq)
    return solution


def revert_move(solution: Solution, move: Move) -> Solution:
    if not move.undo:
        raise ValueError("move has not been applied")
    for r, seq in move.undo:
        solution.set_route(r, seq)
    move.undo = None
    return solution


# -- drivers ----------------------------------------------------------------

def perturb(solution: Solution, n_moves: int, rng: random.Random, mu: float = 0.6,
            max_attempts: int | None = None) -> int:
    """Apply ``n_moves`` random feasibility-preserving moves in place.

    Each step draws a served customer uniformly, lists its feasible moves and
    applies one of them uniformly; customers without feasible moves are
    redrawn. Returns the number applied, which falls short of ``n_moves``
    only when the draw budget (default ``20 * n_moves``) runs out.
    """
    if n_moves <= 0:
        return 0
    neighbors = solution.instance.neighbors(mu)
    served = [c for c in solution.instance.customers if solution.route_of[c] != -1]
    if not served:
        return 0
    attempts = max_attempts if max_attempts is not None else 20 * n_moves
    applied = 0
    while applied < n_moves and attempts > 0:
        attempts -= 1
        options = list(_feasible_moves(solution, rng.choice(served), neighbors))
        if not options:
            continue
        apply_move(solution, rng.choice(options))
        applied += 1
    return applied


def local_search(solution: Solution, scope: NeighborhoodScope, max_moves: int, rng: random.Random) -> int:
    """First-improvement descent on distance, restricted to the scope.

    Returns the number of improving moves applied (at most ``max_moves``).
    """
    applied = 0
    improved = True
    while improved and applied < max_moves:
        improved = False
        focus = scope.focus(solution)
        rng.shuffle(focus)
        for u in focus:
            if applied >= max_moves:
                break
            mv = _first_improving_move(solution, u, scope.neighbors)
            if mv is not None:
                apply_move(solution, mv)
                applied += 1
                improved = True
    return applied


def _first_improving_move(solution: Solution, u: int, neighbors: list[list[int]]) -> Move | None:
    """First feasible distance-improving move for ``u``, in ``moves_for`` order."""
    return next(_feasible_moves(solution, u, neighbors, -EPS), None)


def _feasible_moves(solution: Solution, u: int, neighbors: list[list[int]], bound: float | None = None) -> Iterator[Move]:
    """Feasible moves for ``u`` in ``moves_for`` order, with distance deltas.

    Inter-route shapes are evaluated inline. With ``bound`` set, only moves
    whose distance delta is below it are produced, and feasibility is tested
    only for those.
    """
    ra = solution.route_of[u]
    if ra == -1:
        return
    inst = solution.instance
    dist, demand = inst.dist, inst.demand
    routes = solution.routes
    route_of, pos_of = solution.route_of, solution.pos_of
    version = solution.version
    limit = float("inf") if bound is None else bound
    A = routes[ra]
    custs = A.customers
    nu = len(custs)
    an = A.nodes
    i = pos_of[u]
    removal = []
    for L in range(1, 4):
        if i + L > nu or L == nu:
            break
        seg = custs[i:i + L]
        removal.append((L, seg, A.cum_load[i + L] - A.cum_load[i],
                        dist[an[i]][an[i + L + 1]] - dist[an[i]][seg[0]] - dist[seg[-1]][an[i + L + 1]], None))
    for v in neighbors[u]:
        rb = route_of[v]
        if rb == -1:
            continue
        if rb == ra:
            for mv in _candidates(solution, u, v):
                if evaluate(solution, mv, False, bound) and mv.delta_distance < limit:
                    mv.version = version
                    yield mv
            continue
        B = routes[rb]
        bn = B.nodes
        pv = pos_of[v]
        nv = len(B.customers)
        b_room = inst.capacity - B.load + EPS
        for idx, (L, seg, seg_load, da_dist, a_ok) in enumerate(removal):
            if seg_load > b_room:
                continue
            f, l = seg[0], seg[-1]
            for gap in (pv, pv + 1):
                x, y = bn[gap], bn[gap + 1]
                dd = da_dist + dist[x][f] + dist[l][y] - dist[x][y]
                if dd >= limit or not _join_feasible(inst, B, gap, seg, B, gap + 1, seg_load):
                    continue
                if a_ok is None:
                    a_ok = _join_feasible(inst, A, i, (), A, i + L + 1, 0.0)
                    removal[idx] = (L, seg, seg_load, da_dist, a_ok)
                if a_ok:
                    yield Move(RELOCATE if L == 1 else OR_OPT, ra, i, rb, gap, L, dd, 0.0, version)
        ap, anx = an[i], an[i + 2]
        bp, bnx = bn[pv], bn[pv + 2]
        dd = (dist[ap][v] + dist[v][anx] - dist[ap][u] - dist[u][anx]
              + dist[bp][u] + dist[u][bnx] - dist[bp][v] - dist[v][bnx])
        if dd < limit and _join_feasible(inst, A, i, (v,), A, i + 2, demand[v]) \
                and _join_feasible(inst, B, pv, (u,), B, pv + 2, demand[u]):
            yield Move(EXCHANGE, ra, i, rb, pv, 1, dd, 0.0, version)
        for ti, tj in ((i, pv - 1), (i - 1, pv)):
            if ti + nv == tj or tj + nu == ti or (ti == nu - 1 and tj == nv - 1) or (ti == -1 and tj == -1):
                continue
            a1, a2 = an[ti + 1], an[ti + 2]
            b1, b2 = bn[tj + 1], bn[tj + 2]
            dd = dist[a1][b2] + dist[b1][a2] - dist[a1][a2] - dist[b1][b2]
            if dd < limit and _join_feasible(inst, A, ti + 1, (), B, tj + 2, 0.0) \
                    and _join_feasible(inst, B, tj + 1, (), A, ti + 2, 0.0):
                yield Move(TWO_OPT_STAR, ra, ti, rb, tj, 1, dd, 0.0, version)


def _best_repair_move(solution: Solution, bad: Sequence[int], neighbors: list[list[int]]) -> Move | None:
    """Best (delta F_p, delta distance) move out of the given routes.

    Scans the same candidate set as ``moves_for(..., allow_infeasible=True)``
    but evaluates inter-route shapes inline, which matters because repair
    is the hot loop of both phases.
    """
    inst = solution.instance
    dist, demand = inst.dist, inst.demand
    routes = solution.routes
    route_of, pos_of = solution.route_of, solution.pos_of
    version = solution.version
    best = None
    best_key = (-EPS, 0.0)
    for ra in bad:
        A = routes[ra]
        custs = A.customers
        nu = len(custs)
        an = A.nodes
        a_pen = A.penalty
        for i, u in enumerate(custs):
            # penalty of A after removing a segment starting at u, per length
            removal = []
            for L in range(1, 4):
                if i + L > nu or L == nu:
                    break
                seg = custs[i:i + L]
                removal.append((L, seg, A.cum_load[i + L] - A.cum_load[i],
                                _join_penalty(inst, A, i, (), A, i + L + 1, 0.0) - a_pen,
                                dist[an[i]][an[i + L + 1]] - dist[an[i]][seg[0]] - dist[seg[-1]][an[i + L + 1]]))
            for v in neighbors[u]:
                rb = route_of[v]
                if rb == -1:
                    continue
                if rb == ra:
                    for mv in _candidates(solution, u, v):
                        evaluate(solution, mv, True)
                        key = (mv.delta_penalty, mv.delta_distance)
                        if key < best_key:
                            mv.version = version
                            best, best_key = mv, key
                    continue
                B = routes[rb]
                bn = B.nodes
                pv = pos_of[v]
                nv = len(B.customers)
                base = a_pen + B.penalty
                b_pen = B.penalty
                b_room = inst.capacity - B.load
                b_excess = -b_room if b_room < 0.0 else 0.0
                for L, seg, seg_load, da_pen, da_dist in removal:
                    # insertion never lowers B's time warp, so only its excess can move
                    over = seg_load - b_room
                    if da_pen + (over if over > 0.0 else 0.0) - b_excess > best_key[0] + EPS:
                        continue
                    f, l = seg[0], seg[-1]
                    for gap in (pv, pv + 1):
                        dp = da_pen + _join_penalty(inst, B, gap, seg, B, gap + 1, seg_load) - b_pen
                        if dp > best_key[0]:
                            continue
                        x, y = bn[gap], bn[gap + 1]
                        key = (dp, da_dist + dist[x][f] + dist[l][y] - dist[x][y])
                        if key < best_key:
                            best = Move(RELOCATE if L == 1 else OR_OPT, ra, i, rb, gap, L, key[1], key[0], version)
                            best_key = key
                ap, anx = an[i], an[i + 2]
                bp, bnx = bn[pv], bn[pv + 2]
                # A with v in u's place is no better than A without u
                if removal and removal[0][3] - b_pen > best_key[0] + EPS:
                    dp = best_key[0] + 1.0
                else:
                    dp = (_join_penalty(inst, A, i, (v,), A, i + 2, demand[v])
                          + _join_penalty(inst, B, pv, (u,), B, pv + 2, demand[u]) - base)
                if dp <= best_key[0]:
                    key = (dp, dist[ap][v] + dist[v][anx] - dist[ap][u] - dist[u][anx]
                           + dist[bp][u] + dist[u][bnx] - dist[bp][v] - dist[v][bnx])
                    if key < best_key:
                        best = Move(EXCHANGE, ra, i, rb, pv, 1, key[1], key[0], version)
                        best_key = key
                for ti, tj in ((i, pv - 1), (i - 1, pv)):
                    # neither route may end up empty, and whole-route swaps are no-ops
                    if ti + nv == tj or tj + nu == ti or (ti == nu - 1 and tj == nv - 1) or (ti == -1 and tj == -1):
                        continue
                    # both kept prefixes carry their warp into the new routes
                    if A.cum_warp[ti + 1] + B.cum_warp[tj + 1] - base > best_key[0] + EPS:
                        continue
                    dp = (_join_penalty(inst, A, ti + 1, (), B, tj + 2, 0.0)
                          + _join_penalty(inst, B, tj + 1, (), A, ti + 2, 0.0) - base)
                    if dp > best_key[0]:
                        continue
                    a1, a2 = an[ti + 1], an[ti + 2]
                    b1, b2 = bn[tj + 1], bn[tj + 2]
                    key = (dp, dist[a1][b2] + dist[b1][a2] - dist[a1][a2] - dist[b1][b2])
                    if key < best_key:
                        best = Move(TWO_OPT_STAR, ra, ti, rb, tj, 1, key[1], key[0], version)
                        best_key = key
    return best


def penalty_descent(solution: Solution, neighbors: list[list[int]], max_moves: int = 1000,
                    linear_cap: int = 100, rng: random.Random | None = None) -> bool:
    """Drive F_p to zero with best-improvement moves out of infeasible routes.

    Constant-time move kinds are tried first; when none lowers F_p, long
    or-opt segments (up to ``linear_cap`` candidates) are tried. Returns
    True once F_p reaches zero; the solution is left as-is on failure.
    """
    applied = 0
    while True:
        bad = [r for r, route in enumerate(solution.routes) if route.penalty > EPS]
        if not bad:
            return True
        if applied >= max_moves:
            return False
        if rng is not None:
            rng.shuffle(bad)
        best = _best_repair_move(solution, bad, neighbors)
        if best is None:
            best_key = (-EPS, 0.0)
            for mv in linear_moves(solution, bad, neighbors, linear_cap):
                key = (mv.delta_penalty, mv.delta_distance)
                if key < best_key:
                    best, best_key = mv, key
        if best is None:
            return False
        apply_move(solution, best)
        applied += 1
