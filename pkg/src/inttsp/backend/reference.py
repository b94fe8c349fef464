"""Exact depth-first branch-and-bound over the binary edge variables.

Variables are fixed one at a time in nondecreasing weight order (ties by
edge index), trying 1 before 0.  Every row keeps the interval of activities
still reachable from the current partial assignment, so a fixing that
makes any row (degree or SEC) unsatisfiable is rejected on the spot.  The
bound adds, for every vertex still short of degree 2, its cheapest
remaining usable incident edges, halved.

The search starts from the 2-opt/Or-opt tour (or the caller's warm start
when that is cheaper): a Hamiltonian tour satisfies the degree rows and
every SEC, so it is always a valid upper bound.

Among equal-cost optima the lexicographically smallest sorted edge-index
tuple is returned.  Every improved feasible leaf is reported as an
incumbent.
"""

from __future__ import annotations

import time
from bisect import bisect_left
from typing import Sequence

from ..heuristics import warm_start_tour
from ..model import IlpModel
from ..subtours import IntegerSolution
from .base import (BackendCapabilities, CapacityError, SolveLimits, SolveOutcome,
                   SolveStatus, tour_edges)

DEFAULT_CAP = 16


class _Stop(Exception):
    pass


class ReferenceBackend:
    name = "reference"
    capabilities = BackendCapabilities(reports_incumbents=True, accepts_warm_start=True,
                                       deterministic=True)

    def __init__(self, cap: int = DEFAULT_CAP):
        self.cap = cap

    def solve(self, model: IlpModel, warm_start: Sequence[int] | None = None,
              limits: SolveLimits | None = None) -> SolveOutcome:
        return reference_solve(model, limits, warm_start=warm_start, cap=self.cap)

    def __repr__(self) -> str:
        return f"ReferenceBackend(cap={self.cap})"


def reference_solve(model: IlpModel, limits: SolveLimits | None = None,
                    warm_start: Sequence[int] | None = None,
                    cap: int = DEFAULT_CAP) -> SolveOutcome:
    n = model.n
    if n > cap:
        raise CapacityError(f"reference backend handles n <= {cap}, got n={n}")
    limits = limits or SolveLimits()
    m = model.num_vars
    w = [int(x) for x in model.inst.weights]
    ends = [model.inst.endpoints(e) for e in range(m)]
    order = sorted(range(m), key=lambda e: (w[e], e))
    pos_w = [w[e] for e in order]

    rows = model.rows
    nrows = len(rows)
    rhs = [r.rhs for r in rows]
    upper = [r.sense in ("<=", "=") for r in rows]
    lower = [r.sense in (">=", "=") for r in rows]
    lo = [0] * nrows
    hi = [0] * nrows
    row_of: list[list[tuple[int, int]]] = [[] for _ in range(m)]
    for r, row in enumerate(rows):
        for e, c in row.terms:
            row_of[e].append((r, c))
            if c < 0:
                lo[r] += c
            else:
                hi[r] += c
    if any((upper[r] and lo[r] > rhs[r]) or (lower[r] and hi[r] < rhs[r]) for r in range(nrows)):
        return SolveOutcome(SolveStatus.INFEASIBLE)

    # incident edge positions per vertex, in branching order
    vpos: list[list[int]] = [[] for _ in range(n)]
    for k, e in enumerate(order):
        u, v = ends[e]
        vpos[u].append(k)
        vpos[v].append(k)
    other = [[ends[order[k]][0] ^ ends[order[k]][1] ^ v for k in vpos[v]] for v in range(n)]
    need = [2] * n

    best_obj: int | None = None
    best_set: tuple[int, ...] | None = None
    incumbents: list[IntegerSolution] = []
    starts = [warm_start_tour(model.inst).order]
    if warm_start is not None:
        starts.append(tuple(warm_start))
    for tour in starts:
        if sorted(tour) != list(range(n)):
            continue
        chosen0 = tour_edges(tour)
        if not model.is_feasible(chosen0):
            continue
        obj0, set0 = model.objective_value(chosen0), tuple(sorted(chosen0))
        if best_obj is None or (obj0, set0) < (best_obj, best_set):
            best_obj, best_set = obj0, set0

    deadline = None if limits.time_limit_seconds is None else time.monotonic() + limits.time_limit_seconds
    node_limit = limits.node_limit
    nodes = 0
    chosen: list[int] = []

    def fix(e: int, b: int) -> bool:
        ok = True
        for r, c in row_of[e]:
            if b:
                if c > 0:
                    lo[r] += c
                else:
                    hi[r] += c
            else:
                if c > 0:
                    hi[r] -= c
                else:
                    lo[r] -= c
            if (upper[r] and lo[r] > rhs[r]) or (lower[r] and hi[r] < rhs[r]):
                ok = False
        if not ok:
            unfix(e, b)
        return ok

    def unfix(e: int, b: int) -> None:
        for r, c in row_of[e]:
            if b:
                if c > 0:
                    lo[r] -= c
                else:
                    hi[r] -= c
            else:
                if c > 0:
                    hi[r] += c
                else:
                    lo[r] += c

    def bound(k: int) -> int | None:
        total = 0
        for v in range(n):
            nv = need[v]
            if nv <= 0:
                continue
            ps = vpos[v]
            ov = other[v]
            i = bisect_left(ps, k)
            got = 0
            while got < nv and i < len(ps):
                if need[ov[i]] > 0:
                    total += pos_w[ps[i]]
                    got += 1
                i += 1
            if got < nv:
                return None
        return (total + 1) // 2

    def dfs(k: int, cost: int) -> None:
        nonlocal nodes, best_obj, best_set
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise _Stop
        if deadline is not None and nodes & 1023 == 0 and time.monotonic() > deadline:
            raise _Stop
        if k == m:
            cand = tuple(sorted(chosen))
            if best_obj is None or cost < best_obj or (cost == best_obj and cand < best_set):
                best_obj, best_set = cost, cand
                incumbents.append(IntegerSolution(frozenset(cand)))
            return
        lb = bound(k)
        if lb is None:
            return
        if best_obj is not None and cost + lb > best_obj:
            return
        e = order[k]
        u, v = ends[e]
        if need[u] > 0 and need[v] > 0 and fix(e, 1):
            need[u] -= 1
            need[v] -= 1
            chosen.append(e)
            dfs(k + 1, cost + w[e])
            chosen.pop()
            need[u] += 1
            need[v] += 1
            unfix(e, 1)
        if fix(e, 0):
            dfs(k + 1, cost)
            unfix(e, 0)

    status = SolveStatus.OPTIMAL
    try:
        dfs(0, 0)
    except _Stop:
        status = SolveStatus.LIMIT_REACHED
    if best_set is None:
        if status is SolveStatus.OPTIMAL:
            status = SolveStatus.INFEASIBLE
        return SolveOutcome(status, None, None, incumbents, nodes)
    return SolveOutcome(status, IntegerSolution(frozenset(best_set)), best_obj, incumbents, nodes)
