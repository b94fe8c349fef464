"""Tour construction and local search used for warm starts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instances import Instance


@dataclass(frozen=True)
class Tour:
    order: tuple[int, ...]
    length: int

    @classmethod
    def of(cls, inst: Instance, order) -> "Tour":
        order = tuple(int(v) for v in order)
        if sorted(order) != list(range(inst.n)):
            raise ValueError("tour must visit every vertex exactly once")
        return cls(order, inst.tour_length(order))


def nearest_neighbor(inst: Instance, start: int = 0) -> Tour:
    if not 0 <= start < inst.n:
        raise ValueError(f"start vertex {start} out of range")
    d = inst.matrix()
    unvisited = np.ones(inst.n, dtype=bool)
    unvisited[start] = False
    order = [start]
    cur = start
    for _ in range(inst.n - 1):
        cand = np.flatnonzero(unvisited)
        # argmin returns the first minimum, i.e. the smallest vertex id on ties
        cur = int(cand[np.argmin(d[cur, cand])])
        unvisited[cur] = False
        order.append(cur)
    return Tour.of(inst, order)


def two_opt(inst: Instance, tour: Tour) -> Tour:
    """First-improvement 2-opt; the scan restarts after every applied move."""
    d = inst.matrix().tolist()
    t = list(tour.order)
    n = len(t)
    if n < 4:
        return Tour.of(inst, t)
    improved = True
    while improved:
        improved = False
        for i in range(n - 1):
            a, b = t[i], t[i + 1]
            dab = d[a][b]
            for j in range(i + 2, n if i > 0 else n - 1):
                c, e = t[j], t[(j + 1) % n]
                if d[a][c] + d[b][e] < dab + d[c][e]:
                    t[i + 1:j + 1] = reversed(t[i + 1:j + 1])
                    improved = True
                    break
            if improved:
                break
    return Tour.of(inst, t)


def or_opt(inst: Instance, tour: Tour, max_segment: int = 3) -> Tour:
    """Relocate segments of 1..``max_segment`` vertices, optionally reversed."""
    d = inst.matrix().tolist()
    t = list(tour.order)
    n = len(t)
    improved = True
    while improved:
        improved = False
        for seg in range(1, min(max_segment, n - 3) + 1):
            for i in range(n):
                segment = [t[(i + k) % n] for k in range(seg)]
                prev, nxt = t[(i - 1) % n], t[(i + seg) % n]
                removed = d[prev][segment[0]] + d[segment[-1]][nxt] - d[prev][nxt]
                rest = [t[(i + seg + k) % n] for k in range(n - seg)]
                for j in range(len(rest) - 1):
                    p, q = rest[j], rest[j + 1]
                    base = d[p][q]
                    fwd = d[p][segment[0]] + d[segment[-1]][q] - base
                    bwd = d[p][segment[-1]] + d[segment[0]][q] - base
                    if fwd < removed or bwd < removed:
                        ins = segment if fwd <= bwd else segment[::-1]
                        t = rest[:j + 1] + ins + rest[j + 1:]
                        improved = True
                        break
                if improved:
                    break
            if improved:
                break
    return Tour.of(inst, t)


def improve(inst: Instance, tour: Tour) -> Tour:
    """Alternate 2-opt and Or-opt until neither finds a move."""
    while True:
        nxt = or_opt(inst, two_opt(inst, tour))
        if nxt.length >= tour.length:
            return tour if nxt.length > tour.length else nxt
        tour = nxt


def warm_start_tour(inst: Instance) -> Tour:
    return improve(inst, nearest_neighbor(inst, 0))
