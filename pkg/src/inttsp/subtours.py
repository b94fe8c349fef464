"""Cycle extraction from integer 2-matchings and the SEC pool."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .instances import Instance, edge_endpoints, edge_weight
from .model import Sec, SecForm, SecStatus, canonical_key


class IntegrityError(RuntimeError):
    """A solution handed back by a backend violates the degree equations."""


@dataclass(frozen=True)
class IntegerSolution:
    chosen: frozenset[int]

    @classmethod
    def of(cls, edges: Iterable[int]) -> "IntegerSolution":
        return cls(frozenset(int(e) for e in edges))

    def sorted_edges(self) -> tuple[int, ...]:
        return tuple(sorted(self.chosen))


Cycle = tuple[int, ...]


def extract_subtours(sol: IntegerSolution, inst_or_n: Instance | int) -> list[Cycle]:
    """Split a 2-matching into its cycles.

    Each cycle starts at its smallest vertex and continues towards the
    smaller of that vertex's two neighbours; cycles are ordered by first
    vertex.
    """
    n = inst_or_n if isinstance(inst_or_n, int) else inst_or_n.n
    adj: list[list[int]] = [[] for _ in range(n)]
    for e in sol.chosen:
        u, v = edge_endpoints(e)
        if v >= n:
            raise IntegrityError(f"edge {e} outside a graph on {n} vertices")
        adj[u].append(v)
        adj[v].append(u)
    bad = [v for v in range(n) if len(adj[v]) != 2]
    if bad:
        raise IntegrityError(
            f"vertex {bad[0]} has degree {len(adj[bad[0]])} in the returned solution"
        )
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        prev, cur = start, min(adj[start])
        while cur != start:
            seen[cur] = True
            cyc.append(cur)
            a, b = adj[cur]
            prev, cur = cur, (b if a == prev else a)
        cycles.append(tuple(cyc))
    return cycles


def cycle_length(inst: Instance, cyc: Sequence[int]) -> int:
    k = len(cyc)
    return sum(edge_weight(inst, cyc[i], cyc[(i + 1) % k]) for i in range(k))


class SecPool:
    """SECs keyed by canonical key; complements collapse onto one entry.

    Entries flagged ``considered`` (hierarchical drop variant) are kept out
    of models; regenerating one promotes it to ``fixed``.
    """

    def __init__(self, n: int):
        self.n = n
        self.entries: dict[tuple[int, ...], Sec] = {}
        self.origins: Counter[str] = Counter()
        self.promoted: list[tuple[int, ...]] = []

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key) -> bool:
        return key in self.entries

    def add(self, sec: Sec) -> bool:
        """Insert ``sec``; True when it should become a model row."""
        old = self.entries.get(sec.key)
        if old is None:
            self.entries[sec.key] = sec
            self.origins[sec.origin] += 1
            return sec.status in (SecStatus.ACTIVE, SecStatus.FIXED)
        if old.status is SecStatus.CONSIDERED and sec.status is not SecStatus.CONSIDERED:
            old.status = SecStatus.FIXED
            self.promoted.append(old.key)
            return True
        return False

    def in_model(self) -> list[Sec]:
        return [s for s in self.entries.values()
                if s.status in (SecStatus.ACTIVE, SecStatus.FIXED)]

    def by_status(self, status: SecStatus) -> list[Sec]:
        return [s for s in self.entries.values() if s.status is status]

    def counts(self) -> dict[str, int]:
        c = Counter(s.status.value for s in self.entries.values())
        return {st.value: c.get(st.value, 0) for st in SecStatus}

    def summary(self) -> dict:
        return {"size": len(self), "status": self.counts(), "origin": dict(sorted(self.origins.items()))}

    def dump(self) -> str:
        """One SEC per line: ``status origin v1 v2 ...``."""
        lines = [f"{s.status.value} {s.origin} " + " ".join(map(str, s.subset))
                 for s in self.entries.values()]
        return "\n".join(lines) + ("\n" if lines else "")


def add_violated(pool: SecPool, cycles: Iterable[Sequence[int]], origin: str = "iteration") -> list[Sec]:
    """Add one SEC per proper cycle; returns the SECs that became model rows."""
    added = []
    for cyc in cycles:
        if len(cyc) >= pool.n:
            continue
        if len(cyc) < 3:
            raise ValueError(f"cycle of size {len(cyc)} cannot come from a 2-matching")
        sec = Sec.make(cyc, pool.n, origin)
        if pool.add(sec):
            added.append(pool.entries[sec.key])
    return added


def harvest_incumbents(pool: SecPool, incumbents: Iterable[IntegerSolution]) -> list[Sec]:
    added = []
    for sol in incumbents:
        added.extend(add_violated(pool, extract_subtours(sol, pool.n), "incumbent"))
    return added


def seed_triangle_secs(inst: Instance, p: float | Fraction) -> list[Sec]:
    """The floor(p * C(n, 3)) shortest triangles as packing SECs."""
    if not 0 <= p <= 1:
        raise ValueError(f"fraction must lie in [0, 1], got {p}")
    n = inst.n
    total = math.comb(n, 3)
    frac = Fraction(p).limit_denominator(10**9) if isinstance(p, float) else Fraction(p)
    count = math.floor(frac * total)
    if count == 0 or n < 4:
        return []
    tri = np.array(list(itertools.combinations(range(n), 3)), dtype=np.int64)
    d = inst.matrix()
    per = d[tri[:, 0], tri[:, 1]] + d[tri[:, 1], tri[:, 2]] + d[tri[:, 0], tri[:, 2]]
    order = np.lexsort((tri[:, 2], tri[:, 1], tri[:, 0], per))[:count]
    secs = []
    for a, b, c in tri[order]:
        s = Sec.make((int(a), int(b), int(c)), n, "seed_triangle")
        s.form = SecForm.PACKING
        secs.append(s)
    return secs


def filter_subtours(cycles: Sequence[Cycle], p: float, key: str = "cardinality",
                    inst: Instance | None = None) -> list[Cycle]:
    """Keep the ceil(p * k) smallest cycles, never fewer than one."""
    if not 0 < p <= 1:
        raise ValueError(f"fraction must lie in (0, 1], got {p}")
    if not cycles:
        return []
    if key in ("cardinality", "card"):
        measure = len
    elif key in ("length", "len"):
        if inst is None:
            raise ValueError("length filter needs the instance")
        measure = lambda c: cycle_length(inst, c)  # noqa: E731
    else:
        raise ValueError(f"unknown filter key {key!r}")
    keep = max(1, math.ceil(Fraction(p).limit_denominator(10**9) * len(cycles)))
    ranked = sorted(cycles, key=lambda c: (measure(c), tuple(sorted(c))))
    return ranked[:keep]


def hcd_reconcile(pool: SecPool, regenerated: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """Promote considered entries whose subtour shows up again.

    Returns the keys that flipped from considered to fixed.
    """
    flipped = []
    for cyc in regenerated:
        if len(cyc) >= pool.n:
            continue
        key = canonical_key(cyc, pool.n)
        sec = pool.entries.get(key)
        if sec is not None and sec.status is SecStatus.CONSIDERED:
            sec.status = SecStatus.FIXED
            pool.promoted.append(key)
            flipped.append(key)
    return flipped


def drop_considered(pool: SecPool) -> int:
    """Close a hierarchical node: unpromoted considered entries are dropped."""
    dropped = 0
    for sec in pool.entries.values():
        if sec.status is SecStatus.CONSIDERED:
            sec.status = SecStatus.DROPPED
            dropped += 1
    return dropped
