"""ILP model of the symmetric TSP with lazily added subtour elimination rows.

The base model is the minimum-weight 2-matching: one binary variable per edge
and a degree-2 equation per vertex.  Subtour elimination constraints (SECs)
are appended as rows in one of three forms:

* ``packing``: sum of x_e over edges inside S <= |S| - 1
* ``cut``:     sum of x_e over edges leaving S >= 2
* ``hybrid``:  packing when 3|S| <= 2n + 1, cut otherwise, which always
  picks the form with fewer nonzeros.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .instances import Instance, edge_index


class SecForm(str, enum.Enum):
    PACKING = "packing"
    CUT = "cut"
    HYBRID = "hybrid"


class SecStatus(str, enum.Enum):
    ACTIVE = "active"
    CONSIDERED = "considered"
    FIXED = "fixed"
    DROPPED = "dropped"


def canonical_key(subset: Iterable[int], n: int) -> tuple[int, ...]:
    """Identity shared by ``S`` and ``V - S``.

    The smaller side wins; on equal size the lexicographically smaller
    sorted tuple wins.
    """
    s = tuple(sorted(set(subset)))
    if not 1 <= len(s) <= n - 1:
        raise ValueError(f"subset size {len(s)} out of range for n={n}")
    members = set(s)
    comp = tuple(v for v in range(n) if v not in members)
    if len(s) != len(comp):
        return s if len(s) < len(comp) else comp
    return min(s, comp)


@dataclass
class Sec:
    """One subtour elimination constraint, stored as generated."""

    subset: tuple[int, ...]
    key: tuple[int, ...]
    status: SecStatus = SecStatus.ACTIVE
    origin: str = "iteration"
    form: SecForm | None = None  # overrides the model's form when set

    @classmethod
    def make(cls, subset: Iterable[int], n: int, origin: str = "iteration",
             status: SecStatus = SecStatus.ACTIVE) -> "Sec":
        s = tuple(sorted(set(subset)))
        if not 3 <= len(s) <= n - 1:
            raise ValueError(f"SEC subset size {len(s)} out of range [3, {n - 1}]")
        return cls(s, canonical_key(s, n), status, origin)


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple[tuple[int, int], ...]
    sense: str
    rhs: int
    name: str = ""

    def __post_init__(self) -> None:
        if self.sense not in ("<=", ">=", "="):
            raise ValueError(f"bad sense {self.sense!r}")
        idx = [i for i, _ in self.terms]
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate edge index in row {self.name}")
        if any(c == 0 for _, c in self.terms):
            raise ValueError(f"zero coefficient in row {self.name}")

    def activity(self, chosen: set[int] | frozenset[int]) -> int:
        return sum(c for i, c in self.terms if i in chosen)

    def satisfied(self, chosen: set[int] | frozenset[int]) -> bool:
        a = self.activity(chosen)
        if self.sense == "<=":
            return a <= self.rhs
        if self.sense == ">=":
            return a >= self.rhs
        return a == self.rhs


def use_packing(size: int, n: int) -> bool:
    """Hybrid rule, in integers: |S| <= (2n + 1) / 3."""
    return 3 * size <= 2 * n + 1


def sec_row(sec: Sec | Sequence[int], form: SecForm | str, n: int,
            name: str = "") -> LinearConstraint:
    subset = sec.subset if isinstance(sec, Sec) else tuple(sorted(set(sec)))
    k = len(subset)
    if not 3 <= k <= n - 1:
        raise ValueError(f"SEC subset size {k} out of range [3, {n - 1}]")
    form = SecForm(form)
    if form is SecForm.HYBRID:
        form = SecForm.PACKING if use_packing(k, n) else SecForm.CUT
    if form is SecForm.PACKING:
        terms = tuple(sorted((edge_index(u, v), 1)
                             for i, u in enumerate(subset) for v in subset[i + 1:]))
        return LinearConstraint(terms, "<=", k - 1, name)
    members = set(subset)
    outside = [v for v in range(n) if v not in members]
    terms = tuple(sorted((edge_index(u, v), 1) for u in subset for v in outside))
    return LinearConstraint(terms, ">=", 2, name)


@dataclass
class IlpModel:
    """Objective, degree rows and SEC rows over the edges of ``inst``."""

    inst: Instance
    degree_rows: list[LinearConstraint]
    sec_rows: list[LinearConstraint] = field(default_factory=list)
    secs: list[Sec] = field(default_factory=list)
    form: SecForm = SecForm.HYBRID

    @property
    def n(self) -> int:
        return self.inst.n

    @property
    def num_vars(self) -> int:
        return self.inst.m

    @property
    def objective(self) -> Sequence[int]:
        return self.inst.weights

    @property
    def rows(self) -> list[LinearConstraint]:
        return self.degree_rows + self.sec_rows

    def add_sec(self, sec: Sec) -> LinearConstraint:
        row = sec_row(sec, sec.form or self.form, self.n, name=f"s{len(self.sec_rows)}")
        self.secs.append(sec)
        self.sec_rows.append(row)
        return row

    def with_secs(self, secs: Iterable[Sec]) -> "IlpModel":
        m = IlpModel(self.inst, list(self.degree_rows), list(self.sec_rows),
                     list(self.secs), self.form)
        for s in secs:
            m.add_sec(s)
        return m

    def objective_value(self, chosen: Iterable[int]) -> int:
        w = self.inst.weights
        return int(sum(int(w[i]) for i in chosen))

    def is_feasible(self, chosen: Iterable[int]) -> bool:
        c = set(chosen)
        if any(not 0 <= i < self.num_vars for i in c):
            return False
        return all(r.satisfied(c) for r in self.rows)


def build_base_model(inst: Instance, form: SecForm | str = SecForm.HYBRID) -> IlpModel:
    n = inst.n
    rows = []
    for v in range(n):
        terms = tuple(sorted((edge_index(u, v), 1) for u in range(n) if u != v))
        rows.append(LinearConstraint(terms, "=", 2, name=f"d{v}"))
    return IlpModel(inst, rows, form=SecForm(form))
