"""The integer cutting-plane loop and its clustering-driven variants.

Every variant ends in the same main loop: solve the current model to
integer optimality, split the solution into cycles, add one SEC per
subtour (and per subtour of every reported incumbent), repeat until the
solution is a single tour.  Variants differ only in the SECs the main loop
starts from:

* ``basic``          none
* ``cluster(c)``     SECs from solving each single-linkage cluster
* ``restricted(c)``  same with clusters grown to at least 3 vertices
* ``restricted_n``   restricted clustering started from n singletons
* ``hc(u)``          SECs propagated bottom-up through the clustering tree
* ``hcd(u)``         like ``hc`` but a child's SECs only survive a parent
  solve that regenerates them
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .backend import Backend, SolveLimits, SolveStatus
from .clustering import (ClusterTree, build_cluster_tree, cluster, cut_tree_at,
                         restricted_cluster)
from .heuristics import Tour, warm_start_tour
from .instances import Instance
from .model import IlpModel, Sec, SecForm, SecStatus, build_base_model
from .subtours import (SecPool, add_violated, extract_subtours, filter_subtours,
                       seed_triangle_secs)

VARIANTS = ("basic", "cluster", "restricted", "restricted_n", "hc", "hcd")


class LoopInvariantError(AssertionError):
    pass


def default_u(n: int) -> int:
    return max(3, math.floor(4 * n / math.log2(n)))


@dataclass
class VariantConfig:
    variant: str = "basic"
    c: int | None = None
    u: int | None = None
    sec_form: SecForm = SecForm.HYBRID
    harvest_incumbents: bool = True
    warm_start: bool = False
    seed_triangles_p: float = 0.0
    filter: tuple[float, str] | None = None
    limits: SolveLimits = field(default_factory=SolveLimits)
    workers: int = 1

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        self.sec_form = SecForm(self.sec_form)
        if self.variant in ("cluster", "restricted") and (self.c is None or self.c < 1):
            raise ValueError(f"variant {self.variant} needs a cluster count c >= 1")
        if self.u is not None and self.u < 3:
            raise ValueError(f"size bound u must be at least 3, got {self.u}")

    @classmethod
    def parse(cls, text: str, **kw) -> "VariantConfig":
        """``basic``, ``c:K``, ``rc3:K``, ``rc3n``, ``hc[:U]`` or ``hcd[:U]``."""
        head, _, arg = text.partition(":")
        val = int(arg) if arg else None
        if head == "basic" and not arg:
            return cls("basic", **kw)
        if head == "c" and arg:
            return cls("cluster", c=val, **kw)
        if head == "rc3" and arg:
            return cls("restricted", c=val, **kw)
        if head == "rc3n" and not arg:
            return cls("restricted_n", **kw)
        if head in ("hc", "hcd"):
            return cls(head, u=val, **kw)
        raise ValueError(f"cannot parse variant {text!r}")

    @property
    def label(self) -> str:
        return {
            "basic": "basic",
            "cluster": f"c:{self.c}",
            "restricted": f"rc3:{self.c}",
            "restricted_n": "rc3n",
            "hc": "hc" if self.u is None else f"hc:{self.u}",
            "hcd": "hcd" if self.u is None else f"hcd:{self.u}",
        }[self.variant]

    def for_subproblem(self) -> "VariantConfig":
        """Settings for cluster sub-TSPs: same form and harvesting, no pre-phase."""
        return VariantConfig("basic", sec_form=self.sec_form,
                             harvest_incumbents=self.harvest_incumbents,
                             warm_start=self.warm_start, filter=self.filter,
                             limits=self.limits)


@dataclass
class IterationRecord:
    objective: int
    subtours: int
    secs_added: int


@dataclass
class RunReport:
    instance: str
    n: int
    variant: str
    sec_form: str
    status: str
    iterations: int
    constraints_final: int
    seconds: float
    objective: int | None
    tour: Tour | None
    per_iteration: list[IterationRecord]
    pool: dict
    model_keys: list[tuple[int, ...]]
    prephase_keys: list[tuple[int, ...]] = field(default_factory=list)
    c_actual: int | None = None
    subproblems: int = 0
    first_objective: int | None = None
    pool_dump: str = ""

    @property
    def complete(self) -> bool:
        return self.status == SolveStatus.OPTIMAL.value

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "instance": self.instance,
            "n": self.n,
            "variant": self.variant,
            "sec_form": self.sec_form,
            "status": self.status,
            "iterations": self.iterations,
            "constraints_final": self.constraints_final,
            "seconds": self.seconds,
            "objective": self.objective,
            "tour": list(self.tour.order) if self.tour else None,
            "per_iteration": [
                {"objective": r.objective, "subtours": r.subtours, "secs_added": r.secs_added}
                for r in self.per_iteration
            ],
            "pool": self.pool,
            "c_actual": self.c_actual,
            "subproblems": self.subproblems,
            "prephase_secs": len(self.prephase_keys),
        }


@dataclass
class _LoopResult:
    status: SolveStatus
    tour: Tour | None
    objective: int | None
    per_iteration: list[IterationRecord]
    constraints_final: int
    pool: SecPool
    model_keys: list[tuple[int, ...]]


def _integer_loop(inst: Instance, backend: Backend, config: VariantConfig,
                  initial: Sequence[Sec] = (), considered: Sequence[Sec] = ()) -> _LoopResult:
    """Main loop on ``inst``; SEC subsets are in ``inst``'s own vertex ids.

    ``considered`` SECs are known to the pool but kept out of the model
    until a solve regenerates them.
    """
    n = inst.n
    model = build_base_model(inst, config.sec_form)
    pool = SecPool(n)
    for s in considered:
        pool.add(Sec(s.subset, s.key, SecStatus.CONSIDERED, s.origin))
    seeds = list(initial)
    if config.seed_triangles_p:
        seeds.extend(seed_triangle_secs(inst, config.seed_triangles_p))
    for s in seeds:
        if pool.add(Sec(s.subset, s.key, SecStatus.ACTIVE, s.origin, s.form)):
            model.add_sec(pool.entries[s.key])

    warm = list(warm_start_tour(inst).order) if config.warm_start else None
    records: list[IterationRecord] = []
    last_obj = None
    while True:
        rows_before = len(model.sec_rows)
        outcome = backend.solve(model, warm, config.limits)
        if outcome.status is not SolveStatus.OPTIMAL:
            return _LoopResult(outcome.status, None, None, records, rows_before, pool,
                               _model_keys(model))
        obj = int(outcome.objective)
        if last_obj is not None and obj < last_obj:
            raise LoopInvariantError(f"objective decreased from {last_obj} to {obj}")
        last_obj = obj
        cycles = extract_subtours(outcome.best_solution, n)
        if len(cycles) == 1:
            records.append(IterationRecord(obj, 1, 0))
            tour = Tour(cycles[0], obj)
            return _LoopResult(SolveStatus.OPTIMAL, tour, obj, records, rows_before, pool,
                               _model_keys(model))
        in_model = set(_model_keys(model))
        for cyc in cycles:
            if Sec.make(cyc, n).key in in_model:
                raise LoopInvariantError(f"subtour {cyc} violates a row already in the model")
        chosen = cycles
        if config.filter is not None:
            p, key = config.filter
            chosen = filter_subtours(cycles, p, key, inst)
        k = len(records) + 1
        added = add_violated(pool, chosen, f"iteration:{k}")
        if config.harvest_incumbents and backend.capabilities.reports_incumbents:
            for inc in outcome.incumbents:
                added.extend(add_violated(pool, extract_subtours(inc, n), "incumbent"))
        if not added:
            raise LoopInvariantError("iteration added no new SEC")
        for s in added:
            model.add_sec(s)
        records.append(IterationRecord(obj, len(cycles), len(added)))


def _model_keys(model: IlpModel) -> list[tuple[int, ...]]:
    return [s.key for s in model.secs]


def _lift(secs: Sequence[Sec], members: Sequence[int], n: int, origin: str | None = None,
          status: SecStatus = SecStatus.ACTIVE) -> list[Sec]:
    """Map SECs from sub-instance ids to the ids of an enclosing instance."""
    out = []
    for s in secs:
        sub = tuple(members[v] for v in s.subset)
        out.append(Sec.make(sub, n, origin or s.origin, status))
    return out


def _restrict(secs: Sequence[Sec], members: Sequence[int]) -> list[Sec]:
    """Map SECs given in enclosing ids into the local ids of ``members``."""
    local = {v: i for i, v in enumerate(members)}
    k = len(members)
    return [Sec.make(tuple(local[v] for v in s.subset), k, s.origin, s.status) for s in secs]


def _finish(inst: Instance, config: VariantConfig, res: _LoopResult, start: float,
            prephase: Sequence[Sec] = (), c_actual: int | None = None,
            subproblems: int = 0) -> RunReport:
    return RunReport(
        instance=inst.name,
        n=inst.n,
        variant=config.label,
        sec_form=config.sec_form.value,
        status=res.status.value,
        iterations=len(res.per_iteration) + (0 if res.status is SolveStatus.OPTIMAL else 1),
        constraints_final=res.constraints_final,
        seconds=time.perf_counter() - start,
        objective=res.objective,
        tour=res.tour,
        per_iteration=res.per_iteration,
        pool=res.pool.summary(),
        model_keys=res.model_keys,
        prephase_keys=sorted({s.key for s in prephase}),
        c_actual=c_actual,
        subproblems=subproblems,
        first_objective=res.per_iteration[0].objective if res.per_iteration else None,
        pool_dump=res.pool.dump(),
    )


def basic_integer_tsp(inst: Instance, backend: Backend,
                      config: VariantConfig | None = None) -> RunReport:
    config = config or VariantConfig()
    start = time.perf_counter()
    res = _integer_loop(inst, backend, config)
    return _finish(inst, config, res, start)


def _solve_cluster(args) -> tuple[list[Sec], tuple[int, ...] | None, SolveStatus]:
    """Solve one induced sub-TSP; returns its SECs and tour in the sub-instance's ids."""
    sub, backend, config = args
    res = _integer_loop(sub, backend, config)
    secs = list(res.pool.in_model())
    return secs, (res.tour.order if res.tour else None), res.status


def _map(fn, tasks, workers: int):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def run_with_clustering(inst: Instance, backend: Backend, config: VariantConfig) -> RunReport:
    start = time.perf_counter()
    n = inst.n
    if config.variant == "cluster":
        clustering = cluster(inst, config.c)
    elif config.variant == "restricted":
        clustering = restricted_cluster(inst, config.c)
    elif config.variant == "restricted_n":
        clustering = restricted_cluster(inst, n)
    else:
        raise ValueError(f"variant {config.variant} is not a flat clustering variant")
    parts = [p for p in clustering.partition if 3 <= len(p) < n]
    sub_config = config.for_subproblem()
    tasks = [(inst.subinstance(p, f"{inst.name}/C{i}"), backend, sub_config)
             for i, p in enumerate(parts)]
    prephase: list[Sec] = []
    for i, (part, (secs, tour, status)) in enumerate(zip(parts, _map(_solve_cluster, tasks,
                                                                      config.workers))):
        prephase.extend(_lift(secs, part, n, f"cluster:{i}"))
        if tour is not None:
            prephase.append(Sec.make(part, n, "cluster_tour"))
    res = _integer_loop(inst, backend, config, initial=prephase)
    return _finish(inst, config, res, start, prephase, clustering.c_actual, len(parts))


@dataclass
class _NodeOutput:
    """SECs handed to the parent node, in original ids."""

    fixed: list[Sec]
    considered: list[Sec]


def _solve_subtree(args) -> tuple[dict[int, _NodeOutput], int]:
    """Bottom-up pass over one subtree of the clustering tree."""
    inst, tree, top_id, backend, config, hcd, skip_top = args
    outputs: dict[int, _NodeOutput] = {}
    solved = 0
    sub_config = config.for_subproblem()
    for node in tree.postorder(top_id):
        if node.size < 3:
            outputs[node.id] = _NodeOutput([], [])
            continue
        inherited = [outputs.pop(ch) for ch in node.children]
        fixed = _dedup([s for out in inherited for s in out.fixed])
        considered = _dedup([s for out in inherited for s in out.considered])
        if node.id == top_id and skip_top:
            outputs[node.id] = _NodeOutput(fixed, considered)
            continue
        members = node.members
        sub = inst.subinstance(members, f"{inst.name}/T{node.id}")
        if hcd:
            res = _integer_loop(sub, backend, sub_config, _restrict(fixed, members),
                                _restrict(considered, members))
        else:
            res = _integer_loop(sub, backend, sub_config, _restrict(fixed + considered, members))
        solved += 1
        origin = f"cluster:{node.merge_rank}"
        kept = [s for s in res.pool.entries.values()
                if s.status in (SecStatus.ACTIVE, SecStatus.FIXED)]
        # SECs carried in from below keep their status; new ones are this node's
        new_fixed = [s for s in kept if s.status is SecStatus.FIXED or s.key in _keys(fixed, members)]
        fresh = [s for s in kept if s not in new_fixed]
        tour_sec = [Sec.make(members, inst.n, "cluster_tour")] if (
            res.tour is not None and len(members) < inst.n) else []
        up_fixed = _lift(new_fixed, members, inst.n)
        up_fresh = _lift(fresh, members, inst.n, origin) + tour_sec
        if hcd:
            outputs[node.id] = _NodeOutput(up_fixed, up_fresh)
        else:
            outputs[node.id] = _NodeOutput(up_fixed + up_fresh, [])
    return outputs, solved


def _keys(secs: Sequence[Sec], members: Sequence[int]) -> set[tuple[int, ...]]:
    return {s.key for s in _restrict(secs, members)}


def _dedup(secs: Sequence[Sec]) -> list[Sec]:
    seen: dict[tuple[int, ...], Sec] = {}
    for s in secs:
        seen.setdefault(s.key, s)
    return list(seen.values())


def run_hierarchical(inst: Instance, backend: Backend, config: VariantConfig,
                     tree: ClusterTree | None = None) -> RunReport:
    start = time.perf_counter()
    n = inst.n
    hcd = config.variant == "hcd"
    if config.variant not in ("hc", "hcd"):
        raise ValueError(f"variant {config.variant} is not hierarchical")
    u = config.u if config.u is not None else default_u(n)
    tree = tree or build_cluster_tree(inst)
    tops = cut_tree_at(tree, u)
    root_solved_here = len(tops) == 1 and tops[0].id == tree.root
    tasks = [(inst, tree, top.id, backend, config, hcd, root_solved_here) for top in tops]
    initial: list[Sec] = []
    considered: list[Sec] = []
    solved = 0
    for top, (outputs, k) in zip(tops, _map(_solve_subtree, tasks, config.workers)):
        solved += k
        out = outputs[top.id]
        if root_solved_here and hcd:
            initial.extend(out.fixed)
            considered.extend(out.considered)
        else:
            # maximal solved clusters hand everything they found to the root
            initial.extend(out.fixed + out.considered)
    initial = _dedup(initial)
    considered = [s for s in _dedup(considered) if s.key not in {x.key for x in initial}]
    res = _integer_loop(inst, backend, config, initial=initial, considered=considered)
    return _finish(inst, config, res, start, initial + considered, len(tops), solved)


def solve(inst: Instance, backend: Backend, config: VariantConfig | None = None) -> RunReport:
    config = config or VariantConfig()
    if config.variant == "basic":
        return basic_integer_tsp(inst, backend, config)
    if config.variant in ("hc", "hcd"):
        return run_hierarchical(inst, backend, config)
    return run_with_clustering(inst, backend, config)
