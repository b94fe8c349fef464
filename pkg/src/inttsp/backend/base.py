from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from ..model import IlpModel
from ..subtours import IntegerSolution


class BackendError(RuntimeError):
    """The solver failed to produce an answer (crash, bad output, ...)."""


class CapacityError(ValueError):
    """The model is too large for this backend."""


class SolveStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    LIMIT_REACHED = "limit_reached"


@dataclass(frozen=True)
class SolveLimits:
    time_limit_seconds: float | None = None
    node_limit: int | None = None

    def __post_init__(self) -> None:
        if self.time_limit_seconds is not None and self.time_limit_seconds <= 0:
            raise ValueError("time limit must be positive")
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError("node limit must be positive")


@dataclass
class SolveOutcome:
    status: SolveStatus
    best_solution: IntegerSolution | None = None
    objective: int | None = None
    incumbents: list[IntegerSolution] = field(default_factory=list)
    nodes: int = 0


@dataclass(frozen=True)
class BackendCapabilities:
    reports_incumbents: bool = False
    accepts_warm_start: bool = False
    deterministic: bool = True


class Backend(Protocol):
    name: str
    capabilities: BackendCapabilities

    def solve(self, model: IlpModel, warm_start: Sequence[int] | None = None,
              limits: SolveLimits | None = None) -> SolveOutcome: ...


def tour_edges(order: Sequence[int]) -> frozenset[int]:
    from ..instances import edge_index

    k = len(order)
    return frozenset(edge_index(order[i], order[(i + 1) % k]) for i in range(k))


def check_optimal(model: IlpModel, outcome: SolveOutcome) -> SolveOutcome:
    """Validate a backend answer against every row of ``model``."""
    if outcome.status is SolveStatus.OPTIMAL:
        sol = outcome.best_solution
        if sol is None or not model.is_feasible(sol.chosen):
            raise BackendError("backend reported an optimum that violates the model")
        obj = model.objective_value(sol.chosen)
        if outcome.objective is not None and outcome.objective != obj:
            raise BackendError(
                f"reported objective {outcome.objective} differs from recomputed {obj}"
            )
        outcome.objective = obj
    return outcome
