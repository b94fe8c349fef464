"""In-process HiGHS backend through :func:`scipy.optimize.milp`."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import csr_matrix

from ..model import IlpModel
from ..subtours import IntegerSolution
from .base import (BackendCapabilities, BackendError, SolveLimits, SolveOutcome,
                   SolveStatus, check_optimal)


class HighsBackend:
    name = "highs"
    capabilities = BackendCapabilities(reports_incumbents=False, accepts_warm_start=False,
                                       deterministic=True)

    def __repr__(self) -> str:
        return "HighsBackend()"

    def solve(self, model: IlpModel, warm_start: Sequence[int] | None = None,
              limits: SolveLimits | None = None) -> SolveOutcome:
        limits = limits or SolveLimits()
        m = model.num_vars
        rows = model.rows
        data, ri, ci = [], [], []
        lb = np.empty(len(rows))
        ub = np.empty(len(rows))
        for r, row in enumerate(rows):
            for e, c in row.terms:
                data.append(c)
                ri.append(r)
                ci.append(e)
            lb[r] = row.rhs if row.sense in (">=", "=") else -np.inf
            ub[r] = row.rhs if row.sense in ("<=", "=") else np.inf
        a = csr_matrix((data, (ri, ci)), shape=(len(rows), m))
        options = {"disp": False, "presolve": True, "mip_rel_gap": 0.0}
        if limits.time_limit_seconds is not None:
            options["time_limit"] = limits.time_limit_seconds
        if limits.node_limit is not None:
            options["node_limit"] = limits.node_limit
        res = milp(np.asarray(model.objective, dtype=float),
                   constraints=LinearConstraint(a, lb, ub),
                   integrality=np.ones(m), bounds=Bounds(0, 1), options=options)
        if res.status == 2:
            return SolveOutcome(SolveStatus.INFEASIBLE)
        if res.x is None:
            if res.status == 1:
                return SolveOutcome(SolveStatus.LIMIT_REACHED)
            raise BackendError(f"HiGHS failed: {res.message}")
        x = np.rint(res.x)
        if np.abs(res.x - x).max() > 1e-6:
            raise BackendError("HiGHS returned a fractional point")
        sol = IntegerSolution.of(np.flatnonzero(x > 0.5))
        status = SolveStatus.OPTIMAL if res.status == 0 else SolveStatus.LIMIT_REACHED
        outcome = SolveOutcome(status, sol, model.objective_value(sol.chosen))
        return check_optimal(model, outcome)
