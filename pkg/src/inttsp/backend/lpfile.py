"""CPLEX LP text for TSP models, plus the solution-file protocol.

Variables are named ``x_u_v`` (``u < v``), degree rows ``dN`` and SEC rows
``sK``.  Solution files hold one ``name value`` pair per line; an
``=obj= value`` line carries the objective and an optional
``=status= optimal|infeasible|limit_reached`` line the solve status.
Missing variables read as zero.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..instances import Instance, edge_endpoints, edge_index, num_edges
from ..model import IlpModel, LinearConstraint
from ..subtours import IntegerSolution
from .base import BackendError, SolveOutcome, SolveStatus

_TERMS_PER_LINE = 8
_VAR_RE = re.compile(r"^x_(\d+)_(\d+)$")


def var_name(idx: int) -> str:
    u, v = edge_endpoints(idx)
    return f"x_{u}_{v}"


def var_index(name: str) -> int:
    mt = _VAR_RE.match(name)
    if not mt:
        raise ValueError(f"not an edge variable: {name!r}")
    return edge_index(int(mt.group(1)), int(mt.group(2)))


def _linear(terms) -> list[str]:
    parts = []
    for i, (idx, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        coef = "" if mag == 1 else f"{mag} "
        if i == 0:
            parts.append(f"{'-' if c < 0 else ''}{coef}{var_name(idx)}")
        else:
            parts.append(f"{sign} {coef}{var_name(idx)}")
    lines = []
    for k in range(0, len(parts), _TERMS_PER_LINE):
        lines.append("   " + " ".join(parts[k:k + _TERMS_PER_LINE]))
    return lines


def write_lp(model: IlpModel) -> str:
    m = model.num_vars
    out = [f"\\ {model.inst.name} n={model.n}", "Minimize"]
    # zero weights are written as "0 x_u_v" so every variable appears
    out.append(" obj:")
    out.extend(_linear([(i, int(model.objective[i])) for i in range(m)]))
    out.append("Subject To")
    for row in model.rows:
        out.append(f" {row.name}:")
        lines = _linear(row.terms)
        lines[-1] += f" {row.sense} {row.rhs}"
        out.extend(lines)
    out.append("Binary")
    for k in range(0, m, _TERMS_PER_LINE):
        out.append("   " + " ".join(var_name(i) for i in range(k, min(m, k + _TERMS_PER_LINE))))
    out.append("End")
    return "\n".join(out) + "\n"


@dataclass
class LpContent:
    objective: dict[int, int]
    rows: list[LinearConstraint]
    binaries: list[int]
    n: int


_SENSES = {"<=": "<=", "=<": "<=", "<": "<=", ">=": ">=", "=>": ">=", ">": ">=", "=": "="}


def _parse_linear(tokens: list[str]) -> list[tuple[int, int]]:
    terms: list[tuple[int, int]] = []
    sign = 1
    coef: int | None = None
    for tok in tokens:
        if tok in ("+", "-"):
            sign = -1 if tok == "-" else 1
            continue
        if _VAR_RE.match(tok.lstrip("+-")):
            if tok[0] in "+-":
                sign = -1 if tok[0] == "-" else 1
                tok = tok[1:]
            c = sign * (1 if coef is None else coef)
            terms.append((var_index(tok), c))
            sign, coef = 1, None
            continue
        coef = int(float(tok))
    return terms


def read_lp(text: str) -> LpContent:
    """Parse LP text of the shape produced by :func:`write_lp`."""
    section = None
    chunks: dict[str, list[list[str]]] = {"obj": [], "rows": [], "bin": []}
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        low = line.lower()
        if low in ("minimize", "minimise", "min"):
            section = "obj"
            continue
        if low in ("subject to", "st", "s.t.", "such that"):
            section = "rows"
            continue
        if low in ("binary", "binaries", "bin"):
            section = "bin"
            continue
        if low == "end":
            break
        if section is None:
            raise ValueError(f"LP text outside any section: {line!r}")
        toks = line.split()
        if ":" in toks[0]:
            label, _, rest = line.partition(":")
            chunks[section].append([label.strip()] + rest.split())
        elif section == "bin" or not chunks[section]:
            chunks[section].append([""] + toks)
        else:
            chunks[section][-1].extend(toks)

    objective: dict[int, int] = {}
    for chunk in chunks["obj"]:
        for idx, c in _parse_linear(chunk[1:]):
            objective[idx] = objective.get(idx, 0) + c
    rows = []
    for chunk in chunks["rows"]:
        name, toks = chunk[0], chunk[1:]
        k = next(i for i, t in enumerate(toks) if t in _SENSES)
        terms = _parse_linear(toks[:k])
        rows.append(LinearConstraint(tuple(sorted(terms)), _SENSES[toks[k]], int(toks[k + 1]), name))
    binaries = sorted(var_index(t) for chunk in chunks["bin"] for t in chunk[1:])
    m = max(binaries) + 1 if binaries else 0
    n = edge_endpoints(m - 1)[1] + 1 if m else 0
    if num_edges(n) != m:
        raise ValueError(f"binary section lists {m} variables, not a complete graph")
    return LpContent(objective, rows, binaries, n)


def model_from_lp(text: str) -> IlpModel:
    """Rebuild an :class:`IlpModel` from LP text (objective becomes the weights)."""
    lp = read_lp(text)
    w = np.zeros(num_edges(lp.n), dtype=np.int64)
    for idx, c in lp.objective.items():
        w[idx] = c
    inst = Instance(lp.n, w, "lp", "explicit")
    deg = [r for r in lp.rows if r.name.startswith("d")]
    sec = [r for r in lp.rows if not r.name.startswith("d")]
    return IlpModel(inst, deg, sec)


def write_solution(outcome: SolveOutcome, m: int) -> str:
    lines = [f"=status= {outcome.status.value}"]
    if outcome.objective is not None:
        lines.append(f"=obj= {outcome.objective}")
    chosen = outcome.best_solution.chosen if outcome.best_solution else frozenset()
    for i in range(m):
        lines.append(f"{var_name(i)} {1 if i in chosen else 0}")
    return "\n".join(lines) + "\n"


def read_solution(text: str, tol: float = 1e-6) -> SolveOutcome:
    status = None
    objective = None
    chosen = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise BackendError(f"solution line {lineno}: expected 'name value', got {raw!r}")
        name, val = parts
        if name == "=status=":
            try:
                status = SolveStatus(val)
            except ValueError:
                raise BackendError(f"solution line {lineno}: unknown status {val!r}") from None
            continue
        if name == "=obj=":
            objective = float(val)
            continue
        x = float(val)
        r = round(x)
        if abs(x - r) > tol or r not in (0, 1):
            raise BackendError(f"solution line {lineno}: {name} = {val} is not binary")
        if r == 1:
            chosen.append(var_index(name))
    if status is None:
        status = SolveStatus.OPTIMAL if chosen else SolveStatus.INFEASIBLE
    sol = IntegerSolution.of(chosen) if chosen else None
    obj = None if objective is None else int(round(objective))
    return SolveOutcome(status, sol, obj)
