"""Black-box MILP solvers driven through files and a command template.

The template is split shell-style; ``{lp}`` and ``{sol}`` are replaced by
the model and solution paths in every token, e.g.::

    CommandBackend('scip -c "read {lp} opt write solution {sol} quit"')

Extra solver flags are passed verbatim as part of the template.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
from pathlib import Path
from typing import Sequence

from ..model import IlpModel
from .base import (BackendCapabilities, BackendError, SolveLimits, SolveOutcome,
                   SolveStatus, check_optimal)
from .lpfile import read_solution, write_lp


class CommandBackend:
    name = "cmd"
    capabilities = BackendCapabilities(reports_incumbents=False, accepts_warm_start=False,
                                       deterministic=True)

    def __init__(self, template: str, workdir: str | None = None):
        if "{lp}" not in template or "{sol}" not in template:
            raise ValueError("command template needs both {lp} and {sol} placeholders")
        self.template = template
        self.workdir = workdir

    def __repr__(self) -> str:
        return f"CommandBackend({self.template!r})"

    def command(self, lp: str, sol: str) -> list[str]:
        return [tok.replace("{lp}", lp).replace("{sol}", sol) for tok in shlex.split(self.template)]

    def solve(self, model: IlpModel, warm_start: Sequence[int] | None = None,
              limits: SolveLimits | None = None) -> SolveOutcome:
        limits = limits or SolveLimits()
        with tempfile.TemporaryDirectory(dir=self.workdir, prefix="inttsp-") as tmp:
            lp = Path(tmp) / "model.lp"
            sol = Path(tmp) / "model.sol"
            lp.write_text(write_lp(model), encoding="utf-8")
            cmd = self.command(str(lp), str(sol))
            try:
                proc = subprocess.run(cmd, capture_output=True, text=True,
                                      timeout=limits.time_limit_seconds)
            except subprocess.TimeoutExpired:
                return SolveOutcome(SolveStatus.LIMIT_REACHED)
            except OSError as exc:
                raise BackendError(f"cannot run {cmd[0]!r}: {exc}") from exc
            if proc.returncode != 0:
                raise BackendError(
                    f"solver exited with status {proc.returncode}\n"
                    f"stdout:\n{proc.stdout[-2000:]}\nstderr:\n{proc.stderr[-2000:]}"
                )
            if not sol.exists():
                raise BackendError(f"solver wrote no solution file\nstderr:\n{proc.stderr[-2000:]}")
            outcome = read_solution(sol.read_text(encoding="utf-8"))
        return check_optimal(model, outcome)
