"""Solve an LP file with the reference backend and write a solution file.

Usage: ``python -m inttsp.backend.lpsolve MODEL.lp SOLUTION.sol``.  Useful
as a stand-in external solver for the command backend.
"""

from __future__ import annotations

import sys
from pathlib import Path

from .lpfile import model_from_lp, write_solution
from .reference import reference_solve


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 2:
        print("usage: python -m inttsp.backend.lpsolve MODEL.lp SOLUTION.sol", file=sys.stderr)
        return 64
    model = model_from_lp(Path(args[0]).read_text(encoding="utf-8"))
    outcome = reference_solve(model)
    Path(args[1]).write_text(write_solution(outcome, model.num_vars), encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
