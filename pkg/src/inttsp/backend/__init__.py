from .base import (Backend, BackendCapabilities, BackendError, CapacityError,
                   SolveLimits, SolveOutcome, SolveStatus, check_optimal, tour_edges)
from .command import CommandBackend
from .lpfile import model_from_lp, read_lp, read_solution, write_lp, write_solution
from .reference import ReferenceBackend, reference_solve

__all__ = [
    "Backend", "BackendCapabilities", "BackendError", "CapacityError", "CommandBackend",
    "ReferenceBackend", "SolveLimits", "SolveOutcome", "SolveStatus", "check_optimal",
    "make_backend", "model_from_lp", "read_lp", "read_solution", "reference_solve",
    "tour_edges", "write_lp", "write_solution",
]


def make_backend(spec: str) -> Backend:
    """``reference``, ``reference:CAP``, ``highs`` or ``cmd:TEMPLATE``."""
    if spec == "reference":
        return ReferenceBackend()
    if spec.startswith("reference:"):
        return ReferenceBackend(cap=int(spec.split(":", 1)[1]))
    if spec == "highs":
        from .highs import HighsBackend

        return HighsBackend()
    if spec.startswith("cmd:"):
        return CommandBackend(spec[4:])
    raise ValueError(f"unknown backend {spec!r}")
