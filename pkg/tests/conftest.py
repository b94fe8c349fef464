import sys
from contextlib import contextmanager
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_LINES: list[tuple[int, str]] = []


class AcceptanceLog:
    @contextmanager
    def criterion(self, number: int, title: str):
        """Record one PASS/FAIL line for ``number``; the body's ``note`` list adds detail."""
        notes: list[str] = []
        try:
            yield notes
        except BaseException as exc:
            reason = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
            _LINES.append((number, f"criterion {number}: FAIL  {title}  [{reason}]"))
            raise
        detail = f"  ({'; '.join(notes)})" if notes else ""
        _LINES.append((number, f"criterion {number}: PASS  {title}{detail}"))


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES, key=lambda t: t[0]):
            terminalreporter.write_line(line)
