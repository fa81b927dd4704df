import pytest

from k3carpets.carpets import CarpetParams
from k3carpets.pipeline import resolution_for

ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail=""):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def res66():
    return resolution_for(CarpetParams(6, 6))
