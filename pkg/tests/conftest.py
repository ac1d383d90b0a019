from pathlib import Path

import pytest

from distbh import golden

FIXTURE = Path(__file__).parent / "fixtures" / "golden.txt"

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def golden_records():
    return golden.read_fixture(FIXTURE)


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""
    def report(label, ok, detail):
        _ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        print(_ACCEPTANCE[-1])
        assert ok, detail
    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
