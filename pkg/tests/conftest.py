"""Session hooks: collect acceptance lines and report the overall wall time."""

import time

import pytest

BUDGET_SECONDS = 120.0
ACCEPTANCE_LINES: list[str] = []
_START = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = time.perf_counter() - _START
    ok = elapsed < BUDGET_SECONDS
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    terminalreporter.write_line(
        f"{'PASS' if ok else 'FAIL'} runtime: full suite wall time {elapsed:.1f} s (budget {BUDGET_SECONDS:.0f} s)")


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES
