import time

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SUITE_BUDGET_S = 120.0
_acceptance_lines: list[str] = []
_started = time.perf_counter()


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion and print it."""
    def record(criterion: str, ok: bool, detail: str) -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
        print(line)
        _acceptance_lines.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = time.perf_counter() - _started
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
    ok = elapsed <= SUITE_BUDGET_S
    terminalreporter.write_line(
        f"[{'PASS' if ok else 'FAIL'}] suite runtime: {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s)")


def pytest_sessionfinish(session, exitstatus):
    if time.perf_counter() - _started > SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1
