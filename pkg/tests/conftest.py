"""Shared fixtures: the acceptance-criteria result lines."""

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    """Record and print one PASS/FAIL line per acceptance criterion."""

    def log(name, ok, detail):
        line = f"criterion {name}: {'PASS' if ok else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
