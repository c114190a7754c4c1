"""Shared plumbing for the test suite.

The acceptance module records one PASS/FAIL line per criterion; echoing
them through the terminal-summary hook keeps them visible even when
pytest captures stdout.
"""

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    print(line)
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
