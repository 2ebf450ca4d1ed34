"""Shared test plumbing: collect acceptance verdicts and echo them at the end.

Verdict lines are printed inside the tests too, but stdout of passing tests
is captured; repeating them in the terminal summary makes every run show
one line per acceptance criterion.
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
