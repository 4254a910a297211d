"""Shared pytest plumbing: collect acceptance report lines and echo them
in the terminal summary, so the per-criterion PASS/FAIL lines are visible
even when output capture is on."""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
