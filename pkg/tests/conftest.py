"""Shared test plumbing: collects acceptance-criterion verdicts and prints
them as one line each at the end of the run."""

ACCEPTANCE_RESULTS = []


def record_acceptance(line: str):
    ACCEPTANCE_RESULTS.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(line)
