import os

# keep test runs on the small sandbox from oversubscribing
os.environ.setdefault("NUMBA_NUM_THREADS", str(os.cpu_count() or 1))

CRITERION_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
