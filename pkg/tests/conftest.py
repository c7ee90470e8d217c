"""Shared pytest plumbing: the acceptance criteria summary."""

CRITERIA_LINES = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    CRITERIA_LINES.append((number, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(CRITERIA_LINES):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {detail}")
