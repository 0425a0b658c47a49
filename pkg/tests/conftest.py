"""Shared fixtures plus the end-of-run acceptance summary hook."""

import pytest

_acceptance = []


@pytest.fixture
def acceptance_line():
    """Record one pass/fail line for the acceptance summary section."""

    def _record(criterion: int, passed: bool, detail: str):
        verdict = "PASS" if passed else "FAIL"
        _acceptance.append((criterion, f"criterion {criterion:02d} {verdict}  {detail}"))

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_acceptance):
        terminalreporter.write_line(line)
