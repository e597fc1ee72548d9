import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_acceptance: list[tuple[str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.get_closest_marker("acceptance") and report.when == "call":
        _acceptance.append((item.name, "PASS" if report.passed else "FAIL"))
    elif item.get_closest_marker("acceptance") and report.when == "setup" and report.failed:
        _acceptance.append((item.name, "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _acceptance:
        terminalreporter.write_line(f"{status}  {name}")
