"""Shared pytest hooks for the suite.

The acceptance tests each print one ``ACCEPTANCE CRITERION n: ...`` verdict
line.  Default output capture hides those lines when a test passes, so this
plugin collects them from captured stdout (and synthesizes a FAIL line when a
criterion test errors before announcing) and replays them in the terminal
summary, where they are visible in any ``pytest`` run without ``-s``.
"""

from __future__ import annotations

import re

_CRITERION_TAG = "ACCEPTANCE CRITERION"
_CRITERION_TEST = re.compile(r"test_criterion_(\d+)")

_verdict_lines: dict[int, str] = {}


def pytest_runtest_logreport(report) -> None:
    if report.when != "call":
        return
    match = _CRITERION_TEST.search(report.nodeid)
    if match is None:
        return
    number = int(match.group(1))
    for line in (report.capstdout or "").splitlines():
        if _CRITERION_TAG in line:
            _verdict_lines[number] = line
            break
    else:
        if report.failed:
            _verdict_lines[number] = (
                f"{_CRITERION_TAG} {number}: FAIL — see {report.nodeid}"
            )


def pytest_terminal_summary(terminalreporter) -> None:
    if not _verdict_lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_verdict_lines):
        terminalreporter.write_line(_verdict_lines[number])
