"""Shared test plumbing.

The acceptance tests report one summary line per criterion; printing them
in a terminal-summary section keeps the lines visible under plain
``pytest -v`` (where passing tests hide their stdout).
"""

from __future__ import annotations

from acceptance_report import RESULTS


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        status, summary = RESULTS[number]
        terminalreporter.write_line(f"[criterion {number}] {status} - {summary}")
