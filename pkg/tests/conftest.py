"""Shared pytest wiring: the acceptance-criteria summary.

Tests marked ``@pytest.mark.acceptance(criterion=N, title=...)`` are
aggregated per criterion number and reported as one PASS/FAIL line each at
the end of the run.
"""

import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(criterion, title): groups a test under one numbered acceptance criterion",
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    entry = _results.setdefault(
        mark.kwargs["criterion"], {"title": mark.kwargs["title"], "ok": True}
    )
    if report.failed:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        entry = _results[number]
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {entry['title']}")
