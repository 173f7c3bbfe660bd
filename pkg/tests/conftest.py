"""Shared pytest hooks: a per-criterion pass/fail summary for the acceptance suite."""

import pytest

_outcomes = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    failed = report.failed
    passed = report.when == "call" and report.passed
    entry = _outcomes.setdefault(n, {"title": marker.kwargs.get("title", ""), "ok": True, "ran": False})
    if failed:
        entry["ok"] = False
    if passed or failed:
        entry["ran"] = True


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        e = _outcomes[n]
        status = "PASS" if e["ok"] and e["ran"] else "FAIL" if e["ran"] else "SKIP"
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {e['title']}")
