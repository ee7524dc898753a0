"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""

import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or report.when not in ("setup", "call"):
        return
    number, title = mark.args
    entry = _RESULTS.setdefault(number, {"title": title, "ok": True, "seconds": 0.0})
    if report.failed or (report.when == "call" and report.skipped):
        entry["ok"] = False
    if report.when == "call":
        entry["seconds"] += report.duration
        for key, value in item.user_properties:
            if key == "detail":
                entry["detail"] = value


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        e = _RESULTS[number]
        line = f"{'PASS' if e['ok'] else 'FAIL'} {number:2d} {e['title']} ({e['seconds']:.1f} s)"
        if e.get("detail"):
            line += f": {e['detail']}"
        terminalreporter.write_line(line)
