"""Collects acceptance-test outcomes and prints one line per criterion."""

from collections import defaultdict

import pytest

_outcomes: dict[int, list[tuple[str, str]]] = defaultdict(list)
_notes: dict[int, list[str]] = defaultdict(list)


@pytest.fixture
def note(request):
    """Attach a free-form line to the current test's criterion summary."""
    n = request.node.get_closest_marker("criterion").args[0]
    return _notes[n].append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes[marker.args[0]].append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        results = _outcomes[n]
        failed = [name for name, out in results if out != "passed"]
        status = "PASS" if not failed else "FAIL"
        detail = f"{len(results) - len(failed)}/{len(results)} checks"
        if failed:
            detail += "; failing: " + ", ".join(failed)
        terminalreporter.write_line(f"criterion {n}: {status} ({detail})")
        for line in _notes.get(n, []):
            terminalreporter.write_line(f"    {line}")
