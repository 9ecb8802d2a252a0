"""Per-criterion summary for the acceptance suite.

Tests marked ``criterion(k)`` are grouped by ``k``; a criterion passes when
every one of its tests passes.  Tests may attach a ``("detail", text)``
user property, shown on the summary line.
"""

from collections import defaultdict

import pytest

_results = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        details = [v for k, v in item.user_properties if k == "detail"]
        _results[mark.args[0]].append((item.name, rep.passed, details))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_results):
        rows = _results[k]
        failed = [name for name, ok, _ in rows if not ok]
        status = "PASS" if not failed else "FAIL"
        notes = "; ".join(d for _, _, ds in rows for d in ds if len(rows) == 1)
        if failed:
            notes = f"{len(failed)}/{len(rows)} checks failed: " + ", ".join(failed)
        elif len(rows) > 1:
            notes = f"{len(rows)} checks passed"
        tr.write_line(f"criterion {k}: {status}  {notes}")
