import re
import warnings

import pytest

from besseltra.errors import AsymptoticTruncationWarning

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_results = {}


@pytest.fixture
def quiet_truncation():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AsymptoticTruncationWarning)
        yield


def pytest_runtest_logreport(report):
    match = _CRITERION.search(report.nodeid)
    if match is None or "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        number = int(match.group(1))
        name = report.nodeid.split("::")[-1]
        measured = dict(report.user_properties).get("measured", "")
        entry = _results.setdefault(number, {})
        if report.when == "call" or name not in entry:
            entry[name] = (report.outcome, measured)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        parts = _results[number]
        ok = all(outcome == "passed" for outcome, _ in parts.values())
        tr.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}")
        for name, (outcome, measured) in parts.items():
            label = name.split("_", 3)[-1]
            tr.write_line(f"    {outcome.upper():6s} {label}: {measured}")
