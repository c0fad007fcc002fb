"""Per-criterion summary lines for the acceptance suite."""

import pytest

_results = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__.rsplit(".", 1)[-1] != "test_acceptance":
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _results.append((report.passed, doc, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for passed, doc, duration in _results:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {doc} ({duration:.2f} s)")
