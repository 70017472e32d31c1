import pytest

_criteria: dict[int, tuple[str, bool, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    failed = report.failed
    if report.when == "call" or failed:
        prev = _criteria.get(number)
        ok = (prev is None or prev[1]) and report.passed
        _criteria[number] = (title, ok, report.duration + (prev[2] if prev else 0.0))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, secs = _criteria[number]
        terminalreporter.write_line(f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title} ({secs:.1f}s)")
