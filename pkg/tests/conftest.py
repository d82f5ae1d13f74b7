import pytest

# (number, title, passed) rows filled in by test_acceptance.py
ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record a PASS or FAIL line for one acceptance criterion."""
    marker = request.node.get_closest_marker("criterion")
    number, title = marker.args
    yield
    failed = getattr(request.node, "rep_call", None)
    passed = failed is not None and failed.passed
    ACCEPTANCE.append((number, title, passed))
    line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {title}"
    print(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number}: {title}")
