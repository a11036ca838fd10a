import pytest

# criterion number -> (title, passed); filled by tests/test_acceptance.py
ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    crit = item.get_closest_marker("criterion")
    if crit is None or rep.when != "call":
        return
    num, title = crit.args
    ACCEPTANCE[num] = (title, rep.passed)
    line = f"[acceptance {num:2d}] {'PASS' if rep.passed else 'FAIL'}  {title}"
    item.config.pluginmanager.get_plugin("terminalreporter").write_line(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[num]
        terminalreporter.write_line(f"{num:2d}. {'PASS' if ok else 'FAIL'}  {title}")
