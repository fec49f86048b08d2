import pytest

from dhc.dsl import bundled_rules, bundled_snapshot


@pytest.fixture(scope="session")
def catalog():
    return bundled_rules()


@pytest.fixture(scope="session")
def rule170(catalog):
    return catalog["ukhc_170"].automaton


@pytest.fixture(scope="session")
def rule171(catalog):
    return catalog["ukhc_171"].automaton


@pytest.fixture(scope="session")
def snap():
    return bundled_snapshot


_ACCEPTANCE: dict = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome; filled in by the test body."""
    entry = {"id": request.node.name, "detail": "", "passed": False}
    yield entry
    _ACCEPTANCE[request.node.name] = entry


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and "criterion" in item.fixturenames:
        item.funcargs["criterion"]["passed"] = rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n.split("_")[1])):
        e = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if e['passed'] else 'FAIL'}  {name}: {e['detail']}")
