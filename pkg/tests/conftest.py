from __future__ import annotations

import pytest

from mvresp.scenario_io import load_fixture

_CRITERIA: dict[str, bool] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the terminal summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    label = marker.args[0]
    _CRITERIA[label] = _CRITERIA.get(label, True) and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for label in sorted(_CRITERIA):
        terminalreporter.write_line(f"{'PASS' if _CRITERIA[label] else 'FAIL'}  {label}")


@pytest.fixture(scope="session")
def fixture_scenario():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_fixture(name)
        return cache[name]

    return get
